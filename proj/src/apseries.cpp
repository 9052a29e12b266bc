#include "pipeflow/apseries.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "pipeflow/util.hpp"

namespace pipeflow {

namespace {

double dedup_tolerance(double max_abs) {
  return max_abs > 0 ? 1e-12 * max_abs : 0.0;
}

std::vector<double> dedup_sorted(std::vector<double> v, double tol) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v) {
    if (out.empty() || std::abs(x - out.back()) > tol)
      out.push_back(x);
  }
  return out;
}

}  // namespace

APSeries APSeries::from_terms(const std::vector<APTerm>& raw) {
  double max_abs_xi = 0.0;
  for (const auto& t : raw) max_abs_xi = std::max(max_abs_xi, std::abs(t.xi));
  const double tol = dedup_tolerance(max_abs_xi);

  // Merge numerically equal frequencies by coefficient summation.
  std::vector<APTerm> merged;
  std::vector<APTerm> sorted = raw;
  std::sort(sorted.begin(), sorted.end(),
            [](const APTerm& a, const APTerm& b) { return a.xi < b.xi; });
  for (const auto& t : sorted) {
    if (!merged.empty() && std::abs(t.xi - merged.back().xi) <= tol)
      merged.back().c += t.c;
    else
      merged.push_back(t);
  }

  // Symmetrize: complete missing conjugate partners, verify explicit ones.
  std::vector<APTerm> out;
  for (const auto& t : merged) {
    if (std::abs(t.c) == 0.0) continue;
    if (std::abs(t.xi) <= tol) {
      if (std::abs(t.c.imag()) > 1e-12 * std::abs(t.c))
        throw std::invalid_argument("APSeries: zero-frequency coefficient must be real");
      out.push_back({0.0, Complex(t.c.real(), 0.0)});
      continue;
    }
    auto partner = std::find_if(merged.begin(), merged.end(), [&](const APTerm& u) {
      return std::abs(u.xi + t.xi) <= tol;
    });
    if (partner == merged.end()) {
      out.push_back(t);
      out.push_back({-t.xi, std::conj(t.c)});
    } else {
      if (std::abs(partner->c - std::conj(t.c)) > 1e-9 * (std::abs(t.c) + 1e-300))
        throw std::invalid_argument(
            "APSeries: explicit conjugate pair violates realness");
      if (t.xi > 0.0) {  // store each pair once, from its positive member
        out.push_back(t);
        out.push_back({-t.xi, std::conj(t.c)});
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const APTerm& a, const APTerm& b) { return a.xi < b.xi; });
  APSeries f;
  f.terms_ = std::move(out);
  return f;
}

APSeries APSeries::cosine(double xi, double amp) {
  return from_terms({{xi, Complex(amp / 2.0, 0.0)}});
}

APSeries APSeries::constant(double value) {
  return from_terms({{0.0, Complex(value, 0.0)}});
}

std::vector<double> APSeries::spectrum() const {
  std::vector<double> s;
  s.reserve(terms_.size());
  for (const auto& t : terms_) s.push_back(t.xi);
  return s;
}

Complex APSeries::coefficient(double xi) const {
  double max_abs = 0.0;
  for (const auto& t : terms_) max_abs = std::max(max_abs, std::abs(t.xi));
  const double tol = std::max(dedup_tolerance(max_abs), 1e-300);
  for (const auto& t : terms_)
    if (std::abs(t.xi - xi) <= tol) return t.c;
  return Complex(0.0, 0.0);
}

double APSeries::evaluate_checked(double t, double* imag_residue) const {
  Complex sum(0.0, 0.0);
  for (const auto& term : terms_)
    sum += term.c * std::exp(Complex(0.0, term.xi * t));
  if (imag_residue) *imag_residue = std::abs(sum.imag());
  return sum.real();
}

double APSeries::evaluate(double t) const { return evaluate_checked(t, nullptr); }

APSeries APSeries::derivative() const {
  std::vector<APTerm> d;
  d.reserve(terms_.size());
  for (const auto& t : terms_)
    d.push_back({t.xi, Complex(0.0, t.xi) * t.c});
  return from_terms(d);
}

APSeries APSeries::scaled(double s) const {
  std::vector<APTerm> r;
  r.reserve(terms_.size());
  for (const auto& t : terms_) r.push_back({t.xi, s * t.c});
  return from_terms(r);
}

APSeries APSeries::plus(const APSeries& other) const {
  std::vector<APTerm> r = terms_;
  r.insert(r.end(), other.terms_.begin(), other.terms_.end());
  return from_terms(r);
}

double APSeries::besicovitch_norm(double s) const {
  double acc = 0.0;
  for (const auto& t : terms_)
    acc += std::pow(1.0 + t.xi * t.xi, s) * std::norm(t.c);
  return std::sqrt(acc);
}

double APSeries::phi_star() const {
  double acc = 0.0;
  for (const auto& t : terms_) acc += (1.0 + std::abs(t.xi)) * std::abs(t.c);
  return acc;
}

double APSeries::sum_abs_coeff() const {
  double acc = 0.0;
  for (const auto& t : terms_) acc += std::abs(t.c);
  return acc;
}

APSeries APSeries::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("APSeries: cannot open " + file.string());
  std::vector<APTerm> raw;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double xi, re, im;
    if (!(ls >> xi)) continue;  // blank or comment-only line
    if (!(ls >> re >> im))
      throw std::runtime_error("APSeries: parse error at " + file.string() + ":" +
                               std::to_string(lineno));
    raw.push_back({xi, Complex(re, im)});
  }
  return from_terms(raw);
}

void APSeries::save(const std::filesystem::path& file) const {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("APSeries: cannot write " + file.string());
  out << "# frequency re im\n";
  for (const auto& t : terms_)
    out << format_double(t.xi) << ' ' << format_double(t.c.real()) << ' '
        << format_double(t.c.imag()) << '\n';
}

SampledSignal sample(const APSeries& f, double t0, double dt, std::size_t n,
                     bool with_derivative) {
  if (dt <= 0.0) throw std::invalid_argument("sample: dt must be positive");
  SampledSignal g;
  g.t0 = t0;
  g.dt = dt;
  g.values.resize(n);
  const APSeries df = with_derivative ? f.derivative() : APSeries();
  if (with_derivative) g.derivative.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t0 + dt * double(i);
    g.values[i] = f.evaluate(t);
    if (with_derivative) g.derivative[i] = df.evaluate(t);
  }
  return g;
}

namespace {

// Trapezoid integral of g^p (or |g|) over samples [i0, i1].
double window_integral_pow(const SampledSignal& g, std::size_t i0, std::size_t i1,
                           double p) {
  double acc = 0.0;
  for (std::size_t i = i0; i < i1; ++i) {
    const double fa = std::pow(std::abs(g.values[i]), p);
    const double fb = std::pow(std::abs(g.values[i + 1]), p);
    acc += 0.5 * (fa + fb) * g.dt;
  }
  return acc;
}

std::size_t snap_steps(double length, double dt) {
  return static_cast<std::size_t>(std::llround(length / dt));
}

}  // namespace

std::vector<double> mean_operator(const SampledSignal& g, const std::vector<double>& windows) {
  std::vector<double> out;
  out.reserve(windows.size());
  for (double R : windows) {
    if (R <= 0.0) throw std::invalid_argument("mean_operator: window must be positive");
    if (-R < g.t0 - 0.5 * g.dt || R > g.t_end() + 0.5 * g.dt)
      throw std::invalid_argument("mean_operator: window exceeds sampled span");
    const std::size_t iL = snap_steps(-R - g.t0, g.dt);
    const std::size_t iR = snap_steps(R - g.t0, g.dt);
    if (iR <= iL || iR >= g.values.size())
      throw std::invalid_argument("mean_operator: window exceeds sampled span");
    double acc = 0.0;
    for (std::size_t i = iL; i < iR; ++i)
      acc += 0.5 * (g.values[i] + g.values[i + 1]) * g.dt;
    const double width = g.dt * double(iR - iL);
    out.push_back(acc / width);
  }
  return out;
}

Complex fourier_coefficient(const SampledSignal& g, double lambda, double R) {
  if (R <= 0.0) throw std::invalid_argument("fourier_coefficient: R must be positive");
  if (-R < g.t0 - 0.5 * g.dt || R > g.t_end() + 0.5 * g.dt)
    throw std::invalid_argument("fourier_coefficient: span shorter than 2R");
  const std::size_t iL = snap_steps(-R - g.t0, g.dt);
  const std::size_t iR = snap_steps(R - g.t0, g.dt);
  if (iR <= iL || iR >= g.values.size())
    throw std::invalid_argument("fourier_coefficient: span shorter than 2R");
  Complex acc(0.0, 0.0);
  auto f = [&](std::size_t i) {
    const double t = g.t0 + g.dt * double(i);
    return g.values[i] * std::exp(Complex(0.0, -lambda * t));
  };
  Complex prev = f(iL);
  for (std::size_t i = iL; i < iR; ++i) {
    const Complex next = f(i + 1);
    acc += 0.5 * (prev + next) * g.dt;
    prev = next;
  }
  const double width = g.dt * double(iR - iL);
  return acc / width;
}

double stepanov_norm(const SampledSignal& g, double p, double r) {
  if (p < 1.0) throw std::invalid_argument("stepanov_norm: p must be >= 1");
  if (r <= 0.0) throw std::invalid_argument("stepanov_norm: r must be positive");
  const std::size_t steps = snap_steps(r, g.dt);
  if (steps == 0 || steps >= g.values.size())
    throw std::invalid_argument("stepanov_norm: span shorter than r");
  const double width = g.dt * double(steps);
  double sup = 0.0;
  for (std::size_t i0 = 0; i0 + steps < g.values.size(); ++i0) {
    const double v = window_integral_pow(g, i0, i0 + steps, p) / width;
    sup = std::max(sup, v);
  }
  return std::pow(sup, 1.0 / p);
}

double h1_uloc_norm(const SampledSignal& g) {
  if (!g.has_derivative() || g.derivative.size() != g.values.size())
    throw std::invalid_argument("h1_uloc_norm: derivative track required");
  const std::size_t steps = snap_steps(1.0, g.dt);
  if (steps == 0 || steps >= g.values.size())
    throw std::invalid_argument("h1_uloc_norm: span shorter than 1");
  double sup = 0.0;
  for (std::size_t i0 = 0; i0 + steps < g.values.size(); ++i0) {
    double acc = 0.0;
    for (std::size_t i = i0; i < i0 + steps; ++i) {
      const double fa = g.values[i] * g.values[i] + g.derivative[i] * g.derivative[i];
      const double fb = g.values[i + 1] * g.values[i + 1] +
                        g.derivative[i + 1] * g.derivative[i + 1];
      acc += 0.5 * (fa + fb) * g.dt;
    }
    sup = std::max(sup, acc);
  }
  return std::sqrt(sup);
}

AlmostPeriodScan almost_period_scan(const SampledSignal& g, double eps,
                                    double search_span) {
  if (eps <= 0.0) throw std::invalid_argument("almost_period_scan: eps must be positive");
  if (g.span() < 2.0 * search_span)
    throw std::invalid_argument("almost_period_scan: span must cover 2*search_span");
  const std::size_t n = g.values.size();
  const std::size_t kmax = std::min<std::size_t>(snap_steps(search_span, g.dt), n - 1);
  AlmostPeriodScan scan;
  double prev_accepted = 0.0;
  scan.max_gap = 0.0;
  for (std::size_t k = 1; k <= kmax; ++k) {
    double defect = 0.0;
    for (std::size_t i = 0; i + k < n; ++i)
      defect = std::max(defect, std::abs(g.values[i + k] - g.values[i]));
    if (defect <= eps) {
      const double T = g.dt * double(k);
      scan.max_gap = std::max(scan.max_gap, T - prev_accepted);
      prev_accepted = T;
      scan.accepted.push_back({T, defect});
    }
  }
  if (scan.accepted.empty())
    scan.max_gap = std::numeric_limits<double>::infinity();
  return scan;
}

std::vector<double> zmodule_truncation(const std::vector<double>& generators, int N) {
  if (generators.empty())
    throw std::invalid_argument("zmodule_truncation: generators must be nonempty");
  for (double gv : generators)
    if (gv == 0.0) throw std::invalid_argument("zmodule_truncation: zero generator");
  if (N < 0) throw std::invalid_argument("zmodule_truncation: N must be nonnegative");
  if (std::pow(2.0 * N + 1.0, double(generators.size())) > 2e7)
    throw std::invalid_argument("zmodule_truncation: enumeration too large");

  double max_abs = 0.0;
  for (double gv : generators) max_abs = std::max(max_abs, std::abs(gv));
  const double tol = dedup_tolerance(max_abs);

  std::vector<double> values{0.0};
  // depth-first over integer weights with |a_1| + ... + |a_k| <= N
  std::function<void(std::size_t, int, double)> rec = [&](std::size_t idx, int budget,
                                                          double acc) {
    if (idx == generators.size()) {
      values.push_back(acc);
      return;
    }
    for (int a = -budget; a <= budget; ++a)
      rec(idx + 1, budget - std::abs(a), acc + a * generators[idx]);
  };
  rec(0, N, 0.0);
  return dedup_sorted(std::move(values), tol);
}

namespace {

// Continued-fraction rational reconstruction. A ratio counts as rational only
// when a convergent p/q with q <= qmax matches it to machine precision (the
// accuracy a genuinely rational input carries after a handful of floating
// operations). Every real admits |x - p/q| ~ 1/q^2 approximations, so a
// looser acceptance would classify everything as rational; the machine-noise
// threshold separates exact ratios from generic irrationals as long as
// qmax stays well below 1/sqrt(eps) ~ 7e7.
bool rationalize(double x, std::int64_t qmax, std::int64_t* p_out,
                 std::int64_t* q_out) {
  const double accept = 32.0 * 2.220446049250313e-16 * std::max(1.0, std::abs(x));
  std::int64_t p0 = 1, q0 = 0;  // convergent k-1
  std::int64_t p1 = 0, q1 = 1;  // convergent k-2
  double frac = x;
  for (int it = 0; it < 64; ++it) {
    const double a_f = std::floor(frac);
    if (std::abs(a_f) > 9e17) break;
    const std::int64_t a = static_cast<std::int64_t>(a_f);
    if (std::abs(a_f * double(q0) + double(q1)) > 9e17 ||
        std::abs(a_f * double(p0) + double(p1)) > 9e17)
      break;
    const std::int64_t p2 = a * p0 + p1;
    const std::int64_t q2 = a * q0 + q1;
    if (q2 > qmax || q2 < 0) break;
    p1 = p0; q1 = q0; p0 = p2; q0 = q2;
    if (q0 > 0 && std::abs(x - double(p0) / double(q0)) <= accept) {
      *p_out = p0;
      *q_out = q0;
      return true;
    }
    const double rem = frac - a_f;
    if (rem < 1e-15) break;
    frac = 1.0 / rem;
  }
  return false;
}

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  a = std::abs(a);
  b = std::abs(b);
  while (b != 0) {
    const std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

ModuleSpec classify_module(const std::vector<double>& generators, double tol) {
  if (generators.empty())
    throw std::invalid_argument("classify_module: generators must be nonempty");
  ModuleSpec spec;
  spec.generators = generators;

  const double ref = generators.front();
  if (ref == 0.0) throw std::invalid_argument("classify_module: zero generator");
  // denominator bound 1/tol, capped below the machine-noise crossover where
  // irrational convergents become indistinguishable from exact ratios
  const auto qmax =
      static_cast<std::int64_t>(std::min(1.0 / tol, 1e6));

  // Express every generator as (p_i/q_i) * ref; any irrational ratio => dense.
  std::vector<std::int64_t> ps, qs;
  for (double gv : generators) {
    std::int64_t p = 0, q = 1;
    if (!rationalize(gv / ref, qmax, &p, &q)) {
      spec.classification = ModuleClass::dense;
      return spec;
    }
    ps.push_back(p);
    qs.push_back(q);
  }
  std::int64_t Q = 1;
  for (std::int64_t q : qs) {
    Q = Q / gcd64(Q, q) * q;
    if (Q > std::int64_t(4e15))
      throw std::runtime_error("classify_module: denominator blow-up");
  }
  std::int64_t g = 0;
  for (std::size_t i = 0; i < ps.size(); ++i) g = gcd64(g, ps[i] * (Q / qs[i]));
  spec.classification = ModuleClass::lattice;
  spec.kappa = std::abs(ref) * double(g) / double(Q);
  return spec;
}

std::vector<double> spectrum_convolution(const std::vector<double>& s1,
                                         const std::vector<double>& s2) {
  double max_abs = 0.0;
  for (double x : s1) max_abs = std::max(max_abs, std::abs(x));
  for (double x : s2) max_abs = std::max(max_abs, std::abs(x));
  std::vector<double> sums;
  sums.reserve(s1.size() * s2.size());
  for (double a : s1)
    for (double b : s2) sums.push_back(a + b);
  return dedup_sorted(std::move(sums), dedup_tolerance(max_abs));
}

}  // namespace pipeflow
