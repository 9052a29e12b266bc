#include "pipeflow/time_domain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "pipeflow/util.hpp"

namespace pipeflow {

FluxFunction FluxFunction::from_series(const APSeries& f) {
  FluxFunction fn;
  const APSeries df = f.derivative();
  fn.value = [f](double t) { return f.evaluate(t); };
  fn.slope = [df](double t) { return df.evaluate(t); };
  return fn;
}

FluxFunction FluxFunction::from_samples(const SampledSignal& g) {
  if (!g.has_derivative())
    throw std::invalid_argument("FluxFunction: derivative track required");
  auto interp = [g](const std::vector<double>& vals, double t) {
    const double s = (t - g.t0) / g.dt;
    if (s < -1e-9 || s > double(vals.size() - 1) + 1e-9)
      throw std::out_of_range("FluxFunction: t outside the sampled span");
    const std::size_t i =
        std::min<std::size_t>(vals.size() - 2, static_cast<std::size_t>(std::max(0.0, s)));
    const double w = s - double(i);
    return (1.0 - w) * vals[i] + w * vals[i + 1];
  };
  FluxFunction fn;
  fn.value = [g, interp](double t) { return interp(g.values, t); };
  fn.slope = [g, interp](double t) { return interp(g.derivative, t); };
  return fn;
}

std::vector<double> initial_condition(const EigenBasis& basis, double nu, double f0) {
  const std::size_t m = basis.size();
  if (m == 0) throw std::invalid_argument("initial_condition: empty basis");
  if (nu <= 0.0) throw std::invalid_argument("initial_condition: nu must be positive");
  double denom = 0.0;  // sum phi_k beta_k = chi0^2 / nu over the truncated basis
  std::vector<double> phi(m);
  for (std::size_t k = 0; k < m; ++k) {
    phi[k] = basis.beta[k] / (nu * basis.lambda[k]);
    denom += phi[k] * basis.beta[k];
  }
  if (denom <= 0.0)
    throw std::runtime_error("initial_condition: degenerate carrier projection");
  std::vector<double> c(m);
  for (std::size_t k = 0; k < m; ++k) c[k] = f0 * phi[k] / denom;
  return c;
}

std::size_t pressure_projection_threshold(const EigenBasis& basis) {
  const std::size_t M = basis.size();
  if (M == 0) throw std::invalid_argument("pressure_projection_threshold: empty basis");
  // nu = 1 scaling: phi_k = beta_k / lambda_k, chi0^2 = sum phi_k beta_k
  std::vector<double> phi(M);
  double chi_sq = 0.0;
  for (std::size_t k = 0; k < M; ++k) {
    phi[k] = basis.beta[k] / basis.lambda[k];
    chi_sq += phi[k] * basis.beta[k];
  }
  const double bound = chi_sq * chi_sq / 6.0;
  double tail = 0.0;
  for (std::size_t k = 0; k < M; ++k) tail += phi[k] * phi[k];
  for (std::size_t m = 0; m < M; ++m) {
    if (tail < bound) return m;  // smallest truncation already below the bound
    tail -= phi[m] * phi[m];
  }
  return M;
}

namespace {

struct MarchWork {
  const EigenBasis& basis;
  double nu, dt;
  double beta_sq = 0.0;           // |beta|^2
  std::vector<double> dk;          // 1 + (dt/2) nu lambda
  double pi_denom = 0.0;           // |beta|^2 - (dt/2) nu sum lambda beta^2 / dk

  MarchWork(const EigenBasis& b, double nu_, double dt_) : basis(b), nu(nu_), dt(dt_) {
    const std::size_t m = b.size();
    dk.resize(m);
    double corr = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      beta_sq += b.beta[k] * b.beta[k];
      dk[k] = 1.0 + 0.5 * dt * nu * b.lambda[k];
      corr += nu * b.lambda[k] * b.beta[k] * b.beta[k] / dk[k];
    }
    pi_denom = beta_sq - 0.5 * dt * corr;
  }

  double pressure(const std::vector<double>& c, double fprime) const {
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k)
      s += nu * basis.lambda[k] * basis.beta[k] * c[k];
    return (fprime + s) / beta_sq;
  }

  // one implicit-trapezoid step; returns pi at the new time
  double step(std::vector<double>& c, double pi_n, double fprime_next) const {
    const std::size_t m = c.size();
    double sum_rhs = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double rhs =
          (1.0 - 0.5 * dt * nu * basis.lambda[k]) * c[k] + 0.5 * dt * pi_n * basis.beta[k];
      c[k] = rhs / dk[k];
      sum_rhs += nu * basis.lambda[k] * basis.beta[k] * c[k];
    }
    const double pi_next = (fprime_next + sum_rhs) / pi_denom;
    for (std::size_t k = 0; k < m; ++k)
      c[k] += 0.5 * dt * pi_next * basis.beta[k] / dk[k];
    return pi_next;
  }

  // rank-one flux correction along beta; returns the drift removed
  double project(std::vector<double>& c, double target_flux) const {
    double fl = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) fl += basis.beta[k] * c[k];
    const double r = (target_flux - fl) / beta_sq;
    for (std::size_t k = 0; k < c.size(); ++k) c[k] += r * basis.beta[k];
    return std::abs(target_flux - fl);
  }
};

void record_step(TimeDomainSolution& sol, const MarchWork& work,
                 const std::vector<double>& c, double t, double pi, double f_t,
                 double correction) {
  const auto& basis = work.basis;
  double fl = 0.0, en = 0.0, gr = 0.0, lp = 0.0, wt = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double lk = basis.lambda[k];
    fl += basis.beta[k] * c[k];
    en += c[k] * c[k];
    gr += lk * c[k] * c[k];
    lp += lk * lk * c[k] * c[k];
    const double ct = -work.nu * lk * c[k] + pi * basis.beta[k];
    wt += ct * ct;
  }
  sol.t.push_back(t);
  sol.pi.push_back(pi);
  sol.flux.push_back(fl);
  sol.flux_residual.push_back(std::abs(fl - f_t));
  sol.energy.push_back(en);
  sol.grad_energy.push_back(gr);
  sol.lap_energy.push_back(lp);
  sol.wt_energy.push_back(wt);
  sol.projection_correction.push_back(correction);
  sol.max_flux_residual = std::max(sol.max_flux_residual, sol.flux_residual.back());
  sol.max_projection_correction = std::max(sol.max_projection_correction, correction);
}

}  // namespace

TimeDomainSolution march(const FluxFunction& flux, const EigenBasis& basis, double nu,
                         double dt, double T, const std::vector<double>* c0,
                         bool project) {
  if (basis.size() == 0) throw std::invalid_argument("march: empty basis");
  if (nu <= 0.0) throw std::invalid_argument("march: nu must be positive");
  if (dt <= 0.0 || T <= 0.0) throw std::invalid_argument("march: dt and T must be positive");
  const std::size_t steps = static_cast<std::size_t>(std::llround(T / dt));
  if (steps == 0) throw std::invalid_argument("march: T shorter than dt");

  TimeDomainSolution sol;
  sol.dt = dt;
  sol.T = dt * double(steps);
  sol.modes = basis.size();

  std::vector<double> c = c0 ? *c0 : initial_condition(basis, nu, flux.value(0.0));
  if (c.size() != basis.size()) throw std::invalid_argument("march: c0 size mismatch");
  sol.c_initial = c;

  MarchWork work(basis, nu, dt);
  double pi = work.pressure(c, flux.slope(0.0));
  record_step(sol, work, c, 0.0, pi, flux.value(0.0), 0.0);

  const double f0_abs = std::abs(flux.value(0.0));
  double max_abs_slope = 0.0;

  for (std::size_t nstep = 1; nstep <= steps; ++nstep) {
    const double t_next = dt * double(nstep);
    const double fprime_next = flux.slope(t_next);
    max_abs_slope = std::max(max_abs_slope, std::abs(fprime_next));
    pi = work.step(c, pi, fprime_next);
    double corr = 0.0;
    if (project) {
      corr = work.project(c, flux.value(t_next));
      // keep the pressure algebraically consistent with the corrected state;
      // a stale pi would re-inject the removed drift, amplified by the stiff
      // modes, on the next step
      pi = work.pressure(c, fprime_next);
    }
    record_step(sol, work, c, t_next, pi, flux.value(t_next), corr);
    if (!std::isfinite(sol.energy.back()))
      throw std::runtime_error("march: trajectory diverged (dt too large)");
  }

  sol.c_final = c;

  // instability detector for steady fluxes: the energy must not grow past its
  // initial level by more than roundoff once transients can only decay
  if (max_abs_slope <= 1e-14 * std::max(1.0, f0_abs)) {
    const double e0 = sol.energy.front();
    double emax = 0.0;
    for (double e : sol.energy) emax = std::max(emax, e);
    if (emax > 2.0 * e0 + 1e-12)
      throw std::runtime_error("march: energy growth with steady flux (dt too large)");
  }
  return sol;
}

SampledSignal volterra_pressure(const FluxFunction& flux, const EigenBasis& basis,
                                double nu, double dt, double T,
                                const std::vector<double>* c0, double* kernel_scale) {
  if (basis.size() == 0) throw std::invalid_argument("volterra_pressure: empty basis");
  if (nu <= 0.0) throw std::invalid_argument("volterra_pressure: nu must be positive");
  if (dt <= 0.0 || T <= 0.0)
    throw std::invalid_argument("volterra_pressure: dt and T must be positive");
  const std::size_t steps = static_cast<std::size_t>(std::llround(T / dt));
  const std::size_t m = basis.size();

  std::vector<double> c_init =
      c0 ? *c0 : initial_condition(basis, nu, flux.value(0.0));
  if (c_init.size() != m) throw std::invalid_argument("volterra_pressure: c0 size mismatch");

  double beta_sq = 0.0, kscale = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    beta_sq += basis.beta[k] * basis.beta[k];
    kscale += nu * basis.lambda[k] * basis.beta[k] * basis.beta[k];
  }
  if (kernel_scale) *kernel_scale = kscale / beta_sq;

  // Product integration of the memory term with exact exponential moments
  //   M_k = dt * int_0^1 tau^k exp(-mu (1 - tau)) dtau,   mu = nu lambda dt,
  // against a piecewise-quadratic pressure through (t_{n-1}, t_n, t_{n+1})
  // (linear on the first interval). The quadratic rule keeps the cross-route
  // mismatch against the trapezoid march well below the dt^2 scale.
  std::vector<double> Ed(m), W_prev(m), W_mid(m), W_next(m), L_mid(m), L_next(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double nl = nu * basis.lambda[k];
    const double mu = nl * dt;
    Ed[k] = std::exp(-mu);
    double M0, M1, M2;
    if (mu < 1e-3) {  // series forms to avoid cancellation
      M0 = dt * (1.0 - mu / 2.0 + mu * mu / 6.0 - mu * mu * mu / 24.0);
      M1 = dt * (0.5 - mu / 6.0 + mu * mu / 24.0 - mu * mu * mu / 120.0);
      M2 = dt * (1.0 / 3.0 - mu / 12.0 + mu * mu / 60.0 - mu * mu * mu / 360.0);
    } else {
      M0 = (1.0 - Ed[k]) / nl;
      M1 = dt * (mu - 1.0 + Ed[k]) / (mu * mu);
      M2 = dt * (mu * mu - 2.0 * mu + 2.0 - 2.0 * Ed[k]) / (mu * mu * mu);
    }
    // Lagrange weights on tau = -1, 0, 1
    W_prev[k] = 0.5 * (M2 - M1);
    W_mid[k] = M0 - M2;
    W_next[k] = 0.5 * (M2 + M1);
    // linear weights for the first interval
    L_mid[k] = M0 - M1;
    L_next[k] = M1;
  }

  SampledSignal pi;
  pi.t0 = 0.0;
  pi.dt = dt;
  pi.values.resize(steps + 1);

  std::vector<double> memory(m, 0.0);  // M_j(t_n)
  std::vector<double> decay(m, 1.0);   // exp(-nu lambda_j t_n)
  double pi_n = 0.0;
  {
    double s = 0.0;
    for (std::size_t k = 0; k < m; ++k)
      s += nu * basis.lambda[k] * basis.beta[k] * c_init[k];
    pi_n = (flux.slope(0.0) + s) / beta_sq;
  }
  pi.values[0] = pi_n;
  double pi_prev = pi_n;

  for (std::size_t nstep = 1; nstep <= steps; ++nstep) {
    const double t_next = dt * double(nstep);
    const bool first = nstep == 1;
    double known = flux.slope(t_next);
    double implicit_coeff = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double lb2 = nu * basis.lambda[k] * basis.beta[k] * basis.beta[k];
      decay[k] *= Ed[k];
      known += nu * basis.lambda[k] * basis.beta[k] * c_init[k] * decay[k];
      const double explicit_part = first ? pi_n * L_mid[k]
                                         : pi_prev * W_prev[k] + pi_n * W_mid[k];
      known += lb2 * (Ed[k] * memory[k] + explicit_part);
      implicit_coeff += lb2 * (first ? L_next[k] : W_next[k]);
    }
    const double pi_next = known / (beta_sq - implicit_coeff);
    for (std::size_t k = 0; k < m; ++k) {
      const double explicit_part = first ? pi_n * L_mid[k]
                                         : pi_prev * W_prev[k] + pi_n * W_mid[k];
      memory[k] = Ed[k] * memory[k] + explicit_part +
                  pi_next * (first ? L_next[k] : W_next[k]);
    }
    pi_prev = pi_n;
    pi_n = pi_next;
    pi.values[nstep] = pi_n;
  }
  return pi;
}

UlocReport uloc_report(const TimeDomainSolution& sol, const SampledSignal& f_sampled,
                       double nu) {
  if (sol.T < 2.0) throw std::invalid_argument("uloc_report: T must be >= 2");
  UlocReport rep;
  const std::size_t steps_per_unit =
      static_cast<std::size_t>(std::llround(1.0 / sol.dt));
  if (steps_per_unit == 0 || steps_per_unit >= sol.t.size())
    throw std::invalid_argument("uloc_report: dt incompatible with unit windows");

  for (std::size_t i0 = 0; i0 + steps_per_unit < sol.t.size(); ++i0) {
    double integral = 0.0;
    for (std::size_t i = i0; i < i0 + steps_per_unit; ++i) {
      const double fa = nu * nu * sol.lap_energy[i] + sol.wt_energy[i] +
                        sol.pi[i] * sol.pi[i];
      const double fb = nu * nu * sol.lap_energy[i + 1] + sol.wt_energy[i + 1] +
                        sol.pi[i + 1] * sol.pi[i + 1];
      integral += 0.5 * (fa + fb) * sol.dt;
    }
    rep.lhs = std::max(rep.lhs, nu * sol.grad_energy[i0] + integral);
  }

  rep.f_h1_uloc = h1_uloc_norm(f_sampled);
  rep.rhs = (nu * nu + 1.0 + 1.0 / nu) * rep.f_h1_uloc * rep.f_h1_uloc;
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
  return rep;
}

DecayResult decay_test(const EigenBasis& basis, double nu, const FluxFunction& flux,
                       const std::vector<double>& w0_a, const std::vector<double>& w0_b,
                       double dt, double T) {
  const std::size_t m = basis.size();
  if (w0_a.size() != m || w0_b.size() != m)
    throw std::invalid_argument("decay_test: initial data size mismatch");
  const double f0 = flux.value(0.0);
  double fl_a = 0.0, fl_b = 0.0;
  std::vector<double> d(m);
  double d0_norm_sq = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    fl_a += basis.beta[k] * w0_a[k];
    fl_b += basis.beta[k] * w0_b[k];
    d[k] = w0_a[k] - w0_b[k];
    d0_norm_sq += d[k] * d[k];
  }
  const double scale = std::max({std::abs(f0), std::sqrt(d0_norm_sq), 1e-30});
  if (std::abs(fl_a - f0) > 1e-8 * std::max(1.0, std::abs(f0)) ||
      std::abs(fl_b - f0) > 1e-8 * std::max(1.0, std::abs(f0)))
    throw std::invalid_argument("decay_test: initial data not flux-compatible");
  if (std::sqrt(d0_norm_sq) <= 1e-15 * scale)
    return {std::numeric_limits<double>::infinity(), true};

  // The difference of two marches with the same flux obeys the homogeneous
  // constrained system (zero flux, zero forcing); march it directly.
  MarchWork work(basis, nu, dt);
  const std::size_t steps = static_cast<std::size_t>(std::llround(T / dt));
  std::vector<double> ts, log_energy;
  double pi = work.pressure(d, 0.0);
  double energy = d0_norm_sq;
  ts.push_back(0.0);
  log_energy.push_back(std::log(energy));
  for (std::size_t nstep = 1; nstep <= steps; ++nstep) {
    pi = work.step(d, pi, 0.0);
    work.project(d, 0.0);
    pi = work.pressure(d, 0.0);
    energy = 0.0;
    for (double v : d) energy += v * v;
    if (energy < d0_norm_sq * 1e-150) break;
    ts.push_back(dt * double(nstep));
    log_energy.push_back(std::log(energy));
  }
  if (ts.size() < 3) throw std::runtime_error("decay_test: trajectory too short to fit");

  // least-squares slope of log ||d||^2; the energy decay rate is -slope
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  const double n = double(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    st += ts[i];
    sy += log_energy[i];
    stt += ts[i] * ts[i];
    sty += ts[i] * log_energy[i];
  }
  const double slope = (n * sty - st * sy) / (n * stt - st * st);
  return {-slope, false};
}

void save_trajectory_csv(const TimeDomainSolution& sol, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("save_trajectory_csv: cannot write " + file.string());
  out << "t,pi,flux,flux_residual,energy,grad_energy\n";
  for (std::size_t i = 0; i < sol.t.size(); ++i)
    out << format_double(sol.t[i]) << ',' << format_double(sol.pi[i]) << ','
        << format_double(sol.flux[i]) << ',' << format_double(sol.flux_residual[i]) << ','
        << format_double(sol.energy[i]) << ',' << format_double(sol.grad_energy[i]) << '\n';
}

}  // namespace pipeflow
