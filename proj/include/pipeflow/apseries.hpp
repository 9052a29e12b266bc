// Real almost-periodic signals as finite generalized Fourier series, plus the
// sampled-signal norms (Stepanov, H1_uloc, long-window means) and the
// spectrum/module combinatorics used by the contraction gate.
#pragma once

#include <complex>
#include <filesystem>
#include <string>
#include <vector>

namespace pipeflow {

using Complex = std::complex<double>;

struct APTerm {
  double xi;  // frequency, rad per unit time
  Complex c;  // coefficient
};

// Finite, conjugate-symmetric set of (frequency, coefficient) pairs.
// Invariants: for every stored (xi, c) the pair (-xi, conj(c)) is stored,
// frequencies are pairwise distinct, no zero coefficients.
class APSeries {
 public:
  APSeries() = default;

  // Builds from raw terms. Terms at (numerically) equal frequencies are
  // summed; missing conjugate partners are completed; inconsistent explicit
  // partners are rejected.
  static APSeries from_terms(const std::vector<APTerm>& raw);

  // Adds cos(xi t) scaled by amp: terms (xi, amp/2) and (-xi, amp/2).
  static APSeries cosine(double xi, double amp = 1.0);
  // Constant signal (single zero-frequency term).
  static APSeries constant(double value);

  const std::vector<APTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  std::vector<double> spectrum() const;
  Complex coefficient(double xi) const;  // 0 when xi not in the spectrum

  double evaluate(double t) const;
  // As evaluate, but also reports the imaginary residue of the naive full sum
  // (realness diagnostic; the residue is bounded by 1e-12 * sum |c| for any
  // valid series).
  double evaluate_checked(double t, double* imag_residue) const;

  APSeries derivative() const;  // term-wise i*xi*c
  APSeries scaled(double s) const;
  APSeries plus(const APSeries& other) const;

  // ( sum (1+xi^2)^s |c|^2 )^(1/2); s = 0 gives the B^2 seminorm.
  double besicovitch_norm(double s) const;
  // sum (1+|xi|) |c|  (the regularity weight that gates the nonlinear regime)
  double phi_star() const;
  double sum_abs_coeff() const;  // sum |c|

  static APSeries load(const std::filesystem::path& file);
  void save(const std::filesystem::path& file) const;

 private:
  std::vector<APTerm> terms_;  // ascending by frequency
};

// Uniformly sampled real signal, optionally with a parallel derivative track.
struct SampledSignal {
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<double> values;
  std::vector<double> derivative;  // empty or same length as values

  bool has_derivative() const { return !derivative.empty(); }
  double span() const { return values.empty() ? 0.0 : dt * double(values.size() - 1); }
  double t_end() const { return t0 + span(); }
};

// Samples f (and its derivative) on n points starting at t0.
SampledSignal sample(const APSeries& f, double t0, double dt, std::size_t n,
                     bool with_derivative = true);

// (1/2R) * integral_{-R}^{R} g, composite trapezoid, one entry per window
// half-width. Windows are snapped to the sample grid. Throws when a window
// exceeds the sampled span.
std::vector<double> mean_operator(const SampledSignal& g, const std::vector<double>& windows);

// (1/2R) * integral_{-R}^{R} g(t) e^{-i lambda t} dt (trapezoid, R snapped to
// the grid). The minus-sign kernel makes sum a_lambda e^{i lambda t}
// reproduce g. Throws when the span is too short.
Complex fourier_coefficient(const SampledSignal& g, double lambda, double R);

// sup over grid-aligned window starts of ((1/r) integral_t^{t+r} |g|^p)^(1/p).
double stepanov_norm(const SampledSignal& g, double p, double r);

// sup over grid-aligned unit windows of (integral |g|^2 + |g'|^2)^(1/2).
// Requires the derivative track and span >= 1.
double h1_uloc_norm(const SampledSignal& g);

struct AlmostPeriod {
  double shift;   // T
  double defect;  // sup_t |g(t+T) - g(t)| over the overlap
};

struct AlmostPeriodScan {
  std::vector<AlmostPeriod> accepted;
  double max_gap;  // largest gap between consecutive accepted shifts
};

// Scans grid shifts T in (0, search_span] and accepts those with defect <= eps.
// Requires span >= 2 * search_span.
AlmostPeriodScan almost_period_scan(const SampledSignal& g, double eps, double search_span);

enum class ModuleClass { lattice, dense, undecided };

struct ModuleSpec {
  std::vector<double> generators;
  ModuleClass classification = ModuleClass::undecided;
  double kappa = 0.0;  // lattice spacing when classification == lattice
};

// { sum a_i g_i : a_i integer, sum |a_i| <= N }, deduplicated and symmetric.
std::vector<double> zmodule_truncation(const std::vector<double>& generators, int N);

// Rationality of pairwise generator ratios via continued fractions with
// denominator bound 1/tol; all rational => lattice with kappa = rational gcd,
// any failure => dense.
ModuleSpec classify_module(const std::vector<double>& generators, double tol = 1e-9);

// { a + b : a in s1, b in s2 }, deduplicated with the zmodule tolerance.
std::vector<double> spectrum_convolution(const std::vector<double>& s1,
                                         const std::vector<double>& s2);

}  // namespace pipeflow
