// Initial-value route for the basic flow: eigenfunction Galerkin march with
// the pressure eliminated through the differentiated flux constraint
// (index-reduced form), an independent Volterra product-integration pressure
// route, uniform-local energy ledgers, and the zero-flux decay test.
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pipeflow/apseries.hpp"
#include "pipeflow/cross_section.hpp"

namespace pipeflow {

// Flux with its time derivative, as callables on [0, T].
struct FluxFunction {
  std::function<double(double)> value;
  std::function<double(double)> slope;

  static FluxFunction from_series(const APSeries& f);
  // Linear interpolation of both tracks; the derivative track is required.
  static FluxFunction from_samples(const SampledSignal& g);
};

struct TimeDomainSolution {
  double dt = 0.0;
  double T = 0.0;
  std::size_t modes = 0;

  // per-step scalar trajectory (full coefficient history is not retained)
  std::vector<double> t;
  std::vector<double> pi;
  std::vector<double> flux;            // sum beta_j c_j after projection
  std::vector<double> flux_residual;   // |sum beta_j c_j - f| after projection
  std::vector<double> energy;          // ||w||^2
  std::vector<double> grad_energy;     // ||grad w||^2
  std::vector<double> lap_energy;      // ||Lap w||^2
  std::vector<double> wt_energy;       // ||w_t||^2
  std::vector<double> projection_correction;  // |flux drift removed per step|

  std::vector<double> c_initial;
  std::vector<double> c_final;
  double max_flux_residual = 0.0;
  double max_projection_correction = 0.0;
};

// Galerkin projection of w0 = (nu phi / chi0^2) f(0): c_j(0) = f0 phi_j /
// sum_k phi_k beta_k with phi_j = beta_j / (nu lambda_j). Satisfies the flux
// constraint at t = 0 exactly.
std::vector<double> initial_condition(const EigenBasis& basis, double nu, double f0);

// Smallest truncation m at which the carrier projection tail satisfies
// ||P_m phi - phi||^2 < chi0^4 / (6 nu^2), the threshold behind the pressure
// a-priori estimate. The viscosity cancels (phi scales by 1/nu on both
// sides), so this is a pure section diagnostic; the tail is measured inside
// the given basis.
std::size_t pressure_projection_threshold(const EigenBasis& basis);

// Implicit-trapezoid march of c_j' + nu lambda_j c_j = pi(t) beta_j with
// pi(t) = (f'(t) + nu sum lambda_j beta_j c_j) / sum beta_j^2 and the flux
// constraint re-imposed each step by a rank-one correction along beta.
// c0 defaults to initial_condition(basis, nu, f(0)).
TimeDomainSolution march(const FluxFunction& flux, const EigenBasis& basis, double nu,
                         double dt, double T,
                         const std::vector<double>* c0 = nullptr, bool project = true);

// Second-kind Volterra route for the pressure, with the decaying kernel
//   K(t,s) = (nu/|beta|^2) sum_j lambda_j beta_j^2 exp(-nu lambda_j (t-s))
// and right-hand side (f'(t) + nu sum_j lambda_j beta_j c_j(0)
// exp(-nu lambda_j t)) / |beta|^2. Discretized by product integration that is
// exact on the exponentials against a piecewise-linear pressure.
// kernel_scale (optional out) reports K(t,t) = (nu/|beta|^2) sum lambda beta^2,
// which grows with the mode count.
SampledSignal volterra_pressure(const FluxFunction& flux, const EigenBasis& basis,
                                double nu, double dt, double T,
                                const std::vector<double>* c0 = nullptr,
                                double* kernel_scale = nullptr);

struct UlocReport {
  double lhs = 0.0;      // sup_t [ nu ||grad w(t)||^2 + int_t^{t+1} (nu^2 ||Lap w||^2 + ||w_t||^2 + pi^2) ]
  double f_h1_uloc = 0.0;
  double rhs = 0.0;      // (nu^2 + 1 + 1/nu) ||f||_{H1_uloc}^2
  double ratio = 0.0;    // fitted constant
};

// Requires T >= 2 (at least one full unit window inside the run).
UlocReport uloc_report(const TimeDomainSolution& sol, const SampledSignal& f_sampled,
                       double nu);

struct DecayResult {
  double fitted_rate = 0.0;  // decay rate of ||d||^2 (energy), ~ 2 nu lambda_hat
  bool identical = false;    // the two initial data coincide; no fit possible
};

// Marches the difference of two flux-compatible initial states (which carries
// zero flux for all time) and fits the exponential energy decay rate. The
// rate is bounded below by 2 nu lambda_1.
DecayResult decay_test(const EigenBasis& basis, double nu, const FluxFunction& flux,
                       const std::vector<double>& w0_a, const std::vector<double>& w0_b,
                       double dt, double T);

// CSV columns: t,pi,flux,flux_residual,energy,grad_energy
void save_trajectory_csv(const TimeDomainSolution& sol, const std::filesystem::path& file);

}  // namespace pipeflow
