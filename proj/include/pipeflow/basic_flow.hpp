// Frequency-domain solution of the flux-driven basic flow: per mode
// pi_hat(xi) = f_hat(xi) / a_xi and w_hat(xi) = pi_hat(xi) W_xi, with the
// norm ledgers and the a-priori bound checks.
#pragma once

#include <complex>
#include <filesystem>
#include <vector>

#include "pipeflow/apseries.hpp"
#include "pipeflow/cross_section.hpp"
#include "pipeflow/modal.hpp"

namespace pipeflow {

struct FlowLedger {
  double lap_b2 = 0.0;           // || Lap w ||_{B2(L2)}
  double wt_b2 = 0.0;            // || d_t w ||_{B2(L2)}
  double pi_b2 = 0.0;            // || pi ||_{B2}
  double sum_lap = 0.0;          // sum_xi || Lap w_xi ||
  double sum_pi_plus_xi_w = 0.0; // sum_xi ( |pi_xi| + |xi| || w_xi || )
  double sup_grad_upper = 0.0;   // sum_xi || grad w_xi || (triangle bound)
  double sup_grad_sampled = 0.0; // dense time-sampling lower estimate
};

struct BasicFlowSolution {
  double nu = 1.0;
  std::vector<double> xi;                            // sorted mode frequencies
  std::vector<std::complex<double>> flux_hat;        // f coefficients
  std::vector<std::complex<double>> pi_hat;          // pressure coefficients
  std::vector<std::vector<std::complex<double>>> w_coeff;  // basis coefficients per mode
  std::vector<double> w_l2, w_grad, w_lap;           // per-mode norms of w_hat
  std::vector<double> flux_residual;                 // |int w_hat - f_hat|
  FlowLedger ledger;

  APSeries pressure_series() const;
  std::size_t mode_count() const { return xi.size(); }
};

BasicFlowSolution solve_spectral(const APSeries& f, const CrossSection& section,
                                 const EigenBasis& basis, double nu);

struct SampleTable {
  std::vector<double> t;
  std::vector<double> pi;
  std::vector<double> flux;                  // int_D w(t)
  std::vector<std::vector<double>> probes;   // one column per probe point
  double max_imag_residue = 0.0;
};

// Probe points: rectangle (x,y), disk (r, ignored), grid (x,y) mapped to the
// containing cell. Probes on or outside the boundary are rejected.
SampleTable sample_solution(const BasicFlowSolution& sol, const CrossSection& section,
                            const EigenBasis& basis, const std::vector<double>& times,
                            const std::vector<std::array<double, 2>>& probe_points);

struct PerModeRatios {
  double nu;
  double max_lap_ratio = 0.0;   // (||Lap W|| / |a|) / max{1, |xi|/nu}
  double max_xi_w_ratio = 0.0;  // (|xi| ||W|| / |a|) / max{|xi|, nu}
  double max_inv_a_ratio = 0.0; // (1 / |a|) / max{|xi|, nu}
};

struct BoundsReport {
  // solution-level ratios
  double lap_ratio = 0.0;   // ||Lap w||_B2 / (||f||_B2 + ||f'||_B2 / nu)
  double pi_wt_ratio = 0.0; // (||pi||_B2 + ||d_t w||_B2) / (nu ||f||_B2 + ||f'||_B2)
  // per-mode sweep: one row per viscosity
  std::vector<PerModeRatios> sweep;
  double sweep_variation = 0.0;  // max relative spread of the three maxima across nu
  bool finite = true;
};

// Checks the a-priori bounds: theorem ratios for the solution itself plus the
// per-mode ratio sweep over (xi, nu) grids. The fitted constants are the
// observed maxima; sweep_variation quantifies their stability across nu.
BoundsReport verify_bounds(const BasicFlowSolution& sol, const APSeries& f,
                           const CrossSection& section, const EigenBasis& basis,
                           const std::vector<double>& xi_sweep = {},
                           const std::vector<double>& nu_sweep = {});

struct RegL1Report {
  double sum_lap = 0.0;            // sum ||Lap w_xi||
  double sum_pi_plus_xi_w = 0.0;   // sum (|pi_xi| + |xi| ||w_xi||)
  double bound_lap = 0.0;          // sum |f_xi| + (1/nu) sum |xi| |f_xi|
  double bound_pi = 0.0;           // nu sum |f_xi| + sum |xi| |f_xi|
  double ratio_lap = 0.0;          // sum_lap / bound_lap
  double ratio_pi = 0.0;           // sum_pi_plus_xi_w / bound_pi
};

RegL1Report regl1_sums(const BasicFlowSolution& sol, const APSeries& f);

struct EmbeddingDiagnostic {
  double gamma;
  std::vector<double> partial_sums;  // over nested spectrum truncations
  bool converging;                   // growth-trend heuristic
};

struct EmbeddingReport {
  double s;
  std::vector<EmbeddingDiagnostic> sums;
  bool zero_mode_present = false;
  bool beta_below_2s_plausible = false;  // heuristic verdict
};

// Partial sums sum_{xi != 0} |xi|^-gamma over nested truncations of the
// spectrum, with a converging/diverging trend verdict per gamma. Heuristic
// diagnostic only; the zero mode is reported separately.
EmbeddingReport embedding_beta(const std::vector<double>& spectrum, double s,
                               const std::vector<double>& gamma_grid);

// JSON report: ledger plus per-mode table (xi, |pi_hat|, ||w||, ||Lap w||,
// flux residual).
void save_flow_report(const BasicFlowSolution& sol, const std::filesystem::path& file);
// CSV columns: t,pi,flux,w@probe1,...
void save_sample_csv(const SampleTable& table, const std::filesystem::path& file);

}  // namespace pipeflow
