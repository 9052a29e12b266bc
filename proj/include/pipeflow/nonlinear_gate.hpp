// Scalar certificate arithmetic that gates the nonlinear fixed point:
// the admissible-psi quadratic, the threshold viscosity nu0, and the
// contraction constants K0 and nu K0^2.
#pragma once

#include <array>
#include <filesystem>
#include <optional>

#include "pipeflow/apseries.hpp"

namespace pipeflow {

struct GateReport {
  double phi_star = 0.0;
  double c = 1.0;   // domain constant (user-supplied or fitted)
  double nu = 0.0;
  std::optional<std::array<double, 2>> psi_roots;  // ascending when present
  double psi_star = 0.0;  // smaller root when roots exist
  double K0 = 0.0;
  double nuK0_sq = 0.0;
  bool verdict = false;   // contraction holds
};

// Real roots of psi^2 - (nu - 2c(1+1/nu)phi) psi + c(1+nu)phi + c^2(1+1/nu)^2 phi^2,
// returned ascending when the discriminant is nonnegative and the linear
// coefficient is positive; empty otherwise.
std::optional<std::array<double, 2>> admissible_psi(double nu, double phi_star, double c);

// K0 = (psi + c(1+1/nu)phi) / (nu - psi) and nu K0^2. Requires nu > psi.
std::array<double, 2> contraction_constants(double nu, double psi_star, double phi_star,
                                            double c);

// Full certificate for a flux series at given (nu, c).
GateReport gate(const APSeries& f, double nu, double c);
GateReport gate_scalar(double phi_star, double nu, double c);

// Infimum viscosity above which the certificate holds, by bisection
// (relative tolerance 1e-9), with the verdict re-checked on an expanding
// sweep above the threshold. phi_star = 0 gives 0.
double nu0(double phi_star, double c);

// JSON report with the input echo.
void save_gate_json(const GateReport& report, const std::filesystem::path& file);

}  // namespace pipeflow
