// Per-frequency response solves: i xi W - nu Lap W = 1 with zero boundary
// values, the flux gain a_xi = int W, the scaled norm triple (n0, n1, n2),
// the three exact integral identities, and the analytic Womersley oracle on
// the disk.
#pragma once

#include <array>
#include <complex>
#include <filesystem>
#include <vector>

#include "pipeflow/cross_section.hpp"

namespace pipeflow {

enum class ModalRoute {
  eigen,   // coefficient arithmetic in the section eigenbasis
  direct,  // complex finite-difference solve (disk: radial, grid: 5-point)
};

struct ModalResponse {
  double xi = 0.0;
  double nu = 1.0;
  ModalRoute route = ModalRoute::eigen;

  std::vector<std::complex<double>> coeff;  // eigen route: basis coefficients
  std::vector<std::complex<double>> field;  // direct route: nodal values

  std::complex<double> a_xi;        // int_D W
  double l2_sq = 0.0;               // ||W||^2
  double grad_sq = 0.0;             // ||grad W||^2 (route-consistent Dirichlet form)
  double lap_sq = 0.0;              // ||Lap W||^2
  std::complex<double> int_lap;     // int_D Lap W
  double measure = 0.0;             // measure the route represents (see below)

  // Scaled-problem norms: W at (xi, nu) equals (1/nu) * Wtilde at (xi/nu, 1),
  // so the nu = 1 norm triple is nu^2 times the unscaled one.
  double n0() const { return nu * nu * l2_sq; }
  double n1() const { return nu * nu * grad_sq; }
  double n2() const { return nu * nu * lap_sq; }

  std::array<double, 3> residuals{};  // identity defects, normalized by measure
};

// Solves the modal problem. The eigen route uses W = sum beta_k /
// (i xi + nu lambda_k) e_k; its identity constant is the measure the
// truncated basis represents (sum beta^2). The direct route solves the
// complex-shifted finite-difference system; its constant is the section
// quadrature measure. Both make the three identities exact up to roundoff;
// basis completeness is reported separately (EigenBasis::represented_measure).
ModalResponse solve_mode(const CrossSection& section, const EigenBasis& basis,
                         double xi, double nu, ModalRoute route = ModalRoute::eigen);

// Classical oscillatory pipe-flow solution on the disk of radius R:
// W(r) = (1 / (i xi)) (1 - J0(alpha r) / J0(alpha R)), alpha = sqrt(-i xi/nu).
// Sets *precision_loss when |J0(alpha R)| underflows toward 1e-280.
std::complex<double> womersley_reference(double R, double xi, double nu, double r,
                                         bool* precision_loss = nullptr);

// Residuals of the three exact identities:
//   (1) a_xi = nu ||grad W||^2 - i xi ||W||^2
//   (2) nu int Lap W = i xi a_xi - measure
//   (3) nu^2 ||Lap W||^2 + xi^2 ||W||^2 = measure
// each normalized by the response's measure.
std::array<double, 3> check_identities(const ModalResponse& resp);

// || W(nu) - (1/nu) Wtilde(xi/nu, nu=1) ||_L2 / || W(nu) ||_L2 from two
// independent solves.
double scaling_check(const CrossSection& section, const EigenBasis& basis,
                     double xi, double nu, ModalRoute route = ModalRoute::eigen);

struct GainRow {
  double xi;
  std::complex<double> a_xi;
  double n0, n1, n2;
  std::array<double, 3> residuals;
};

// Per-frequency solves (data-parallel), sorted by xi.
std::vector<GainRow> gain_sweep(const CrossSection& section, const EigenBasis& basis,
                                double nu, std::vector<double> frequencies,
                                ModalRoute route = ModalRoute::eigen);

// CSV columns: xi,re_a,im_a,n0,n1,n2,res1,res2,res3
void save_gain_csv(const std::vector<GainRow>& rows, const std::filesystem::path& file);

}  // namespace pipeflow
