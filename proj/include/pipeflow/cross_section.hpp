// Cross-section geometry, Dirichlet-Laplacian eigenbases, and the flux
// carrier. Three section kinds: analytic rectangle (tensor sine modes),
// disk (radially symmetric Bessel modes on a conservative radial grid), and
// generic raster masks (5-point finite differences).
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pipeflow {

enum class SectionKind { rectangle, disk, grid };

struct CrossSection {
  SectionKind kind = SectionKind::rectangle;

  // rectangle (0,a) x (0,b)
  double a = 0.0, b = 0.0;

  // disk of radius R, sampled at cell centers r_i = (i + 1/2) h, h = R / cells
  double radius = 0.0;
  std::vector<double> r;       // cell centers
  std::vector<double> weight;  // 2 pi r_i h; sums to pi R^2 exactly

  // raster mask: '1' = interior node, row-major, lattice spacing h
  int nx = 0, ny = 0;
  double h = 0.0;
  std::vector<std::uint8_t> mask;
  std::vector<int> node_of_cell;            // -1 for exterior
  std::vector<std::array<int, 2>> cells;    // (ix, iy) per interior node

  double measure = 0.0;  // |D|
  bool unit_measure = false;

  std::size_t interior_count() const { return cells.size(); }
};

// Eigenpairs of -Laplace with zero boundary values, ascending by eigenvalue,
// L2(D)-orthonormal under the section quadrature. beta_k = (1, e_k).
struct EigenBasis {
  SectionKind kind = SectionKind::rectangle;
  std::vector<double> lambda;
  std::vector<double> beta;

  // rectangle: mode indices (m, n)
  std::vector<std::array<int, 2>> rect_mode;
  double rect_a = 0.0, rect_b = 0.0;

  // disk: k-th positive J0 zero and quadrature normalization scale
  std::vector<double> disk_root;
  std::vector<double> disk_scale;
  double disk_radius = 0.0;

  // grid: nodal mode vectors, h^2-orthonormal
  std::vector<std::vector<double>> grid_mode;

  std::size_t size() const { return lambda.size(); }

  // sum_k beta_k^2: the measure the truncated basis represents; increases to
  // |D| as the basis grows.
  double represented_measure() const;

  // e_k evaluated at a point of D (rectangle: (x,y); disk: x = r, y ignored).
  double evaluate_mode(std::size_t k, double x, double y = 0.0) const;
};

// -Delta Phi = 1 with zero boundary values, via the eigen-sum
// Phi = sum (beta_k / lambda_k) e_k, cross-checked against a direct discrete
// Poisson solve where one exists (disk, grid). chi0^2 = int Phi = int |grad
// Phi|^2, eta0^2 = int Phi^2; the scaled carrier is phi = Phi / nu.
struct FluxCarrier {
  std::vector<double> phi_coeff;       // eigen coefficients beta_k / lambda_k
  std::vector<double> direct_field;    // nodal Phi from the direct solve (empty for rectangle)
  double chi0_sq = 0.0;                // volume route, eigen-sum
  double chi0_sq_energy = 0.0;         // Dirichlet-energy route
  double eta0_sq = 0.0;
  double nu = 1.0;
  std::optional<double> eigen_vs_direct;  // relative L2 gap between the two routes

  double int_phi() const { return chi0_sq / nu; }        // int of phi = Phi/nu
  double int_phi_sq() const { return eta0_sq / (nu * nu); }
};

struct RectangleBasis {
  CrossSection section;
  EigenBasis basis;
};

// Analytic tensor-sine basis on (0,a) x (0,b); modes_per_axis^2 modes total.
RectangleBasis build_rectangle(double a, double b, int modes_per_axis);

// Radially symmetric Bessel modes on the disk of radius R. Non-radial modes
// carry beta = 0 (the constant 1 is radial) and never couple to the basic
// flow, so they are excluded. radial_points >= 64 and at least ~10 cells per
// oscillation of the highest mode.
RectangleBasis build_disk(double R, int radial_modes, int radial_points);

// Lowest m eigenpairs of the 5-point Dirichlet Laplacian on a raster mask.
RectangleBasis build_grid(const std::vector<std::uint8_t>& mask, int nx, int ny,
                          double h, int m);

FluxCarrier flux_carrier(const CrossSection& section, const EigenBasis& basis,
                         double nu);

// Quadrature inner products against the interior indicator and pairwise.
double integrate(const CrossSection& section, const std::vector<double>& field);
double inner(const CrossSection& section, const std::vector<double>& fa,
             const std::vector<double>& fb);

// Applies the section's discrete Laplacian to a nodal field (disk, grid).
std::vector<std::complex<double>> apply_laplacian(
    const CrossSection& section, const std::vector<std::complex<double>>& field);

// Solves (i xi + nu * (-Lap_h)) u = rhs on the interior nodes (disk: radial
// flux form + Thomas; grid: banded LU). Well-posed for every xi when nu > 0.
std::vector<std::complex<double>> solve_shifted(const CrossSection& section,
                                                double xi, double nu,
                                                std::vector<std::complex<double>> rhs);

// Text raster: '1' interior, '0' exterior, one row per line.
std::vector<std::uint8_t> load_mask(const std::filesystem::path& file, int* nx, int* ny);

// CSV with columns k,lambda,beta.
void save_basis_csv(const EigenBasis& basis, const std::filesystem::path& file);

}  // namespace pipeflow
