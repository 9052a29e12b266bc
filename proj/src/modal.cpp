#include "pipeflow/modal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "pipeflow/bessel.hpp"
#include "pipeflow/util.hpp"

namespace pipeflow {

namespace {

using Cplx = std::complex<double>;

void fill_residuals(ModalResponse& r) {
  const Cplx i_xi(0.0, r.xi);
  const double res1 =
      std::abs(r.a_xi - (r.nu * r.grad_sq - i_xi * r.l2_sq));
  const double res2 = std::abs(r.nu * r.int_lap - (i_xi * r.a_xi - r.measure));
  const double res3 =
      std::abs(r.nu * r.nu * r.lap_sq + r.xi * r.xi * r.l2_sq - r.measure);
  r.residuals = {res1 / r.measure, res2 / r.measure, res3 / r.measure};
}

ModalResponse solve_eigen(const EigenBasis& basis, double xi, double nu) {
  ModalResponse r;
  r.xi = xi;
  r.nu = nu;
  r.route = ModalRoute::eigen;
  r.coeff.resize(basis.size());
  double measure = 0.0;
  Cplx a(0.0, 0.0), int_lap(0.0, 0.0);
  double l2 = 0.0, grad = 0.0, lap = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const double lk = basis.lambda[k];
    const double bk = basis.beta[k];
    const Cplx ck = bk / Cplx(nu * lk, xi);
    r.coeff[k] = ck;
    const double ck2 = std::norm(ck);
    a += ck * bk;
    int_lap += -lk * ck * bk;
    l2 += ck2;
    grad += lk * ck2;
    lap += lk * lk * ck2;
    measure += bk * bk;
  }
  r.a_xi = a;
  r.int_lap = int_lap;
  r.l2_sq = l2;
  r.grad_sq = grad;
  r.lap_sq = lap;
  r.measure = measure;
  fill_residuals(r);
  return r;
}

ModalResponse solve_direct(const CrossSection& sec, double xi, double nu) {
  const std::size_t n =
      sec.kind == SectionKind::disk ? sec.r.size() : sec.interior_count();
  ModalResponse r;
  r.xi = xi;
  r.nu = nu;
  r.route = ModalRoute::direct;
  r.field = solve_shifted(sec, xi, nu, std::vector<Cplx>(n, Cplx(1.0, 0.0)));
  const auto lap = apply_laplacian(sec, r.field);

  auto weight = [&](std::size_t i) {
    return sec.kind == SectionKind::disk ? sec.weight[i] : sec.h * sec.h;
  };
  Cplx a(0.0, 0.0), int_lap(0.0, 0.0), dirichlet(0.0, 0.0);
  double l2 = 0.0, lap_sq = 0.0, measure = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weight(i);
    a += w * r.field[i];
    int_lap += w * lap[i];
    l2 += w * std::norm(r.field[i]);
    lap_sq += w * std::norm(lap[i]);
    dirichlet += w * (-lap[i]) * std::conj(r.field[i]);
    measure += w;
  }
  r.a_xi = a;
  r.int_lap = int_lap;
  r.l2_sq = l2;
  r.lap_sq = lap_sq;
  r.grad_sq = dirichlet.real();  // summation by parts makes this real
  r.measure = measure;
  fill_residuals(r);
  return r;
}

}  // namespace

ModalResponse solve_mode(const CrossSection& section, const EigenBasis& basis,
                         double xi, double nu, ModalRoute route) {
  if (nu <= 0.0) throw std::invalid_argument("solve_mode: nu must be positive");
  if (route == ModalRoute::eigen) {
    if (basis.size() == 0) throw std::invalid_argument("solve_mode: empty basis");
    return solve_eigen(basis, xi, nu);
  }
  return solve_direct(section, xi, nu);
}

std::complex<double> womersley_reference(double R, double xi, double nu, double r,
                                         bool* precision_loss) {
  if (xi == 0.0) throw std::invalid_argument("womersley_reference: xi must be nonzero");
  if (r < 0.0 || r > R) throw std::invalid_argument("womersley_reference: r outside [0, R]");
  const Cplx i_xi(0.0, xi);
  const Cplx alpha = std::sqrt(-i_xi / nu);  // principal branch
  const Cplx denom = bessel::j0(alpha * R);
  if (precision_loss) *precision_loss = std::abs(denom) < 1e-280;
  return (1.0 - bessel::j0(alpha * r) / denom) / i_xi;
}

std::array<double, 3> check_identities(const ModalResponse& resp) {
  ModalResponse copy = resp;
  fill_residuals(copy);
  return copy.residuals;
}

double scaling_check(const CrossSection& section, const EigenBasis& basis,
                     double xi, double nu, ModalRoute route) {
  const ModalResponse full = solve_mode(section, basis, xi, nu, route);
  const ModalResponse unit = solve_mode(section, basis, xi / nu, 1.0, route);
  double diff = 0.0, ref = 0.0;
  if (route == ModalRoute::eigen) {
    for (std::size_t k = 0; k < full.coeff.size(); ++k) {
      diff += std::norm(full.coeff[k] - unit.coeff[k] / nu);
      ref += std::norm(full.coeff[k]);
    }
  } else {
    for (std::size_t i = 0; i < full.field.size(); ++i) {
      const double w =
          section.kind == SectionKind::disk ? section.weight[i] : section.h * section.h;
      diff += w * std::norm(full.field[i] - unit.field[i] / nu);
      ref += w * std::norm(full.field[i]);
    }
  }
  return std::sqrt(diff / ref);
}

std::vector<GainRow> gain_sweep(const CrossSection& section, const EigenBasis& basis,
                                double nu, std::vector<double> frequencies,
                                ModalRoute route) {
  std::sort(frequencies.begin(), frequencies.end());
  std::vector<GainRow> rows(frequencies.size());
  parallel_for(frequencies.size(), [&](std::size_t i) {
    const ModalResponse r = solve_mode(section, basis, frequencies[i], nu, route);
    rows[i] = {r.xi, r.a_xi, r.n0(), r.n1(), r.n2(), r.residuals};
  });
  return rows;
}

void save_gain_csv(const std::vector<GainRow>& rows, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("save_gain_csv: cannot write " + file.string());
  out << "xi,re_a,im_a,n0,n1,n2,res1,res2,res3\n";
  for (const auto& r : rows)
    out << format_double(r.xi) << ',' << format_double(r.a_xi.real()) << ','
        << format_double(r.a_xi.imag()) << ',' << format_double(r.n0) << ','
        << format_double(r.n1) << ',' << format_double(r.n2) << ','
        << format_double(r.residuals[0]) << ',' << format_double(r.residuals[1]) << ','
        << format_double(r.residuals[2]) << '\n';
}

}  // namespace pipeflow
