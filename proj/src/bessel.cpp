#include "pipeflow/bessel.hpp"

#include <cmath>
#include <stdexcept>

namespace pipeflow::bessel {

namespace {

using Cplx = std::complex<double>;

constexpr double kSeriesRadius = 12.0;

Cplx j0_series(Cplx z) {
  const Cplx q = -z * z * 0.25;
  Cplx term(1.0, 0.0), sum(1.0, 0.0);
  for (int k = 1; k < 80; ++k) {
    term *= q / double(k * k);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

Cplx j1_series(Cplx z) {
  const Cplx q = -z * z * 0.25;
  Cplx term(1.0, 0.0), sum(1.0, 0.0);
  for (int k = 1; k < 80; ++k) {
    term *= q / double(k * (k + 1));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return 0.5 * z * sum;
}

// Hankel expansion Jn(z) = sqrt(2/(pi z)) [P cos w - Q sin w],
// w = z - n pi/2 - pi/4, where P + iQ = sum_m i^m a_m(n) / z^m with
// a_m = prod_{j<=m} (4n^2 - (2j-1)^2) / (8 j), summed to optimal truncation.
Cplx jn_asymptotic(int n, Cplx z) {
  const double mu = 4.0 * n * n;
  const Cplx inv_z = 1.0 / z;
  Cplx p(1.0, 0.0), q(0.0, 0.0);
  Cplx sym(1.0, 0.0);  // a_m / z^m
  double last = 1.0;
  for (int m = 1; m < 40; ++m) {
    const double odd = 2.0 * m - 1.0;
    sym *= (mu - odd * odd) / (8.0 * m) * inv_z;
    const double mag = std::abs(sym);
    if (mag > last) break;  // asymptotic tail started growing
    last = mag;
    // sign (-1)^k with m = 2k (P) or m = 2k+1 (Q)
    const int k = m / 2;
    const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
    if (m % 2 == 0)
      p += sgn * sym;
    else
      q += sgn * sym;
    if (mag < 1e-18) break;
  }
  const Cplx w = z - (0.5 * n + 0.25) * M_PI;
  return std::sqrt(2.0 / (M_PI * z)) * (p * std::cos(w) - q * std::sin(w));
}

}  // namespace

Cplx j0(Cplx z) {
  if (std::abs(z) <= kSeriesRadius) return j0_series(z);
  if (z.real() < 0.0) return j0(-z);  // J0 is even
  return jn_asymptotic(0, z);
}

Cplx j1(Cplx z) {
  if (std::abs(z) <= kSeriesRadius) return j1_series(z);
  if (z.real() < 0.0) return -j1(-z);  // J1 is odd
  return jn_asymptotic(1, z);
}

double j0(double x) { return j0(Cplx(x, 0.0)).real(); }
double j1(double x) { return j1(Cplx(x, 0.0)).real(); }

double j0_zero(int k) {
  if (k < 1) throw std::invalid_argument("j0_zero: k must be >= 1");
  // McMahon expansion seed.
  const double b = (k - 0.25) * M_PI;
  const double b2 = b * b;
  double x = b + 1.0 / (8.0 * b) * (1.0 - 124.0 / (3.0 * 8.0 * 8.0 * b2) *
                                              (1.0 - 120928.0 / (124.0 * 5.0 * 64.0 * b2)));
  for (int it = 0; it < 8; ++it) {
    const double f = j0(x);
    const double fp = -j1(x);
    const double dx = f / fp;
    x -= dx;
    if (std::abs(dx) < 1e-15 * x) break;
  }
  return x;
}

}  // namespace pipeflow::bessel
