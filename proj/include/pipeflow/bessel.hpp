// Bessel functions J0 and J1 for real and complex argument, plus the positive
// zeros of J0. Power series below |z| = 12, Hankel asymptotic expansion above.
#pragma once

#include <complex>

namespace pipeflow::bessel {

std::complex<double> j0(std::complex<double> z);
std::complex<double> j1(std::complex<double> z);

double j0(double x);
double j1(double x);

// k-th positive zero of J0 (k >= 1). McMahon seed refined by Newton steps.
double j0_zero(int k);

}  // namespace pipeflow::bessel
