#include "pipeflow/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace pipeflow {

BandedLU::BandedLU(int n, int bw)
    : n_(n), bw_(bw), a_(static_cast<std::size_t>(n) * (2 * bw + 1), Cplx(0.0, 0.0)) {
  if (n <= 0 || bw < 0) throw std::invalid_argument("BandedLU: bad dimensions");
}

Cplx& BandedLU::at(int i, int j) {
  const int off = j - i + bw_;
  if (i < 0 || i >= n_ || off < 0 || off > 2 * bw_)
    throw std::out_of_range("BandedLU::at outside band");
  return a_[static_cast<std::size_t>(i) * (2 * bw_ + 1) + off];
}

void BandedLU::factorize() {
  const int w = 2 * bw_ + 1;
  auto idx = [&](int i, int j) { return static_cast<std::size_t>(i) * w + (j - i + bw_); };
  for (int k = 0; k < n_; ++k) {
    const Cplx piv = a_[idx(k, k)];
    if (std::abs(piv) == 0.0) throw std::runtime_error("BandedLU: zero pivot");
    const int iend = std::min(n_ - 1, k + bw_);
    for (int i = k + 1; i <= iend; ++i) {
      const Cplx m = a_[idx(i, k)] / piv;
      a_[idx(i, k)] = m;
      const int jend = std::min(n_ - 1, k + bw_);
      for (int j = k + 1; j <= jend; ++j) a_[idx(i, j)] -= m * a_[idx(k, j)];
    }
  }
  factored_ = true;
}

void BandedLU::solve(std::vector<Cplx>& rhs) const {
  if (!factored_) throw std::logic_error("BandedLU::solve before factorize");
  if (static_cast<int>(rhs.size()) != n_) throw std::invalid_argument("BandedLU: rhs size");
  const int w = 2 * bw_ + 1;
  auto idx = [&](int i, int j) { return static_cast<std::size_t>(i) * w + (j - i + bw_); };
  for (int i = 0; i < n_; ++i) {
    const int j0 = std::max(0, i - bw_);
    Cplx s = rhs[i];
    for (int j = j0; j < i; ++j) s -= a_[idx(i, j)] * rhs[j];
    rhs[i] = s;
  }
  for (int i = n_ - 1; i >= 0; --i) {
    const int j1 = std::min(n_ - 1, i + bw_);
    Cplx s = rhs[i];
    for (int j = i + 1; j <= j1; ++j) s -= a_[idx(i, j)] * rhs[j];
    rhs[i] = s / a_[idx(i, i)];
  }
}

std::vector<Cplx> solve_tridiagonal(const std::vector<Cplx>& lower,
                                    const std::vector<Cplx>& diag,
                                    const std::vector<Cplx>& upper,
                                    std::vector<Cplx> rhs) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n)
    throw std::invalid_argument("solve_tridiagonal: size mismatch");
  std::vector<Cplx> c(n);
  Cplx piv = diag[0];
  if (std::abs(piv) == 0.0) throw std::runtime_error("tridiagonal: zero pivot");
  rhs[0] /= piv;
  for (std::size_t i = 1; i < n; ++i) {
    c[i - 1] = upper[i - 1] / piv;
    piv = diag[i] - lower[i] * c[i - 1];
    if (std::abs(piv) == 0.0) throw std::runtime_error("tridiagonal: zero pivot");
    rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / piv;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
  return rhs;
}

void jacobi_eig_symmetric(std::vector<double> a, int n,
                          std::vector<double>& eigvals,
                          std::vector<double>& eigvecs) {
  if (static_cast<int>(a.size()) != n * n) throw std::invalid_argument("jacobi: size");
  eigvecs.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) eigvecs[static_cast<std::size_t>(i) * n + i] = 1.0;
  auto A = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
  auto V = [&](int i, int j) -> double& { return eigvecs[static_cast<std::size_t>(i) * n + j]; };

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += A(i, j) * A(i, j);
    if (off < 1e-30) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  eigvals.resize(n);
  for (int i = 0; i < n; ++i) eigvals[i] = A(i, i);
  // sort ascending, permuting eigenvector columns alongside
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (eigvals[order[j]] < eigvals[order[i]]) std::swap(order[i], order[j]);
  std::vector<double> ev(n), V2(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    ev[k] = eigvals[order[k]];
    for (int i = 0; i < n; ++i) V2[static_cast<std::size_t>(i) * n + k] = V(i, order[k]);
  }
  eigvals = std::move(ev);
  eigvecs = std::move(V2);
}

}  // namespace pipeflow
