// Small dense/banded kernels used by the finite-difference routes:
// banded LU (no pivoting, diagonally dominant systems), complex tridiagonal
// solve, and a cyclic Jacobi eigensolver for small symmetric matrices.
#pragma once

#include <complex>
#include <vector>

namespace pipeflow {

using Cplx = std::complex<double>;

// Band storage for an n x n matrix with half-bandwidth bw (|i-j| <= bw).
class BandedLU {
 public:
  BandedLU(int n, int bw);

  Cplx& at(int i, int j);
  void factorize();
  void solve(std::vector<Cplx>& rhs) const;

  int size() const { return n_; }

 private:
  int n_, bw_;
  bool factored_ = false;
  std::vector<Cplx> a_;  // row i holds columns [i-bw, i+bw]
};

std::vector<Cplx> solve_tridiagonal(const std::vector<Cplx>& lower,
                                    const std::vector<Cplx>& diag,
                                    const std::vector<Cplx>& upper,
                                    std::vector<Cplx> rhs);

// Eigen-decomposition of a small dense symmetric matrix (row-major, size n*n).
// Eigenvalues ascending; eigvecs column k stored at eigvecs[i*n + k].
void jacobi_eig_symmetric(std::vector<double> a, int n,
                          std::vector<double>& eigvals,
                          std::vector<double>& eigvecs);

}  // namespace pipeflow
