#include "pipeflow/cross_section.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "pipeflow/bessel.hpp"
#include "pipeflow/linalg.hpp"
#include "pipeflow/util.hpp"

namespace pipeflow {

double EigenBasis::represented_measure() const {
  double s = 0.0;
  for (double bk : beta) s += bk * bk;
  return s;
}

double EigenBasis::evaluate_mode(std::size_t k, double x, double y) const {
  switch (kind) {
    case SectionKind::rectangle: {
      const auto [m, n] = rect_mode[k];
      return 2.0 / std::sqrt(rect_a * rect_b) * std::sin(m * M_PI * x / rect_a) *
             std::sin(n * M_PI * y / rect_b);
    }
    case SectionKind::disk:
      return disk_scale[k] * bessel::j0(disk_root[k] * x / disk_radius);
    case SectionKind::grid:
      throw std::logic_error("evaluate_mode: grid modes are nodal, not pointwise");
  }
  return 0.0;
}

RectangleBasis build_rectangle(double a, double b, int modes_per_axis) {
  if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("build_rectangle: sides must be positive");
  if (modes_per_axis < 1) throw std::invalid_argument("build_rectangle: modes_per_axis >= 1");

  RectangleBasis out;
  out.section.kind = SectionKind::rectangle;
  out.section.a = a;
  out.section.b = b;
  out.section.measure = a * b;
  out.section.unit_measure = std::abs(a * b - 1.0) < 1e-12;

  struct Mode {
    double lambda;
    int m, n;
  };
  std::vector<Mode> modes;
  modes.reserve(static_cast<std::size_t>(modes_per_axis) * modes_per_axis);
  for (int m = 1; m <= modes_per_axis; ++m)
    for (int n = 1; n <= modes_per_axis; ++n)
      modes.push_back({M_PI * M_PI * (m * m / (a * a) + n * n / (b * b)), m, n});
  std::sort(modes.begin(), modes.end(), [](const Mode& u, const Mode& v) {
    if (u.lambda != v.lambda) return u.lambda < v.lambda;
    if (u.m != v.m) return u.m < v.m;
    return u.n < v.n;
  });

  EigenBasis& basis = out.basis;
  basis.kind = SectionKind::rectangle;
  basis.rect_a = a;
  basis.rect_b = b;
  for (const auto& md : modes) {
    basis.lambda.push_back(md.lambda);
    basis.rect_mode.push_back({md.m, md.n});
    const bool odd = (md.m % 2 == 1) && (md.n % 2 == 1);
    // (1, e_mn) = 8 sqrt(ab) / (m n pi^2) for odd index pairs, else 0
    basis.beta.push_back(odd ? 8.0 * std::sqrt(a * b) / (md.m * md.n * M_PI * M_PI) : 0.0);
  }
  return out;
}

RectangleBasis build_disk(double R, int radial_modes, int radial_points) {
  if (R <= 0.0) throw std::invalid_argument("build_disk: radius must be positive");
  if (radial_modes < 1) throw std::invalid_argument("build_disk: radial_modes >= 1");
  if (radial_points < 64) throw std::invalid_argument("build_disk: radial_points >= 64");

  const double j_top = bessel::j0_zero(radial_modes);
  // >= 10 cells per oscillation (one oscillation ~ 2 pi in the Bessel phase)
  if (radial_points < 10.0 * j_top / (2.0 * M_PI))
    throw std::invalid_argument(
        "build_disk: radial_points too small to resolve the highest mode");

  RectangleBasis out;
  CrossSection& sec = out.section;
  sec.kind = SectionKind::disk;
  sec.radius = R;
  const int N = radial_points;
  const double h = R / N;
  sec.r.resize(N);
  sec.weight.resize(N);
  for (int i = 0; i < N; ++i) {
    sec.r[i] = (i + 0.5) * h;
    sec.weight[i] = 2.0 * M_PI * sec.r[i] * h;
  }
  sec.measure = M_PI * R * R;
  sec.unit_measure = std::abs(sec.measure - 1.0) < 1e-12;

  EigenBasis& basis = out.basis;
  basis.kind = SectionKind::disk;
  basis.disk_radius = R;
  for (int k = 1; k <= radial_modes; ++k) {
    const double root = bessel::j0_zero(k);
    const double lambda = (root / R) * (root / R);
    double norm_sq = 0.0, raw_beta = 0.0;
    for (int i = 0; i < N; ++i) {
      const double u = bessel::j0(root * sec.r[i] / R);
      norm_sq += sec.weight[i] * u * u;
      raw_beta += sec.weight[i] * u;
    }
    double scale = 1.0 / std::sqrt(norm_sq);
    if (raw_beta < 0.0) scale = -scale;  // fix sign so beta_k >= 0
    basis.lambda.push_back(lambda);
    basis.disk_root.push_back(root);
    basis.disk_scale.push_back(scale);
    basis.beta.push_back(raw_beta * scale);
  }
  return out;
}

namespace {

int grid_bandwidth(const CrossSection& sec) {
  int bw = 1;
  for (std::size_t id = 0; id < sec.cells.size(); ++id) {
    const auto [ix, iy] = sec.cells[id];
    const int up = (iy + 1 < sec.ny) ? sec.node_of_cell[(iy + 1) * sec.nx + ix] : -1;
    if (up >= 0) bw = std::max(bw, up - static_cast<int>(id));
  }
  return bw;
}

// Assembles i*xi + nu * (-Delta_h) in band storage (xi = 0 gives the Poisson
// operator).
BandedLU grid_operator(const CrossSection& sec, double xi, double nu) {
  const int n = static_cast<int>(sec.interior_count());
  BandedLU lu(n, grid_bandwidth(sec));
  const double ih2 = 1.0 / (sec.h * sec.h);
  for (int id = 0; id < n; ++id) {
    const auto [ix, iy] = sec.cells[id];
    lu.at(id, id) = Cplx(4.0 * nu * ih2, xi);
    const int nb[4][2] = {{ix - 1, iy}, {ix + 1, iy}, {ix, iy - 1}, {ix, iy + 1}};
    for (const auto& q : nb) {
      if (q[0] < 0 || q[0] >= sec.nx || q[1] < 0 || q[1] >= sec.ny) continue;
      const int j = sec.node_of_cell[q[1] * sec.nx + q[0]];
      if (j >= 0) lu.at(id, j) = Cplx(-nu * ih2, 0.0);
    }
  }
  lu.factorize();
  return lu;
}

}  // namespace

std::vector<Cplx> apply_laplacian(const CrossSection& sec, const std::vector<Cplx>& u) {
  if (sec.kind == SectionKind::grid) {
    const double ih2 = 1.0 / (sec.h * sec.h);
    std::vector<Cplx> out(u.size());
    for (std::size_t id = 0; id < sec.cells.size(); ++id) {
      const auto [ix, iy] = sec.cells[id];
      Cplx acc = -4.0 * u[id];
      const int nb[4][2] = {{ix - 1, iy}, {ix + 1, iy}, {ix, iy - 1}, {ix, iy + 1}};
      for (const auto& q : nb) {
        if (q[0] < 0 || q[0] >= sec.nx || q[1] < 0 || q[1] >= sec.ny) continue;
        const int j = sec.node_of_cell[q[1] * sec.nx + q[0]];
        if (j >= 0) acc += u[j];
      }
      out[id] = acc * ih2;
    }
    return out;
  }
  if (sec.kind == SectionKind::disk) {
    const int N = static_cast<int>(sec.r.size());
    const double h = sec.radius / N;
    std::vector<Cplx> out(u.size());
    for (int i = 0; i < N; ++i) {
      const double r_lo = i * h;          // inner face (0 at the axis)
      const double r_hi = (i + 1) * h;    // outer face
      Cplx flux_lo = (i == 0) ? Cplx(0.0, 0.0) : r_lo * (u[i] - u[i - 1]) / h;
      Cplx flux_hi = (i == N - 1) ? r_hi * (-2.0 * u[i]) / h
                                  : r_hi * (u[i + 1] - u[i]) / h;
      out[i] = (flux_hi - flux_lo) / (sec.r[i] * h);
    }
    return out;
  }
  throw std::logic_error("apply_laplacian: rectangle sections are coefficient-space only");
}

std::vector<Cplx> solve_shifted(const CrossSection& sec, double xi, double nu,
                                std::vector<Cplx> rhs) {
  if (nu <= 0.0) throw std::invalid_argument("solve_shifted: nu must be positive");
  if (sec.kind == SectionKind::grid) {
    if (rhs.size() != sec.interior_count())
      throw std::invalid_argument("solve_shifted: rhs size");
    BandedLU lu = grid_operator(sec, xi, nu);
    lu.solve(rhs);
    return rhs;
  }
  if (sec.kind == SectionKind::disk) {
    const int N = static_cast<int>(sec.r.size());
    if (rhs.size() != sec.r.size()) throw std::invalid_argument("solve_shifted: rhs size");
    const double h = sec.radius / N;
    std::vector<Cplx> lower(N), diag(N), upper(N);
    for (int i = 0; i < N; ++i) {
      const double r_lo = i * h, r_hi = (i + 1) * h;
      const double wdenom = sec.r[i] * h;
      double d = (i == N - 1) ? 2.0 * r_hi / h : r_hi / h;
      if (i > 0) d += r_lo / h;
      diag[i] = Cplx(nu * d / wdenom, xi);
      lower[i] = (i > 0) ? Cplx(-nu * (r_lo / h) / wdenom, 0.0) : Cplx(0.0, 0.0);
      upper[i] = (i < N - 1) ? Cplx(-nu * (r_hi / h) / wdenom, 0.0) : Cplx(0.0, 0.0);
    }
    return solve_tridiagonal(lower, diag, upper, std::move(rhs));
  }
  throw std::logic_error("solve_shifted: rectangle sections are coefficient-space only");
}

double integrate(const CrossSection& sec, const std::vector<double>& f) {
  if (sec.kind == SectionKind::disk) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += sec.weight[i] * f[i];
    return s;
  }
  if (sec.kind == SectionKind::grid) {
    double s = 0.0;
    for (double v : f) s += v;
    return s * sec.h * sec.h;
  }
  throw std::logic_error("integrate: rectangle sections are coefficient-space only");
}

double inner(const CrossSection& sec, const std::vector<double>& fa,
             const std::vector<double>& fb) {
  if (fa.size() != fb.size()) throw std::invalid_argument("inner: size mismatch");
  if (sec.kind == SectionKind::disk) {
    double s = 0.0;
    for (std::size_t i = 0; i < fa.size(); ++i) s += sec.weight[i] * fa[i] * fb[i];
    return s;
  }
  if (sec.kind == SectionKind::grid) {
    double s = 0.0;
    for (std::size_t i = 0; i < fa.size(); ++i) s += fa[i] * fb[i];
    return s * sec.h * sec.h;
  }
  throw std::logic_error("inner: rectangle sections are coefficient-space only");
}

RectangleBasis build_grid(const std::vector<std::uint8_t>& mask, int nx, int ny,
                          double h, int m) {
  if (nx <= 0 || ny <= 0 || static_cast<int>(mask.size()) != nx * ny)
    throw std::invalid_argument("build_grid: mask dimensions");
  if (h <= 0.0) throw std::invalid_argument("build_grid: h must be positive");

  RectangleBasis out;
  CrossSection& sec = out.section;
  sec.kind = SectionKind::grid;
  sec.nx = nx;
  sec.ny = ny;
  sec.h = h;
  sec.mask = mask;
  sec.node_of_cell.assign(mask.size(), -1);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      if (mask[iy * nx + ix]) {
        sec.node_of_cell[iy * nx + ix] = static_cast<int>(sec.cells.size());
        sec.cells.push_back({ix, iy});
      }
  const int n = static_cast<int>(sec.cells.size());
  if (n == 0) throw std::invalid_argument("build_grid: empty mask");
  if (m < 1 || m > n) throw std::invalid_argument("build_grid: need 1 <= m <= interior count");
  sec.measure = h * h * n;
  sec.unit_measure = std::abs(sec.measure - 1.0) < 1e-12;

  // connectivity (4-neighbor BFS)
  {
    std::vector<std::uint8_t> seen(n, 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    int visited = 1;
    while (!queue.empty()) {
      const int id = queue.front();
      queue.pop_front();
      const auto [ix, iy] = sec.cells[id];
      const int nb[4][2] = {{ix - 1, iy}, {ix + 1, iy}, {ix, iy - 1}, {ix, iy + 1}};
      for (const auto& q : nb) {
        if (q[0] < 0 || q[0] >= nx || q[1] < 0 || q[1] >= ny) continue;
        const int j = sec.node_of_cell[q[1] * nx + q[0]];
        if (j >= 0 && !seen[j]) {
          seen[j] = 1;
          ++visited;
          queue.push_back(j);
        }
      }
    }
    if (visited != n) throw std::invalid_argument("build_grid: mask is not connected");
  }

  // Lowest eigenpairs by inverse subspace iteration with one banded
  // factorization of the Poisson operator.
  BandedLU lu = grid_operator(sec, 0.0, 1.0);
  const int p = std::min(n, m + std::max(8, m / 4));
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<std::vector<double>> X(p, std::vector<double>(n));
  for (auto& col : X)
    for (double& v : col) v = unif(rng);

  auto dot_l2 = [&](const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += u[i] * v[i];
    return s * h * h;
  };
  auto apply_neglap = [&](const std::vector<double>& u) {
    std::vector<Cplx> uc(u.begin(), u.end());
    const auto lap = apply_laplacian(sec, uc);
    std::vector<double> out_v(n);
    for (int i = 0; i < n; ++i) out_v[i] = -lap[i].real();
    return out_v;
  };

  std::vector<double> theta(p, 0.0);
  bool converged = false;
  for (int iter = 0; iter < 400 && !converged; ++iter) {
    // X <- L^{-1} X
    for (auto& col : X) {
      std::vector<Cplx> rhs(col.begin(), col.end());
      lu.solve(rhs);
      for (int i = 0; i < n; ++i) col[i] = rhs[i].real();
    }
    // modified Gram-Schmidt in the L2(D) inner product
    for (int a2 = 0; a2 < p; ++a2) {
      for (int b2 = 0; b2 < a2; ++b2) {
        const double pr = dot_l2(X[a2], X[b2]);
        for (int i = 0; i < n; ++i) X[a2][i] -= pr * X[b2][i];
      }
      const double nrm = std::sqrt(dot_l2(X[a2], X[a2]));
      if (nrm < 1e-14) throw std::runtime_error("build_grid: subspace degenerated");
      for (int i = 0; i < n; ++i) X[a2][i] /= nrm;
    }
    // Rayleigh-Ritz
    std::vector<std::vector<double>> LX(p);
    for (int a2 = 0; a2 < p; ++a2) LX[a2] = apply_neglap(X[a2]);
    std::vector<double> Hm(static_cast<std::size_t>(p) * p);
    for (int a2 = 0; a2 < p; ++a2)
      for (int b2 = 0; b2 < p; ++b2)
        Hm[static_cast<std::size_t>(a2) * p + b2] = dot_l2(X[a2], LX[b2]);
    // symmetrize roundoff
    for (int a2 = 0; a2 < p; ++a2)
      for (int b2 = a2 + 1; b2 < p; ++b2) {
        const double avg = 0.5 * (Hm[static_cast<std::size_t>(a2) * p + b2] +
                                  Hm[static_cast<std::size_t>(b2) * p + a2]);
        Hm[static_cast<std::size_t>(a2) * p + b2] = avg;
        Hm[static_cast<std::size_t>(b2) * p + a2] = avg;
      }
    std::vector<double> evals, evecs;
    jacobi_eig_symmetric(Hm, p, evals, evecs);
    std::vector<std::vector<double>> Xr(p, std::vector<double>(n, 0.0));
    for (int k = 0; k < p; ++k)
      for (int a2 = 0; a2 < p; ++a2) {
        const double w = evecs[static_cast<std::size_t>(a2) * p + k];
        for (int i = 0; i < n; ++i) Xr[k][i] += w * X[a2][i];
      }
    X = std::move(Xr);
    theta = evals;
    // residual check on the requested modes
    converged = true;
    for (int k = 0; k < m; ++k) {
      const auto lx = apply_neglap(X[k]);
      double rs = 0.0;
      for (int i = 0; i < n; ++i) {
        const double r = lx[i] - theta[k] * X[k][i];
        rs += r * r;
      }
      if (std::sqrt(rs * h * h) > 1e-9 * std::max(theta[k], 1.0)) {
        converged = false;
        break;
      }
    }
  }
  if (!converged) throw std::runtime_error("build_grid: eigensolver did not converge");

  EigenBasis& basis = out.basis;
  basis.kind = SectionKind::grid;
  for (int k = 0; k < m; ++k) {
    double bk = 0.0;
    for (int i = 0; i < n; ++i) bk += X[k][i];
    bk *= h * h;
    // deterministic sign: beta >= 0, or first component positive when beta ~ 0
    double sign = 1.0;
    if (std::abs(bk) > 1e-12) {
      sign = bk >= 0.0 ? 1.0 : -1.0;
    } else {
      for (int i = 0; i < n; ++i)
        if (std::abs(X[k][i]) > 1e-12) {
          sign = X[k][i] > 0.0 ? 1.0 : -1.0;
          break;
        }
    }
    if (sign < 0.0)
      for (int i = 0; i < n; ++i) X[k][i] = -X[k][i];
    basis.lambda.push_back(theta[k]);
    basis.beta.push_back(std::abs(bk) > 1e-12 ? std::abs(bk) : bk * sign);
    basis.grid_mode.push_back(std::move(X[k]));
  }
  return out;
}

FluxCarrier flux_carrier(const CrossSection& section, const EigenBasis& basis, double nu) {
  if (basis.size() == 0) throw std::invalid_argument("flux_carrier: empty basis");
  if (nu <= 0.0) throw std::invalid_argument("flux_carrier: nu must be positive");

  FluxCarrier fc;
  fc.nu = nu;
  fc.phi_coeff.resize(basis.size());
  double chi_vol = 0.0, chi_energy = 0.0, eta = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const double ck = basis.beta[k] / basis.lambda[k];
    fc.phi_coeff[k] = ck;
    chi_vol += ck * basis.beta[k];                  // int Phi
    chi_energy += basis.lambda[k] * ck * ck;        // int |grad Phi|^2
    eta += ck * ck;                                 // int Phi^2
  }
  fc.chi0_sq = chi_vol;
  fc.chi0_sq_energy = chi_energy;
  fc.eta0_sq = eta;

  if (section.kind == SectionKind::disk || section.kind == SectionKind::grid) {
    const std::size_t n =
        section.kind == SectionKind::disk ? section.r.size() : section.interior_count();
    // direct Poisson solve: nu = 1, xi = 0
    std::vector<Cplx> rhs = solve_shifted(section, 0.0, 1.0, std::vector<Cplx>(n, Cplx(1.0, 0.0)));
    fc.direct_field.resize(n);
    for (std::size_t i = 0; i < n; ++i) fc.direct_field[i] = rhs[i].real();

    // eigen-sum Phi on the same nodes
    std::vector<double> eig_field(n, 0.0);
    if (section.kind == SectionKind::disk) {
      for (std::size_t k = 0; k < basis.size(); ++k)
        for (std::size_t i = 0; i < n; ++i)
          eig_field[i] += fc.phi_coeff[k] * basis.evaluate_mode(k, section.r[i]);
    } else {
      for (std::size_t k = 0; k < basis.size(); ++k)
        for (std::size_t i = 0; i < n; ++i)
          eig_field[i] += fc.phi_coeff[k] * basis.grid_mode[k][i];
    }
    double diff = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = eig_field[i] - fc.direct_field[i];
      diff += d * d;
      ref += fc.direct_field[i] * fc.direct_field[i];
    }
    fc.eigen_vs_direct = std::sqrt(diff / ref);
  }
  return fc;
}

std::vector<std::uint8_t> load_mask(const std::filesystem::path& file, int* nx, int* ny) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("load_mask: cannot open " + file.string());
  std::vector<std::uint8_t> mask;
  std::string line;
  int width = -1, rows = 0;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (width < 0)
      width = static_cast<int>(line.size());
    else if (static_cast<int>(line.size()) != width)
      throw std::runtime_error("load_mask: ragged rows in " + file.string());
    for (char ch : line) {
      if (ch != '0' && ch != '1')
        throw std::runtime_error("load_mask: raster must contain only 0/1");
      mask.push_back(ch == '1' ? 1 : 0);
    }
    ++rows;
  }
  if (rows == 0) throw std::runtime_error("load_mask: empty raster " + file.string());
  *nx = width;
  *ny = rows;
  return mask;
}

void save_basis_csv(const EigenBasis& basis, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("save_basis_csv: cannot write " + file.string());
  out << "k,lambda,beta\n";
  for (std::size_t k = 0; k < basis.size(); ++k)
    out << (k + 1) << ',' << format_double(basis.lambda[k]) << ','
        << format_double(basis.beta[k]) << '\n';
}

}  // namespace pipeflow
