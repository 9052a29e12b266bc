#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "pipeflow/basic_flow.hpp"

using namespace pipeflow;
using Cplx = std::complex<double>;

TEST_CASE("steady flux gives the steady Poiseuille profile") {
  const auto rb = build_rectangle(1.0, 1.0, 41);
  const auto fc = flux_carrier(rb.section, rb.basis, 1.0);
  const double q = 1.0, nu = 1.0;
  const auto sol = solve_spectral(APSeries::constant(q), rb.section, rb.basis, nu);
  REQUIRE(sol.mode_count() == 1);
  // pi = nu q / chi0^2 (~ 1/0.0351 on the unit square) and w = (q/chi0^2) Phi
  CHECK(sol.pi_hat[0].real() == doctest::Approx(nu * q / fc.chi0_sq).epsilon(1e-12));
  CHECK(sol.pi_hat[0].real() == doctest::Approx(1.0 / 0.0351).epsilon(2e-3));
  for (std::size_t k = 0; k < rb.basis.size(); ++k)
    CHECK(sol.w_coeff[0][k].real() ==
          doctest::Approx(q / fc.chi0_sq * fc.phi_coeff[k]).epsilon(1e-12));
  CHECK(sol.flux_residual[0] < 1e-14);
}

TEST_CASE("single-pair cosine flux: pi_hat = f_hat / a_xi") {
  const auto rb = build_rectangle(1.0, 1.0, 21);
  const double xi0 = 3.0;
  const auto sol = solve_spectral(APSeries::cosine(xi0), rb.section, rb.basis, 2.0);
  REQUIRE(sol.mode_count() == 2);
  const auto mode = solve_mode(rb.section, rb.basis, xi0, 2.0);
  CHECK(std::abs(sol.pi_hat[1] - Cplx(0.5, 0.0) / mode.a_xi) < 1e-14);
  CHECK(std::abs(sol.pi_hat[0] - std::conj(sol.pi_hat[1])) < 1e-14);
}

TEST_CASE("superposition and homogeneity") {
  const auto rb = build_rectangle(1.0, 1.0, 15);
  const APSeries f1 = APSeries::cosine(1.0);
  const APSeries f2 = APSeries::from_terms({{1.0, Complex(0.1, -0.2)},
                                            {std::sqrt(2.0), Complex(0.3, 0.05)}});
  const auto s1 = solve_spectral(f1, rb.section, rb.basis, 1.0);
  const auto s2 = solve_spectral(f2, rb.section, rb.basis, 1.0);
  const auto s12 = solve_spectral(f1.plus(f2), rb.section, rb.basis, 1.0);

  auto coeff_at = [](const BasicFlowSolution& s, double xi) -> Cplx {
    for (std::size_t i = 0; i < s.xi.size(); ++i)
      if (std::abs(s.xi[i] - xi) < 1e-12) return s.pi_hat[i];
    return Cplx(0.0, 0.0);
  };
  for (double xi : {-std::sqrt(2.0), -1.0, 1.0, std::sqrt(2.0)}) {
    const Cplx lhs = coeff_at(s12, xi);
    const Cplx rhs = coeff_at(s1, xi) + coeff_at(s2, xi);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(rhs)));
  }

  const auto doubled = solve_spectral(f1.scaled(2.0), rb.section, rb.basis, 1.0);
  CHECK(doubled.ledger.lap_b2 == doctest::Approx(2.0 * s1.ledger.lap_b2).epsilon(1e-12));
  CHECK(doubled.ledger.pi_b2 == doctest::Approx(2.0 * s1.ledger.pi_b2).epsilon(1e-12));
  CHECK(doubled.ledger.sum_pi_plus_xi_w ==
        doctest::Approx(2.0 * s1.ledger.sum_pi_plus_xi_w).epsilon(1e-12));
}

TEST_CASE("per-mode flux identity and equation residual") {
  const auto rb = build_rectangle(1.0, 1.0, 21);
  const APSeries f = APSeries::from_terms({{1.0, Complex(0.5, 0.0)},
                                           {std::sqrt(2.0), Complex(0.2, 0.1)},
                                           {0.0, Complex(0.7, 0.0)}});
  const auto sol = solve_spectral(f, rb.section, rb.basis, 0.7);
  for (std::size_t i = 0; i < sol.mode_count(); ++i) {
    CHECK(sol.flux_residual[i] <= 1e-8 * std::abs(sol.flux_hat[i]));
    // equation residual per coefficient: (i xi + nu lambda_k) w_k = pi beta_k
    for (std::size_t k = 0; k < rb.basis.size(); ++k) {
      const Cplx lhs = Cplx(0.7 * rb.basis.lambda[k], sol.xi[i]) * sol.w_coeff[i][k];
      const Cplx rhs = sol.pi_hat[i] * rb.basis.beta[k];
      CHECK(std::abs(lhs - rhs) <= 1e-8 * (std::abs(rhs) + 1e-300));
    }
  }
}

TEST_CASE("sampled solution: steady probe, flux reproduction, boundary guard") {
  const auto db = build_disk(1.0 / std::sqrt(M_PI), 64, 1024);

  SUBCASE("steady flux keeps the center probe constant") {
    const auto sol = solve_spectral(APSeries::constant(2.0), db.section, db.basis, 1.0);
    const auto table = sample_solution(sol, db.section, db.basis, {0.0, 0.5, 2.0, 17.0},
                                       {{0.0, 0.0}, {0.3, 0.0}});
    for (std::size_t s = 1; s < table.t.size(); ++s) {
      CHECK(table.probes[0][s] == doctest::Approx(table.probes[0][0]).epsilon(1e-12));
      CHECK(table.probes[1][s] == doctest::Approx(table.probes[1][0]).epsilon(1e-12));
    }
  }
  SUBCASE("cos t flux is reproduced by the sampled flux series") {
    const auto sol = solve_spectral(APSeries::cosine(1.0), db.section, db.basis, 1.0);
    std::vector<double> times;
    for (int i = 0; i <= 256; ++i) times.push_back(2.0 * M_PI * i / 256.0);
    const auto table = sample_solution(sol, db.section, db.basis, times, {});
    double num = 0.0, den = 0.0;
    for (std::size_t s = 0; s < times.size(); ++s) {
      const double ref = std::cos(times[s]);
      num += (table.flux[s] - ref) * (table.flux[s] - ref);
      den += ref * ref;
    }
    CHECK(std::sqrt(num / den) < 1e-6);
    CHECK(table.max_imag_residue < 1e-10);
  }
  SUBCASE("boundary and exterior probes are rejected") {
    const auto sol = solve_spectral(APSeries::constant(1.0), db.section, db.basis, 1.0);
    CHECK_THROWS(sample_solution(sol, db.section, db.basis, {0.0},
                                 {{db.section.radius, 0.0}}));
    const auto rb = build_rectangle(1.0, 1.0, 5);
    const auto sol2 = solve_spectral(APSeries::constant(1.0), rb.section, rb.basis, 1.0);
    CHECK_THROWS(sample_solution(sol2, rb.section, rb.basis, {0.0}, {{1.0, 0.5}}));
    CHECK_THROWS(sample_solution(sol2, rb.section, rb.basis, {0.0}, {{-0.1, 0.5}}));
  }
}

TEST_CASE("verify_bounds: steady ratio, boundedness, nu stability") {
  const auto rb = build_rectangle(1.0, 1.0, 41);
  const auto fc = flux_carrier(rb.section, rb.basis, 1.0);
  const APSeries f = APSeries::constant(1.0);
  const auto sol = solve_spectral(f, rb.section, rb.basis, 1.0);
  const auto rep = verify_bounds(sol, f, rb.section, rb.basis);

  // steady flux: ||Lap w||_B2 / ||f||_B2 = ||Lap Phi|| / chi0^2 =
  // sqrt(represented measure) / chi0^2
  const double expected =
      std::sqrt(rb.basis.represented_measure()) / fc.chi0_sq;
  CHECK(rep.lap_ratio == doctest::Approx(expected).epsilon(1e-10));
  CHECK(rep.finite);
  CHECK(rep.sweep_variation < 0.2);
  for (const auto& row : rep.sweep) {
    CHECK(std::isfinite(row.max_lap_ratio));
    CHECK(std::isfinite(row.max_xi_w_ratio));
    CHECK(std::isfinite(row.max_inv_a_ratio));
    // the inverse-gain constant is reached at xi = 0: 1/(|a_0| max{0,nu}) = 1/chi0^2
    CHECK(row.max_inv_a_ratio >= 1.0 / fc.chi0_sq - 1e-9);
  }
}

TEST_CASE("regl1 sums") {
  const auto rb = build_rectangle(1.0, 1.0, 21);
  const auto fc = flux_carrier(rb.section, rb.basis, 1.0);

  SUBCASE("single steady mode") {
    const double nu = 3.0;
    const auto sol = solve_spectral(APSeries::constant(2.0), rb.section, rb.basis, nu);
    const auto rep = regl1_sums(sol, APSeries::constant(2.0));
    CHECK(rep.sum_pi_plus_xi_w ==
          doctest::Approx(nu * 2.0 / fc.chi0_sq).epsilon(1e-12));
    CHECK(rep.bound_pi == doctest::Approx(nu * 2.0).epsilon(1e-14));
  }
  SUBCASE("empty flux") {
    const auto sol = solve_spectral(APSeries(), rb.section, rb.basis, 1.0);
    const auto rep = regl1_sums(sol, APSeries());
    CHECK(rep.sum_lap == 0.0);
    CHECK(rep.sum_pi_plus_xi_w == 0.0);
    CHECK(rep.ratio_lap == 0.0);
  }
  SUBCASE("two-tone quasi-periodic flux has finite ratios") {
    const APSeries f = APSeries::cosine(1.0).plus(APSeries::cosine(std::sqrt(2.0)));
    const auto sol = solve_spectral(f, rb.section, rb.basis, 1.0);
    const auto rep = regl1_sums(sol, f);
    CHECK(rep.sum_lap > 0.0);
    CHECK(std::isfinite(rep.ratio_lap));
    CHECK(std::isfinite(rep.ratio_pi));
    // the sampled sup of ||grad w(t)|| stays under the triangle-inequality bound
    CHECK(sol.ledger.sup_grad_sampled <= sol.ledger.sup_grad_upper * (1.0 + 1e-12));
    CHECK(sol.ledger.sup_grad_sampled > 0.0);
    // the regL1 ratios sit inside the fitted per-mode constant envelope
    const auto bounds = verify_bounds(sol, f, rb.section, rb.basis);
    const double envelope = std::max({bounds.sweep[1].max_lap_ratio,
                                      bounds.sweep[1].max_inv_a_ratio, 1.0});
    CHECK(rep.ratio_lap <= envelope);
    CHECK(rep.ratio_pi <= envelope);
  }
}

TEST_CASE("embedding diagnostics") {
  SUBCASE("integer spectrum, gamma = 2 approaches pi^2/3") {
    std::vector<double> spectrum;
    for (int k = 1; k <= 10000; ++k) {
      spectrum.push_back(k);
      spectrum.push_back(-k);
    }
    const auto rep = embedding_beta(spectrum, 1.0, {2.0});
    CHECK(rep.sums[0].partial_sums.back() ==
          doctest::Approx(M_PI * M_PI / 3.0).epsilon(1e-3));
    CHECK(rep.sums[0].converging);
    CHECK(rep.beta_below_2s_plausible);
  }
  SUBCASE("gamma = 0.5 diverges on the integer spectrum") {
    std::vector<double> spectrum;
    for (int k = 1; k <= 10000; ++k) {
      spectrum.push_back(k);
      spectrum.push_back(-k);
    }
    const auto rep = embedding_beta(spectrum, 0.25, {0.5});
    CHECK(!rep.sums[0].converging);
    CHECK(!rep.beta_below_2s_plausible);
  }
  SUBCASE("a small finite spectrum always converges") {
    const auto rep = embedding_beta({-2.0, -1.0, 0.0, 1.0, 2.0}, 1.0, {0.5, 2.0});
    CHECK(rep.zero_mode_present);
    for (const auto& d : rep.sums) CHECK(d.converging);
  }
}
