#include <doctest.h>

#include <cmath>

#include "pipeflow/nonlinear_gate.hpp"

using namespace pipeflow;

namespace {

double psi_quadratic(double psi, double nu, double phi, double c) {
  const double g = c * (1.0 + 1.0 / nu) * phi;
  return psi * psi - (nu - 2.0 * g) * psi + c * (1.0 + nu) * phi + g * g;
}

}  // namespace

TEST_CASE("degenerate quadratic: phi_star = 0 gives roots {0, nu} exactly") {
  for (double nu : {0.25, 1.0, 10.0, 333.0})
    for (double c : {0.1, 1.0, 5.0}) {
      const auto roots = admissible_psi(nu, 0.0, c);
      REQUIRE(roots.has_value());
      CHECK((*roots)[0] == 0.0);
      CHECK((*roots)[1] == nu);
    }
}

TEST_CASE("large viscosity: two positive roots, checked against the quadratic") {
  const double nu = 100.0, phi = 1.0, c = 1.0;
  const auto roots = admissible_psi(nu, phi, c);
  REQUIRE(roots.has_value());
  const auto [lo, hi] = *roots;
  CHECK(lo > 0.0);
  CHECK(hi > lo);
  // the smaller root sits near c(1+nu)phi/nu for large nu
  CHECK(lo == doctest::Approx(c * (1.0 + nu) * phi / nu).epsilon(0.1));
  // both roots satisfy the quadratic
  const double scale = nu * nu;
  CHECK(std::abs(psi_quadratic(lo, nu, phi, c)) < 1e-10 * scale);
  CHECK(std::abs(psi_quadratic(hi, nu, phi, c)) < 1e-10 * scale);
}

TEST_CASE("small viscosity: no admissible psi") {
  CHECK(!admissible_psi(1.0, 1.0, 1.0).has_value());
}

TEST_CASE("root bracketing: the quadratic is negative exactly between the roots") {
  for (double nu : {30.0, 100.0, 1000.0}) {
    const double phi = 1.5, c = 0.8;
    const auto roots = admissible_psi(nu, phi, c);
    if (!roots) continue;
    const auto [lo, hi] = *roots;
    CHECK(psi_quadratic(0.5 * (lo + hi), nu, phi, c) <= 0.0);
    CHECK(psi_quadratic(0.5 * lo, nu, phi, c) > 0.0);
    CHECK(psi_quadratic(2.0 * hi, nu, phi, c) > 0.0);
  }
}

TEST_CASE("contraction constants") {
  SUBCASE("no forcing gives K0 = 0") {
    const auto [K0, nuK0sq] = contraction_constants(2.0, 0.0, 0.0, 1.0);
    CHECK(K0 == 0.0);
    CHECK(nuK0sq == 0.0);
  }
  SUBCASE("fixed-point consistency at the smaller admissible root") {
    const double nu = 80.0, phi = 1.0, c = 1.0;
    const auto roots = admissible_psi(nu, phi, c);
    REQUIRE(roots.has_value());
    const double psi = (*roots)[0];
    // the quadratic encodes the self-map equality
    //   (c(1+nu)phi + c^2(1+1/nu)^2 phi^2 + c(1+1/nu)phi psi) /
    //   (nu - psi - c(1+1/nu)phi) = psi
    const double g = c * (1.0 + 1.0 / nu) * phi;
    const double lhs = (c * (1.0 + nu) * phi + g * g + g * psi) / (nu - psi - g);
    CHECK(std::abs(lhs - psi) < 1e-10 * (1.0 + psi));
  }
  SUBCASE("K0 is strictly decreasing in nu") {
    double prev = 1e300;
    for (double nu : {10.0, 20.0, 40.0, 80.0}) {
      const auto [K0, nuK0sq] = contraction_constants(nu, 2.0, 1.0, 1.0);
      CHECK(K0 < prev);
      prev = K0;
    }
  }
  SUBCASE("division guard") {
    CHECK_THROWS(contraction_constants(1.0, 2.0, 1.0, 1.0));
  }
}

TEST_CASE("gate reports") {
  SUBCASE("empty flux passes for every viscosity") {
    for (double nu : {0.01, 1.0, 100.0}) {
      const auto rep = gate(APSeries(), nu, 1.0);
      CHECK(rep.phi_star == 0.0);
      CHECK(rep.verdict);
      CHECK(rep.K0 == 0.0);
    }
  }
  SUBCASE("cos t at nu = 50, c = 1 (regression)") {
    const auto rep = gate(APSeries::cosine(1.0), 50.0, 1.0);
    CHECK(rep.phi_star == doctest::Approx(2.0).epsilon(1e-14));
    REQUIRE(rep.psi_roots.has_value());
    CHECK(rep.verdict);
    CHECK(rep.psi_star == doctest::Approx(2.441715471).epsilon(1e-8));
    CHECK(rep.K0 == doctest::Approx(0.09423627273).epsilon(1e-8));
    CHECK(rep.nuK0_sq == doctest::Approx(0.4440237549).epsilon(1e-8));
  }
  SUBCASE("verdict is monotone in nu once true") {
    const APSeries f = APSeries::cosine(1.0);
    const double nu_star = nu0(2.0, 1.0);
    for (double mult : {1.01, 2.0, 4.0}) CHECK(gate(f, nu_star * mult, 1.0).verdict);
    CHECK(!gate(f, nu_star * 0.99, 1.0).verdict);
  }
  SUBCASE("scale coherence: verdict flips from true to false as the flux grows") {
    const double nu = 50.0, c = 1.0;
    bool seen_false = false;
    bool ok = true;
    for (double alpha : {0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0}) {
      const auto rep = gate(APSeries::cosine(1.0).scaled(alpha), nu, c);
      CHECK(rep.phi_star == doctest::Approx(2.0 * alpha).epsilon(1e-12));
      if (seen_false && rep.verdict) ok = false;
      if (!rep.verdict) seen_false = true;
    }
    CHECK(ok);
    CHECK(seen_false);
  }
}

TEST_CASE("nu0 threshold") {
  SUBCASE("no forcing gives zero") {
    CHECK(nu0(0.0, 1.0) == 0.0);
  }
  SUBCASE("phi_star = 1, c = 1 (regression)") {
    const double t = nu0(1.0, 1.0);
    CHECK(t == doctest::Approx(11.65486799).epsilon(1e-6));
    CHECK(gate_scalar(1.0, t * 1.001, 1.0).verdict);
    CHECK(!gate_scalar(1.0, t * 0.999, 1.0).verdict);
  }
  SUBCASE("monotone in phi_star and in c") {
    double prev = 0.0;
    for (double phi : {0.5, 1.0, 2.0, 4.0}) {
      const double t = nu0(phi, 1.0);
      CHECK(t > prev);
      prev = t;
    }
    prev = 0.0;
    for (double c : {0.5, 1.0, 2.0, 4.0}) {
      const double t = nu0(1.0, c);
      CHECK(t > prev);
      prev = t;
    }
  }
}
