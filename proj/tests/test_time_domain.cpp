#include <doctest.h>

#include <cmath>
#include <vector>

#include "pipeflow/basic_flow.hpp"
#include "pipeflow/time_domain.hpp"

using namespace pipeflow;

TEST_CASE("initial condition: flux compatibility and carrier shape") {
  const auto rb = build_rectangle(1.0, 1.0, 41);
  const auto fc = flux_carrier(rb.section, rb.basis, 1.0);

  SUBCASE("zero flux gives the zero state") {
    const auto c = initial_condition(rb.basis, 1.0, 0.0);
    for (double v : c) CHECK(v == 0.0);
  }
  SUBCASE("flux compatibility at t = 0") {
    const auto c = initial_condition(rb.basis, 2.0, 1.0);
    double fl = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) fl += rb.basis.beta[k] * c[k];
    CHECK(fl == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("w0 approximates Phi / chi0^2") {
    const auto c = initial_condition(rb.basis, 1.0, 1.0);
    double diff_sq = 0.0, ref_sq = 0.0;
    const double chi0_converged = 0.03514425;  // high-mode eigen-sum reference
    for (std::size_t k = 0; k < c.size(); ++k) {
      const double ref = fc.phi_coeff[k] / chi0_converged;
      diff_sq += (c[k] - ref) * (c[k] - ref);
      ref_sq += ref * ref;
    }
    CHECK(std::sqrt(diff_sq / ref_sq) < 1e-3);
  }
}

TEST_CASE("pressure projection threshold") {
  const auto rb = build_rectangle(1.0, 1.0, 41);
  const std::size_t m0 = pressure_projection_threshold(rb.basis);
  // verify the defining inequality flips exactly at m0
  std::vector<double> phi(rb.basis.size());
  double chi_sq = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    phi[k] = rb.basis.beta[k] / rb.basis.lambda[k];
    chi_sq += phi[k] * rb.basis.beta[k];
  }
  auto tail = [&](std::size_t m) {
    double s = 0.0;
    for (std::size_t k = m; k < phi.size(); ++k) s += phi[k] * phi[k];
    return s;
  };
  const double bound = chi_sq * chi_sq / 6.0;
  CHECK(tail(m0) < bound);
  if (m0 > 0) CHECK(tail(m0 - 1) >= bound);
  // the carrier is heavily concentrated on the first mode
  CHECK(m0 == 1);
}

TEST_CASE("march with a steady flux settles on steady Poiseuille") {
  const auto rb = build_rectangle(1.0, 1.0, 21);
  const auto fc = flux_carrier(rb.section, rb.basis, 1.0);
  const double nu = 1.0, q = 1.0;
  const auto flux = FluxFunction::from_series(APSeries::constant(q));
  const double T = 20.0 / (nu * rb.basis.lambda[0]);
  const auto sol = march(flux, rb.basis, nu, 1e-3, T);

  CHECK(sol.pi.back() == doctest::Approx(nu * q / fc.chi0_sq).epsilon(1e-6));
  for (std::size_t k = 0; k < rb.basis.size(); ++k)
    CHECK(sol.c_final[k] ==
          doctest::Approx(q / fc.chi0_sq * rb.basis.beta[k] / rb.basis.lambda[k])
              .epsilon(1e-5));
  CHECK(sol.max_flux_residual < 1e-12);
}

TEST_CASE("march with zero flux and zero data stays at rest") {
  const auto rb = build_rectangle(1.0, 1.0, 11);
  const auto flux = FluxFunction::from_series(APSeries());
  const std::vector<double> zero(rb.basis.size(), 0.0);
  const auto sol = march(flux, rb.basis, 1.0, 1e-2, 1.0, &zero);
  for (double v : sol.pi) CHECK(v == 0.0);
  for (double v : sol.energy) CHECK(v == 0.0);
}

TEST_CASE("oscillatory march matches the spectral route after the transient") {
  const auto rb = build_rectangle(1.0, 1.0, 21);
  const double nu = 1.0;
  const APSeries f = APSeries::cosine(1.0);
  const auto flux = FluxFunction::from_series(f);
  const double dt = 1e-3, T = 30.0;
  const auto sol = march(flux, rb.basis, nu, dt, T);

  const auto spec = solve_spectral(f, rb.section, rb.basis, nu);
  const APSeries pi_spec = spec.pressure_series();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < sol.t.size(); ++i) {
    if (sol.t[i] < 20.0) continue;
    const double ref = pi_spec.evaluate(sol.t[i]);
    num += (sol.pi[i] - ref) * (sol.pi[i] - ref);
    den += ref * ref;
  }
  CHECK(std::sqrt(num / den) < 1e-4);
}

TEST_CASE("volterra pressure: steady settling and march agreement") {
  const auto rb = build_rectangle(1.0, 1.0, 21);
  const auto fc = flux_carrier(rb.section, rb.basis, 1.0);
  const double nu = 1.0;

  SUBCASE("steady flux settles on nu q / chi0^2") {
    const auto flux = FluxFunction::from_series(APSeries::constant(1.0));
    double kernel_scale = 0.0;
    const auto pi = volterra_pressure(flux, rb.basis, nu, 1e-3, 2.0, nullptr,
                                      &kernel_scale);
    CHECK(pi.values.back() == doctest::Approx(nu / fc.chi0_sq).epsilon(1e-6));
    CHECK(kernel_scale > 0.0);
  }
  SUBCASE("agrees with the march for an oscillatory flux") {
    const auto flux = FluxFunction::from_series(APSeries::cosine(1.0));
    const double dt = 1e-3, T = 8.0;
    const auto sol = march(flux, rb.basis, nu, dt, T);
    const auto pi = volterra_pressure(flux, rb.basis, nu, dt, T);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < sol.pi.size(); ++i) {
      num += (sol.pi[i] - pi.values[i]) * (sol.pi[i] - pi.values[i]);
      den += sol.pi[i] * sol.pi[i];
    }
    CHECK(std::sqrt(num / den) < 1e-6);
  }
}

TEST_CASE("single-mode Volterra solution matches the closed form") {
  // with one mode the constraint forces c1 = f / beta1, hence
  // pi(t) = (f'(t) + nu lambda1 f(t)) / beta1^2
  const auto rb = build_rectangle(1.0, 1.0, 1);
  const double nu = 1.3, omega = 2.0;
  const APSeries f = APSeries::cosine(omega);
  const auto flux = FluxFunction::from_series(f);
  const double dt = 1e-4, T = 2.0;
  const auto pi = volterra_pressure(flux, rb.basis, nu, dt, T);
  const double lambda1 = rb.basis.lambda[0];
  const double beta1 = rb.basis.beta[0];
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < pi.values.size(); ++i) {
    const double t = dt * double(i);
    const double exact =
        (-omega * std::sin(omega * t) + nu * lambda1 * std::cos(omega * t)) /
        (beta1 * beta1);
    worst = std::max(worst, std::abs(pi.values[i] - exact));
    scale = std::max(scale, std::abs(exact));
  }
  CHECK(worst / scale < 1e-8);
}

TEST_CASE("uloc report") {
  const auto rb = build_rectangle(1.0, 1.0, 21);
  const double nu = 1.0;

  SUBCASE("zero data and zero flux give ratio 0") {
    const auto flux = FluxFunction::from_series(APSeries());
    const std::vector<double> zero(rb.basis.size(), 0.0);
    const auto sol = march(flux, rb.basis, nu, 1e-2, 3.0, &zero);
    SampledSignal f_zero;
    f_zero.t0 = 0.0;
    f_zero.dt = 1e-2;
    f_zero.values.assign(sol.t.size(), 0.0);
    f_zero.derivative.assign(sol.t.size(), 0.0);
    const auto rep = uloc_report(sol, f_zero, nu);
    CHECK(rep.lhs == 0.0);
    CHECK(rep.ratio == 0.0);
  }
  SUBCASE("scaling the flux leaves the ratio fixed") {
    const APSeries f = APSeries::cosine(1.0);
    const auto sol1 = march(FluxFunction::from_series(f), rb.basis, nu, 1e-3, 5.0);
    const auto sol2 =
        march(FluxFunction::from_series(f.scaled(2.0)), rb.basis, nu, 1e-3, 5.0);
    const auto fs1 = sample(f, 0.0, 1e-3, sol1.t.size());
    const auto fs2 = sample(f.scaled(2.0), 0.0, 1e-3, sol2.t.size());
    const auto rep1 = uloc_report(sol1, fs1, nu);
    const auto rep2 = uloc_report(sol2, fs2, nu);
    CHECK(rep2.lhs == doctest::Approx(4.0 * rep1.lhs).epsilon(1e-10));
    CHECK(rep2.ratio == doctest::Approx(rep1.ratio).epsilon(1e-10));
  }
  SUBCASE("short runs are rejected") {
    const auto flux = FluxFunction::from_series(APSeries::constant(1.0));
    const auto sol = march(flux, rb.basis, nu, 1e-2, 1.0);
    SampledSignal fs;
    fs.values.assign(sol.t.size(), 1.0);
    fs.derivative.assign(sol.t.size(), 0.0);
    fs.dt = 1e-2;
    CHECK_THROWS(uloc_report(sol, fs, nu));
  }
}

TEST_CASE("zero-flux decay") {
  const auto rb = build_rectangle(1.0, 1.0, 21);
  const auto flux = FluxFunction::from_series(APSeries::constant(1.0));

  SUBCASE("identical initial data is flagged") {
    const auto w0 = initial_condition(rb.basis, 1.0, 1.0);
    const auto res = decay_test(rb.basis, 1.0, flux, w0, w0, 1e-3, 1.0);
    CHECK(res.identical);
    CHECK(std::isinf(res.fitted_rate));
  }
  SUBCASE("rate bound and viscosity linearity") {
    // perturbation along beta2 e1 - beta1 e2 (zero-flux direction)
    auto rate_at = [&](double nu) {
      const auto w0a = initial_condition(rb.basis, nu, 1.0);
      auto w0b = w0a;
      const double b1 = rb.basis.beta[0], b2 = rb.basis.beta[1];
      const double nrm = std::hypot(b1, b2);
      w0b[0] += 1e-3 * b2 / nrm;
      w0b[1] -= 1e-3 * b1 / nrm;
      return decay_test(rb.basis, nu, flux, w0a, w0b, 1e-4, 1.5).fitted_rate;
    };
    const double lambda1 = rb.basis.lambda[0];
    const double r1 = rate_at(1.0);
    CHECK(r1 >= 2.0 * lambda1 * 0.95);
    const double r2 = rate_at(2.0);
    const double r4 = rate_at(4.0);
    CHECK(r2 / r1 == doctest::Approx(2.0).epsilon(0.05));
    CHECK(r4 / r2 == doctest::Approx(2.0).epsilon(0.05));
  }
  SUBCASE("incompatible initial data is rejected") {
    const auto w0a = initial_condition(rb.basis, 1.0, 1.0);
    auto w0b = w0a;
    w0b[0] += 1.0;  // breaks the flux constraint
    CHECK_THROWS(decay_test(rb.basis, 1.0, flux, w0a, w0b, 1e-3, 1.0));
  }
}

TEST_CASE("both time routes converge at second order in dt") {
  const auto rb = build_rectangle(1.0, 1.0, 15);
  const APSeries f = APSeries::cosine(1.0);
  const auto flux = FluxFunction::from_series(f);
  const double T = 1.0;

  // self-convergence of the trajectories over the transient window
  auto march_pi = [&](double dt) {
    return march(flux, rb.basis, 1.0, dt, T).pi;
  };
  auto volterra_pi = [&](double dt) {
    return volterra_pressure(flux, rb.basis, 1.0, dt, T).values;
  };
  auto order_of = [&](auto&& run) {
    const auto coarse = run(4e-3);
    const auto mid = run(2e-3);
    const auto fine = run(1e-3);
    double d1 = 0.0, d2 = 0.0;
    for (std::size_t i = 0; i < coarse.size(); ++i)
      d1 = std::max(d1, std::abs(coarse[i] - mid[2 * i]));
    for (std::size_t i = 0; i < mid.size(); ++i)
      d2 = std::max(d2, std::abs(mid[i] - fine[2 * i]));
    return std::log2(d1 / d2);
  };
  CHECK(order_of(march_pi) >= 1.8);
  CHECK(order_of(volterra_pi) >= 1.8);
}

TEST_CASE("steady flux: energy is non-increasing for any stable step") {
  const auto rb = build_rectangle(1.0, 1.0, 15);
  const auto flux = FluxFunction::from_series(APSeries::constant(1.0));
  // start away from the steady state along a zero-flux direction
  auto c0 = initial_condition(rb.basis, 1.0, 1.0);
  c0[1] += 0.5;  // beta_2 = 0 keeps the flux constraint intact
  for (double dt : {0.05, 0.005}) {
    const auto sol = march(flux, rb.basis, 1.0, dt, 3.0, &c0);
    for (std::size_t i = 1; i < sol.energy.size(); ++i)
      CHECK(sol.energy[i] <= sol.energy[i - 1] * (1.0 + 1e-12));
  }
}

TEST_CASE("march and flux-function guards") {
  const auto rb = build_rectangle(1.0, 1.0, 5);
  const auto flux = FluxFunction::from_series(APSeries::constant(1.0));
  std::vector<double> wrong_size(3, 0.0);
  CHECK_THROWS(march(flux, rb.basis, 1.0, 1e-2, 1.0, &wrong_size));
  CHECK_THROWS(march(flux, rb.basis, -1.0, 1e-2, 1.0));
  CHECK_THROWS(march(flux, rb.basis, 1.0, 0.0, 1.0));

  SampledSignal no_slope;
  no_slope.values.assign(10, 1.0);
  CHECK_THROWS(FluxFunction::from_samples(no_slope));

  // sampled flux drives the march identically to the analytic one
  const APSeries f = APSeries::cosine(1.0);
  const auto analytic = FluxFunction::from_series(f);
  const auto sampled = FluxFunction::from_samples(sample(f, 0.0, 1e-3, 2002));
  const auto sol_a = march(analytic, rb.basis, 1.0, 1e-3, 2.0);
  const auto sol_s = march(sampled, rb.basis, 1.0, 1e-3, 2.0);
  for (std::size_t i = 0; i < sol_a.pi.size(); i += 100)
    CHECK(sol_s.pi[i] == doctest::Approx(sol_a.pi[i]).epsilon(1e-9));
}
