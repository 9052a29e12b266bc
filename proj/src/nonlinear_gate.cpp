#include "pipeflow/nonlinear_gate.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace pipeflow {

std::optional<std::array<double, 2>> admissible_psi(double nu, double phi_star, double c) {
  if (nu <= 0.0) throw std::invalid_argument("admissible_psi: nu must be positive");
  if (phi_star < 0.0 || c <= 0.0)
    throw std::invalid_argument("admissible_psi: phi_star >= 0 and c > 0 required");
  const double lin = nu - 2.0 * c * (1.0 + 1.0 / nu) * phi_star;
  if (lin <= 0.0) return std::nullopt;
  const double g = c * (1.0 + 1.0 / nu) * phi_star;
  const double q = c * (1.0 + nu) * phi_star + g * g;
  const double disc = lin * lin - 4.0 * q;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  return std::array<double, 2>{0.5 * (lin - root), 0.5 * (lin + root)};
}

std::array<double, 2> contraction_constants(double nu, double psi_star, double phi_star,
                                            double c) {
  if (nu <= psi_star)
    throw std::invalid_argument("contraction_constants: requires nu > psi_star");
  const double K0 = (psi_star + c * (1.0 + 1.0 / nu) * phi_star) / (nu - psi_star);
  return {K0, nu * K0 * K0};
}

GateReport gate_scalar(double phi_star, double nu, double c) {
  GateReport rep;
  rep.phi_star = phi_star;
  rep.c = c;
  rep.nu = nu;
  rep.psi_roots = admissible_psi(nu, phi_star, c);
  if (!rep.psi_roots) return rep;  // verdict false
  rep.psi_star = (*rep.psi_roots)[0];
  if (nu <= rep.psi_star) return rep;
  const auto [K0, nuK0sq] = contraction_constants(nu, rep.psi_star, phi_star, c);
  rep.K0 = K0;
  rep.nuK0_sq = nuK0sq;
  const bool margin = nu > rep.psi_star + c * (1.0 + 1.0 / nu) * phi_star;
  rep.verdict = margin && K0 < 1.0 && nuK0sq < 1.0;
  return rep;
}

GateReport gate(const APSeries& f, double nu, double c) {
  return gate_scalar(f.phi_star(), nu, c);
}

double nu0(double phi_star, double c) {
  if (phi_star < 0.0 || c <= 0.0) throw std::invalid_argument("nu0: bad arguments");
  if (phi_star == 0.0) return 0.0;

  auto holds = [&](double nu) { return gate_scalar(phi_star, nu, c).verdict; };

  // expand an upper bracket
  double hi = std::max(1.0, 8.0 * c * phi_star);
  int guard = 0;
  while (!holds(hi)) {
    hi *= 2.0;
    if (++guard > 200) throw std::runtime_error("nu0: no contraction viscosity found");
  }
  double lo = 0.0;
  while (hi - lo > 1e-9 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (holds(mid))
      hi = mid;
    else
      lo = mid;
  }
  // monotone re-verification above the threshold
  for (double mult : {1.0 + 1e-6, 2.0, 4.0}) {
    if (!holds(hi * mult))
      throw std::runtime_error("nu0: verdict not monotone above the bisection point");
  }
  return hi;
}

void save_gate_json(const GateReport& rep, const std::filesystem::path& file) {
  nlohmann::ordered_json j;
  j["input"] = {{"phi_star", rep.phi_star}, {"c", rep.c}, {"nu", rep.nu}};
  j["phi_star"] = rep.phi_star;
  j["c"] = rep.c;
  j["nu"] = rep.nu;
  if (rep.psi_roots) {
    j["psi_roots"] = {(*rep.psi_roots)[0], (*rep.psi_roots)[1]};
    j["psi_star"] = rep.psi_star;
  } else {
    j["psi_roots"] = nullptr;
  }
  j["K0"] = rep.K0;
  j["nuK0_sq"] = rep.nuK0_sq;
  j["verdict"] = rep.verdict;
  std::ofstream out(file);
  if (!out) throw std::runtime_error("save_gate_json: cannot write " + file.string());
  out << j.dump(2) << '\n';
}

}  // namespace pipeflow
