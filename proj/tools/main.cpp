// Command-line front end: eigs, modal, flow, march, gate, validate.
// Exit codes: 0 pass, 1 criterion failure, 2 config/input error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pipeflow/basic_flow.hpp"
#include "pipeflow/config.hpp"
#include "pipeflow/cross_section.hpp"
#include "pipeflow/modal.hpp"
#include "pipeflow/nonlinear_gate.hpp"
#include "pipeflow/time_domain.hpp"
#include "pipeflow/util.hpp"
#include "pipeflow/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::string out_dir;
  int threads = 0;
  std::string tolerance_profile = "default";
};

pipeflow::RunConfig load_config(const GlobalOptions& g) {
  if (g.config_path.empty()) throw std::runtime_error("--config is required");
  auto cfg = pipeflow::parse_config(g.config_path);
  if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
  if (g.tolerance_profile == "strict")
    cfg.identity_ceiling = 1e-10;
  else if (g.tolerance_profile != "default")
    throw std::runtime_error("--tolerance-profile must be strict or default");
  fs::create_directories(cfg.out_dir);
  return cfg;
}

void write_json(const ordered_json& j, const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << j.dump(2) << '\n';
}

int cmd_eigs(const GlobalOptions& g) {
  const auto cfg = load_config(g);
  const auto rb = cfg.build_section();
  const auto fc = pipeflow::flux_carrier(rb.section, rb.basis, cfg.nu);
  pipeflow::save_basis_csv(rb.basis, cfg.out_dir / fs::path("eigs.csv"));

  ordered_json j;
  j["measure"] = rb.section.measure;
  j["modes"] = rb.basis.size();
  j["represented_measure"] = rb.basis.represented_measure();
  j["beta_sq_defect"] = rb.section.measure - rb.basis.represented_measure();
  j["chi0_sq"] = fc.chi0_sq;
  j["chi0_sq_energy"] = fc.chi0_sq_energy;
  j["eta0_sq"] = fc.eta0_sq;
  j["nu"] = cfg.nu;
  j["int_phi"] = fc.int_phi();
  j["int_phi_sq"] = fc.int_phi_sq();
  if (fc.eigen_vs_direct) j["eigen_vs_direct"] = *fc.eigen_vs_direct;
  j["pressure_projection_threshold"] = pipeflow::pressure_projection_threshold(rb.basis);
  write_json(j, cfg.out_dir / fs::path("carrier.json"));
  std::printf("eigs: %zu modes, lambda1 = %.12g, chi0_sq = %.12g\n", rb.basis.size(),
              rb.basis.lambda[0], fc.chi0_sq);
  return 0;
}

int cmd_modal(const GlobalOptions& g) {
  const auto cfg = load_config(g);
  if (cfg.sweep_frequencies.empty())
    throw std::runtime_error("modal: sweep.frequencies is required");
  const auto rb = cfg.build_section();
  const auto rows = pipeflow::gain_sweep(rb.section, rb.basis, cfg.nu,
                                          cfg.sweep_frequencies);
  pipeflow::save_gain_csv(rows, cfg.out_dir / fs::path("gain_sweep.csv"));

  double worst = 0.0;
  for (const auto& r : rows)
    worst = std::max({worst, r.residuals[0], r.residuals[1], r.residuals[2]});
  ordered_json j;
  j["nu"] = cfg.nu;
  j["frequencies"] = cfg.sweep_frequencies;
  j["max_identity_residual"] = worst;
  j["residual_ceiling"] = cfg.identity_ceiling;
  j["pass"] = worst <= cfg.identity_ceiling;
  write_json(j, cfg.out_dir / fs::path("modal_summary.json"));
  std::printf("modal: %zu frequencies, max identity residual %.3e (ceiling %.1e)\n",
              rows.size(), worst, cfg.identity_ceiling);
  return worst <= cfg.identity_ceiling ? 0 : 1;
}

int cmd_flow(const GlobalOptions& g) {
  const auto cfg = load_config(g);
  const auto rb = cfg.build_section();
  const auto f = cfg.load_flux();
  const auto sol = pipeflow::solve_spectral(f, rb.section, rb.basis, cfg.nu);
  pipeflow::save_flow_report(sol, cfg.out_dir / fs::path("flow_report.json"));

  // time samples over four slowest periods (or [0, T] when configured)
  double horizon = cfg.T;
  if (horizon <= 0.0) {
    double xi_min = 0.0;
    for (const auto& t : f.terms())
      if (t.xi != 0.0 && (xi_min == 0.0 || std::abs(t.xi) < xi_min)) xi_min = std::abs(t.xi);
    horizon = xi_min > 0.0 ? 4.0 * 2.0 * M_PI / xi_min : 1.0;
  }
  std::vector<double> times;
  for (double t = 0.0; t <= horizon + 1e-12; t += horizon / 512.0) times.push_back(t);
  const auto table = pipeflow::sample_solution(sol, rb.section, rb.basis, times, cfg.probes);
  pipeflow::save_sample_csv(table, cfg.out_dir / fs::path("flow_samples.csv"));

  const auto bounds = pipeflow::verify_bounds(sol, f, rb.section, rb.basis);
  const auto reg = pipeflow::regl1_sums(sol, f);
  ordered_json j;
  j["lap_ratio"] = bounds.lap_ratio;
  j["pi_wt_ratio"] = bounds.pi_wt_ratio;
  j["sweep_variation"] = bounds.sweep_variation;
  j["finite"] = bounds.finite;
  auto sweep = ordered_json::array();
  for (const auto& row : bounds.sweep)
    sweep.push_back({{"nu", row.nu},
                     {"max_lap_ratio", row.max_lap_ratio},
                     {"max_xi_w_ratio", row.max_xi_w_ratio},
                     {"max_inv_a_ratio", row.max_inv_a_ratio}});
  j["per_mode_sweep"] = sweep;
  j["regl1"] = {{"sum_lap", reg.sum_lap},
                {"sum_pi_plus_xi_w", reg.sum_pi_plus_xi_w},
                {"bound_lap", reg.bound_lap},
                {"bound_pi", reg.bound_pi},
                {"ratio_lap", reg.ratio_lap},
                {"ratio_pi", reg.ratio_pi}};
  write_json(j, cfg.out_dir / fs::path("bounds_report.json"));
  const double worst_flux =
      sol.flux_residual.empty()
          ? 0.0
          : *std::max_element(sol.flux_residual.begin(), sol.flux_residual.end());
  std::printf("flow: %zu modes, ||pi||_B2 = %.12g, max flux residual %.3e\n",
              sol.mode_count(), sol.ledger.pi_b2, worst_flux);
  return 0;
}

int cmd_march(const GlobalOptions& g) {
  const auto cfg = load_config(g);
  if (cfg.T <= 0.0) throw std::runtime_error("march: time.T must be positive");
  const auto rb = cfg.build_section();
  const auto f = cfg.load_flux();
  const auto flux = pipeflow::FluxFunction::from_series(f);
  const auto sol = pipeflow::march(flux, rb.basis, cfg.nu, cfg.dt, cfg.T, nullptr,
                                   cfg.projection);
  pipeflow::save_trajectory_csv(sol, cfg.out_dir / fs::path("trajectory.csv"));

  ordered_json j;
  j["nu"] = cfg.nu;
  j["dt"] = cfg.dt;
  j["T"] = cfg.T;
  j["modes"] = sol.modes;
  j["scheme"] = "trapezoid";
  j["projection"] = cfg.projection ? "on" : "off";
  j["max_flux_residual"] = sol.max_flux_residual;
  j["max_projection_correction"] = sol.max_projection_correction;
  if (cfg.T >= 2.0) {
    const auto fs_sig = pipeflow::sample(f, 0.0, cfg.dt, sol.t.size());
    const auto uloc = pipeflow::uloc_report(sol, fs_sig, cfg.nu);
    j["uloc"] = {{"lhs", uloc.lhs},
                 {"f_h1_uloc", uloc.f_h1_uloc},
                 {"rhs", uloc.rhs},
                 {"ratio", uloc.ratio}};
  }

  // cross-route comparison against the spectral solve, post-transient
  const auto spec = pipeflow::solve_spectral(f, rb.section, rb.basis, cfg.nu);
  const auto pi_series = spec.pressure_series();
  const double t_settle = 0.5 * cfg.T;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < sol.t.size(); ++i) {
    if (sol.t[i] < t_settle) continue;
    const double ref = pi_series.evaluate(sol.t[i]);
    num += (sol.pi[i] - ref) * (sol.pi[i] - ref);
    den += ref * ref;
  }
  if (den > 0.0) j["post_transient_pi_mismatch"] = std::sqrt(num / den);
  write_json(j, cfg.out_dir / fs::path("march_report.json"));
  std::printf("march: %zu steps, max flux residual %.3e\n", sol.t.size() - 1,
              sol.max_flux_residual);
  return 0;
}

int cmd_gate(const GlobalOptions& g) {
  const auto cfg = load_config(g);
  const auto f = cfg.load_flux();
  auto rep = pipeflow::gate(f, cfg.nu, cfg.gate_c);
  pipeflow::save_gate_json(rep, cfg.out_dir / fs::path("gate.json"));
  std::printf("gate: phi_star = %.12g, verdict %s\n", rep.phi_star,
              rep.verdict ? "true" : "false");
  if (cfg.gate_nu0) {
    const double threshold = pipeflow::nu0(rep.phi_star, cfg.gate_c);
    ordered_json j;
    j["phi_star"] = rep.phi_star;
    j["c"] = cfg.gate_c;
    j["nu0"] = threshold;
    write_json(j, cfg.out_dir / fs::path("nu0.json"));
    std::printf("gate: nu0 = %.12g\n", threshold);
  }
  return 0;
}

int cmd_validate(const GlobalOptions& g) {
  const fs::path out_dir = g.out_dir.empty() ? fs::path(".") : fs::path(g.out_dir);
  fs::create_directories(out_dir);
  const auto results = pipeflow::run_acceptance();
  ordered_json arr = ordered_json::array();
  bool all_pass = true;
  double total = 0.0;
  for (const auto& r : results) {
    std::printf("%s criterion %2d: %s [measured %.6g, tolerance %.6g, %.2fs]\n",
                r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.measured, r.tolerance,
                r.seconds);
    if (!r.detail.empty()) std::printf("      %s\n", r.detail.c_str());
    all_pass = all_pass && r.pass;
    total += r.seconds;
    arr.push_back({{"id", r.id},
                   {"name", r.name},
                   {"pass", r.pass},
                   {"measured", r.measured},
                   {"tolerance", r.tolerance},
                   {"detail", r.detail},
                   {"seconds", r.seconds}});
  }
  ordered_json j;
  j["pass"] = all_pass;
  j["total_seconds"] = total;
  j["criteria"] = arr;
  write_json(j, out_dir / "validate.json");
  std::printf("%s (total %.1fs)\n", all_pass ? "ALL CRITERIA PASS" : "CRITERIA FAILED",
              total);
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Almost-periodic pipe-flow solver: flux-driven basic flow, two "
               "independent routes, and the nonlinear contraction gate"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config_path, "run configuration file");
  app.add_option("--out", g.out_dir, "output directory (overrides out.dir)");
  app.add_option("--threads", g.threads, "worker threads (0 = hardware)");
  app.add_option("--tolerance-profile", g.tolerance_profile, "strict or default");

  auto* eigs = app.add_subcommand("eigs", "eigenbasis and flux carrier");
  auto* modal = app.add_subcommand("modal", "per-frequency gain sweep and identities");
  auto* flow = app.add_subcommand("flow", "frequency-domain basic-flow solve");
  auto* march_cmd = app.add_subcommand("march", "time-domain Galerkin march");
  auto* gate_cmd = app.add_subcommand("gate", "contraction-gate certificate");
  auto* validate = app.add_subcommand("validate", "run the acceptance suite");
  for (auto* sub : {eigs, modal, flow, march_cmd, gate_cmd, validate})
    sub->fallthrough();  // accept the global options after the subcommand name

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad usage is an input error
  }
  pipeflow::set_thread_count(g.threads);

  try {
    if (eigs->parsed()) return cmd_eigs(g);
    if (modal->parsed()) return cmd_modal(g);
    if (flow->parsed()) return cmd_flow(g);
    if (march_cmd->parsed()) return cmd_march(g);
    if (gate_cmd->parsed()) return cmd_gate(g);
    if (validate->parsed()) return cmd_validate(g);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
