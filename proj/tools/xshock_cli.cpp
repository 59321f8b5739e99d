// Command-line front end: each module can be run on its own.
#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "xshock/harness.hpp"
#include "xshock/interface_checks.hpp"

using namespace xs;
using nlohmann::json;

namespace {

struct Globals {
  std::string config, out = "xshock_out", mode;
  std::vector<int> levels;
  bool quiet = false;
};

ScenarioConfig load(const Globals& g) {
  ScenarioConfig c = g.config.empty() ? ScenarioConfig{} : load_config(g.config);
  if (!g.mode.empty()) c.mode = g.mode;
  if (!g.levels.empty()) c.levels = g.levels;
  validate_config(c);
  return c;
}

void write_json(const Globals& g, const std::string& name, const json& j) {
  std::filesystem::create_directories(g.out);
  write_text_file((std::filesystem::path(g.out) / name).string(), j.dump(2) + "\n");
  if (!g.quiet) std::cout << j.dump(2) << "\n";
}

void write_table(const Globals& g, const std::string& name, const CsvTable& t) {
  std::filesystem::create_directories(g.out);
  std::ostringstream os;
  write_csv(os, t);
  write_text_file((std::filesystem::path(g.out) / name).string(), os.str());
  if (!g.quiet) std::cout << name << ": " << t.rows.size() << " rows\n";
}

int cmd_scenario(const Globals& g) {
  const ScenarioConfig c = load(g);
  const Scenario sc = synthesize_scenario(c.scenario);
  json j;
  j["scenario_hash"] = scenario_hash(c);
  j["closed_forms"] = table_json(closed_form_suite(sc.inv));
  j["r0"] = sc.inv.r0;
  j["mu0"] = sc.inv.mu0;
  j["a_minus"] = sc.inv.a_minus;
  j["a_plus"] = sc.inv.a_plus;
  j["xi0"] = sc.inv.xi0;
  j["e_plus0"] = sc.inv.e_plus0;
  write_json(g, "scenario.json", j);
  return 0;
}

int cmd_hard(const Globals& g) {
  const ScenarioConfig c = load(g);
  const Scenario sc = synthesize_scenario(c.scenario);
  const HardField f = evolve_prior(sc, c.prior_domain, c.prior_delta);
  const HardDiagnostics d = hard_diagnostics(f);
  json j;
  j["nodes"] = f.nodes.size();
  j["max_cell_iterations"] = f.max_cell_iterations;
  j["sigma_identity"] = d.max_sigma_identity;
  j["omega_identity"] = d.max_omega_identity;
  for (const auto& r : consistency_report(f)) j["residual_" + r.name] = r.value;
  write_json(g, "hard.json", j);
  return 0;
}

int cmd_interface(const Globals& g) {
  const ScenarioConfig c = load(g);
  const Context ctx = prepare(c);
  CsvTable t;
  t.header = {"chi", "u", "v", "r", "m", "rdot", "f", "e_omega", "q"};
  for (const auto& p : ctx.sigma->points())
    t.rows.push_back({p.chi, p.u, p.h, p.r, p.m, p.rdot, p.f, p.e_omega, p.q});
  write_table(g, "interface.csv", t);
  const MeasuredInvariants m = nullpoint_invariants(*ctx.sigma, *ctx.prior);
  json j;
  j["k_measured"] = m.k;
  j["j_measured"] = m.j;
  j["k_closed"] = ctx.sc.inv.k;
  j["j_closed"] = ctx.sc.inv.j;
  j["l_measured"] = m.inv.l;
  j["beta0_measured"] = m.inv.beta0;
  write_json(g, "interface.json", j);
  return 0;
}

int cmd_soft(const Globals& g) {
  const ScenarioConfig c = load(g);
  const Context ctx = prepare(c);
  const double d = c.prior_delta;
  SoftField sf = evolve_soft(*ctx.soft, d, 0.09, std::min(c.chi_max, ctx.soft->chi_max()));
  soft_diagnostics(sf);
  CsvTable t;
  t.header = {"tau", "chi", "r", "m", "omega", "rho", "a_minus", "a_plus"};
  for (std::size_t k = 0; k < sf.grid->size(); ++k) {
    const auto [i, jj] = sf.grid->node(k);
    t.rows.push_back({sf.grid->x(i), sf.grid->y(jj), sf.r[k], sf.m[k], sf.omega[k], sf.rho[k],
                      sf.a_minus[k], sf.a_plus[k]});
  }
  write_table(g, "soft.csv", t);
  json j;
  j["energy_drift"] = sf.max_energy_drift;
  j["null_identity"] = sf.max_null_identity;
  j["hessian_residual"] = sf.hessian_residual;
  j["undefined_rho"] = sf.undefined_rho;
  write_json(g, "soft.json", j);
  return 0;
}

int cmd_run(const Globals& g) {
  const ScenarioConfig c = load(g);
  return run_config(c, g.out, g.quiet).exit_status;
}

int cmd_validate(const Globals& g) {
  ScenarioConfig c = load(g);
  c.mode = "direct";
  const RunResult r = run_config(c, g.out, true);
  if (!g.quiet) std::cout << r.summary["validation"].dump(2) << "\n";
  return r.exit_status;
}

int cmd_converge(const Globals& g) {
  ScenarioConfig c = load(g);
  c.mode = "converge";
  return run_config(c, g.out, g.quiet).exit_status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expansion-shock formation solver"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "scenario config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "output directory");
  app.add_option("--mode", g.mode, "run mode")
      ->check(CLI::IsMember({"direct", "regularized", "converge", "perturb"}));
  app.add_option("--levels", g.levels, "refinement levels, delta = 2^-level")->delimiter(',');
  app.add_flag("--quiet", g.quiet, "no console output");

  int status = 0;
  struct Cmd {
    const char* name;
    const char* help;
    int (*fn)(const Globals&);
  };
  const Cmd cmds[] = {
      {"scenario", "invariants and closed-form coefficients", cmd_scenario},
      {"hard", "prior hard field and its consistency residuals", cmd_hard},
      {"interface", "phase boundary samples and measured invariants", cmd_interface},
      {"soft", "soft lattice and its diagnostics", cmd_soft},
      {"shock", "run the configured mode", cmd_run},
      {"validate", "direct run against the closed forms", cmd_validate},
      {"converge", "refinement study", cmd_converge},
  };
  for (const auto& c : cmds) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->callback([&status, &g, fn = c.fn]() { status = fn(g); });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return status;
}
