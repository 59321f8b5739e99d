// Scenario configuration, run orchestration and byte-stable emission.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "xshock/asymptotics.hpp"
#include "xshock/hard_solver.hpp"
#include "xshock/interface.hpp"
#include "xshock/scenario.hpp"
#include "xshock/shock_solver.hpp"
#include "xshock/soft_solver.hpp"

namespace xs {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kSchemaVersion = 1;

struct ScenarioConfig {
  int schema_version = kSchemaVersion;
  ScenarioParams scenario;
  double prior_delta = 1.0 / 256;
  PriorDomain prior_domain{-0.08, 0.04, -0.03, 0.03};
  double chi_max = 0.06;
  FormationOptions formation = default_formation();
  std::string mode = "direct";  // direct | regularized | converge | perturb
  int n_min = 1, n_max = 6;
  RegularizedOptions regularized;
  std::vector<int> levels{11, 12, 13};  // delta = 2^-level
  int ladder_member = 3;
  double epsilon = 1e-4;
  int ladder_steps = 3;
  double k_weight = 0;  // perturbation direction (k_weight, 1) in the (k, l) slots
  double c_minus_tau = 0.015;
  ValidationOptions validation;
  std::uint64_t seed = 0;

  static FormationOptions default_formation() {
    FormationOptions f;
    f.delta = 1.0 / 8192;
    f.tau_hat = 5.0 / 128;
    return f;
  }
};

// Unknown keys, a wrong schema version and wrong types are ConfigErrors.
ScenarioConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ScenarioConfig& c);
ScenarioConfig load_config(const std::string& path);
// Feasibility and grid checks; throws ConfigError (ScenarioError wrapped).
void validate_config(const ScenarioConfig& c);
// 64-bit FNV-1a of the canonical config JSON, as 16 hex digits.
std::string scenario_hash(const ScenarioConfig& c);

// Prior hard field, Sigma and the soft solution shared by all runs.
struct Context {
  Scenario sc;
  std::shared_ptr<HardField> prior;
  std::shared_ptr<InterfaceCurve> sigma;
  std::shared_ptr<SoftSolution> soft;
};
Context prepare(const ScenarioConfig& c);

// ---------------------------------------------------------------- studies

struct OrderRow {
  std::string observable;
  std::vector<double> values;  // coarse to fine, refinement ratio 2
  double order = 0;
  bool inconclusive = false;  // differences not shrinking
  bool low = false;           // second-order observable below 1.7
};
// Triplet Richardson order log2(|v0 - v1| / |v1 - v2|).
OrderRow triplet_order(const std::string& name, double v0, double v1, double v2,
                       bool second_order = true);

struct ConvergenceTable {
  std::vector<double> deltas;
  std::vector<OrderRow> rows;
  std::vector<ShockCurve> curves;
};
ConvergenceTable convergence_study(const Context& ctx, const ScenarioConfig& c,
                                   const std::vector<int>& levels);

// sup |chi*_a - chi*_ref| over the common tau range, in the original soft
// coordinates; ref is interpolated linearly.
double sup_overlap_gap(const ShockCurve& a, const ShockCurve& ref);
// sup over (chi*, r, m, nu, kappa, zeta, eta) of sample-wise differences.
double sup_state_difference(const ShockCurve& a, const ShockCurve& b);

struct RegularizedMember {
  RegularizedProblem problem;
  ShockCurve curve;
  double gap = 0;
};
struct RegularizedSequence {
  ShockCurve direct;
  double discretization = 0;  // sup gap between the direct runs at delta and delta/2
  std::vector<RegularizedMember> members;
  bool conditions = true;
  bool monotone = true;
  bool last_within = false;  // last gap <= 3 x discretization
};
RegularizedSequence regularized_sequence(const Context& ctx, const ScenarioConfig& c);

struct Ladder {
  std::vector<double> eps, response, ratio;
  bool pass(double tol = 0.5) const;
};
Ladder perturbation_ladder(const SoftSolution& soft, const RegularizedProblem& member,
                           const FormationOptions& opt, double eps, int steps,
                           double k_weight = 0);

// ---------------------------------------------------------------- emission

// Shortest decimal that reads back to the same double.
std::string format_double(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
void write_csv(std::ostream& os, const CsvTable& t);
CsvTable read_csv(std::istream& is);
CsvTable shock_table(const ShockCurve& c);  // tau, chi*, beta, gamma, rho*, E, X, z2, e*_min
void write_text_file(const std::string& path, const std::string& text);

nlohmann::json report_json(const ValidationReport& r);
nlohmann::json table_json(const CoefficientTable& t);

struct RunResult {
  int exit_status = 0;
  nlohmann::json summary;
};
// Writes the mode's artifacts under out_dir; exit status is nonzero iff a
// gate of the mode fails.
RunResult run_config(const ScenarioConfig& c, const std::string& out_dir, bool quiet = false);

}  // namespace xs
