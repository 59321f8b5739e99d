#include "xshock/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

namespace xs {

using nlohmann::json;

// ---------------------------------------------------------------- config

namespace {

// Reads one JSON object, rejecting keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError("config: '" + name_ + "' must be an object");
  }
  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config: '" + name_ + "." + key + "' has the wrong type");
    }
  }
  const json* sub(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        throw ConfigError("config: unknown key '" + (name_.empty() ? "" : name_ + ".") + it.key() + "'");
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

}  // namespace

ScenarioConfig config_from_json(const json& j) {
  ScenarioConfig c;
  Section top(j, "");
  top.get("schema_version", c.schema_version);
  if (c.schema_version != kSchemaVersion)
    throw ConfigError("config: schema_version " + std::to_string(c.schema_version) +
                      " not supported (expected " + std::to_string(kSchemaVersion) + ")");
  top.get("mode", c.mode);
  top.get("seed", c.seed);
  if (const json* s = top.sub("scenario")) {
    Section sec(*s, "scenario");
    sec.get("r0", c.scenario.r0);
    sec.get("a_minus", c.scenario.a_minus);
    sec.get("a_plus", c.scenario.a_plus);
    sec.get("k", c.scenario.k);
    sec.get("j", c.scenario.j);
    sec.get("phi_vvv", c.scenario.phi_vvv);
    sec.get("tail_length", c.scenario.tail_length);
    sec.finish();
  }
  if (const json* s = top.sub("prior")) {
    Section sec(*s, "prior");
    sec.get("delta", c.prior_delta);
    sec.get("u_min", c.prior_domain.u_min);
    sec.get("u_max", c.prior_domain.u_max);
    sec.get("v_min", c.prior_domain.v_min);
    sec.get("v_max", c.prior_domain.v_max);
    sec.get("chi_max", c.chi_max);
    sec.finish();
  }
  if (const json* s = top.sub("formation")) {
    Section sec(*s, "formation");
    sec.get("delta", c.formation.delta);
    sec.get("tau_hat", c.formation.tau_hat);
    sec.get("n_seed", c.formation.n_seed);
    sec.get("beta_tol", c.formation.beta_tol);
    sec.get("beta_cap", c.formation.beta_cap);
    sec.get("degeneracy_tau", c.formation.degeneracy_tau);
    sec.get("cell_tol", c.formation.cell.tol);
    sec.get("cell_cap", c.formation.cell.cap);
    sec.finish();
  }
  if (const json* s = top.sub("regularized")) {
    Section sec(*s, "regularized");
    sec.get("n_min", c.n_min);
    sec.get("n_max", c.n_max);
    sec.get("tau_seed", c.regularized.tau_seed);
    sec.get("margin_scale", c.regularized.margin_scale);
    sec.get("beta0", c.regularized.beta0);
    sec.get("literal_k", c.regularized.literal_k);
    sec.finish();
  }
  if (const json* s = top.sub("converge")) {
    Section sec(*s, "converge");
    sec.get("levels", c.levels);
    sec.finish();
  }
  if (const json* s = top.sub("perturb")) {
    Section sec(*s, "perturb");
    sec.get("member", c.ladder_member);
    sec.get("epsilon", c.epsilon);
    sec.get("steps", c.ladder_steps);
    sec.get("k_weight", c.k_weight);
    sec.finish();
  }
  if (const json* s = top.sub("validation")) {
    Section sec(*s, "validation");
    auto& v = c.validation;
    sec.get("slope_tol", v.slope_tol);
    sec.get("quadratic_tol", v.quadratic_tol);
    sec.get("quintic_tol", v.quintic_tol);
    sec.get("edge_slope_tol", v.edge_slope_tol);
    sec.get("limit_tol", v.limit_tol);
    sec.get("window_fraction", v.window_fraction);
    sec.get("min_tau_fraction", v.min_tau_fraction);
    sec.get("levels", v.levels);
    sec.get("extrapolate", v.extrapolate);
    sec.get("c_minus_tau", c.c_minus_tau);
    sec.finish();
  }
  top.finish();
  return c;
}

json config_to_json(const ScenarioConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["mode"] = c.mode;
  j["seed"] = c.seed;
  j["scenario"] = {{"r0", c.scenario.r0},           {"a_minus", c.scenario.a_minus},
                   {"a_plus", c.scenario.a_plus},   {"k", c.scenario.k},
                   {"j", c.scenario.j},             {"phi_vvv", c.scenario.phi_vvv},
                   {"tail_length", c.scenario.tail_length}};
  j["prior"] = {{"delta", c.prior_delta},         {"u_min", c.prior_domain.u_min},
                {"u_max", c.prior_domain.u_max},  {"v_min", c.prior_domain.v_min},
                {"v_max", c.prior_domain.v_max},  {"chi_max", c.chi_max}};
  j["formation"] = {{"delta", c.formation.delta},
                    {"tau_hat", c.formation.tau_hat},
                    {"n_seed", c.formation.n_seed},
                    {"beta_tol", c.formation.beta_tol},
                    {"beta_cap", c.formation.beta_cap},
                    {"degeneracy_tau", c.formation.degeneracy_tau},
                    {"cell_tol", c.formation.cell.tol},
                    {"cell_cap", c.formation.cell.cap}};
  j["regularized"] = {{"n_min", c.n_min},
                      {"n_max", c.n_max},
                      {"tau_seed", c.regularized.tau_seed},
                      {"margin_scale", c.regularized.margin_scale},
                      {"beta0", c.regularized.beta0},
                      {"literal_k", c.regularized.literal_k}};
  j["converge"] = {{"levels", c.levels}};
  j["perturb"] = {{"member", c.ladder_member},
                  {"epsilon", c.epsilon},
                  {"steps", c.ladder_steps},
                  {"k_weight", c.k_weight}};
  const auto& v = c.validation;
  j["validation"] = {{"slope_tol", v.slope_tol},
                     {"quadratic_tol", v.quadratic_tol},
                     {"quintic_tol", v.quintic_tol},
                     {"edge_slope_tol", v.edge_slope_tol},
                     {"limit_tol", v.limit_tol},
                     {"window_fraction", v.window_fraction},
                     {"min_tau_fraction", v.min_tau_fraction},
                     {"levels", v.levels},
                     {"extrapolate", v.extrapolate},
                     {"c_minus_tau", c.c_minus_tau}};
  return j;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return config_from_json(j);
}

void validate_config(const ScenarioConfig& c) {
  static const std::set<std::string> modes{"direct", "regularized", "converge", "perturb"};
  if (!modes.count(c.mode)) throw ConfigError("config: unknown mode '" + c.mode + "'");
  NullPointInvariants inv;
  try {
    inv = make_invariants(c.scenario.r0, c.scenario.a_minus, c.scenario.a_plus, c.scenario.k,
                          c.scenario.j);
  } catch (const ScenarioError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!inv.shock_case())
    throw ConfigError("config: l = " + format_double(inv.l) + " <= 1, no expansion shock forms");
  auto pos = [](double x, const char* what) {
    if (!(x > 0) || !std::isfinite(x)) throw ConfigError(std::string("config: ") + what + " must be > 0");
  };
  pos(c.prior_delta, "prior.delta");
  pos(c.formation.delta, "formation.delta");
  pos(c.formation.tau_hat, "formation.tau_hat");
  pos(c.chi_max, "prior.chi_max");
  if (c.formation.n_seed < 1) throw ConfigError("config: formation.n_seed must be >= 1");
  if (c.n_min < 1 || c.n_max < c.n_min) throw ConfigError("config: need 1 <= n_min <= n_max");
  if (c.levels.size() < 3) throw ConfigError("config: converge.levels needs at least 3 entries");
  for (std::size_t k = 1; k < c.levels.size(); ++k)
    if (c.levels[k] != c.levels[k - 1] + 1)
      throw ConfigError("config: converge.levels must be consecutive (refinement ratio 2)");
  if (c.ladder_steps < 2) throw ConfigError("config: perturb.steps must be >= 2");
  pos(c.epsilon, "perturb.epsilon");
  if (!(c.prior_domain.u_min < 0 && c.prior_domain.u_max > 0 && c.prior_domain.v_min < 0 &&
        c.prior_domain.v_max > 0))
    throw ConfigError("config: prior domain must contain N- in its interior");
}

std::string scenario_hash(const ScenarioConfig& c) {
  const std::string s = config_to_json(c).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

Context prepare(const ScenarioConfig& c) {
  Context ctx;
  ctx.sc = synthesize_scenario(c.scenario);
  ctx.prior = std::make_shared<HardField>(
      evolve_prior_extrapolated(ctx.sc, c.prior_domain, c.prior_delta));
  InterfaceOptions io;
  io.chi_max = c.chi_max;
  ctx.sigma = std::make_shared<InterfaceCurve>(build_interface(*ctx.prior, io));
  ctx.soft = std::make_shared<SoftSolution>(ctx.sigma);
  return ctx;
}

// ---------------------------------------------------------------- studies

OrderRow triplet_order(const std::string& name, double v0, double v1, double v2,
                       bool second_order) {
  OrderRow r;
  r.observable = name;
  r.values = {v0, v1, v2};
  const double d1 = std::abs(v0 - v1), d2 = std::abs(v1 - v2);
  if (!(d2 < d1) || d2 == 0) {
    r.inconclusive = true;
    r.order = d2 == 0 && d1 == 0 ? std::numeric_limits<double>::infinity() : std::nan("");
    return r;
  }
  r.order = std::log2(d1 / d2);
  r.low = second_order && r.order < 1.7;
  return r;
}

ConvergenceTable convergence_study(const Context& ctx, const ScenarioConfig& c,
                                   const std::vector<int>& levels) {
  if (levels.size() < 3) throw std::invalid_argument("convergence: at least 3 levels");
  ConvergenceTable t;
  for (int L : levels) {
    FormationOptions o = c.formation;
    o.delta = std::ldexp(1.0, -L);
    t.deltas.push_back(o.delta);
    t.curves.push_back(run_formation(ctx.sc, *ctx.soft, o).curve);
  }
  struct Obs {
    const char* name;
    double ShockSample::*field;
  };
  const Obs obs[] = {{"chi_star", &ShockSample::chi}, {"beta", &ShockSample::beta},
                     {"gamma", &ShockSample::gamma},  {"rho_star", &ShockSample::rho},
                     {"E", &ShockSample::E},          {"edge_r", &ShockSample::edge_r}};
  const std::size_t n = t.curves.size();
  for (const auto& o : obs) {
    // finest three levels
    const auto& a = t.curves[n - 3].samples.back();
    const auto& b = t.curves[n - 2].samples.back();
    const auto& d = t.curves[n - 1].samples.back();
    t.rows.push_back(triplet_order(o.name, a.*o.field, b.*o.field, d.*o.field));
  }
  return t;
}

namespace {
double chi_at(const ShockCurve& c, double tau) {
  const auto& S = c.samples;
  const double t = tau - c.tau0;
  if (S.empty() || t < S.front().tau || t > S.back().tau) return std::nan("");
  auto it = std::upper_bound(S.begin(), S.end(), t,
                             [](double x, const ShockSample& s) { return x < s.tau; });
  if (it == S.end()) return c.chi0 + S.back().chi;
  if (it == S.begin()) return c.chi0 + S.front().chi;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (t - lo.tau) / (hi.tau - lo.tau);
  return c.chi0 + lo.chi * (1 - w) + hi.chi * w;
}
}  // namespace

double sup_overlap_gap(const ShockCurve& a, const ShockCurve& ref) {
  double g = 0;
  for (const auto& s : a.samples) {
    const double x = chi_at(ref, s.tau + a.tau0);
    if (std::isfinite(x)) g = std::max(g, std::abs(s.chi + a.chi0 - x));
  }
  return g;
}

double sup_state_difference(const ShockCurve& a, const ShockCurve& b) {
  double g = 0;
  const std::size_t n = std::min(a.samples.size(), b.samples.size());
  for (std::size_t k = 0; k < n; ++k) {
    const auto& x = a.samples[k];
    const auto& y = b.samples[k];
    for (double d : {x.chi - y.chi, x.r - y.r, x.m - y.m, x.nu - y.nu, x.kappa - y.kappa,
                     x.zeta - y.zeta, x.eta - y.eta})
      g = std::max(g, std::abs(d));
  }
  return g;
}

RegularizedSequence regularized_sequence(const Context& ctx, const ScenarioConfig& c) {
  RegularizedSequence seq;
  seq.direct = run_formation(ctx.sc, *ctx.soft, c.formation).curve;
  FormationOptions half = c.formation;
  half.delta /= 2;
  const ShockCurve fine = run_formation(ctx.sc, *ctx.soft, half).curve;
  seq.discretization = sup_overlap_gap(fine, seq.direct);
  for (int n = c.n_min; n <= c.n_max; ++n) {
    RegularizedMember m;
    m.problem = build_regularized(ctx.sc, *ctx.soft, n, c.regularized, c.formation.tau_hat);
    m.curve = run_regularized(*ctx.soft, m.problem, c.formation).curve;
    m.gap = sup_overlap_gap(m.curve, seq.direct);
    seq.conditions = seq.conditions && m.problem.conditions_hold();
    if (!seq.members.empty() && !(m.gap < seq.members.back().gap)) seq.monotone = false;
    seq.members.push_back(std::move(m));
  }
  seq.last_within = seq.members.back().gap <= 3 * seq.discretization;
  return seq;
}

bool Ladder::pass(double tol) const {
  if (ratio.empty()) return false;
  return std::all_of(ratio.begin(), ratio.end(), [tol](double r) { return std::abs(r - 2) <= tol; });
}

Ladder perturbation_ladder(const SoftSolution& soft, const RegularizedProblem& member,
                           const FormationOptions& opt, double eps, int steps, double k_weight) {
  Ladder L;
  const ShockCurve base = run_regularized(soft, member, opt).curve;
  for (int s = 0; s < steps; ++s) {
    const double e = eps * std::ldexp(1.0, -s);
    const RegularizedProblem p = perturb_regularized(member, k_weight * e, e);
    const ShockCurve cur = run_regularized(soft, p, opt).curve;
    L.eps.push_back(e);
    L.response.push_back(sup_state_difference(cur, base));
    if (s > 0) L.ratio.push_back(L.response[s - 1] / L.response[s]);
  }
  return L;
}

// ---------------------------------------------------------------- emission

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& os, const CsvTable& t) {
  for (std::size_t k = 0; k < t.header.size(); ++k) os << (k ? "," : "") << t.header[k];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << format_double(row[k]);
    os << '\n';
  }
}

CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("csv: empty input");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0;
      if (cell == "nan") v = std::nan("");
      else if (cell == "inf") v = std::numeric_limits<double>::infinity();
      else if (cell == "-inf") v = -std::numeric_limits<double>::infinity();
      else {
        const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
          throw std::runtime_error("csv: bad number '" + cell + "'");
      }
      row.push_back(v);
    }
    if (row.size() != t.header.size()) throw std::runtime_error("csv: ragged row");
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable shock_table(const ShockCurve& c) {
  CsvTable t;
  t.header = {"tau", "chi*", "beta", "gamma", "rho*", "E", "X", "z2", "e*_min"};
  for (const auto& s : c.samples)
    t.rows.push_back({s.tau, s.chi, s.beta, s.gamma, s.rho, s.E, s.X, s.z2, s.e_min});
  return t;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  out.close();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

json report_json(const ValidationReport& r) {
  json j;
  j["label"] = r.label;
  j["all_pass"] = r.all_pass();
  json entries = json::array();
  for (const auto& e : r.entries) {
    auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
    entries.push_back({{"name", e.name},
                       {"fitted", num(e.fitted)},
                       {"closed", num(e.closed)},
                       {"deviation", num(e.deviation)},
                       {"error", num(e.error)},
                       {"tolerance", e.tolerance},
                       {"pass", e.pass}});
  }
  j["entries"] = entries;
  return j;
}

json table_json(const CoefficientTable& t) {
  json j = json::object();
  for (const auto& [k, v] : t.entries()) j[k] = v;
  return j;
}

namespace {

std::string csv_text(const CsvTable& t) {
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

void emit(const std::string& dir, const std::string& name, const std::string& text) {
  write_text_file((std::filesystem::path(dir) / name).string(), text);
}

json run_direct(const Context& ctx, const ScenarioConfig& c, const std::string& dir,
                bool& ok) {
  const ShockRun run = run_formation(ctx.sc, *ctx.soft, c.formation);
  const auto cm = outgoing_null_curve(*ctx.soft, c.c_minus_tau, c.formation.delta);
  const CoefficientTable table = closed_form_suite(ctx.sc.inv);
  const ValidationReport rep = validate_run({&run.curve, &cm}, table, c.validation);
  const BarrierReport bar = barrier_monitor(run.hard, run.curve);
  double alpha_gap = 0;
  for (const auto& s : run.curve.samples) alpha_gap = std::max(alpha_gap, std::abs(s.E - s.E_alpha));
  emit(dir, "shock.csv", csv_text(shock_table(run.curve)));
  CsvTable ct;
  ct.header = {"tau", "chi", "rho"};
  for (const auto& p : cm) ct.rows.push_back({p.tau, p.chi, p.rho});
  emit(dir, "c_minus.csv", csv_text(ct));
  ok = rep.all_pass() && bar.genuine_hard();
  json j;
  j["beta0_measured"] = run.curve.beta0_extrapolated;
  j["beta0_closed"] = ctx.sc.inv.beta0;
  j["rows"] = run.curve.samples.size();
  j["chi_star_end"] = run.curve.samples.back().chi;
  j["min_e_wedge"] = bar.min_e_wedge;
  j["min_e_star"] = bar.min_e_star;
  j["min_sigma_minus_one"] = bar.min_sigma_minus_one;
  j["barrier_violations"] = bar.violations;
  j["max_alpha_route_gap"] = alpha_gap;
  j["max_cell_iterations"] = run.max_cell_iterations;
  j["validation"] = report_json(rep);
  j["closed_forms"] = table_json(table);
  return j;
}

json run_regularized_mode(const Context& ctx, const ScenarioConfig& c, const std::string& dir,
                          bool& ok) {
  const RegularizedSequence seq = regularized_sequence(ctx, c);
  emit(dir, "shock.csv", csv_text(shock_table(seq.direct)));
  CsvTable t;
  t.header = {"n", "tau0", "chi0", "beta0", "c", "k", "l", "F", "gamma0", "e0", "gap"};
  for (const auto& m : seq.members) {
    const auto& p = m.problem;
    t.rows.push_back({double(p.n), p.tau0, p.chi0, p.beta0, p.c, p.k, p.l, p.F, p.gamma0, p.e0, m.gap});
    emit(dir, "shock_n" + std::to_string(p.n) + ".csv", csv_text(shock_table(m.curve)));
  }
  emit(dir, "regularized.csv", csv_text(t));
  ok = seq.conditions && seq.monotone && seq.last_within;
  json j;
  j["discretization"] = seq.discretization;
  j["conditions_hold"] = seq.conditions;
  j["monotone"] = seq.monotone;
  j["last_gap"] = seq.members.back().gap;
  j["last_within_3x"] = seq.last_within;
  return j;
}

json run_converge_mode(const Context& ctx, const ScenarioConfig& c, const std::string& dir,
                       bool& ok) {
  const ConvergenceTable t = convergence_study(ctx, c, c.levels);
  for (std::size_t k = 0; k < t.curves.size(); ++k)
    emit(dir, "shock_L" + std::to_string(c.levels[k]) + ".csv", csv_text(shock_table(t.curves[k])));
  std::ostringstream os;
  os << "observable,v_coarse,v_mid,v_fine,order,inconclusive,low\n";
  ok = true;
  json rows = json::object();
  for (const auto& r : t.rows) {
    os << r.observable << ',' << format_double(r.values[0]) << ',' << format_double(r.values[1])
       << ',' << format_double(r.values[2]) << ',' << format_double(r.order) << ','
       << (r.inconclusive ? 1 : 0) << ',' << (r.low ? 1 : 0) << '\n';
    rows[r.observable] = std::isfinite(r.order) ? json(r.order) : json(nullptr);
    if (r.observable == "chi_star") ok = !r.low && !r.inconclusive;
  }
  emit(dir, "convergence.csv", os.str());
  json j;
  j["orders"] = rows;
  return j;
}

json run_perturb_mode(const Context& ctx, const ScenarioConfig& c, const std::string& dir,
                      bool& ok) {
  const RegularizedProblem m =
      build_regularized(ctx.sc, *ctx.soft, c.ladder_member, c.regularized, c.formation.tau_hat);
  const Ladder L = perturbation_ladder(*ctx.soft, m, c.formation, c.epsilon, c.ladder_steps,
                                       c.k_weight);
  CsvTable t;
  t.header = {"eps", "response"};
  for (std::size_t k = 0; k < L.eps.size(); ++k) t.rows.push_back({L.eps[k], L.response[k]});
  emit(dir, "ladder.csv", csv_text(t));
  ok = L.pass();
  json j;
  j["ratios"] = L.ratio;
  j["member"] = c.ladder_member;
  return j;
}

}  // namespace

RunResult run_config(const ScenarioConfig& c, const std::string& out_dir, bool quiet) {
  validate_config(c);
  std::filesystem::create_directories(out_dir);
  const Context ctx = prepare(c);
  bool ok = false;
  json body;
  if (c.mode == "direct") body = run_direct(ctx, c, out_dir, ok);
  else if (c.mode == "regularized") body = run_regularized_mode(ctx, c, out_dir, ok);
  else if (c.mode == "converge") body = run_converge_mode(ctx, c, out_dir, ok);
  else body = run_perturb_mode(ctx, c, out_dir, ok);
  RunResult r;
  r.summary = body;
  r.summary["schema_version"] = kSchemaVersion;
  r.summary["scenario_hash"] = scenario_hash(c);
  r.summary["mode"] = c.mode;
  r.summary["i"] = ctx.sc.inv.i;
  r.summary["i0"] = ctx.sc.inv.i0;
  r.summary["l"] = ctx.sc.inv.l;
  r.summary["gates_pass"] = ok;
  r.summary["config"] = config_to_json(c);
  emit(out_dir, "summary.json", r.summary.dump(2) + "\n");
  r.exit_status = ok ? 0 : 1;
  if (!quiet) std::cout << c.mode << ": " << (ok ? "gates pass" : "gate failure") << " -> " << out_dir << "\n";
  return r;
}

}  // namespace xs
