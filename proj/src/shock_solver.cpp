#include "xshock/shock_solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace xs {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string at_tau(const std::string& what, double tau) {
  std::ostringstream os;
  os << what << " at tau = " << tau;
  return os.str();
}

// Jump values for trial beta in (-1, 1); no domain checks.
JumpData jump_unchecked(double beta, double rho, double a) {
  JumpData j;
  j.nu = 0.5 * a * (1 - beta);
  j.kappa = (1 + beta) / (2 * a);
  j.zeta = std::sqrt((1 + beta - 2 * rho * beta) / (1 - beta)) / a;
  j.eta = a * std::sqrt((1 - beta + 2 * rho * beta) / (1 + beta));
  const double x = 2 * (1 - rho);
  const double fp = (1 + beta) * std::sqrt(1 - beta * x / (1 + beta));
  const double fm = (1 - beta) * std::sqrt(1 + beta * x / (1 - beta));
  j.dphi = 0.5 * (fp + fm);
  return j;
}

// sqrt(1+u) - 1 over u, without the cancellation.
double h_ratio(double u) { return 1.0 / (std::sqrt(1.0 + u) + 1.0); }

}  // namespace

JumpData jump_boundary_data(double beta, double rho, double a_minus) {
  if (beta >= 1) throw ShockError("degenerate jump: beta = 1", ShockFailure::degenerate_jump, kNaN);
  if (!(beta >= 0) || !(rho >= 0) || !(rho <= 1) || !(a_minus > 0))
    throw ShockError("jump data: need 0 <= beta < 1, 0 <= rho <= 1, a- > 0",
                     ShockFailure::invariant_violation, kNaN);
  return jump_unchecked(beta, rho, a_minus);
}

double beta_formula(double gamma, double rho) {
  const double g2 = gamma * gamma;
  return (1 - g2) / (1 + g2 - 2 * g2 * rho);
}

double beta_update(double gamma, double rho) {
  if (!(gamma > 0) || !(gamma <= 1) || !(rho <= 1))
    throw ShockError("beta update: need 0 < gamma <= 1, rho <= 1",
                     ShockFailure::invariant_violation, kNaN);
  if (gamma == 1 && rho == 1)
    throw ShockError("beta update: 0/0 at gamma = rho = 1, seed from the local form",
                     ShockFailure::corner_degenerate, kNaN);
  return beta_formula(gamma, rho);
}

double psi_derivative(double X, double z2) {
  if (!(z2 > 0) || !(z2 <= 1)) throw DomainError("psi derivative: z^2 outside (0, 1]");
  const double Y = X * (1 - z2);
  if (!(Y / z2 > -1) || !(-Y > -1)) throw DomainError("psi derivative: sqrt argument <= 0");
  return Y / (1 + z2) * (h_ratio(Y / z2) - h_ratio(-Y));
}

SoftSide soft_side(const SoftSolution& sol, double tau0, double chi0) {
  return [&sol, tau0, chi0](double tau, double chi) {
    SoftPoint p = sol.at(tau + tau0, chi + chi0);
    p.tau = tau;
    p.chi = chi;
    return p;
  };
}

// ---------------------------------------------------------------- marcher

FormationMarcher::FormationMarcher(SoftSide soft, ShockStart start, FormationOptions opt)
    : soft_(std::move(soft)), start_(std::move(start)), opt_(opt), wedge_(opt.delta, opt.cell) {
  curve_.delta = opt_.delta;
  const SoftPoint sp = soft_(0.0, 0.0);
  const double rho = start_.degenerate ? 1.0 : sp.rho;
  if (!std::isfinite(rho) || !std::isfinite(sp.e_omega))
    throw ShockError("soft data undefined at the corner", ShockFailure::invariant_violation, 0);
  const JumpData jd = jump_boundary_data(start_.beta, rho, sp.a_minus);
  const auto jet = start_.data.at(0.0);
  HardNode c;
  c.r = jet.R;
  c.phi = 0.0;
  c.m = jet.M;
  c.nu = jd.nu;
  c.kappa = jd.kappa;
  c.zeta = start_.data.Z(0.0);
  c.eta = jd.eta;
  c.xi = start_.data.Xi(0.0);
  wedge_.set_corner(c);
  edge_nu_.push_back(jd.nu);

  ShockSample s;
  s.beta = start_.beta;
  s.gamma = 1.0 / (c.zeta * sp.a_minus);
  s.rho = rho;
  s.x = 2 * (1 - rho);
  s.y = 1 - s.gamma * s.gamma;
  s.z2 = (1 - s.beta) / (1 + s.beta);
  s.E = 1 / (s.gamma * s.gamma) - 1;
  s.X = 1 - rho;
  s.nu = jd.nu;
  s.kappa = jd.kappa;
  s.zeta = jd.zeta;
  s.eta = jd.eta;
  s.r = sp.r;
  s.m = sp.m;
  s.a_minus = sp.a_minus;
  s.e_omega = sp.e_omega;
  s.edge_r = jet.R;
  s.e_star = hs::barrier(c);
  s.e_min = std::numeric_limits<double>::infinity();
  s.sigma_min = std::numeric_limits<double>::infinity();
  s.zeta_wedge = c.zeta;
  s.E_alpha = s.E;
  s.dPsi = start_.degenerate ? 0.0 : psi_derivative(s.X, s.z2);
  s.seeded = start_.degenerate;
  curve_.samples.push_back(s);
}

FormationMarcher::Trial FormationMarcher::evaluate(int i, double beta, bool seeded,
                                                   double N_guess) {
  const double D = opt_.delta;
  const double tau = D * i;
  const ShockSample& prev = curve_.samples.back();
  Trial tr{};
  tr.beta = beta;
  if (seeded) {
    tr.chi = 2 * start_.beta * tau;
    tr.sp = soft_(tau, tr.chi);
  } else {
    const double w0 = prev.beta / prev.e_omega;
    double chi = prev.chi + D * w0;
    for (int k = 0; k < 30; ++k) {
      tr.sp = soft_(tau, chi);
      const double c2 = prev.chi + 0.5 * D * (w0 + beta / tr.sp.e_omega);
      const bool done = std::abs(c2 - chi) <= 1e-16 + 1e-14 * std::abs(chi);
      chi = c2;
      if (done) break;
    }
    tr.chi = chi;
    tr.sp = soft_(tau, chi);
  }
  const SoftPoint& sp = tr.sp;
  if (!std::isfinite(sp.rho) || !std::isfinite(sp.e_omega))
    throw ShockError(at_tau("soft data undefined on the boundary", tau),
                     ShockFailure::invariant_violation, tau);
  if (!(beta > -1) || !(beta < 1))
    throw ShockError(at_tau("beta iterate left (-1, 1)", tau), ShockFailure::step_divergence, tau);
  tr.jd = jump_unchecked(beta, sp.rho, sp.a_minus);
  if (!std::isfinite(tr.jd.zeta + tr.jd.eta))
    throw ShockError(at_tau("jump data undefined", tau), ShockFailure::step_divergence, tau);

  const CharacteristicData& data = start_.data;
  const double t_prev = wedge_.at(i - 1, 0).phi;
  const double flux_prev = edge_nu_.back() * data.Z(t_prev);
  double N = N_guess;
  double t = t_prev + D * flux_prev;
  // phi* on the diagonal only enters as the second-route check value.
  const double phi_star = tau + prev.Psi;
  for (int g = 0; g < 40; ++g) {
    const double nu_e = tr.jd.nu * std::exp(-N);
    for (int k = 0; k < 30; ++k) {
      const double t2 = t_prev + 0.5 * D * (flux_prev + nu_e * data.Z(t));
      const bool done = std::abs(t2 - t) <= 1e-16;
      t = t2;
      if (done) break;
    }
    const auto jet = data.at(t);
    const EdgeValues ev{jet.R, t, jet.M, nu_e, -1.0 / jet.R1, data.Xi(t)};
    const DiagValues dv{tr.jd.kappa, tr.jd.eta, sp.m, sp.r, phi_star};
    wedge_.compute_row(i, ev, dv);
    const double N2 = wedge_.at(i, i).N;
    tr.nu_edge = nu_e;
    tr.t_edge = t;
    const bool done = std::abs(N2 - N) <= 1e-15;
    N = N2;
    if (done) break;
  }
  tr.N_diag = N;
  const double zeta = wedge_.at(i, i).zeta;
  const double gamma = 1.0 / (zeta * sp.a_minus);
  tr.G = beta - beta_formula(gamma, sp.rho);
  return tr;
}

void FormationMarcher::record(int i, const Trial& tr, int iterations, bool seeded) {
  const double D = opt_.delta;
  const double tau = D * i;
  const ShockSample& prev = curve_.samples.back();
  const SoftPoint& sp = tr.sp;
  const HardNode& d = wedge_.at(i, i);
  ShockSample s;
  s.tau = tau;
  s.chi = tr.chi;
  s.beta = tr.beta;
  s.rho = sp.rho;
  s.gamma = 1.0 / (d.zeta * sp.a_minus);
  s.zeta_wedge = d.zeta;
  s.x = 2 * (1 - s.rho);
  s.y = 1 - s.gamma * s.gamma;
  s.z2 = (1 - s.beta) / (1 + s.beta);
  s.E = 1 / (s.gamma * s.gamma) - 1;
  s.X = 1 - s.rho;
  const double zt = s.x * s.y / (s.x + 2 * s.y);
  s.q = (1 - 2 * zt) / (1 - zt);
  s.residual = s.z2 - s.X / (s.E + s.X);
  s.nu = tr.jd.nu;
  s.kappa = tr.jd.kappa;
  s.zeta = tr.jd.zeta;
  s.eta = tr.jd.eta;
  s.dPsi = psi_derivative(s.X, s.z2);
  s.Psi = prev.Psi + 0.5 * D * (prev.dPsi + s.dPsi);
  s.phi = tau + s.Psi;
  s.t = tau + 0.5 * s.chi;
  s.x_coord = tau - 0.5 * s.chi;
  s.r = sp.r;
  s.m = sp.m;
  s.a_minus = sp.a_minus;
  s.e_omega = sp.e_omega;
  s.edge_t = tr.t_edge;
  s.edge_r = wedge_.at(i, 0).r;
  s.Y = start_.r0 - s.edge_r;
  s.delta = tau - 0.5 * s.chi - 2 * s.Y / start_.a_minus_data;
  s.e_star = hs::barrier(d);
  s.iterations = iterations;
  s.seeded = seeded;

  // Row extremes and the alpha-transport integrals along the column u = tau.
  double emin = std::numeric_limits<double>::infinity(), smin = emin;
  double M = 0.0;
  const SystemFlags f = opt_.cell.flags;
  auto g = [&](const HardNode& n) { return n.phi * hs::n_integrand(n, f) * std::exp(n.N); };
  for (int j = 0; j <= i; ++j) {
    const HardNode& n = wedge_.at(i, j);
    emin = std::min(emin, hs::barrier(n));
    smin = std::min(smin, std::sqrt(hs::sigma2(n)));
    if (j > 0) M += 0.5 * D * (g(wedge_.at(i, j - 1)) + g(n));
  }
  s.e_min = emin;
  s.sigma_min = smin;
  s.M_star = M;
  s.N_star = d.N;
  const HardNode& e = wedge_.at(i, 0);
  const double alpha_edge = hs::alpha(e);
  const double alpha_star = (alpha_edge - M) * std::exp(-d.N);
  const double w = sp.a_minus * (alpha_star + s.phi) / s.r;
  s.E_alpha = w * w - 1;

  if (!seeded) {
    if (!(s.beta >= 0) || !(s.beta < 1) || !(s.gamma > 0) || !(s.gamma <= 1) || !(s.rho <= 1))
      throw ShockError(at_tau("shock invariant violated (beta, gamma or rho out of range)", tau),
                       ShockFailure::invariant_violation, tau);
  }
  if (!(emin > 0) && tau <= opt_.degeneracy_tau)
    throw ShockError(at_tau("barrier e <= 0 on the new row", tau),
                     ShockFailure::hard_degeneracy, tau);
  curve_.samples.push_back(s);
  edge_nu_.push_back(tr.nu_edge);
}

bool FormationMarcher::advance_step() {
  const int i = static_cast<int>(curve_.samples.size());
  const double tau = opt_.delta * i;
  if (tau > opt_.tau_hat * (1 + 1e-12)) return false;
  const bool seeded = start_.degenerate && i <= opt_.n_seed;
  const double N_guess = wedge_.at(i - 1, i - 1).N;
  if (seeded) {
    const Trial tr = evaluate(i, start_.beta, true, N_guess);
    record(i, tr, 1, true);
    return true;
  }
  const auto& S = curve_.samples;
  double b0 = S.back().beta;
  if (S.size() >= 2 && !S[S.size() - 2].seeded) b0 = 2 * S.back().beta - S[S.size() - 2].beta;
  Trial t0 = evaluate(i, b0, false, N_guess);
  if (std::abs(t0.G) == 0.0) {
    record(i, t0, 1, false);
    return true;
  }
  double b1 = b0 - t0.G;  // plain fixed-point step as the second secant point
  if (std::abs(b1 - b0) < 1e-9) b1 = b0 + (t0.G > 0 ? -1e-9 : 1e-9);
  Trial t1 = evaluate(i, b1, false, t0.N_diag);
  for (int it = 2; it <= opt_.beta_cap; ++it) {
    const double denom = t1.G - t0.G;
    if (denom == 0.0 || !std::isfinite(denom)) break;
    const double b2 = t1.beta - t1.G * (t1.beta - t0.beta) / denom;
    const bool done = std::abs(b2 - t1.beta) <= opt_.beta_tol;
    t0 = t1;
    t1 = evaluate(i, b2, false, t0.N_diag);
    if (done) {
      record(i, t1, it + 1, false);
      return true;
    }
  }
  throw ShockError(at_tau("step divergence: beta iteration did not converge, reduce the step", tau),
                   ShockFailure::step_divergence, tau);
}

ShockRun FormationMarcher::finish() const {
  ShockRun run;
  run.curve = curve_;
  run.hard = wedge_.field();
  run.max_cell_iterations = wedge_.max_iterations();
  // beta(0): quadratic fit over the unseeded samples in [tau_hat/10, tau_hat/2],
  // clear of the hand-off transient after the seeded rows.
  const double th = curve_.samples.back().tau;
  std::vector<const ShockSample*> pts;
  for (const auto& s : curve_.samples)
    if (!s.seeded && s.tau >= 0.1 * th && s.tau <= 0.5 * th) pts.push_back(&s);
  const std::size_t n = pts.size();
  if (n >= 6) {
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd b(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double t = pts[k]->tau;
      A(k, 0) = 1;
      A(k, 1) = t;
      A(k, 2) = t * t;
      b(k) = pts[k]->beta;
    }
    run.curve.beta0_extrapolated = A.colPivHouseholderQr().solve(b)(0);
  } else {
    run.curve.beta0_extrapolated = curve_.samples.front().beta;
  }
  return run;
}

CharacteristicData formation_data(const Scenario& sc, double tau_hat) {
  return CharacteristicData::from_lines(sc, tau_hat + 0.02, 1.0 / 8192);
}

ShockRun run_formation(const Scenario& sc, const SoftSolution& soft,
                       const FormationOptions& opt) {
  if (!sc.inv.shock_case()) throw ScenarioError("formation: l <= 1, not an expansion shock case");
  ShockStart st;
  st.data = formation_data(sc, opt.tau_hat);
  st.beta = sc.inv.beta0;
  st.degenerate = true;
  st.a_minus_data = -st.data.at(0).R1;
  st.r0 = st.data.at(0).R;
  FormationMarcher fm(soft_side(soft), std::move(st), opt);
  while (fm.advance_step()) {
  }
  return fm.finish();
}

// ---------------------------------------------------------------- regularized

double regularized_l_bound(double r0, double mu0, double a, double R2, double r0n,
                           double mu0n, double kn) {
  const double b = a - kn;
  const double b3 = b * b * b;
  const double first = (1 / (r0 * a)) * (1 - (1 - mu0 - 4 * kPi * r0 * r0) / (a * a));
  const double second = (1 / (r0n * b)) * (1 - (1 - mu0n - 4 * kPi * r0n * r0n) / (b * b));
  return (first - second) * b3 + R2 / (a * a * a) * b3 - R2;
}

GeodesicEnd soft_geodesic(const SoftSolution& soft, double beta, double tau, int steps) {
  // d beta/d tau = -omega_tau beta (1 - beta^2), d chi/d tau = e^{-omega} beta.
  auto rhs = [&soft](double t, double chi, double b) {
    const SoftPoint p = soft.at(t, chi);
    return std::pair<double, double>{b / p.e_omega, -p.omega_tau * b * (1 - b * b)};
  };
  double chi = 0, b = beta, t = 0;
  const double h = tau / steps;
  for (int k = 0; k < steps; ++k) {
    auto [c1, b1] = rhs(t, chi, b);
    auto [c2, b2] = rhs(t + h / 2, chi + h / 2 * c1, b + h / 2 * b1);
    auto [c3, b3] = rhs(t + h / 2, chi + h / 2 * c2, b + h / 2 * b2);
    auto [c4, b4] = rhs(t + h, chi + h * c3, b + h * b3);
    chi += h / 6 * (c1 + 2 * c2 + 2 * c3 + c4);
    b += h / 6 * (b1 + 2 * b2 + 2 * b3 + b4);
    t += h;
  }
  return {chi, b};
}

std::vector<NullCurveSample> outgoing_null_curve(const SoftSolution& soft, double tau_max,
                                                 double step) {
  auto w = [&soft](double t, double chi) { return 1.0 / soft.at(t, chi).e_omega; };
  std::vector<NullCurveSample> out;
  const int n = std::max(1, static_cast<int>(std::ceil(tau_max / step - 1e-9)));
  const double h = tau_max / n;
  double chi = 0, t = 0;
  out.push_back({0, 0, soft.at(0, 0).rho});
  for (int k = 0; k < n; ++k) {
    const double k1 = w(t, chi);
    const double k2 = w(t + h / 2, chi + h / 2 * k1);
    const double k3 = w(t + h / 2, chi + h / 2 * k2);
    const double k4 = w(t + h, chi + h * k3);
    chi += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t = (k + 1) * h;
    out.push_back({t, chi, soft.at(t, chi).rho});
  }
  return out;
}

bool RegularizedProblem::conditions_hold() const {
  const auto b = base.at(0);
  return std::abs(data.at(0).R - r0) <= 1e-12 && gamma0 < 1 && e0 > 0 && c == r0 - b.R &&
         k > -b.R1 - a_minus0 && l > F;
}

namespace {
void finish_member(RegularizedProblem& p) {
  p.data = p.base.shifted(p.c, p.k, p.l, p.m0);
  const auto jet = p.data.at(0);
  p.gamma0 = -jet.R1 / p.a_minus0;
  p.e0 = p.data.barrier(0);
  if (!(p.gamma0 > 0) || !(p.gamma0 < 1))
    throw ShockError("regularized member: gamma_n(0) not in (0, 1)", ShockFailure::anchor, p.tau0);
  p.beta_start = beta_update(p.gamma0, p.rho0);
}
}  // namespace

RegularizedProblem build_regularized(const Scenario& sc, const SoftSolution& soft, int n,
                                     const RegularizedOptions& opt, double tau_hat) {
  if (n < 1) throw std::invalid_argument("regularized: n >= 1");
  RegularizedProblem p;
  p.n = n;
  p.beta0 = opt.beta0 >= 0 ? opt.beta0 : sc.inv.beta0;
  p.tau0 = opt.tau_seed * std::ldexp(1.0, -n);
  const GeodesicEnd g = soft_geodesic(soft, p.beta0, p.tau0);
  p.chi0 = g.chi;
  const SoftPoint sp = soft.at(p.tau0, p.chi0);
  const auto cm = outgoing_null_curve(soft, p.tau0, p.tau0 / 64);
  if (!(sp.rho < 1) || !(p.chi0 > 0) || !(p.chi0 < cm.back().chi)) {
    std::ostringstream os;
    os << "anchor (" << p.tau0 << ", " << p.chi0 << ") outside the soft domain interior";
    throw ShockError(os.str(), ShockFailure::anchor, p.tau0);
  }
  p.r0 = sp.r;
  p.m0 = sp.m;
  p.mu0 = sp.mu;
  p.a_minus0 = sp.a_minus;
  p.rho0 = sp.rho;

  p.base = formation_data(sc, tau_hat);
  const auto jet = p.base.at(0);
  const double a = -jet.R1;
  const double r0 = jet.R, mu0 = 2 * jet.M / jet.R;
  const double margin = opt.margin_scale * std::ldexp(1.0, -n);
  p.c = p.r0 - r0;
  if (opt.literal_k) {
    p.k = std::max(a - p.a_minus0, 0.0) + margin;
  } else {
    const double gt = std::sqrt((1 - p.beta0) / (1 + p.beta0 - 2 * p.beta0 * p.rho0));
    p.k = a - gt * p.a_minus0;
  }
  p.F = regularized_l_bound(r0, mu0, a, jet.R2, p.r0, p.mu0, p.k);
  p.l = p.F + margin;
  finish_member(p);
  return p;
}

RegularizedProblem perturb_regularized(const RegularizedProblem& p, double dk, double dl) {
  RegularizedProblem q = p;
  q.k += dk;
  q.l += dl;
  finish_member(q);
  return q;
}

ShockRun run_regularized(const SoftSolution& soft, const RegularizedProblem& p,
                         const FormationOptions& opt) {
  ShockStart st;
  st.data = p.data;
  st.beta = p.beta_start;
  st.degenerate = false;
  st.a_minus_data = -p.data.at(0).R1;
  st.r0 = p.r0;
  FormationOptions o = opt;
  o.tau_hat = opt.tau_hat - p.tau0;
  FormationMarcher fm(soft_side(soft, p.tau0, p.chi0), std::move(st), o);
  while (fm.advance_step()) {
  }
  ShockRun run = fm.finish();
  run.curve.tau0 = p.tau0;
  run.curve.chi0 = p.chi0;
  return run;
}

// ---------------------------------------------------------------- monitors

BarrierReport barrier_monitor(const HardField& hard, const ShockCurve& curve) {
  BarrierReport r;
  r.min_e_wedge = r.min_e_star = r.min_sigma_minus_one = std::numeric_limits<double>::infinity();
  const auto& g = *hard.grid;
  for (std::size_t k = 0; k < hard.nodes.size(); ++k) {
    const auto [i, j] = g.node(k);
    const HardNode& n = hard.nodes[k];
    if (i == 0 && j == 0) {
      r.e_corner = hs::barrier(n);
      continue;
    }
    const double e = hs::barrier(n);
    const double s = std::sqrt(hs::sigma2(n)) - 1;
    r.min_e_wedge = std::min(r.min_e_wedge, e);
    r.min_sigma_minus_one = std::min(r.min_sigma_minus_one, s);
    if (!(e > 0) || !(s > 0)) ++r.violations;
  }
  for (std::size_t k = 1; k < curve.samples.size(); ++k)
    r.min_e_star = std::min(r.min_e_star, curve.samples[k].e_star);
  return r;
}

AlphaRoutes E_via_alpha(const ShockCurve& curve, std::size_t index) {
  const ShockSample& s = curve.samples.at(index);
  return {s.E, s.E_alpha};
}

void check_alpha_routes(const ShockCurve& curve, double tol) {
  for (std::size_t k = 0; k < curve.samples.size(); ++k) {
    const auto a = E_via_alpha(curve, k);
    if (std::abs(a.direct - a.transport) > tol) {
      std::ostringstream os;
      os << "internal inconsistency: E routes differ by " << std::abs(a.direct - a.transport)
         << " at tau = " << curve.samples[k].tau;
      throw SolverError(os.str());
    }
  }
}

}  // namespace xs
