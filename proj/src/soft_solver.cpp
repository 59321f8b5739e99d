#include "xshock/soft_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace xs {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Rhs {
  double m, m_chi;
  FlowState operator()(const FlowState& s) const {
    const double r2 = s.r * s.r;
    return {s.rdot, -m / r2, s.rdot_chi, 2 * m * s.r_chi / (r2 * s.r) - m_chi / r2};
  }
};

FlowState axpy(const FlowState& y, double h, const FlowState& k) {
  return {y.r + h * k.r, y.rdot + h * k.rdot, y.r_chi + h * k.r_chi,
          y.rdot_chi + h * k.rdot_chi};
}

void rk4_step(const Rhs& f, FlowState& y, double h) {
  const FlowState k1 = f(y);
  const FlowState k2 = f(axpy(y, 0.5 * h, k1));
  const FlowState k3 = f(axpy(y, 0.5 * h, k2));
  const FlowState k4 = f(axpy(y, h, k3));
  y.r += h / 6 * (k1.r + 2 * k2.r + 2 * k3.r + k4.r);
  y.rdot += h / 6 * (k1.rdot + 2 * k2.rdot + 2 * k3.rdot + k4.rdot);
  y.r_chi += h / 6 * (k1.r_chi + 2 * k2.r_chi + 2 * k3.r_chi + k4.r_chi);
  y.rdot_chi += h / 6 * (k1.rdot_chi + 2 * k2.rdot_chi + 2 * k3.rdot_chi + k4.rdot_chi);
}

void check_alive(const FlowState& y, double tau) {
  if (!(y.r > 0)) {
    std::ostringstream os;
    os << "collapse: r reached 0 near tau = " << tau;
    throw CollapseError(os.str(), tau);
  }
}

// r'' = -m/r^2 with m fixed conserves rdot^2 - 2m/r.
double energy(double r, double rdot, double m) { return rdot * rdot - 2 * m / r; }

}  // namespace

std::vector<FlowlineSample> evolve_flowline(double r0, double rdot0, double m,
                                            double tau0, double tau1, double step) {
  if (!(r0 > 0)) throw std::invalid_argument("evolve_flowline: r0 must be positive");
  if (!(step > 0)) throw std::invalid_argument("evolve_flowline: step must be positive");
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(tau1 - tau0) / step - 1e-9)));
  const double h = (tau1 - tau0) / n;
  const Rhs f{m, 0.0};
  FlowState y{r0, rdot0, 0.0, 0.0};
  std::vector<FlowlineSample> out{{tau0, r0, rdot0}};
  for (int k = 1; k <= n; ++k) {
    rk4_step(f, y, h);
    const double t = tau0 + k * h;
    check_alive(y, t);
    out.push_back({t, y.r, y.rdot});
  }
  return out;
}

FlowState advance_flowline(FlowState s, double m, double m_chi, double tau0,
                           double tau1, double step) {
  if (tau1 == tau0) return s;
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(tau1 - tau0) / step - 1e-9)));
  const double h = (tau1 - tau0) / n;
  const Rhs f{m, m_chi};
  for (int k = 1; k <= n; ++k) {
    rk4_step(f, s, h);
    check_alive(s, tau0 + k * h);
  }
  return s;
}

SoftPoint soft_point(const FlowState& s, double m, double m_chi, double tau,
                     double chi) {
  SoftPoint p;
  p.tau = tau;
  p.chi = chi;
  p.r = s.r;
  p.rdot = s.rdot;
  p.m = m;
  p.m_chi = m_chi;
  p.r_chi = s.r_chi;
  p.rdot_chi = s.rdot_chi;
  p.mu = 2 * m / s.r;
  const double disc = 1 - p.mu + s.rdot * s.rdot;
  if (!(disc > 0)) {
    std::ostringstream os;
    os << "soft: signature error, 1 - mu + rdot^2 = " << disc << " at (" << tau << ", "
       << chi << ")";
    throw SolverError(os.str());
  }
  // V r = e^{-omega} r_chi >= 0 branch.
  const double Vr = std::sqrt(disc);
  p.a_plus = s.rdot + Vr;
  p.a_minus = Vr - s.rdot;
  if (s.r_chi > 0) {
    p.e_omega = s.r_chi / Vr;
    p.omega = std::log(p.e_omega);
    p.omega_tau = s.rdot_chi / s.r_chi;
    p.rho = m_chi / (4 * kPi * s.r * s.r * s.r_chi);
  } else {
    p.e_omega = p.omega = p.omega_tau = p.rho = kNaN;
  }
  return p;
}

namespace {

FlowState initial_state(const SigmaPoint& sp) {
  return {sp.r, sp.rdot, sp.r1 + sp.rdot * sp.f1,
          sp.rdot1 - sp.m / (sp.r * sp.r) * sp.f1};
}

}  // namespace

SoftSlice init_from_interface(const InterfaceCurve& sigma) {
  SoftSlice sl;
  for (const SigmaPoint& sp : sigma.points()) {
    const double e2 = sp.f1 * sp.f1 - sp.Omega * sp.Omega * sp.hp;
    if (!(e2 > 0)) {
      std::ostringstream os;
      os << "soft: interface not spacelike at chi = " << sp.chi;
      throw InterfaceError(os.str());
    }
    const SoftPoint p = soft_point(initial_state(sp), sp.m, sp.m1, -sp.f, sp.chi);
    sl.chi.push_back(sp.chi);
    sl.tau.push_back(-sp.f);
    sl.points.push_back(p);
    sl.max_omega_mismatch =
        std::max(sl.max_omega_mismatch, std::abs(p.e_omega * p.e_omega - e2));
    if (std::isfinite(p.rho)) sl.max_rho_defect = std::max(sl.max_rho_defect, std::abs(p.rho - 1));
  }
  return sl;
}

SoftSolution::SoftSolution(std::shared_ptr<const InterfaceCurve> sigma, double step)
    : sigma_(std::move(sigma)), step_(step) {
  if (!sigma_) throw std::invalid_argument("soft: null interface");
}

FlowState SoftSolution::initial(double chi, double& m, double& m_chi) const {
  const SigmaPoint sp = sigma_->at(chi);
  m = sp.m;
  m_chi = sp.m1;
  return initial_state(sp);
}

SoftPoint SoftSolution::at(double tau, double chi) const {
  double m, mc;
  const FlowState s0 = initial(chi, m, mc);
  const FlowState s = advance_flowline(s0, m, mc, past(chi), tau, step_);
  return soft_point(s, m, mc, tau, chi);
}

// ---------------------------------------------------------------- lattice

ScalarField SoftField::field(const std::string& name) const {
  const std::vector<double>* v = nullptr;
  if (name == "r") v = &r;
  else if (name == "rdot") v = &rdot;
  else if (name == "m") v = &m;
  else if (name == "m_chi") v = &m_chi;
  else if (name == "r_chi") v = &r_chi;
  else if (name == "rdot_chi") v = &rdot_chi;
  else if (name == "omega") v = &omega;
  else if (name == "rho") v = &rho;
  else if (name == "a_minus") v = &a_minus;
  else if (name == "a_plus") v = &a_plus;
  else if (name == "mu") v = &mu;
  else throw std::invalid_argument("soft field: unknown field '" + name + "'");
  if (v->size() != grid->size())
    throw std::logic_error("soft field: '" + name + "' not computed");
  std::vector<double> vals = *v;
  // ScalarField rejects NaN; undefined rho is stored as 0 there.
  for (double& x : vals)
    if (!std::isfinite(x)) x = 0.0;
  return ScalarField(grid, std::move(vals), name);
}

SoftField evolve_soft(const SoftSolution& sol, double d, double tau_max,
                      double chi_max) {
  if (chi_max > sol.chi_max() + 1e-12)
    throw DomainError("soft: chi_max beyond the interface samples");
  const int nchi = static_cast<int>(std::floor(chi_max / d + 1e-9)) + 1;
  double pmin = 0;
  for (int j = 0; j < nchi; ++j) pmin = std::min(pmin, sol.past(j * d));
  const int i0 = static_cast<int>(std::floor(pmin / d + 1e-9));
  const int ntau = static_cast<int>(std::floor(tau_max / d + 1e-9)) - i0 + 1;
  auto past = [&sol](double c) { return sol.past(c); };
  auto grid = std::make_shared<ComovingGrid>(i0 * d, d, ntau, 0.0, d, nchi, past);
  SoftField f;
  f.grid = grid;
  const std::size_t N = grid->size();
  for (auto* v : {&f.r, &f.rdot, &f.m, &f.m_chi, &f.r_chi, &f.rdot_chi}) v->assign(N, kNaN);
  for (int j = 0; j < nchi; ++j) {
    const double chi = grid->y(j);
    double m, mc;
    FlowState s = sol.initial(chi, m, mc);
    double t = sol.past(chi);
    const double e0 = energy(s.r, s.rdot, m);
    for (int i = 0; i < ntau; ++i) {
      const int k = grid->index(i, j);
      if (k < 0) continue;
      const double ti = grid->x(i);
      s = advance_flowline(s, m, mc, t, ti, 1.0 / 4096.0);
      t = ti;
      f.r[k] = s.r;
      f.rdot[k] = s.rdot;
      f.m[k] = m;
      f.m_chi[k] = mc;
      f.r_chi[k] = s.r_chi;
      f.rdot_chi[k] = s.rdot_chi;
      f.max_energy_drift = std::max(
          f.max_energy_drift, std::abs(energy(s.r, s.rdot, m) - e0) / std::max(std::abs(e0), 1.0));
    }
  }
  return f;
}

void soft_diagnostics(SoftField& f) {
  const Lattice& g = *f.grid;
  const std::size_t N = g.size();
  for (auto* v : {&f.omega, &f.rho, &f.a_minus, &f.a_plus, &f.mu}) v->assign(N, kNaN);
  f.undefined_rho = 0;
  f.max_null_identity = 0;
  for (std::size_t k = 0; k < N; ++k) {
    const auto [i, j] = g.node(k);
    const SoftPoint p = soft_point({f.r[k], f.rdot[k], f.r_chi[k], f.rdot_chi[k]}, f.m[k],
                                   f.m_chi[k], g.x(i), g.y(j));
    f.omega[k] = p.omega;
    f.rho[k] = p.rho;
    f.a_minus[k] = p.a_minus;
    f.a_plus[k] = p.a_plus;
    f.mu[k] = p.mu;
    if (!std::isfinite(p.rho)) ++f.undefined_rho;
    f.max_null_identity =
        std::max(f.max_null_identity, std::abs(p.a_minus * p.a_plus + p.mu - 1));
  }
  // Hessian tau-chi component: r_tau chi = omega_tau r_chi, both sides
  // differenced from the lattice.
  f.hessian_residual = 0;
  if (f.undefined_rho > 0) return;
  const ScalarField om = f.field("omega"), rd = f.field("rdot"), r = f.field("r");
  for (std::size_t k = 0; k < N; ++k) {
    const auto [i, j] = g.node(k);
    try {
      const double rtx = finite_difference(rd, g.x(i), g.y(j), 0, 1);
      const double ot = finite_difference(om, g.x(i), g.y(j), 1, 0);
      const double rx = finite_difference(r, g.x(i), g.y(j), 0, 1);
      f.hessian_residual = std::max(f.hessian_residual, std::abs(rtx - ot * rx));
    } catch (const StencilError&) {
    }
  }
}


ReturnCurve rho_return_curve(const SoftField& f) {
  const Lattice& g = *f.grid;
  ReturnCurve rc;
  for (int j = 0; j < g.ny(); ++j) {
    std::vector<int> col;
    for (int i = 0; i < g.nx(); ++i)
      if (g.has(i, j)) col.push_back(i);
    const double chi = g.y(j);
    rc.chi.push_back(chi);
    if (j == 0 && std::abs(chi) < 1e-15) {
      rc.tau.push_back(0.0);
      rc.open.push_back(false);
      continue;
    }
    auto rho_at = [&](int i) { return f.rho[static_cast<std::size_t>(g.index(i, j))]; };
    std::size_t a = 0;
    while (a < col.size() && !(rho_at(col[a]) < 1)) ++a;
    std::size_t b = a;
    while (b < col.size() && (std::isnan(rho_at(col[b])) || rho_at(col[b]) < 1)) ++b;
    if (a >= col.size() || b >= col.size()) {
      rc.tau.push_back(kNaN);
      rc.open.push_back(true);
      continue;
    }
    // Cubic through four column nodes around the bracket, then bisection.
    const std::size_t s0 = std::min(b >= 2 ? b - 2 : 0, col.size() >= 4 ? col.size() - 4 : 0);
    const std::size_t s1 = std::min(s0 + 4, col.size());
    std::vector<double> ts, ys;
    for (std::size_t c = s0; c < s1; ++c) {
      ts.push_back(g.x(col[c]));
      ys.push_back(rho_at(col[c]) - 1);
    }
    auto P = [&](double x) {
      double s = 0;
      for (std::size_t p = 0; p < ts.size(); ++p) {
        double w = 1;
        for (std::size_t q = 0; q < ts.size(); ++q)
          if (q != p) w *= (x - ts[q]) / (ts[p] - ts[q]);
        s += w * ys[p];
      }
      return s;
    };
    double lo = g.x(col[b - 1]), hi = g.x(col[b]);
    for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double pm = P(mid);
      if (std::abs(pm) <= 1e-10) {
        lo = hi = mid;
        break;
      }
      (pm < 0 ? lo : hi) = mid;
    }
    rc.tau.push_back(0.5 * (lo + hi));
    rc.open.push_back(false);
  }
  return rc;
}

ReturnCurve rho_return_curve(const SoftSolution& sol, const std::vector<double>& chis,
                             double tau_max) {
  ReturnCurve rc;
  for (double chi : chis) {
    rc.chi.push_back(chi);
    if (std::abs(chi) < 1e-15) {
      rc.tau.push_back(0.0);
      rc.open.push_back(false);
      continue;
    }
    double m, mc;
    FlowState s = sol.initial(chi, m, mc);
    double t = sol.past(chi);
    // March in steps small against the distance to the return.
    const double h = std::max(chi, 1e-6) / 64;
    bool below = false, found = false;
    FlowState sa = s;
    double ta = t;
    while (t < tau_max) {
      const double tn = std::min(t + h, tau_max);
      const FlowState sn = advance_flowline(s, m, mc, t, tn, h);
      const double rho = soft_point(sn, m, mc, tn, chi).rho;
      if (rho < 1) below = true;
      if (below && rho >= 1) {
        sa = s;
        ta = t;
        found = true;
        break;
      }
      s = sn;
      t = tn;
    }
    if (!found) {
      rc.tau.push_back(kNaN);
      rc.open.push_back(true);
      continue;
    }
    double lo = ta, hi = ta + h;
    for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double rho = soft_point(advance_flowline(sa, m, mc, ta, mid, h / 8), m, mc, mid, chi).rho;
      if (std::abs(rho - 1) <= 1e-12) {
        lo = hi = mid;
        break;
      }
      (rho < 1 ? lo : hi) = mid;
    }
    rc.tau.push_back(0.5 * (lo + hi));
    rc.open.push_back(false);
  }
  return rc;
}

}  // namespace xs
