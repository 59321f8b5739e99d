#include "xshock/scenario.hpp"

#include <cmath>
#include <sstream>

namespace xs {

NullPointInvariants make_invariants(double r0, double am, double ap, double k,
                                    double j) {
  std::ostringstream why;
  if (!(r0 > 0)) why << "r0 must be positive; ";
  if (!(am > 0)) why << "a-0 must be positive; ";
  if (!(am * ap > 0)) why << "mu0 = 1 - a-0 a+0 must be below 1; ";
  if (!(k > 0)) why << "k must be positive (non-generic interface); ";
  if (!(j > 0)) why << "j must be positive (non-generic interface); ";
  if (!why.str().empty()) {
    std::string msg = why.str();
    msg.resize(msg.size() - 2);
    throw ScenarioError("infeasible scenario: " + msg);
  }

  NullPointInvariants v;
  const double pi = kPi;
  v.r0 = r0;
  v.a_minus = am;
  v.a_plus = ap;
  v.mu0 = 1.0 - am * ap;
  v.m0 = 0.5 * r0 * v.mu0;
  v.rdot0 = 0.5 * (ap - am);
  v.k = k;
  v.j = j;
  v.i = j * k;
  v.i0 = 1.5 * v.rdot0 * v.rdot0 / (r0 * r0) + pi;
  v.l = 2.0 * v.i / v.i0 - 1.0;
  v.beta0 = (5.0 + v.l) / (5.0 * v.l + 1.0);

  const double rd = v.rdot0, mu0 = v.mu0, r2 = r0 * r0;
  v.r_u = -am / 2;
  v.r_v = ap / 2;
  v.r_uu = -pi * r0;
  v.r_vv = -pi * r0;
  v.r_uv = (4 * pi * r2 - mu0) / (4 * r0);
  v.r_uuu = 0.5 * pi * (am - 4 * rd);
  v.r_uuv = (2 * pi * r2 * ap - am * mu0) / (4 * r2);
  v.phi_u = 0.5;
  v.phi_v = 0.5;
  v.phi_uu = rd / (2 * r0);
  v.phi_uv = -rd / (2 * r0);
  v.phi_vv = -j / 2 + (ap - am) / (4 * r0);
  v.phi_uuu = v.i / 2 + (3 * ap * (ap - am) - mu0) / (8 * r2);
  v.phi_uuv = (1 - ap * ap - 2 * ap * am + 2 * am * am) / (8 * r2);

  v.r_tau = rd;
  v.r_chi = (ap + am) / 4;
  v.r_tautau = -mu0 / (2 * r0);
  v.r_tauchi = -(ap * ap - am * am) / (4 * r0);
  v.r_chichi = (-3 * ap * ap + ap * am + am * am + 1) / (8 * r0) - pi * r0 +
               k * (ap + am) / 4;
  v.r_tauchichi = 0.5 * v.i * (ap + am) + (k / (4 * r0)) * (am * am - ap * ap) +
                  (3 * ap * ap * ap - ap * ap * am - 2 * am * am * am - ap + am) /
                      (8 * r2) +
                  0.5 * pi * (ap - 3 * am);

  v.f1 = 0.5;
  v.f2 = -rd / (2 * r0) - k / 2;
  v.omega1 = -rd / r0 + k;
  v.q0 = 4 * k;
  v.dr_dchi = am / 2;
  v.d2r_dchi2 = -pi * r0 + ap * k / 2;
  v.drdot_dchi = (mu0 - ap * ap + am * am) / (4 * r0);

  const double a3 = am * am * am;
  v.xi0 = 2 * (am * rd - 2 * pi * r2) / (a3 * r0);
  v.xi_minus0 = 4 * v.i / a3 +
                (1 / r2) * (12 / a3 * rd * rd +
                            (6 / (am * am) - 40 * pi * r2 / (am * a3)) * rd +
                            (1 / a3) * (-mu0 + 4 * pi * r2 + 48 * pi * pi * r2 * r2 / (am * am)));
  v.e_plus0 = 4 * am * v.i0;

  // R(t) = r(u(t), 0) with t = phi(u, 0).
  const double p1 = v.phi_u, p2 = v.phi_uu, p3 = v.phi_uuu;
  const double q1 = v.r_u, q2 = v.r_uu, q3 = v.r_uuu;
  v.R0 = r0;
  v.R1 = q1 / p1;
  v.R2 = (q2 * p1 - q1 * p2) / (p1 * p1 * p1);
  v.R3 = ((q3 * p1 - q1 * p3) / std::pow(p1, 3) -
          3 * (q2 * p1 - q1 * p2) * p2 / std::pow(p1, 4)) /
         p1;

  v.rho_tt = 4 * v.i0;
  v.rho_tx = 2 * v.i0 - 2 * v.i;
  v.rho_xx = v.i0 - 2 * v.i;
  return v;
}

RhoHessian rho_hessian_closed_form(const NullPointInvariants& inv) {
  RhoHessian h{4 * inv.i0, 2 * inv.i0 - 2 * inv.i, inv.i0 - 2 * inv.i, 0, 0};
  h.identity = h.tt / 4 - h.tx + h.xx;
  h.l_check = -4 * h.xx / h.tt;
  return h;
}

std::array<double, 4> NullLinePhi::jet(double s) const {
  const double a = s / L;
  const double g = std::exp(-a * a);
  const double L2 = L * L;
  // w(s) = s^3 exp(-s^2/L^2) and its derivatives
  const double s2 = s * s, s3 = s2 * s;
  const double w0 = s3 * g;
  const double w1 = (3 * s2 - 2 * s2 * s2 / L2) * g;
  const double w2 = (6 * s - 14 * s3 / L2 + 4 * s3 * s2 / (L2 * L2)) * g;
  const double w3 = (6 - 54 * s2 / L2 + 48 * s2 * s2 / (L2 * L2) -
                     8 * s3 * s3 / (L2 * L2 * L2)) *
                    g;
  return {s / 2 + c2 * s2 / 2 + c3 * w0 / 6, 0.5 + c2 * s + c3 * w1 / 6,
          c2 + c3 * w2 / 6, c3 * w3 / 6};
}

Scenario synthesize_scenario(const ScenarioParams& p) {
  Scenario sc;
  sc.params = p;
  sc.inv = make_invariants(p.r0, p.a_minus, p.a_plus, p.k, p.j);
  if (std::abs(sc.inv.l - 1.0) < 1e-12)
    throw ScenarioError("l = 1 is the exceptional case; refused");
  if (!(p.tail_length > 0)) throw ScenarioError("tail_length must be positive");
  sc.line_u = {sc.inv.phi_uu, sc.inv.phi_uuu, p.tail_length};
  sc.line_v = {sc.inv.phi_vv, p.phi_vvv, p.tail_length};
  return sc;
}

namespace {

using State = std::array<double, 5>;

template <class F>
State rk4(const F& rhs, State y, double s0, double s1, double hmax) {
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(s1 - s0) / hmax)));
  const double h = (s1 - s0) / n;
  double s = s0;
  for (int k = 0; k < n; ++k) {
    const State k1 = rhs(s, y);
    State t;
    for (int a = 0; a < 5; ++a) t[a] = y[a] + 0.5 * h * k1[a];
    const State k2 = rhs(s + 0.5 * h, t);
    for (int a = 0; a < 5; ++a) t[a] = y[a] + 0.5 * h * k2[a];
    const State k3 = rhs(s + 0.5 * h, t);
    for (int a = 0; a < 5; ++a) t[a] = y[a] + h * k3[a];
    const State k4 = rhs(s + h, t);
    for (int a = 0; a < 5; ++a) y[a] += h / 6 * (k1[a] + 2 * k2[a] + 2 * k3[a] + k4[a]);
    s += h;
  }
  return y;
}

// v = 0: state (r, nu, m, eta, psi); Omega = 1 gives kappa = 1/(4 nu) and
// nu_u = 4 pi r phi_u^2.
HardNode node_v0(const NullLinePhi& line, double s, const State& y) {
  const auto p = line.jet(s);
  HardNode n;
  n.r = y[0];
  n.nu = y[1];
  n.m = y[2];
  n.eta = y[3];
  n.psi = y[4];
  n.phi = p[0];
  n.kappa = 1.0 / (4.0 * n.nu);
  n.zeta = p[1] / n.nu;
  const double nu_u = 4.0 * kPi * n.r * p[1] * p[1];
  n.xi = (p[2] * n.nu - p[1] * nu_u) / (n.nu * n.nu * n.nu);
  return n;
}

// u = 0: state (r, kappa, m, zeta, xi); nu = 1/(4 kappa).
HardNode node_u0(const NullLinePhi& line, double s, const State& y) {
  const auto p = line.jet(s);
  HardNode n;
  n.r = y[0];
  n.kappa = y[1];
  n.m = y[2];
  n.zeta = y[3];
  n.xi = y[4];
  n.phi = p[0];
  n.nu = 1.0 / (4.0 * n.kappa);
  n.eta = p[1] / n.kappa;
  const double kv = -n.kappa * n.kappa * (hs::mu(n) - 4.0 * kPi * n.r * n.r) / n.r;
  n.psi = (p[2] * n.kappa - p[1] * kv) / (n.kappa * n.kappa * n.kappa);
  return n;
}

void fill_alt(HardNode& n) {
  n.r_alt = n.r;
  n.phi_alt = n.phi;
  n.m_alt = n.m;
}

}  // namespace

DataLines::DataLines(const Scenario& sc, double h) : sc_(sc), h_(h) {}

HardNode DataLines::on_v0(double u) const {
  const auto& v = sc_.inv;
  const double k0 = 1.0 / (2.0 * v.a_minus);
  const double kv0 = -k0 * k0 * (v.mu0 - 4.0 * kPi * v.r0 * v.r0) / v.r0;
  const double ev0 = (sc_.line_v.c2 * k0 - 0.5 * kv0) / (k0 * k0);
  State y{v.r0, v.a_minus / 2, v.m0, v.a_minus, ev0 / k0};
  const auto rhs = [this](double s, const State& st) {
    const HardNode n = node_v0(sc_.line_u, s, st);
    const double p1 = sc_.line_u.jet(s)[1];
    return State{-n.nu, 4.0 * kPi * n.r * p1 * p1, hs::m_u(n), hs::eta_u(n),
                 hs::psi_u(n)};
  };
  y = rk4(rhs, y, 0.0, u, h_);
  HardNode n = node_v0(sc_.line_u, u, y);
  fill_alt(n);
  return n;
}

HardNode DataLines::on_u0(double vv) const {
  const auto& v = sc_.inv;
  const double nu0 = v.a_minus / 2;
  const double zu0 = (sc_.line_u.c2 * nu0 - 0.5 * kPi * v.r0) / (nu0 * nu0);
  State y{v.r0, 1.0 / (2.0 * v.a_minus), v.m0, 1.0 / v.a_minus, zu0 / nu0};
  const auto rhs = [this](double s, const State& st) {
    const HardNode n = node_u0(sc_.line_v, s, st);
    const double kv = -n.kappa * n.kappa * (hs::mu(n) - 4.0 * kPi * n.r * n.r) / n.r;
    return State{hs::r_v(n), kv, hs::m_v(n), hs::zeta_v(n), hs::xi_v(n)};
  };
  y = rk4(rhs, y, 0.0, vv, h_);
  HardNode n = node_u0(sc_.line_v, vv, y);
  fill_alt(n);
  return n;
}

}  // namespace xs
