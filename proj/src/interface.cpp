#include "xshock/interface.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace xs {

namespace {

double hermite3(double th, double h, double p0, double d0, double p1, double d1) {
  const double t2 = th * th, t3 = t2 * th;
  return (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + th) * h * d0 +
         (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * h * d1;
}

// Quadratic least squares y = c0 + c1 x + c2 x^2.
Eigen::Vector3d quad_fit(const std::vector<double>& x, const std::vector<double>& y) {
  Eigen::MatrixXd A(x.size(), 3);
  Eigen::VectorXd b(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    A(k, 0) = 1;
    A(k, 1) = x[k];
    A(k, 2) = x[k] * x[k];
    b(k) = y[k];
  }
  return A.colPivHouseholderQr().solve(b);
}

// Fourth-order cumulative integral of samples on a uniform grid, from index k0.
std::vector<double> cumulative(const std::vector<double>& f, double h, std::size_t k0) {
  const std::size_t n = f.size();
  if (n < 4) throw std::invalid_argument("cumulative: need at least 4 samples");
  std::vector<double> seg(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (k == 0)
      seg[k] = h / 24 * (9 * f[0] + 19 * f[1] - 5 * f[2] + f[3]);
    else if (k + 2 == n)
      seg[k] = h / 24 * (9 * f[n - 1] + 19 * f[n - 2] - 5 * f[n - 3] + f[n - 4]);
    else
      seg[k] = h / 24 * (-f[k - 1] + 13 * f[k] + 13 * f[k + 1] - f[k + 2]);
  }
  std::vector<double> F(n, 0.0);
  for (std::size_t k = k0; k + 1 < n; ++k) F[k + 1] = F[k] + seg[k];
  for (std::size_t k = k0; k > 0; --k) F[k - 1] = F[k] - seg[k - 1];
  return F;
}

}  // namespace

InterfaceCurve::InterfaceCurve(std::vector<SigmaPoint> pts, double spacing,
                               double u_minus, double v_minus, double k_fit)
    : pts_(std::move(pts)), dchi_(spacing), u_minus_(u_minus), v_minus_(v_minus),
      k_fit_(k_fit) {
  if (pts_.size() < 4) throw InterfaceError("interface: fewer than 4 samples");
}

SigmaPoint InterfaceCurve::at(double chi) const {
  const int n = static_cast<int>(pts_.size());
  if (chi < -1e-12 || chi > chi_max() + 1e-12)
    throw DomainError("interface: chi outside the sampled curve");
  int k = std::clamp(static_cast<int>(std::floor(chi / dchi_)), 0, n - 2);
  const double th = (chi - k * dchi_) / dchi_;
  const SigmaPoint& a = pts_[k];
  const SigmaPoint& b = pts_[k + 1];
  SigmaPoint s;
  s.chi = chi;
  s.u = u_minus_ - chi;
  s.f = hermite3(th, dchi_, a.f, a.f1, b.f, b.f1);
  s.r = hermite3(th, dchi_, a.r, a.r1, b.r, b.r1);
  s.rdot = hermite3(th, dchi_, a.rdot, a.rdot1, b.rdot, b.rdot1);
  s.m = hermite3(th, dchi_, a.m, a.m1, b.m, b.m1);
  // Cubic Lagrange on four neighbours for everything else.
  const int k0 = std::clamp(k - 1, 0, n - 4);
  const double x = chi / dchi_ - k0;
  double w[4];
  for (int p = 0; p < 4; ++p) {
    w[p] = 1;
    for (int q = 0; q < 4; ++q)
      if (q != p) w[p] *= (x - q) / (p - q);
  }
  auto lag = [&](auto get) {
    double v = 0;
    for (int p = 0; p < 4; ++p) v += w[p] * get(pts_[k0 + p]);
    return v;
  };
  s.h = lag([](const SigmaPoint& p) { return p.h; });
  s.hp = lag([](const SigmaPoint& p) { return p.hp; });
  s.Omega = lag([](const SigmaPoint& p) { return p.Omega; });
  s.f1 = lag([](const SigmaPoint& p) { return p.f1; });
  s.e_omega = lag([](const SigmaPoint& p) { return p.e_omega; });
  s.r1 = lag([](const SigmaPoint& p) { return p.r1; });
  s.rdot1 = lag([](const SigmaPoint& p) { return p.rdot1; });
  s.m1 = lag([](const SigmaPoint& p) { return p.m1; });
  s.delta = lag([](const SigmaPoint& p) { return p.delta; });
  s.q = lag([](const SigmaPoint& p) { return p.q; });
  s.node.r = s.r;
  s.node.m = s.m;
  s.node.phi = -s.f;
  s.node.nu = lag([](const SigmaPoint& p) { return p.node.nu; });
  s.node.kappa = lag([](const SigmaPoint& p) { return p.node.kappa; });
  s.node.zeta = lag([](const SigmaPoint& p) { return p.node.zeta; });
  s.node.eta = lag([](const SigmaPoint& p) { return p.node.eta; });
  s.node.xi = lag([](const SigmaPoint& p) { return p.node.xi; });
  s.node.psi = lag([](const SigmaPoint& p) { return p.node.psi; });
  return s;
}

SigmaPoint sigma_point_from_state(const HardNode& n, double u, double v,
                                  SystemFlags flags) {
  SigmaPoint s;
  s.u = u;
  s.h = v;
  s.node = n;
  const double s2u = hs::sigma2_u(n, flags), s2v = hs::sigma2_v(n, flags);
  if (!(s2v < 0)) throw InterfaceError("interface: sigma^2 not decreasing in v on Sigma");
  s.hp = -s2u / s2v;
  const double hp = s.hp;
  const double mu = hs::mu(n);
  s.Omega = std::sqrt(hs::omega2(n));
  s.f = -n.phi;
  s.f1 = hs::phi_u(n) + hp * hs::phi_v(n);
  s.e_omega = hs::phi_u(n) - hp * hs::phi_v(n);
  s.r = n.r;
  s.r1 = -(hs::r_u(n) + hp * hs::r_v(n));
  s.m = n.m;
  s.m1 = -(hs::m_u(n, flags) + hp * hs::m_v(n, flags));
  s.rdot = hs::fluid_rdot(n);
  // sigma^2 is constant along Sigma, so only zeta, eta, mu vary.
  const double Dz = n.nu * n.xi + hp * hs::zeta_v(n, flags);
  const double De = hs::eta_u(n, flags) + hp * n.kappa * n.psi;
  const double Dm = hs::mu_u(n, flags) + hp * hs::mu_v(n, flags);
  const double sg = std::sqrt(hs::sigma2(n));
  s.rdot1 = -(-Dm * n.zeta + (1 - mu) * Dz - De) / (2 * sg);
  s.delta = s.f1 / s.e_omega;
  return s;
}

double transition_v(const HardField& hard, double u) {
  const Lattice& g = *hard.grid;
  const ScalarField& s2 = hard.field("sigma2");
  // Stay two rows inside so the interpolation stencils are centred.
  double vprev = g.y(1);
  double fprev = interpolate_field(s2, u, vprev) - 1.0;
  for (int j = 2; j < g.ny() - 1; ++j) {
    const double vj = g.y(j);
    const double fj = interpolate_field(s2, u, vj) - 1.0;
    if (fprev >= 0 && fj < 0) {
      double a = vprev, b = vj, fa = fprev;
      for (int it = 0; it < 80 && b - a > 1e-15; ++it) {
        const double c = 0.5 * (a + b);
        const double fc = interpolate_field(s2, u, c) - 1.0;
        if ((fc >= 0) == (fa >= 0)) {
          a = c;
          fa = fc;
        } else {
          b = c;
        }
      }
      return 0.5 * (a + b);
    }
    vprev = vj;
    fprev = fj;
  }
  std::ostringstream os;
  os << "interface: no sigma = 1 crossing at u = " << u;
  throw InterfaceError(os.str());
}

InterfaceCurve build_interface(const HardField& hard, const InterfaceOptions& opt) {
  const Lattice& g = *hard.grid;
  const double D = g.dx();
  // N- is where h' = 0, i.e. d(sigma^2)/du = 0 on Sigma.  Bracket on the
  // lattice columns near u = 0, then bisect.
  auto slope = [&](double u) {
    const HardNode nd = hard.interpolate(u, transition_v(hard, u));
    return hs::sigma2_u(nd, hard.flags);
  };
  const int w = opt.fit_half_width;
  double a = 0, b = 0, fa = 0;
  bool found = false;
  for (int p = 0; p <= w && !found; ++p)
    for (int sgn : {-1, 1}) {
      const double x0 = sgn * p * D, x1 = x0 + D;
      if (x0 < g.x(2) || x1 > g.x(g.nx() - 3)) continue;
      const double f0 = slope(x0), f1 = slope(x1);
      if (f0 == 0 || (f0 < 0) != (f1 < 0)) {
        a = x0;
        b = f0 == 0 ? x0 : x1;
        fa = f0;
        found = true;
        break;
      }
    }
  if (!found) throw InterfaceError("interface: N- (h' = 0) not found near u = 0");
  for (int it = 0; it < 60 && b - a > 1e-15; ++it) {
    const double c = 0.5 * (a + b);
    const double fc = slope(c);
    if ((fc < 0) == (fa < 0)) {
      a = c;
      fa = fc;
    } else {
      b = c;
    }
  }
  const double um = 0.5 * (a + b);
  const double vm = transition_v(hard, um);
  // Curvature of h at N- from a local quadratic fit (diagnostic only).
  std::vector<double> us, hv;
  for (int p = -2; p <= 2; ++p) {
    const double u = um + p * D;
    if (u < g.x(2) || u > g.x(g.nx() - 3)) continue;
    us.push_back(u - um);
    hv.push_back(transition_v(hard, u));
  }
  const Eigen::Vector3d c = quad_fit(us, hv);
  if (!(c(2) > 0)) throw InterfaceError("interface: h has no minimum at N- (k <= 0)");

  const int n = static_cast<int>(std::floor(opt.chi_max / D + 1e-9));
  if (um - n * D < g.x(2))
    throw InterfaceError("interface: chi_max reaches outside the hard field");
  std::vector<SigmaPoint> pts;
  pts.reserve(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double u = um - k * D;
    const double v = k == 0 ? vm : transition_v(hard, u);
    SigmaPoint s = sigma_point_from_state(hard.interpolate(u, v), u, v, hard.flags);
    s.chi = k * D;
    pts.push_back(s);
  }
  // q = -exp(-omega) d(delta)/dchi by second-order differences.
  for (int k = 0; k <= n; ++k) {
    double dd;
    if (k == 0)
      dd = (-3 * pts[0].delta + 4 * pts[1].delta - pts[2].delta) / (2 * D);
    else if (k == n)
      dd = (3 * pts[n].delta - 4 * pts[n - 1].delta + pts[n - 2].delta) / (2 * D);
    else
      dd = (pts[k + 1].delta - pts[k - 1].delta) / (2 * D);
    pts[k].q = -dd / pts[k].e_omega;
  }
  return InterfaceCurve(std::move(pts), D, um, vm, 2 * c(2));
}

CanonicalResult canonicalize(const InterfaceCurve& sigma, const HardField& hard,
                             const InterfaceOptions& opt) {
  const Lattice& g = *hard.grid;
  const double D = g.dx();
  const double um = sigma.u_minus(), vm = sigma.v_minus();
  const HardNode c = hard.interpolate(um, vm);
  const double pu = hs::phi_u(c), pv = hs::phi_v(c);
  const ScalarField& om2 = hard.field("Omega2");

  CanonicalMaps maps;
  maps.u_shift = um;
  maps.v_shift = vm;
  maps.phi_shift = c.phi;

  // Samples u = um + k D covering the old lattice, kept two nodes inside.
  auto axis = [&](double lo, double hi, double centre, std::vector<double>& x,
                  std::size_t& k0) {
    const int a = static_cast<int>(std::ceil((lo - centre) / D - 1e-9));
    const int b = static_cast<int>(std::floor((hi - centre) / D + 1e-9));
    for (int k = a; k <= b; ++k) x.push_back(centre + k * D);
    k0 = static_cast<std::size_t>(-a);
  };
  std::size_t ku0, kv0;
  axis(g.x(2), g.x(g.nx() - 3), um, maps.u_old, ku0);
  axis(g.y(2), g.y(g.ny() - 3), vm, maps.v_old, kv0);
  std::vector<double> Fp, Gp;
  for (double u : maps.u_old) Fp.push_back(interpolate_field(om2, u, vm) / (2 * pv));
  for (double v : maps.v_old) Gp.push_back(interpolate_field(om2, um, v) / (2 * pu));
  maps.u_new = cumulative(Fp, D, ku0);
  maps.v_new = cumulative(Gp, D, kv0);
  for (double x : Fp) maps.max_deviation = std::max(maps.max_deviation, std::abs(x - 1));
  for (double x : Gp) maps.max_deviation = std::max(maps.max_deviation, std::abs(x - 1));

  // Inverse map by Hermite inversion on the table.
  auto invert = [&](const std::vector<double>& xo, const std::vector<double>& xn,
                    const std::vector<double>& d, double target, double& deriv) {
    const auto it = std::upper_bound(xn.begin(), xn.end(), target);
    std::size_t k = static_cast<std::size_t>(std::distance(xn.begin(), it));
    k = std::clamp<std::size_t>(k, 1, xn.size() - 1) - 1;
    double th = (target - xn[k]) / (xn[k + 1] - xn[k]);
    for (int iter = 0; iter < 30; ++iter) {
      const double val = hermite3(th, D, xn[k], d[k], xn[k + 1], d[k + 1]);
      const double t2 = th * th;
      const double dval = ((6 * t2 - 6 * th) * xn[k] + (3 * t2 - 4 * th + 1) * D * d[k] +
                           (-6 * t2 + 6 * th) * xn[k + 1] + (3 * t2 - 2 * th) * D * d[k + 1]);
      const double step = (val - target) / dval;
      th -= step;
      if (std::abs(step) < 1e-15) break;
    }
    deriv = d[k] + th * (d[k + 1] - d[k]);
    return xo[k] + th * D;
  };

  const int iu0 = static_cast<int>(std::ceil(-maps.u_new.front() / D - 1e-9));
  const int iu1 = static_cast<int>(std::floor(maps.u_new.back() / D + 1e-9));
  const int jv0 = static_cast<int>(std::ceil(-maps.v_new.front() / D - 1e-9));
  const int jv1 = static_cast<int>(std::floor(maps.v_new.back() / D + 1e-9));
  auto grid = std::make_shared<Lattice>(-iu0 * D, D, iu0 + iu1 + 1, -jv0 * D, D,
                                        jv0 + jv1 + 1);
  HardField out;
  out.grid = grid;
  out.flags = hard.flags;
  out.nodes.resize(grid->size());
  std::vector<double> uo(grid->nx()), Up(grid->nx()), vo(grid->ny()), Vp(grid->ny());
  for (int i = 0; i < grid->nx(); ++i)
    uo[i] = invert(maps.u_old, maps.u_new, Fp, grid->x(i), Up[i]);
  for (int j = 0; j < grid->ny(); ++j)
    vo[j] = invert(maps.v_old, maps.v_new, Gp, grid->y(j), Vp[j]);
  for (std::size_t k = 0; k < grid->size(); ++k) {
    const auto [i, j] = grid->node(k);
    HardNode n = hard.interpolate(uo[i], vo[j]);
    n.nu /= Up[i];
    n.kappa /= Vp[j];
    n.phi -= maps.phi_shift;
    n.r_alt = n.r;
    n.phi_alt = n.phi;
    n.m_alt = n.m;
    out.nodes[k] = n;
  }
  // Log-integrals relative to the new lines through N-.
  for (std::size_t k = 0; k < grid->size(); ++k) {
    const auto [i, j] = grid->node(k);
    HardNode& n = out.nodes[k];
    n.N = std::log(n.nu / out.nodes[grid->index(i, jv0)].nu);
    n.K = -std::log(n.kappa / out.nodes[grid->index(iu0, j)].kappa);
  }
  // Map the old seams.
  for (double s : hard.seam_u) {
    const auto it = std::lower_bound(maps.u_old.begin(), maps.u_old.end(), s);
    if (it == maps.u_old.end() || it == maps.u_old.begin()) continue;
    const std::size_t k = static_cast<std::size_t>(std::distance(maps.u_old.begin(), it));
    const double th = (s - maps.u_old[k - 1]) / D;
    out.seam_u.push_back(hermite3(th, D, maps.u_new[k - 1], Fp[k - 1], maps.u_new[k], Fp[k]));
  }
  for (double s : hard.seam_v) {
    const auto it = std::lower_bound(maps.v_old.begin(), maps.v_old.end(), s);
    if (it == maps.v_old.end() || it == maps.v_old.begin()) continue;
    const std::size_t k = static_cast<std::size_t>(std::distance(maps.v_old.begin(), it));
    const double th = (s - maps.v_old[k - 1]) / D;
    out.seam_v.push_back(hermite3(th, D, maps.v_new[k - 1], Gp[k - 1], maps.v_new[k], Gp[k]));
  }
  InterfaceCurve sg = build_interface(out, opt);
  return CanonicalResult{std::move(maps), std::move(out), std::move(sg)};
}

MeasuredInvariants nullpoint_invariants(const InterfaceCurve& sigma,
                                        const HardField& hard) {
  const double D = hard.grid->dx();
  const double um = sigma.u_minus();
  std::vector<double> ws, ks;
  const Lattice& g = *hard.grid;
  for (int m : {1, 2, 4, 8, 16}) {
    const double w = m * D;
    if (um - w < g.x(2) || um + w > g.x(g.nx() - 3)) continue;
    std::vector<double> x, y;
    for (int p = -4; p <= 4; ++p) {
      x.push_back(p * w / 4);
      y.push_back(transition_v(hard, um + p * w / 4));
    }
    ws.push_back(w * w);
    ks.push_back(2 * quad_fit(x, y)(2));
  }
  if (ws.size() < 2) throw InterfaceError("interface: hard field too small for the k fit");
  // k_w = k + c w^2
  Eigen::MatrixXd A(ws.size(), 2);
  Eigen::VectorXd b(ws.size());
  for (std::size_t p = 0; p < ws.size(); ++p) {
    A(p, 0) = 1;
    A(p, 1) = ws[p];
    b(p) = ks[p];
  }
  const double k = A.colPivHouseholderQr().solve(b)(0);
  const HardNode n = hard.interpolate(um, sigma.v_minus());
  const double j = -hs::sigma2_v(n, hard.flags);
  const double am = 2 * n.nu;
  const double ap = 2 * (1 - hs::mu(n)) * n.kappa;
  return MeasuredInvariants{k, j, make_invariants(n.r, am, ap, k, j)};
}

}  // namespace xs
