#include "xshock/hard_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace xs {

// ---------------------------------------------------------------- C*- data

namespace {

struct LineState {
  double s, r, nu, m;
};

LineState line_rhs(const NullLinePhi& line, const LineState& y) {
  const auto p = line.jet(y.s);
  HardNode n;
  n.r = y.r;
  n.nu = y.nu;
  n.m = y.m;
  n.zeta = p[1] / y.nu;
  const double inv = 1.0 / p[1];
  return {inv, -y.nu * inv, 4.0 * kPi * y.r * p[1], hs::m_u(n) * inv};
}

LineState axpy(const LineState& y, double h, const LineState& k) {
  return {y.s + h * k.s, y.r + h * k.r, y.nu + h * k.nu, y.m + h * k.m};
}

double hermite5(double th, double h, double p0, double d0, double s0,
                double p1, double d1, double s1) {
  const double t2 = th * th, t3 = t2 * th, t4 = t3 * th, t5 = t4 * th;
  return (1 - 10 * t3 + 15 * t4 - 6 * t5) * p0 +
         (th - 6 * t3 + 8 * t4 - 3 * t5) * h * d0 +
         (0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5) * h * h * s0 +
         (0.5 * t3 - t4 + 0.5 * t5) * h * h * s1 +
         (-4 * t3 + 7 * t4 - 3 * t5) * h * d1 + (10 * t3 - 15 * t4 + 6 * t5) * p1;
}

double hermite3(double th, double h, double p0, double d0, double p1, double d1) {
  const double t2 = th * th, t3 = t2 * th;
  return (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + th) * h * d0 +
         (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * h * d1;
}

double mass_rate(double R, double R1, double M) {
  const double Z = -1.0 / R1;
  return 2.0 * kPi * R * R * R1 * ((1.0 - 2.0 * M / R) * Z * Z + 1.0);
}

}  // namespace

CharacteristicData CharacteristicData::from_lines(const Scenario& sc,
                                                  double t_max, double dt) {
  CharacteristicData d;
  d.dt_ = dt;
  const int n = static_cast<int>(std::ceil(t_max / dt)) + 1;
  const auto& line = sc.line_u;
  LineState y{0.0, sc.inv.r0, sc.inv.a_minus / 2, sc.inv.m0};
  const int sub = 4;
  const double h = dt / sub;
  for (int k = 0; k < n; ++k) {
    if (k > 0)
      for (int q = 0; q < sub; ++q) {
        const LineState k1 = line_rhs(line, y);
        const LineState k2 = line_rhs(line, axpy(y, 0.5 * h, k1));
        const LineState k3 = line_rhs(line, axpy(y, 0.5 * h, k2));
        const LineState k4 = line_rhs(line, axpy(y, h, k3));
        y.s += h / 6 * (k1.s + 2 * k2.s + 2 * k3.s + k4.s);
        y.r += h / 6 * (k1.r + 2 * k2.r + 2 * k3.r + k4.r);
        y.nu += h / 6 * (k1.nu + 2 * k2.nu + 2 * k3.nu + k4.nu);
        y.m += h / 6 * (k1.m + 2 * k2.m + 2 * k3.m + k4.m);
      }
    const auto p = line.jet(y.s);
    if (!(p[1] > 0)) throw ScenarioError("C*- data: phi_u <= 0 along v = 0");
    const double q1 = -y.nu, q2 = -4.0 * kPi * y.r * p[1] * p[1];
    const double q3 = -4.0 * kPi * (q1 * p[1] * p[1] + 2.0 * y.r * p[1] * p[2]);
    const double p1 = p[1], p2 = p[2], p3 = p[3];
    d.R_.push_back(y.r);
    d.R1_.push_back(q1 / p1);
    d.R2_.push_back((q2 * p1 - q1 * p2) / (p1 * p1 * p1));
    d.R3_.push_back(((q3 * p1 - q1 * p3) / std::pow(p1, 3) -
                     3 * (q2 * p1 - q1 * p2) * p2 / std::pow(p1, 4)) /
                    p1);
    d.M_.push_back(y.m);
    d.M1_.push_back(mass_rate(y.r, q1 / p1, y.m));
  }
  return d;
}

CharacteristicData CharacteristicData::shifted(double c, double k, double l,
                                               double m0) const {
  CharacteristicData d = *this;
  const std::size_t n = R_.size();
  for (std::size_t a = 0; a < n; ++a) {
    const double t = dt_ * static_cast<double>(a);
    d.R_[a] += c + k * t + 0.5 * l * t * t;
    d.R1_[a] += k + l * t;
    d.R2_[a] += l;
  }
  // Re-integrate the mass with RK4 on the same nodes.
  const auto Rof = [&d](double t) {
    const Jet j = d.at(t);
    return std::pair<double, double>{j.R, j.R1};
  };
  d.M_[0] = m0;
  for (std::size_t a = 0; a + 1 < n; ++a) {
    const double t = dt_ * static_cast<double>(a);
    auto f = [&](double tt, double M) {
      auto [R, R1] = Rof(tt);
      return mass_rate(R, R1, M);
    };
    const double M = d.M_[a];
    const double k1 = f(t, M);
    const double k2 = f(t + 0.5 * dt_, M + 0.5 * dt_ * k1);
    const double k3 = f(t + 0.5 * dt_, M + 0.5 * dt_ * k2);
    const double k4 = f(t + dt_, M + dt_ * k3);
    d.M_[a + 1] = M + dt_ / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  for (std::size_t a = 0; a < n; ++a) d.M1_[a] = mass_rate(d.R_[a], d.R1_[a], d.M_[a]);
  return d;
}

CharacteristicData::Jet CharacteristicData::at(double t) const {
  if (t < -1e-14 || t > t_max() + 1e-12) {
    std::ostringstream os;
    os << "C*- data: t = " << t << " outside [0, " << t_max() << "]";
    throw DomainError(os.str());
  }
  const std::size_t last = R_.size() - 1;
  std::size_t a = static_cast<std::size_t>(std::max(0.0, std::floor(t / dt_)));
  if (a >= last) a = last - 1;
  const double th = (t - dt_ * static_cast<double>(a)) / dt_;
  const std::size_t b = a + 1;
  Jet j;
  j.t = t;
  j.R = hermite5(th, dt_, R_[a], R1_[a], R2_[a], R_[b], R1_[b], R2_[b]);
  j.R1 = hermite3(th, dt_, R1_[a], R2_[a], R1_[b], R2_[b]);
  j.R2 = hermite3(th, dt_, R2_[a], R3_[a], R2_[b], R3_[b]);
  j.R3 = (1 - th) * R3_[a] + th * R3_[b];
  j.M = hermite3(th, dt_, M_[a], M1_[a], M_[b], M1_[b]);
  j.M1 = mass_rate(j.R, j.R1, j.M);
  return j;
}

double CharacteristicData::Z(double t) const { return -1.0 / at(t).R1; }

double CharacteristicData::Xi(double t) const {
  const Jet j = at(t);
  return -j.R2 / (j.R1 * j.R1 * j.R1);
}

double CharacteristicData::Xi_minus(double t) const {
  const Jet j = at(t);
  const double dXi = -j.R3 / std::pow(j.R1, 3) + 3 * j.R2 * j.R2 / std::pow(j.R1, 4);
  return dXi / (-j.R1);
}

namespace {
HardNode edge_node(const CharacteristicData::Jet& j) {
  HardNode n;
  n.r = j.R;
  n.m = j.M;
  n.zeta = -1.0 / j.R1;
  n.xi = -j.R2 / (j.R1 * j.R1 * j.R1);
  n.nu = 1.0;  // gauge-free quantities only
  return n;
}
}  // namespace

double CharacteristicData::barrier(double t) const {
  return hs::barrier(edge_node(at(t)));
}

double CharacteristicData::barrier_minus(double t) const {
  return hs::barrier_minus(edge_node(at(t)), Xi_minus(t));
}

// ---------------------------------------------------------------- cell

namespace {

constexpr int kPrimary = 9;

std::array<double, kPrimary> primary(const HardNode& n) {
  return {n.r, n.phi, n.m, n.nu, n.kappa, n.zeta, n.eta, n.xi, n.psi};
}

void check_node(const HardNode& n) {
  if (!(n.r > 0)) throw SolverError("collapse: r <= 0");
  if (!(1.0 - hs::mu(n) > 0)) throw SolverError("trapped region: 1 - mu <= 0");
  if (!std::isfinite(n.r + n.phi + n.m + n.nu + n.kappa + n.zeta + n.eta + n.xi + n.psi))
    throw SolverError("non-finite state");
}

}  // namespace

int solve_cell(const HardNode& Bv, const HardNode& Bu, const HardNode* A,
               double du, double dv, const CellOptions& opt, HardNode& out) {
  const SystemFlags f = opt.flags;
  HardNode x;
  if (A) {
    auto lin = [](double a, double b, double c) { return a + b - c; };
    x.r = lin(Bv.r, Bu.r, A->r);
    x.phi = lin(Bv.phi, Bu.phi, A->phi);
    x.m = lin(Bv.m, Bu.m, A->m);
    x.nu = lin(Bv.nu, Bu.nu, A->nu);
    x.kappa = lin(Bv.kappa, Bu.kappa, A->kappa);
    x.zeta = lin(Bv.zeta, Bu.zeta, A->zeta);
    x.eta = lin(Bv.eta, Bu.eta, A->eta);
    x.xi = lin(Bv.xi, Bu.xi, A->xi);
    x.psi = lin(Bv.psi, Bu.psi, A->psi);
  } else {
    x = Bv;
    x.kappa = Bu.kappa;
    x.eta = Bu.eta;
    x.psi = Bu.psi;
    x.m = Bu.m;
  }
  if (!(x.r > 0) || !(x.nu > 0) || !(x.kappa > 0)) {
    x = Bv;
    x.kappa = Bu.kappa;
  }
  // Fixed parts of the trapezoid sums.
  const double rv0 = hs::r_v(Bv), pv0 = hs::phi_v(Bv), nv0 = hs::n_integrand(Bv, f);
  const double zv0 = hs::zeta_v(Bv, f), xv0 = hs::xi_v(Bv, f), mv0 = hs::m_v(Bv, f);
  const double ku0 = hs::k_integrand(Bu, f), eu0 = hs::eta_u(Bu, f), mu0 = hs::m_u(Bu, f);
  const double su0 = opt.carry_psi ? hs::psi_u(Bu, f) : 0.0;
  const double ru0 = hs::r_u(Bu), pu0 = hs::phi_u(Bu);
  const double hv = 0.5 * dv, hu = 0.5 * du;
  for (int it = 1; it <= opt.cap; ++it) {
    HardNode y;
    const double nsum = nv0 + hs::n_integrand(x, f);
    y.r = Bv.r + hv * (rv0 + hs::r_v(x));
    y.phi = Bv.phi + hv * (pv0 + hs::phi_v(x));
    y.N = Bv.N + hv * nsum;
    y.nu = Bv.nu * std::exp(hv * nsum);
    y.zeta = Bv.zeta + hv * (zv0 + hs::zeta_v(x, f));
    y.xi = Bv.xi + hv * (xv0 + hs::xi_v(x, f));
    y.m_alt = Bv.m_alt + hv * (mv0 + hs::m_v(x, f));

    const double ksum = ku0 + hs::k_integrand(x, f);
    y.K = Bu.K + hu * ksum;
    y.kappa = Bu.kappa * std::exp(-hu * ksum);
    y.eta = Bu.eta + hu * (eu0 + hs::eta_u(x, f));
    y.psi = opt.carry_psi ? Bu.psi + hu * (su0 + hs::psi_u(x, f)) : 0.0;
    y.m = Bu.m + hu * (mu0 + hs::m_u(x, f));
    y.r_alt = Bu.r_alt + hu * (ru0 + hs::r_u(x));
    y.phi_alt = Bu.phi_alt + hu * (pu0 + hs::phi_u(x));

    const auto a = primary(x), b = primary(y);
    double err = 0.0;
    for (int q = 0; q < kPrimary; ++q)
      err = std::max(err, std::abs(b[q] - a[q]) / (1.0 + std::abs(a[q])));
    x = y;
    check_node(x);
    if (err <= opt.tol) {
      out = x;
      return it;
    }
  }
  throw SolverError("cell-divergence: fixed point not converged");
}

// ---------------------------------------------------------------- field

const HardNode& HardField::at(int i, int j) const {
  const int k = grid->index(i, j);
  if (k < 0) throw DomainError("hard field: no node at index");
  return nodes[static_cast<std::size_t>(k)];
}

std::vector<std::string> HardField::field_names() const {
  return {"r",   "phi", "m",      "nu",     "kappa",   "zeta",   "eta",
          "xi",  "psi", "N",      "K",      "r_alt",   "phi_alt", "m_alt",
          "mu",  "sigma2", "sigma", "Omega2", "Omega", "e",      "alpha"};
}

const ScalarField& HardField::field(const std::string& name) const {
  auto it = cache_.find(name);
  if (it != cache_.end()) return *it->second;
  std::vector<double> v(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const HardNode& n = nodes[k];
    double x;
    if (name == "r") x = n.r;
    else if (name == "phi") x = n.phi;
    else if (name == "m") x = n.m;
    else if (name == "nu") x = n.nu;
    else if (name == "kappa") x = n.kappa;
    else if (name == "zeta") x = n.zeta;
    else if (name == "eta") x = n.eta;
    else if (name == "xi") x = n.xi;
    else if (name == "psi") x = n.psi;
    else if (name == "N") x = n.N;
    else if (name == "K") x = n.K;
    else if (name == "r_alt") x = n.r_alt;
    else if (name == "phi_alt") x = n.phi_alt;
    else if (name == "m_alt") x = n.m_alt;
    else if (name == "mu") x = hs::mu(n);
    else if (name == "sigma2") x = hs::sigma2(n);
    else if (name == "sigma") x = std::sqrt(hs::sigma2(n));
    else if (name == "Omega2") x = hs::omega2(n);
    else if (name == "Omega") x = std::sqrt(hs::omega2(n));
    else if (name == "e") x = hs::barrier(n);
    else if (name == "alpha") x = hs::alpha(n);
    else throw std::invalid_argument("hard field: unknown field '" + name + "'");
    v[k] = x;
  }
  auto p = std::make_shared<ScalarField>(grid, std::move(v), name);
  cache_[name] = p;
  return *cache_[name];
}

HardNode HardField::interpolate(double u, double v) const {
  HardNode n;
  n.r = interpolate_field(field("r"), u, v);
  n.phi = interpolate_field(field("phi"), u, v);
  n.m = interpolate_field(field("m"), u, v);
  n.nu = interpolate_field(field("nu"), u, v);
  n.kappa = interpolate_field(field("kappa"), u, v);
  n.zeta = interpolate_field(field("zeta"), u, v);
  n.eta = interpolate_field(field("eta"), u, v);
  n.xi = interpolate_field(field("xi"), u, v);
  n.psi = interpolate_field(field("psi"), u, v);
  n.N = interpolate_field(field("N"), u, v);
  n.K = interpolate_field(field("K"), u, v);
  n.r_alt = n.r;
  n.phi_alt = n.phi;
  n.m_alt = n.m;
  return n;
}

// ---------------------------------------------------------------- prior

HardField evolve_prior(const Scenario& sc, const PriorDomain& dom, double delta,
                       const CellOptions& opt) {
  if (!(dom.u_min < 0 && dom.u_max > 0 && dom.v_min < 0 && dom.v_max > 0))
    throw std::invalid_argument("prior domain must contain N- in its interior");
  const int iu0 = static_cast<int>(std::ceil(-dom.u_min / delta - 1e-9));
  const int iu1 = static_cast<int>(std::ceil(dom.u_max / delta - 1e-9));
  const int jv0 = static_cast<int>(std::ceil(-dom.v_min / delta - 1e-9));
  const int jv1 = static_cast<int>(std::ceil(dom.v_max / delta - 1e-9));
  auto grid = std::make_shared<Lattice>(-iu0 * delta, delta, iu0 + iu1 + 1,
                                        -jv0 * delta, delta, jv0 + jv1 + 1);
  HardField f;
  f.grid = grid;
  f.flags = opt.flags;
  f.nodes.resize(grid->size());
  f.seam_u = {0.0};
  f.seam_v = {0.0};
  auto ref = [&](int i, int j) -> HardNode& {
    return f.nodes[static_cast<std::size_t>(grid->index(i, j))];
  };
  DataLines lines(sc);
  for (int i = 0; i < grid->nx(); ++i) ref(i, jv0) = lines.on_v0(grid->x(i));
  for (int j = 0; j < grid->ny(); ++j) ref(iu0, j) = lines.on_u0(grid->y(j));
  for (int su : {1, -1})
    for (int sv : {1, -1}) {
      for (int i = iu0 + su; i >= 0 && i < grid->nx(); i += su)
        for (int j = jv0 + sv; j >= 0 && j < grid->ny(); j += sv) {
          int it = 0;
          try {
            it = solve_cell(ref(i, j - sv), ref(i - su, j), &ref(i - su, j - sv),
                            su * delta, sv * delta, opt, ref(i, j));
          } catch (const SolverError& e) {
            std::ostringstream os;
            os << e.what() << " at prior cell (u=" << grid->x(i)
               << ", v=" << grid->y(j) << ")";
            throw SolverError(os.str());
          }
          f.max_cell_iterations = std::max(f.max_cell_iterations, it);
        }
    }
  return f;
}

HardField richardson_combine(const HardField& coarse, const HardField& fine) {
  const Lattice& gc = *coarse.grid;
  const Lattice& gf = *fine.grid;
  if (std::abs(2 * gf.dx() - gc.dx()) > 1e-14 || std::abs(2 * gf.dy() - gc.dy()) > 1e-14)
    throw std::invalid_argument("richardson: fine spacing must be half the coarse");
  HardField out = coarse;
  out.invalidate();
  for (std::size_t k = 0; k < gc.size(); ++k) {
    const auto [i, j] = gc.node(k);
    const double fi = (gc.x(i) - gf.x0()) / gf.dx();
    const double fj = (gc.y(j) - gf.y0()) / gf.dy();
    const int ii = static_cast<int>(std::lround(fi));
    const int jj = static_cast<int>(std::lround(fj));
    if (std::abs(fi - ii) > 1e-6 || std::abs(fj - jj) > 1e-6 || !gf.has(ii, jj))
      throw std::invalid_argument("richardson: coarse node missing from fine grid");
    const HardNode& a = coarse.nodes[k];
    const HardNode& b = fine.at(ii, jj);
    HardNode& c = out.nodes[k];
    auto mix = [](double x, double y) { return (4.0 * y - x) / 3.0; };
    c.r = mix(a.r, b.r);
    c.phi = mix(a.phi, b.phi);
    c.m = mix(a.m, b.m);
    c.nu = mix(a.nu, b.nu);
    c.kappa = mix(a.kappa, b.kappa);
    c.zeta = mix(a.zeta, b.zeta);
    c.eta = mix(a.eta, b.eta);
    c.xi = mix(a.xi, b.xi);
    c.psi = mix(a.psi, b.psi);
    c.N = mix(a.N, b.N);
    c.K = mix(a.K, b.K);
    c.r_alt = mix(a.r_alt, b.r_alt);
    c.phi_alt = mix(a.phi_alt, b.phi_alt);
    c.m_alt = mix(a.m_alt, b.m_alt);
  }
  out.max_cell_iterations = std::max(coarse.max_cell_iterations, fine.max_cell_iterations);
  return out;
}

HardField evolve_prior_extrapolated(const Scenario& sc, const PriorDomain& dom,
                                    double delta, const CellOptions& opt) {
  const HardField c = evolve_prior(sc, dom, delta, opt);
  // Snap the domain to the coarse lattice so every coarse node is a fine node.
  const PriorDomain snapped{c.grid->x0(), c.grid->x_max(), c.grid->y0(), c.grid->y_max()};
  const HardField f = evolve_prior(sc, snapped, 0.5 * delta, opt);
  return richardson_combine(c, f);
}

// ---------------------------------------------------------------- wedge

WedgeMarcher::WedgeMarcher(double delta, const CellOptions& opt)
    : delta_(delta), opt_(opt) {
  opt_.carry_psi = false;
}

void WedgeMarcher::set_corner(const HardNode& n) {
  rows_.clear();
  HardNode c = n;
  c.N = c.K = 0.0;
  c.psi = 0.0;
  c.r_alt = c.r;
  c.phi_alt = c.phi;
  c.m_alt = c.m;
  rows_.push_back({c});
}

void WedgeMarcher::compute_row(int i, const EdgeValues& ev, const DiagValues& dv) {
  if (i < 1 || i > rows()) throw std::logic_error("wedge: rows must be computed in order");
  if (i == rows()) rows_.emplace_back(static_cast<std::size_t>(i) + 1);
  auto& row = rows_[i];
  const auto& prev = rows_[i - 1];
  const double D = delta_;
  const SystemFlags f = opt_.flags;
  // Edge node: primary data plus kappa, eta, K along u from (i-1, 0).
  {
    HardNode n;
    n.r = ev.r;
    n.phi = ev.phi;
    n.m = ev.m;
    n.nu = ev.nu;
    n.zeta = ev.zeta;
    n.xi = ev.xi;
    n.N = 0.0;
    const HardNode& b = prev[0];
    const double ksum = hs::k_integrand(b, f) + hs::k_integrand(n, f);
    n.K = b.K + 0.5 * D * ksum;
    n.kappa = b.kappa * std::exp(-0.5 * D * ksum);
    // eta_u is affine in eta: solve the trapezoid exactly.
    const double eb = hs::eta_u(b, f);
    HardNode t0 = n;
    t0.eta = 0.0;
    const double c0 = hs::eta_u(t0, f);
    t0.eta = 1.0;
    const double c1 = hs::eta_u(t0, f) - c0;
    n.eta = (b.eta + 0.5 * D * (eb + c0)) / (1.0 - 0.5 * D * c1);
    n.r_alt = b.r_alt + 0.5 * D * (hs::r_u(b) + hs::r_u(n));
    n.phi_alt = b.phi_alt + 0.5 * D * (hs::phi_u(b) + hs::phi_u(n));
    n.m_alt = n.m;
    check_node(n);
    row[0] = n;
  }
  for (int j = 1; j < i; ++j) {
    int it = 0;
    try {
      it = solve_cell(row[j - 1], prev[j], &prev[j - 1], D, D, opt_, row[j]);
    } catch (const SolverError& e) {
      std::ostringstream os;
      os << e.what() << " at wedge cell (" << i << "," << j << ")";
      throw SolverError(os.str());
    }
    max_iter_ = std::max(max_iter_, it);
  }
  // Diagonal node: v-route from (i, i-1) with kappa, eta, m from the data.
  {
    const HardNode& b = row[i - 1];
    HardNode x = b;
    x.kappa = dv.kappa;
    x.eta = dv.eta;
    x.m = dv.m;
    const double rv0 = hs::r_v(b), pv0 = hs::phi_v(b), nv0 = hs::n_integrand(b, f);
    const double zv0 = hs::zeta_v(b, f), xv0 = hs::xi_v(b, f), mv0 = hs::m_v(b, f);
    int it = 1;
    for (;; ++it) {
      if (it > opt_.cap) {
        std::ostringstream os;
        os << "cell-divergence at wedge diagonal node " << i;
        throw SolverError(os.str());
      }
      HardNode y = x;
      const double nsum = nv0 + hs::n_integrand(x, f);
      y.r = b.r + 0.5 * D * (rv0 + hs::r_v(x));
      y.phi = b.phi + 0.5 * D * (pv0 + hs::phi_v(x));
      y.N = b.N + 0.5 * D * nsum;
      y.nu = b.nu * std::exp(0.5 * D * nsum);
      y.zeta = b.zeta + 0.5 * D * (zv0 + hs::zeta_v(x, f));
      y.xi = b.xi + 0.5 * D * (xv0 + hs::xi_v(x, f));
      y.m_alt = b.m_alt + 0.5 * D * (mv0 + hs::m_v(x, f));
      const double err = std::max({std::abs(y.r - x.r), std::abs(y.phi - x.phi),
                                   std::abs(y.nu - x.nu) / (1 + std::abs(x.nu)),
                                   std::abs(y.zeta - x.zeta) / (1 + std::abs(x.zeta)),
                                   std::abs(y.xi - x.xi) / (1 + std::abs(x.xi))});
      x = y;
      check_node(x);
      if (err <= opt_.tol) break;
    }
    max_iter_ = std::max(max_iter_, it);
    x.K = 0.0;
    x.psi = 0.0;
    x.r_alt = dv.r;
    x.phi_alt = dv.phi;
    row[i] = x;
  }
}

HardField WedgeMarcher::field() const {
  const int n = rows();
  auto grid = std::make_shared<NullGrid>(delta_, n);
  HardField f;
  f.grid = grid;
  f.flags = opt_.flags;
  f.max_cell_iterations = max_iter_;
  f.nodes.resize(grid->size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      f.nodes[static_cast<std::size_t>(grid->index(i, j))] = rows_[i][j];
  return f;
}

HardField evolve_wedge(const std::function<EdgeValues(double)>& edge,
                       const std::function<DiagValues(double)>& diag,
                       const HardNode& corner, const NullGrid& grid,
                       const CellOptions& opt) {
  WedgeMarcher w(grid.delta(), opt);
  w.set_corner(corner);
  for (int i = 1; i < grid.rows(); ++i) {
    const double u = grid.x(i);
    w.compute_row(i, edge(u), diag(u));
  }
  return w.field();
}

// ---------------------------------------------------------------- diagnostics

HardDiagnostics hard_diagnostics(const HardField& f) {
  const auto& g = f.grid;
  const std::size_t n = f.nodes.size();
  std::vector<double> sg(n), om(n), xi(n), xm(n), xp(n), e(n), em(n), ep(n), al(n);
  double s_id = 0.0, o_id = 0.0;
  const ScalarField& xif = f.field("xi");
  for (std::size_t k = 0; k < n; ++k) {
    const HardNode& p = f.nodes[k];
    if (!(p.zeta > 0)) throw SolverError("diagnostic singularity: zeta <= 0");
    const double s2 = hs::sigma2(p);
    sg[k] = std::sqrt(s2);
    om[k] = std::sqrt(hs::omega2(p));
    s_id = std::max(s_id, std::abs(sg[k] * sg[k] - p.zeta * p.eta));
    o_id = std::max(o_id, std::abs(om[k] * om[k] - 4.0 * p.nu * p.kappa));
    xi[k] = p.xi;
    auto [i, j] = g->node(k);
    double xu = 0.0;
    try {
      xu = finite_difference(xif, g->x(i), g->y(j), 1, 0);
    } catch (const StencilError&) {
      xu = std::nan("");
    }
    xm[k] = hs::xi_minus(xu, p);
    xp[k] = (f.flags.matter ? hs::xi_plus(p) : hs::xi_v(p, f.flags) / p.kappa);
    e[k] = hs::barrier(p);
    em[k] = hs::barrier_minus(p, xm[k]);
    ep[k] = hs::barrier_plus(p);
    al[k] = hs::alpha(p);
  }
  auto mk = [&](std::vector<double>& v, const char* name) {
    for (double& x : v)
      if (!std::isfinite(x)) x = 0.0;
    return ScalarField(g, v, name);
  };
  return HardDiagnostics{mk(sg, "sigma"), mk(om, "Omega"), mk(xi, "xi"),
                         mk(xm, "xi_minus"), mk(xp, "xi_plus"), mk(e, "e"),
                         mk(em, "e_minus"), mk(ep, "e_plus"), mk(al, "alpha"),
                         s_id, o_id};
}

std::vector<Residual> consistency_report(const HardField& f) {
  const auto& g = f.grid;
  const ScalarField& r = f.field("r");
  const ScalarField& phi = f.field("phi");
  const ScalarField& Om = f.field("Omega");
  const ScalarField& s2 = f.field("sigma2");
  const double s = f.flags.matter ? 1.0 : 0.0;
  double wave = 0, h1 = 0, h2 = 0, h3 = 0, dm = 0, dr = 0, dp = 0, sid = 0, oid = 0, su = 0;
  for (std::size_t k = 0; k < f.nodes.size(); ++k) {
    const HardNode& p = f.nodes[k];
    sid = std::max(sid, std::abs(hs::sigma2(p) - p.zeta * p.eta));
    oid = std::max(oid, std::abs(std::pow(std::sqrt(hs::omega2(p)), 2) - 4 * p.nu * p.kappa));
    dm = std::max(dm, std::abs(p.m - p.m_alt));
    dr = std::max(dr, std::abs(p.r - p.r_alt));
    dp = std::max(dp, std::abs(p.phi - p.phi_alt));
    auto [i, j] = g->node(k);
    const double u = g->x(i), v = g->y(j);
    bool near_seam = false;
    for (double a : f.seam_u) near_seam |= std::abs(u - a) < 2.5 * g->dx();
    for (double a : f.seam_v) near_seam |= std::abs(v - a) < 2.5 * g->dy();
    if (near_seam) continue;
    try {
      const double ru = finite_difference(r, u, v, 1, 0);
      const double rv = finite_difference(r, u, v, 0, 1);
      const double ruu = finite_difference(r, u, v, 2, 0);
      const double rvv = finite_difference(r, u, v, 0, 2);
      const double ruv = finite_difference(r, u, v, 1, 1);
      const double pu = finite_difference(phi, u, v, 1, 0);
      const double pv = finite_difference(phi, u, v, 0, 1);
      const double puv = finite_difference(phi, u, v, 1, 1);
      const double O = Om.values[k];
      const double Ou = finite_difference(Om, u, v, 1, 0);
      const double Ov = finite_difference(Om, u, v, 0, 1);
      const double s2u = finite_difference(s2, u, v, 1, 0);
      wave = std::max(wave, std::abs(p.r * puv + ru * pv + rv * pu));
      h1 = std::max(h1, std::abs(ruu - 2 * Ou / O * ru + 4 * kPi * s * p.r * pu * pu));
      h2 = std::max(h2, std::abs(p.r * ruv + ru * rv -
                                 0.25 * (4 * kPi * s * p.r * p.r - 1) * O * O));
      h3 = std::max(h3, std::abs(rvv - 2 * Ov / O * rv + 4 * kPi * s * p.r * pv * pv));
      su = std::max(su, std::abs(s2u - hs::sigma2_u(p, f.flags)));
    } catch (const StencilError&) {
    } catch (const DomainError&) {
    }
  }
  return {{"wave", wave, 2},         {"hessian_uu", h1, 2},
          {"hessian_uv", h2, 2},     {"hessian_vv", h3, 2},
          {"mass_routes", dm, 2},    {"radius_routes", dr, 2},
          {"phi_routes", dp, 2},     {"sigma2_identity", sid, 0},
          {"omega2_identity", oid, 0}, {"dsigma2_du", su, 2}};
}

}  // namespace xs
