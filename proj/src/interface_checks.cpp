#include "xshock/interface_checks.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace xs {

namespace {

// Cubic through (x_k, y_k), k = 0..3, evaluated at x.
double extrapolate(const std::array<double, 4>& x, const std::array<double, 4>& y, double t) {
  double s = 0;
  for (int a = 0; a < 4; ++a) {
    double w = 1;
    for (int b = 0; b < 4; ++b)
      if (b != a) w *= (t - x[b]) / (x[a] - x[b]);
    s += w * y[a];
  }
  return s;
}

constexpr int kQuantities = 7;
const char* kNames[kQuantities] = {"Omega", "phi_u", "phi_v", "r_u", "r_v", "m", "rho"};

}  // namespace

std::vector<Jump> continuity_report(const HardField& hard, const SoftField& soft,
                                    const InterfaceCurve& sigma,
                                    const std::vector<double>& probes) {
  std::vector<Jump> out(kQuantities);
  for (int q = 0; q < kQuantities; ++q) out[q].name = kNames[q];
  const Lattice& hg = *hard.grid;
  const Lattice& sg = *soft.grid;
  for (double chi : probes) {
    const SigmaPoint sp = sigma.at(chi);
    if (!(sp.hp < 0)) throw InterfaceError("continuity: probe at a null point of Sigma");
    // Hard side.
    const double u = sp.u;
    const double fi = (u - hg.x0()) / hg.dx();
    const int i = static_cast<int>(std::lround(fi));
    if (std::abs(fi - i) > 1e-8)
      throw InterfaceError("continuity: probe is not on a hard lattice column");
    int j = static_cast<int>(std::floor((sp.h - hg.y0()) / hg.dy()));
    if (hg.y(j) >= sp.h) --j;
    std::array<double, 4> hv{};
    std::array<std::array<double, 4>, kQuantities> hy{};
    for (int a = 0; a < 4; ++a) {
      if (!hg.has(i, j - a)) throw InterfaceError("continuity: insufficient hard collar");
      const HardNode& n = hard.at(i, j - a);
      hv[a] = hg.y(j - a);
      hy[0][a] = std::sqrt(hs::omega2(n));
      hy[1][a] = hs::phi_u(n);
      hy[2][a] = hs::phi_v(n);
      hy[3][a] = hs::r_u(n);
      hy[4][a] = hs::r_v(n);
      hy[5][a] = n.m;
      hy[6][a] = hs::density(n);
    }
    std::array<double, kQuantities> H{};
    for (int q = 0; q < kQuantities; ++q) H[q] = extrapolate(hv, hy[q], sp.h);
    // Soft side.
    const double fj = (chi - sg.y0()) / sg.dy();
    const int jc = static_cast<int>(std::lround(fj));
    if (std::abs(fj - jc) > 1e-8)
      throw InterfaceError("continuity: probe is not on a soft lattice column");
    const double t0 = -sp.f;
    int ic = static_cast<int>(std::ceil((t0 - sg.x0()) / sg.dx()));
    if (sg.x(ic) <= t0) ++ic;
    std::array<double, 4> st{};
    std::array<std::array<double, 4>, 6> sy{};  // rdot, a-, a+, m, rho, e^omega
    for (int a = 0; a < 4; ++a) {
      const int k = sg.index(ic + a, jc);
      if (k < 0) throw InterfaceError("continuity: insufficient soft collar");
      st[a] = sg.x(ic + a);
      sy[0][a] = soft.rdot[k];
      sy[1][a] = soft.a_minus[k];
      sy[2][a] = soft.a_plus[k];
      sy[3][a] = soft.m[k];
      sy[4][a] = soft.rho[k];
      sy[5][a] = std::exp(soft.omega[k]);
    }
    std::array<double, 6> S{};
    for (int q = 0; q < 6; ++q) S[q] = extrapolate(st, sy[q], t0);
    const double B = 0.5 * (sp.f1 + S[5]);
    const double A = (sp.f1 - S[5]) / (2 * sp.hp);
    const std::array<double, kQuantities> Sv{2 * std::sqrt(A * B), B, A, -B * S[1],
                                              A * S[2], S[3], S[4]};
    for (int q = 0; q < kQuantities; ++q) {
      const double d = std::abs(H[q] - Sv[q]);
      if (d >= out[q].value) {
        out[q].value = d;
        out[q].hard = H[q];
        out[q].soft = Sv[q];
        out[q].chi = chi;
      }
    }
  }
  return out;
}

double curvature_jump(const HardField& hard, const InterfaceCurve& sigma, double chi) {
  const SigmaPoint sp = sigma.at(chi);
  // No unit normal at a null point; demand a clearly spacelike tangent.
  if (!(sp.hp < -1e-6)) throw InterfaceError("curvature jump: Sigma point is (nearly) null");
  const HardNode n = hard.interpolate(sp.u, sp.h);
  const double O2 = hs::omega2(n);
  const double s2 = hs::sigma2(n), s = std::sqrt(s2);
  const double pu = hs::phi_u(n), pv = hs::phi_v(n);
  const double Vlog = (2 / (O2 * s)) *
                      (-pv * hs::sigma2_u(n, hard.flags) + pu * hs::sigma2_v(n, hard.flags)) /
                      (2 * s2);
  const double ratio = (pu + sp.hp * pv) / (pu - sp.hp * pv);  // g(L,U)/g(L,V)
  return ratio * Vlog;
}

}  // namespace xs
