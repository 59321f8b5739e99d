// Boundary-null-point invariants and synthetic scenarios around N-.
#pragma once

#include <array>
#include <string>

#include "xshock/hard_system.hpp"
#include "xshock/state_core.hpp"

namespace xs {

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScenarioParams {
  double r0 = 1.0;
  double a_minus = 1.0;
  double a_plus = 1.0;
  double k = 1.0;
  double j = 2.0 * kPi;
  double phi_vvv = 0.0;      // free third derivative of phi along u = 0
  double tail_length = 0.5;  // damping length of the cubic terms of phi
};

// The jet at N- in canonical null coordinates, all from closed forms.
struct NullPointInvariants {
  double r0 = 0, m0 = 0, mu0 = 0, a_minus = 0, a_plus = 0, rdot0 = 0;
  double k = 0, j = 0, i = 0, i0 = 0, l = 0, beta0 = 0;
  // null-coordinate jet
  double r_u = 0, r_v = 0, r_uu = 0, r_uv = 0, r_vv = 0;
  double r_uuu = 0, r_uuv = 0;
  double phi_u = 0, phi_v = 0, phi_uu = 0, phi_uv = 0, phi_vv = 0;
  double phi_uuu = 0, phi_uuv = 0;
  // comoving jet
  double r_tau = 0, r_chi = 0, r_tautau = 0, r_tauchi = 0, r_chichi = 0;
  double r_tauchichi = 0;
  // interface jet
  double f1 = 0, f2 = 0, omega1 = 0, q0 = 0;
  double dr_dchi = 0, d2r_dchi2 = 0, drdot_dchi = 0;
  // hard-side values at the corner
  double xi0 = 0, xi_minus0 = 0, e_plus0 = 0;
  // C*- jet
  double R0 = 0, R1 = 0, R2 = 0, R3 = 0;
  // density Hessian and its identity residual
  double rho_tt = 0, rho_tx = 0, rho_xx = 0;

  bool shock_case() const { return l > 1.0; }
};

// Fill every derived entry from (r0, a-, a+, k, j).  Throws ScenarioError on
// infeasible input (mu0 >= 1, k <= 0, j <= 0, a- <= 0, r0 <= 0).
NullPointInvariants make_invariants(double r0, double a_minus, double a_plus,
                                    double k, double j);

struct RhoHessian {
  double tt, tx, xx;
  double identity;  // tt/4 - tx + xx
  double l_check;   // -4 xx / tt
};
RhoHessian rho_hessian_closed_form(const NullPointInvariants& inv);

// phi restricted to a null line through N-:
//   phi(s) = s/2 + c2 s^2/2 + c3 s^3/6 exp(-(s/L)^2)
struct NullLinePhi {
  double c2 = 0, c3 = 0, L = 1;
  std::array<double, 4> jet(double s) const;  // phi, phi', phi'', phi'''
};

struct Scenario {
  ScenarioParams params;
  NullPointInvariants inv;
  NullLinePhi line_u;  // phi(u, 0)
  NullLinePhi line_v;  // phi(0, v)
};

Scenario synthesize_scenario(const ScenarioParams& params);

// Values of every field on the data lines, by integrating the system along
// them in the canonical gauge Omega = 1.
class DataLines {
 public:
  explicit DataLines(const Scenario& sc, double h = 1.0 / 8192.0);
  HardNode on_v0(double u) const;  // node (u, 0)
  HardNode on_u0(double v) const;  // node (0, v)
  const Scenario& scenario() const { return sc_; }

 private:
  Scenario sc_;
  double h_;
};

}  // namespace xs
