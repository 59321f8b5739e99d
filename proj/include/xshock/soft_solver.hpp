// Pressureless soft phase in comoving coordinates (tau, chi): each flow line
// obeys r'' = -m/r^2 with m constant, and r_chi is carried by the variational
// equation so that rho and omega need no chi-differencing.
#pragma once

#include <memory>
#include <vector>

#include "xshock/interface.hpp"
#include "xshock/state_core.hpp"

namespace xs {

struct CollapseError : SolverError {
  CollapseError(const std::string& what, double tau) : SolverError(what), tau(tau) {}
  double tau;
};

struct FlowlineSample {
  double tau, r, rdot;
};

// Classical RK4 from (r0, rdot0) at tau0 to tau1, returning every step.
std::vector<FlowlineSample> evolve_flowline(double r0, double rdot0, double m,
                                            double tau0, double tau1, double step);

// Flow line with its chi-variation: w = r_chi obeys w'' = 2 m w / r^3 - m_chi / r^2.
struct FlowState {
  double r, rdot, r_chi, rdot_chi;
};
FlowState advance_flowline(FlowState s, double m, double m_chi, double tau0,
                           double tau1, double step);

struct SoftPoint {
  double tau = 0, chi = 0;
  double r = 0, rdot = 0, m = 0, m_chi = 0, r_chi = 0, rdot_chi = 0;
  double mu = 0, e_omega = 0, omega = 0, omega_tau = 0;
  double rho = 0;  // NaN where r_chi = 0
  double a_minus = 0, a_plus = 0;
};

// Algebraic diagnostics from the carried state.  Throws SolverError when
// 1 - mu + rdot^2 <= 0.
SoftPoint soft_point(const FlowState& s, double m, double m_chi, double tau,
                     double chi);

// Data on Sigma: the soft state at tau = -f(chi).
struct SoftSlice {
  std::vector<double> chi, tau;
  std::vector<SoftPoint> points;
  double max_omega_mismatch = 0;  // |e^{2 omega}(state) - (f'^2 - Omega^2 h')|
  double max_rho_defect = 0;      // |rho - 1|
};
SoftSlice init_from_interface(const InterfaceCurve& sigma);

// Pointwise soft solution: every query integrates its flow line from Sigma.
class SoftSolution {
 public:
  explicit SoftSolution(std::shared_ptr<const InterfaceCurve> sigma,
                        double step = 1.0 / 4096.0);
  SoftPoint at(double tau, double chi) const;
  FlowState initial(double chi, double& m, double& m_chi) const;
  double past(double chi) const { return -sigma_->at(chi).f; }
  double chi_max() const { return sigma_->chi_max(); }
  const InterfaceCurve& sigma() const { return *sigma_; }
  std::shared_ptr<const InterfaceCurve> sigma_ptr() const { return sigma_; }

 private:
  std::shared_ptr<const InterfaceCurve> sigma_;
  double step_;
};

// Lattice snapshot.  r_chi comes from the variational equation.
struct SoftField {
  std::shared_ptr<const ComovingGrid> grid;
  std::vector<double> r, rdot, m, m_chi, r_chi, rdot_chi;
  std::vector<double> omega, rho, a_minus, a_plus, mu;
  double hessian_residual = 0;  // max |r_tau chi - omega_tau r_chi|
  double max_energy_drift = 0;  // per unit tau along flow lines
  double max_mass_drift = 0;
  double max_null_identity = 0;  // |a- a+ + mu - 1|
  int undefined_rho = 0;

  ScalarField field(const std::string& name) const;
};

// Lattice tau = tau0 + i d, chi = j d with tau0 = floor(min past / d) d.
SoftField evolve_soft(const SoftSolution& sol, double d, double tau_max,
                      double chi_max);

// Fill omega, rho, a+-, mu and the Hessian residual.
void soft_diagnostics(SoftField& f);

struct ReturnCurve {
  std::vector<double> chi, tau;
  std::vector<bool> open;  // no return within the lattice
};
// First tau > past(chi) on each lattice column where rho = 1 again.
ReturnCurve rho_return_curve(const SoftField& f);
// Pointwise version on the exact flow lines.
ReturnCurve rho_return_curve(const SoftSolution& sol, const std::vector<double>& chis,
                             double tau_max);

}  // namespace xs
