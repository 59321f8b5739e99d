// Formation of the timelike phase boundary B from N-: the soft solution on
// one side, a hard wedge u >= v >= 0 on the other, coupled through the jump
// conditions.  The wedge diagonal u = v = tau is B, the edge v = 0 is C*-.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "xshock/hard_solver.hpp"
#include "xshock/scenario.hpp"
#include "xshock/soft_solver.hpp"

namespace xs {

enum class ShockFailure {
  degenerate_jump,     // beta = 1
  corner_degenerate,   // gamma = rho = 1, beta is 0/0
  step_divergence,     // beta iteration did not converge
  invariant_violation, // beta outside [0, 1), gamma outside (0, 1], rho > 1
  hard_degeneracy,     // barrier e <= 0 on a new row
  anchor,              // regularized anchor outside the soft domain
};

struct ShockError : SolverError {
  ShockError(const std::string& what, ShockFailure kind, double tau)
      : SolverError(what), kind(kind), tau(tau) {}
  ShockFailure kind;
  double tau;
};

// Hard-side boundary values on B.
struct JumpData {
  double nu, kappa, zeta, eta, dphi;
};
JumpData jump_boundary_data(double beta, double rho, double a_minus);

// beta from gamma = 1/(zeta* a-*) and rho*.
double beta_update(double gamma, double rho);
// Same formula without the domain checks, for root finding.
double beta_formula(double gamma, double rho);

// dPsi/dtau with Psi = phi* - tau, from X = 1 - rho* and z^2 = (1-b)/(1+b).
double psi_derivative(double X, double z2);

struct ShockSample {
  double tau = 0, chi = 0, beta = 0, gamma = 0, rho = 0;
  double x = 0, y = 0, z2 = 0, E = 0, X = 0, q = 0;
  double Psi = 0, dPsi = 0, phi = 0, Y = 0, delta = 0;
  double nu = 0, kappa = 0, zeta = 0, eta = 0;  // jump values
  double t = 0, x_coord = 0;                    // tau +- chi/2
  double r = 0, m = 0, a_minus = 0, e_omega = 0;
  double edge_t = 0, edge_r = 0;  // C*- point on the same row
  double e_star = 0;              // barrier at the diagonal node
  double e_min = 0;               // min barrier over the row (corner excluded)
  double sigma_min = 0;           // min sigma over the row (corner excluded)
  double M_star = 0, N_star = 0;  // alpha-transport integrals
  double E_alpha = 0;             // E through the alpha transport
  double residual = 0;            // z^2 - X/(E+X)
  double zeta_wedge = 0;
  int iterations = 0;
  bool seeded = false;
};

struct ShockCurve {
  std::vector<ShockSample> samples;
  double delta = 0;
  double tau0 = 0, chi0 = 0;  // anchor in the original soft coordinates
  double beta0_extrapolated = 0;
};

// Soft data in the problem's local coordinates (tau, chi measured from the
// anchor).  Must return a point with rho, e_omega and a_minus defined.
using SoftSide = std::function<SoftPoint(double tau, double chi)>;

SoftSide soft_side(const SoftSolution& sol, double tau0 = 0, double chi0 = 0);

struct FormationOptions {
  double delta = 1.0 / 1024;
  double tau_hat = 0.04;
  int n_seed = 4;
  double beta_tol = 1e-11;
  int beta_cap = 60;
  double degeneracy_tau = 0.01;  // e <= 0 below this tau is an error
  CellOptions cell;
};

// Start of the march.  For the direct problem the corner is degenerate and
// the first n_seed rows use beta = beta_seed, chi* = 2 beta_seed tau.
struct ShockStart {
  CharacteristicData data;
  double beta = 0;
  bool degenerate = true;
  double a_minus_data = 0;  // -R'(0) of the data, for delta and Y
  double r0 = 0;
};

struct ShockRun {
  ShockCurve curve;
  HardField hard;
  int max_cell_iterations = 0;
};

class FormationMarcher {
 public:
  FormationMarcher(SoftSide soft, ShockStart start, FormationOptions opt);
  // Adds one row; false once tau_hat is reached.
  bool advance_step();
  const ShockCurve& curve() const { return curve_; }
  const WedgeMarcher& wedge() const { return wedge_; }
  ShockRun finish() const;

 private:
  struct Trial {
    double beta, chi, G, t_edge, nu_edge, N_diag;
    SoftPoint sp;
    JumpData jd;
  };
  Trial evaluate(int i, double beta, bool seeded, double N_guess);
  void record(int i, const Trial& tr, int iterations, bool seeded);

  SoftSide soft_;
  ShockStart start_;
  FormationOptions opt_;
  WedgeMarcher wedge_;
  ShockCurve curve_;
  std::vector<double> edge_nu_;
};

ShockRun run_formation(const Scenario& sc, const SoftSolution& soft,
                       const FormationOptions& opt);

// C*- data for the direct problem, long enough for tau_hat.
CharacteristicData formation_data(const Scenario& sc, double tau_hat);

// --------------------------------------------------------------- regularized

struct RegularizedProblem {
  int n = 0;
  double tau0 = 0, chi0 = 0, beta0 = 0;
  double r0 = 0, m0 = 0, mu0 = 0, a_minus0 = 0, rho0 = 0;
  double c = 0, k = 0, l = 0, F = 0;
  double gamma0 = 0, e0 = 0, beta_start = 0;
  CharacteristicData base;  // unshifted C*- data
  CharacteristicData data;  // R + c + k t + l t^2/2
  bool conditions_hold() const;
};

struct RegularizedOptions {
  double tau_seed = 0.01;
  double margin_scale = 0.1;  // margins are margin_scale * 2^-n
  double beta0 = -1;           // geodesic velocity; < 0 means closed-form beta0
  // k from the margin over a-0 - a-0n only (true), or matched so that the
  // anchor's jump velocity equals the geodesic velocity (false).
  bool literal_k = false;
};

// F(r0n, mu0n, kn): the lower bound on l for a positive barrier at the anchor.
double regularized_l_bound(double r0, double mu0, double a_minus0, double R2,
                           double r0n, double mu0n, double kn);

// Timelike soft geodesic from N- with initial relative velocity beta, to tau.
struct GeodesicEnd {
  double chi, beta;
};
GeodesicEnd soft_geodesic(const SoftSolution& soft, double beta, double tau,
                          int steps = 256);

// Outgoing soft null curve C- from N-: d chi/d tau = e^{-omega}.
struct NullCurveSample {
  double tau, chi, rho;
};
std::vector<NullCurveSample> outgoing_null_curve(const SoftSolution& soft,
                                                 double tau_max, double step);

RegularizedProblem build_regularized(const Scenario& sc, const SoftSolution& soft,
                                     int n, const RegularizedOptions& opt,
                                     double tau_hat);

// Perturb a member in the (k, l) slots by (dk, dl); conditions re-checked.
RegularizedProblem perturb_regularized(const RegularizedProblem& p, double dk,
                                       double dl);

ShockRun run_regularized(const SoftSolution& soft, const RegularizedProblem& p,
                         const FormationOptions& opt);

// --------------------------------------------------------------- monitors

struct BarrierReport {
  double min_e_wedge = 0;      // corner excluded
  double min_e_star = 0;       // along B, corner excluded
  double min_sigma_minus_one = 0;  // off-corner
  double e_corner = 0;
  int violations = 0;
  bool genuine_hard() const { return violations == 0; }
};
BarrierReport barrier_monitor(const HardField& hard, const ShockCurve& curve);

// E = 1/gamma^2 - 1 against the alpha-transport route at sample index.
struct AlphaRoutes {
  double direct, transport;
};
AlphaRoutes E_via_alpha(const ShockCurve& curve, std::size_t index);
// Throws SolverError when the two routes differ by more than tol.
void check_alpha_routes(const ShockCurve& curve, double tol);

}  // namespace xs
