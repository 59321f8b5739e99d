// Double-null characteristic integration of the hard phase.
#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "xshock/hard_system.hpp"
#include "xshock/scenario.hpp"
#include "xshock/state_core.hpp"

namespace xs {

// R(t) along the incoming null line C*-, parametrised by t = phi, with the
// mass M(t).  Optionally shifted by c + k t + l t^2/2 with M re-integrated.
class CharacteristicData {
 public:
  struct Jet {
    double t, R, R1, R2, R3, M, M1;
  };

  static CharacteristicData from_lines(const Scenario& sc, double t_max,
                                       double dt = 1.0 / 4096.0);
  CharacteristicData shifted(double c, double k, double l, double m0) const;

  Jet at(double t) const;
  double t_max() const { return dt_ * (static_cast<double>(R_.size()) - 1); }
  double Z(double t) const;         // -1/R'
  double Xi(double t) const;        // -R''/R'^3
  double Xi_minus(double t) const;  // d(Xi)/du / nu
  double barrier(double t) const;
  double barrier_minus(double t) const;

 private:
  double dt_ = 0;
  std::vector<double> R_, R1_, R2_, R3_, M_, M1_;
};

struct CellOptions {
  double tol = 1e-12;
  int cap = 50;
  bool carry_psi = true;
  SystemFlags flags;
};

// One characteristic cell: Bv = (u, v - dv), Bu = (u - du, v), A the opposite
// corner (optional, used for the predictor).  Returns the iteration count.
int solve_cell(const HardNode& Bv, const HardNode& Bu, const HardNode* A,
               double du, double dv, const CellOptions& opt, HardNode& out);

struct HardField {
  std::shared_ptr<const Lattice> grid;
  std::vector<HardNode> nodes;
  SystemFlags flags;
  int max_cell_iterations = 0;
  // Goursat data lines; the discrete error has a kink across them, so
  // differencing stencils must not straddle these.
  std::vector<double> seam_u, seam_v;

  const HardNode& at(int i, int j) const;
  const ScalarField& field(const std::string& name) const;
  HardNode interpolate(double u, double v) const;
  std::vector<std::string> field_names() const;
  // Drop cached fields after editing nodes.
  void invalidate() const { cache_.clear(); }

 private:
  mutable std::map<std::string, std::shared_ptr<ScalarField>> cache_;
};

struct PriorDomain {
  double u_min = -0.08, u_max = 0.02;
  double v_min = -0.02, v_max = 0.02;
};

// Goursat problem on the rectangle around N- with data on u = 0 and v = 0.
HardField evolve_prior(const Scenario& sc, const PriorDomain& dom, double delta,
                       const CellOptions& opt = {});

// (4 fine - coarse)/3 on the coarse nodes; fine must have half the spacing
// and share the origin alignment.  Route copies are combined too.
HardField richardson_combine(const HardField& coarse, const HardField& fine);

// evolve_prior at delta and delta/2, combined.  Fourth order in delta.
HardField evolve_prior_extrapolated(const Scenario& sc, const PriorDomain& dom,
                                    double delta, const CellOptions& opt = {});

// Data on the edge v = 0 of the wedge (primary values only).
struct EdgeValues {
  double r, phi, m, nu, zeta, xi;
};
// Data on the diagonal u = v.
struct DiagValues {
  double kappa, eta, m, r, phi;
};

// Row-by-row marcher over the triangular wedge u >= v >= 0.
class WedgeMarcher {
 public:
  WedgeMarcher(double delta, const CellOptions& opt);
  void set_corner(const HardNode& n);
  // (Re)compute row i from committed rows < i.  Overwrites row i.
  void compute_row(int i, const EdgeValues& e, const DiagValues& d);
  int rows() const { return static_cast<int>(rows_.size()); }
  const HardNode& at(int i, int j) const { return rows_[i][j]; }
  double delta() const { return delta_; }
  int max_iterations() const { return max_iter_; }
  HardField field() const;

 private:
  double delta_;
  CellOptions opt_;
  std::vector<std::vector<HardNode>> rows_;
  int max_iter_ = 0;
};

HardField evolve_wedge(const std::function<EdgeValues(double)>& edge,
                       const std::function<DiagValues(double)>& diag,
                       const HardNode& corner, const NullGrid& grid,
                       const CellOptions& opt = {});

struct HardDiagnostics {
  ScalarField sigma, omega, xi, xi_minus, xi_plus, e, e_minus, e_plus, alpha;
  double max_sigma_identity = 0;  // |sigma^2 - zeta eta|
  double max_omega_identity = 0;  // |Omega^2 - 4 nu kappa|
};
HardDiagnostics hard_diagnostics(const HardField& f);

struct Residual {
  std::string name;
  double value;
  int expected_order;
};
std::vector<Residual> consistency_report(const HardField& f);

}  // namespace xs
