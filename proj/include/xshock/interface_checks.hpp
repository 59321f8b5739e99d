// Cross-checks of the hard/soft transfer across Sigma.
#pragma once

#include <string>
#include <vector>

#include "xshock/hard_solver.hpp"
#include "xshock/interface.hpp"
#include "xshock/soft_solver.hpp"

namespace xs {

struct Jump {
  std::string name;
  double value = 0;  // max |hard - soft| over the probe points
  double hard = 0, soft = 0, chi = 0;  // at the worst point
};

// One-sided limits at Sigma points chi in probes: the hard side extrapolates
// the lattice column u = u- - chi upward to v = h, the soft side extrapolates
// the lattice column chi downward to tau = -f(chi).  Null-frame soft values
// use d/du = B (d/dtau - V), d/dv = A (d/dtau + V) with A, B from Sigma.
std::vector<Jump> continuity_report(const HardField& hard, const SoftField& soft,
                                    const InterfaceCurve& sigma,
                                    const std::vector<double>& probes = {1.0 / 64,
                                                                         1.0 / 32,
                                                                         3.0 / 64});

// Jump of the geodesic curvature of the simultaneous curves at Sigma point
// chi: delta * V(log sigma) from the hard side.
double curvature_jump(const HardField& hard, const InterfaceCurve& sigma, double chi);

}  // namespace xs
