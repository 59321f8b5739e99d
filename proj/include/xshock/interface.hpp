// The transition curve v = h(u) where sigma = 1, its induced data and the
// jet at the inner null end point N-.
#pragma once

#include <memory>
#include <vector>

#include "xshock/hard_solver.hpp"
#include "xshock/scenario.hpp"

namespace xs {

struct InterfaceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Induced data at one point of Sigma, as functions of chi = u_minus - u.
struct SigmaPoint {
  double chi = 0, u = 0, h = 0, hp = 0;
  HardNode node;
  double Omega = 0;
  double f = 0, f1 = 0;        // f = -phi*(u), f1 = df/dchi
  double e_omega = 0;          // exp(omega*)
  double r = 0, r1 = 0;        // r*, dr*/dchi
  double rdot = 0, rdot1 = 0;  // U r on Sigma, d/dchi
  double m = 0, m1 = 0;        // m*, dm*/dchi
  double delta = 0, q = 0;
};

class InterfaceCurve {
 public:
  InterfaceCurve(std::vector<SigmaPoint> pts, double spacing, double u_minus,
                 double v_minus, double k_fit);
  const std::vector<SigmaPoint>& points() const { return pts_; }
  double spacing() const { return dchi_; }
  double chi_max() const { return pts_.back().chi; }
  double u_minus() const { return u_minus_; }
  double v_minus() const { return v_minus_; }
  double k_fit() const { return k_fit_; }
  // Interpolated data (Hermite in chi for the value/derivative pairs).
  SigmaPoint at(double chi) const;

 private:
  std::vector<SigmaPoint> pts_;
  double dchi_, u_minus_, v_minus_, k_fit_;
};

// Hard-side data at (u, v) on Sigma: pointwise geometry from the state.
SigmaPoint sigma_point_from_state(const HardNode& n, double u, double v,
                                  SystemFlags flags = {});

// v = h(u): the root of sigma^2 = 1 on the vertical line through u, found by
// scanning lattice rows upward and bisecting.
double transition_v(const HardField& hard, double u);

struct InterfaceOptions {
  double chi_max = 0.06;
  int fit_half_width = 8;  // nodes each side of N- for the endpoint fit
};

InterfaceCurve build_interface(const HardField& hard, const InterfaceOptions& opt = {});

struct CanonicalMaps {
  double u_shift = 0, v_shift = 0, phi_shift = 0;
  std::vector<double> u_old, u_new;  // u_new = U(u_old) after the shift
  std::vector<double> v_old, v_new;
  double max_deviation = 0;  // sup |U'(u) - 1| and |V'(v) - 1|
};

struct CanonicalResult {
  CanonicalMaps maps;
  HardField hard;
  InterfaceCurve sigma;
};

CanonicalResult canonicalize(const InterfaceCurve& sigma, const HardField& hard,
                             const InterfaceOptions& opt = {});

// k from a quadratic fit of h at N- over shrinking windows, j = -d(sigma^2)/dv
// at N-, and every derived scalar from closed forms.
struct MeasuredInvariants {
  double k, j;
  NullPointInvariants inv;
};
MeasuredInvariants nullpoint_invariants(const InterfaceCurve& sigma,
                                        const HardField& hard);

}  // namespace xs
