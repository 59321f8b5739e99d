#include <doctest.h>

#include <cmath>
#include <memory>

#include "xshock/shock_solver.hpp"

using namespace xs;

namespace {

struct Canonical {
  Scenario sc;
  std::shared_ptr<SoftSolution> soft;
};

const Canonical& canonical() {
  static const Canonical c = [] {
    Canonical c{synthesize_scenario({}), {}};
    const HardField f = evolve_prior_extrapolated(c.sc, {-0.08, 0.04, -0.03, 0.03}, 1.0 / 256);
    c.soft = std::make_shared<SoftSolution>(std::make_shared<InterfaceCurve>(build_interface(f)));
    return c;
  }();
  return c;
}

FormationOptions coarse() {
  FormationOptions o;
  o.delta = 1.0 / 2048;
  o.tau_hat = 5.0 / 128;
  return o;
}

}  // namespace

TEST_CASE("jump data with no relative motion") {
  const JumpData j = jump_boundary_data(0, 0.7, 2.0);
  CHECK(j.nu == doctest::Approx(1.0));
  CHECK(j.kappa == doctest::Approx(0.25));
  CHECK(j.zeta == doctest::Approx(0.5));
  CHECK(j.eta == doctest::Approx(2.0));
  CHECK(j.dphi == doctest::Approx(1));
}

TEST_CASE("unit density gives sigma = 1 for any velocity") {
  for (double b : {0.0, 0.2, 0.5, 0.9}) {
    const JumpData j = jump_boundary_data(b, 1.0, 1.3);
    CHECK(j.zeta * j.eta == doctest::Approx(1));
  }
  const JumpData h = jump_boundary_data(0.5, 1.0, 1.0);
  CHECK(h.zeta == doctest::Approx(1));
  CHECK(h.eta == doctest::Approx(1));
  CHECK_THROWS_AS(jump_boundary_data(1.0, 0.5, 1.0), ShockError);
}

TEST_CASE("velocity update") {
  CHECK(beta_update(1.0, 0.8) == doctest::Approx(0).scale(1));
  CHECK(beta_update(0.9, 1.0) == doctest::Approx(1));
  // E = 3X: z^2 = 1/4 and beta = 3/5.
  const double X = 0.1, E = 0.3;
  CHECK(beta_update(1 / std::sqrt(1 + E), 1 - X) == doctest::Approx(0.6));
  try {
    beta_update(1.0, 1.0);
    FAIL("corner accepted");
  } catch (const ShockError& e) {
    CHECK(e.kind == ShockFailure::corner_degenerate);
  }
  CHECK_THROWS_AS(beta_update(1.2, 0.5), ShockError);
}

TEST_CASE("phase derivative along the shock") {
  CHECK(psi_derivative(0, 0.5) == doctest::Approx(0).scale(1));
  CHECK(psi_derivative(0.2, 1.0) == doctest::Approx(0).scale(1));
  CHECK(psi_derivative(0.1, 0.5) == doctest::Approx(-6.1e-4).epsilon(0.01));
}

TEST_CASE("formation march on the canonical scenario") {
  const Canonical& c = canonical();
  const ShockRun r = run_formation(c.sc, *c.soft, coarse());
  REQUIRE(r.curve.samples.size() > 10);
  for (const auto& s : r.curve.samples) {
    if (s.tau == 0) continue;
    CHECK(s.beta > 0);
    CHECK(s.beta < 1);
    CHECK(s.rho < 1);
    CHECK(s.gamma <= 1);
  }
  CHECK(r.curve.beta0_extrapolated == doctest::Approx(0.5).epsilon(0.02));
  const BarrierReport b = barrier_monitor(r.hard, r.curve);
  CHECK(b.genuine_hard());
  CHECK(b.min_e_star > 0);
  CHECK(b.min_sigma_minus_one > 0);
  CHECK_NOTHROW(check_alpha_routes(r.curve, 5e-2));
}

TEST_CASE("halving the step converges the shock position") {
  const Canonical& c = canonical();
  double chi[3];
  for (int k = 0; k < 3; ++k) {
    FormationOptions o = coarse();
    o.delta = std::ldexp(1.0, -9 - k);
    chi[k] = run_formation(c.sc, *c.soft, o).curve.samples.back().chi;
  }
  CHECK(std::log2(std::abs(chi[0] - chi[1]) / std::abs(chi[1] - chi[2])) >= 1.7);
}

TEST_CASE("a degenerate soft side stalls the velocity update") {
  const Canonical& c = canonical();
  SoftSide flat = [](double tau, double chi) {
    SoftPoint p;
    p.tau = tau;
    p.chi = chi;
    p.r = 1;
    p.rho = 1;
    p.e_omega = 0.5;
    p.a_minus = 1;
    p.a_plus = 1;
    return p;
  };
  ShockStart st{formation_data(c.sc, 0.04), 0.5, true, 1.0, 1.0};
  FormationMarcher m(flat, st, coarse());
  CHECK_THROWS_AS(
      [&] {
        while (m.advance_step()) {
        }
      }(),
      ShockError);
}

TEST_CASE("regularized members satisfy their conditions") {
  const Canonical& c = canonical();
  RegularizedOptions opt;
  double prev_c = INFINITY, prev_k = INFINITY, prev_l = INFINITY;
  for (int n = 1; n <= 4; ++n) {
    const RegularizedProblem p = build_regularized(c.sc, *c.soft, n, opt, 5.0 / 128);
    INFO("n = " << n);
    CHECK(p.conditions_hold());
    CHECK(p.gamma0 < 1);
    CHECK(p.e0 > 0);
    CHECK(std::abs(p.c) < prev_c);
    CHECK(std::abs(p.k) < prev_k);
    CHECK(std::abs(p.l) < prev_l);
    prev_c = std::abs(p.c);
    prev_k = std::abs(p.k);
    prev_l = std::abs(p.l);
  }
}

TEST_CASE("E through the alpha transport vanishes at the corner") {
  const Canonical& c = canonical();
  const ShockRun r = run_formation(c.sc, *c.soft, coarse());
  const AlphaRoutes a = E_via_alpha(r.curve, 0);
  CHECK(std::abs(a.direct) <= 1e-12);
  CHECK(std::abs(a.transport) <= 1e-12);
}
