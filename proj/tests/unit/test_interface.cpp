#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "xshock/interface_checks.hpp"

using namespace xs;

namespace {

const PriorDomain kDomain{-0.08, 0.04, -0.03, 0.03};

struct Prior {
  Scenario sc;
  HardField hard;
  std::shared_ptr<InterfaceCurve> sigma;
};

Prior prior(double d, ScenarioParams params = {}) {
  Prior p{synthesize_scenario(params), {}, {}};
  p.hard = evolve_prior_extrapolated(p.sc, kDomain, d);
  p.sigma = std::make_shared<InterfaceCurve>(build_interface(p.hard));
  return p;
}

}  // namespace

TEST_CASE("canonical invariants by substitution") {
  const NullPointInvariants v = make_invariants(1, 1, 1, 1, 2 * kPi);
  CHECK(v.m0 == doctest::Approx(0).scale(1));
  CHECK(v.mu0 == doctest::Approx(1 - v.a_minus * v.a_plus).scale(1));
  CHECK(v.i == doctest::Approx(2 * kPi));
  CHECK(v.i0 == doctest::Approx(kPi));
  CHECK(v.l == doctest::Approx(3));
  CHECK(v.beta0 == doctest::Approx(0.5));
  CHECK(v.r_u == doctest::Approx(-0.5));
  CHECK(v.r_v == doctest::Approx(0.5));
  CHECK(v.r_uu == doctest::Approx(-kPi));
  CHECK(v.r_vv == doctest::Approx(-kPi));
  CHECK(v.r_uv == doctest::Approx(kPi));
  CHECK(v.f1 == doctest::Approx(0.5));
  CHECK(v.q0 == doctest::Approx(4 * v.k));
  CHECK(v.shock_case());
}

TEST_CASE("equal expansions at rest give i0 = pi") {
  for (double a : {0.5, 0.8, 1.0}) {
    const NullPointInvariants v = make_invariants(1.3, a, a, 0.7, 3.0);
    CHECK(v.rdot0 == doctest::Approx(0).scale(1));
    CHECK(v.i0 == doctest::Approx(kPi));
  }
}

TEST_CASE("density Hessian closed form") {
  const RhoHessian h = rho_hessian_closed_form(make_invariants(1, 1, 1, 1, 2 * kPi));
  CHECK(h.tt == doctest::Approx(4 * kPi));
  CHECK(h.tx == doctest::Approx(-2 * kPi));
  CHECK(h.xx == doctest::Approx(-3 * kPi));
  CHECK(std::abs(h.identity) <= 1e-12);
  CHECK(h.l_check == doctest::Approx(3));

  // i = i0 = pi: the boundary of the shock case.
  const NullPointInvariants b = make_invariants(1, 1, 1, 1, kPi);
  CHECK(b.l == doctest::Approx(1));
  CHECK_FALSE(b.shock_case());
  const RhoHessian hb = rho_hessian_closed_form(b);
  CHECK(hb.tt == doctest::Approx(4 * kPi));
  CHECK(hb.tx == doctest::Approx(0).scale(1));
  CHECK(hb.xx == doctest::Approx(-kPi));
}

TEST_CASE("Hessian identity holds for random invariant sets") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.2, 2.0);
  for (int n = 0; n < 100; ++n) {
    const double am = U(rng), ap = U(rng) * 0.4 / am;  // keeps mu0 < 1
    const NullPointInvariants v = make_invariants(U(rng), am, ap, U(rng), U(rng) * 5);
    const RhoHessian h = rho_hessian_closed_form(v);
    CHECK(std::abs(h.identity) <= 1e-12 * (1 + std::abs(h.tt)));
    CHECK(h.l_check == doctest::Approx(v.l));
    CHECK(v.beta0 * (5 * v.l + 1) == doctest::Approx(5 + v.l));
  }
}

TEST_CASE("infeasible scenarios are refused") {
  CHECK_THROWS_AS(make_invariants(1, 1, 1, 0, 1), ScenarioError);
  CHECK_THROWS_AS(make_invariants(1, 1, 1, 1, -1), ScenarioError);
  CHECK_THROWS_AS(make_invariants(1, -1, 1, 1, 1), ScenarioError);
  CHECK_THROWS_AS(make_invariants(0, 1, 1, 1, 1), ScenarioError);
  CHECK_THROWS_AS(make_invariants(1, 1, 0, 1, 1), ScenarioError);  // mu0 = 1
}

TEST_CASE("interface endpoint and measured invariants") {
  const Prior p = prior(1.0 / 256);
  const SigmaPoint n = p.sigma->at(0);
  CHECK(std::abs(n.hp) <= 1e-6);
  CHECK(n.delta == doctest::Approx(1).epsilon(1e-6));
  CHECK(n.q == doctest::Approx(4 * p.sc.inv.k).epsilon(0.02));
  CHECK(n.f1 == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(n.e_omega == doctest::Approx(0.5).epsilon(1e-6));
  for (const auto& s : p.sigma->points()) CHECK(s.hp <= 1e-12);

  const MeasuredInvariants m = nullpoint_invariants(*p.sigma, p.hard);
  CHECK(m.k == doctest::Approx(p.sc.inv.k).epsilon(1e-3));
  CHECK(m.j == doctest::Approx(p.sc.inv.j).epsilon(1e-3));
  CHECK(m.inv.l == doctest::Approx(3).epsilon(1e-3));
  CHECK(m.inv.beta0 == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("the interface follows the sigma = 1 level set") {
  const double d = 1.0 / 128;
  const Prior p = prior(d);
  for (const auto& s : p.sigma->points())
    CHECK(std::abs(hs::sigma2(p.hard.interpolate(s.u, s.h)) - 1) <= d * d);
}

TEST_CASE("canonical coordinates are already canonical") {
  const Prior p = prior(1.0 / 256);
  const CanonicalResult once = canonicalize(*p.sigma, p.hard);
  CHECK(std::abs(once.maps.u_shift) <= 1e-6);
  CHECK(std::abs(once.maps.v_shift) <= 1e-6);
  CHECK(once.maps.max_deviation <= 1e-3);
  const HardNode n = once.hard.interpolate(0, 0);
  CHECK(hs::phi_u(n) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(hs::phi_v(n) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(hs::r_u(n) == doctest::Approx(-p.sc.inv.a_minus / 2).epsilon(1e-6));
  CHECK(hs::r_v(n) == doctest::Approx(p.sc.inv.a_plus / 2).epsilon(1e-6));
  const CanonicalResult twice = canonicalize(once.sigma, once.hard);
  CHECK(std::abs(twice.maps.u_shift) <= 1e-9);
  CHECK(std::abs(twice.maps.v_shift) <= 1e-9);
  CHECK(std::abs(twice.maps.phi_shift) <= 1e-9);
}

TEST_CASE("continuity jumps shrink under refinement") {
  std::vector<std::vector<Jump>> J;
  for (double d : {1.0 / 128, 1.0 / 256}) {
    const Prior p = prior(d);
    SoftSolution sol(p.sigma);
    SoftField sf = evolve_soft(sol, d, 0.09, 0.05);
    soft_diagnostics(sf);
    J.push_back(continuity_report(p.hard, sf, *p.sigma));
  }
  REQUIRE(J[0].size() == 7);
  for (std::size_t k = 0; k < 7; ++k) {
    INFO(J[0][k].name);
    CHECK(J[0][k].value / J[1][k].value >= 3.4);
  }
}

TEST_CASE("the continuity report detects a mismatched pair") {
  const Prior p = prior(1.0 / 128);
  ScenarioParams other;
  other.j = 3 * kPi;
  const Prior q = prior(1.0 / 128, other);
  SoftSolution sol(q.sigma);
  SoftField sf = evolve_soft(sol, 1.0 / 128, 0.09, 0.05);
  soft_diagnostics(sf);
  double worst = 0;
  for (const auto& j : continuity_report(p.hard, sf, *p.sigma)) worst = std::max(worst, j.value);
  CHECK(worst > 1e-3);
}

TEST_CASE("curvature jump at a mid point is stable under refinement") {
  const Prior c = prior(1.0 / 128);
  const double a = curvature_jump(c.hard, *c.sigma, 1.0 / 32);
  const Prior f = prior(1.0 / 256);
  const double b = curvature_jump(f.hard, *f.sigma, 1.0 / 32);
  CHECK(std::isfinite(a));
  CHECK(std::abs(b) > 0);
  CHECK(a == doctest::Approx(b).epsilon(0.02));
  CHECK_THROWS(curvature_jump(f.hard, *f.sigma, 0.0));
}
