#include <doctest.h>

#include <cmath>

#include "xshock/hard_solver.hpp"

using namespace xs;

namespace {

HardNode flat_node() {
  HardNode p;
  p.r = 1;
  p.nu = 0.5;
  p.kappa = 0.5;
  p.zeta = 1;
  p.eta = 1;
  return p;
}

const PriorDomain kDomain{-0.08, 0.04, -0.03, 0.03};

}  // namespace

TEST_CASE("pointwise identities of the state") {
  HardNode p = flat_node();
  p.m = 0.1;
  p.zeta = 1.3;
  p.eta = 0.9;
  CHECK(hs::mu(p) == doctest::Approx(0.2));
  CHECK(hs::sigma2(p) == doctest::Approx(1.3 * 0.9));
  CHECK(hs::omega2(p) == doctest::Approx(4 * 0.5 * 0.5));
  CHECK(hs::density(p) == doctest::Approx((1 + 1.3 * 0.9) / 2));
  CHECK(hs::alpha(p) == doctest::Approx(1.3));
}

TEST_CASE("vacuum flag removes the matter sources") {
  const HardNode p = flat_node();
  const SystemFlags vac{false};
  CHECK(hs::m_u(p, vac) == doctest::Approx(0).scale(1));
  CHECK(hs::m_v(p, vac) == doctest::Approx(0).scale(1));
  CHECK(hs::m_u(p) != doctest::Approx(0).scale(1));
}

TEST_CASE("canonical data line has R jet (1, -1, -4 pi, 12 pi)") {
  const Scenario sc = synthesize_scenario({});
  CHECK(sc.inv.R0 == doctest::Approx(1));
  CHECK(sc.inv.R1 == doctest::Approx(-1));
  CHECK(sc.inv.R2 == doctest::Approx(-4 * kPi));
  CHECK(sc.inv.R3 == doctest::Approx(12 * kPi));
  const CharacteristicData cd = CharacteristicData::from_lines(sc, 0.05);
  const auto j = cd.at(0);
  CHECK(j.R == doctest::Approx(1));
  CHECK(j.R1 == doctest::Approx(-1).epsilon(1e-6));
  CHECK(cd.Z(0) == doctest::Approx(1).epsilon(1e-6));
  // The barrier along C*- vanishes at N- and grows at rate i in u = 2 phi.
  CHECK(std::abs(cd.barrier(0)) < 1e-8);
  const double h = 1e-4;
  CHECK((cd.barrier(h) - cd.barrier(0)) / (2 * h) == doctest::Approx(sc.inv.i).epsilon(0.01));
}

TEST_CASE("shifted data moves R by c + k t + l t^2 / 2") {
  const Scenario sc = synthesize_scenario({});
  const CharacteristicData cd = CharacteristicData::from_lines(sc, 0.05);
  const CharacteristicData sh = cd.shifted(0.01, 0.2, 3.0, 0.0);
  const double t = 0.02;
  CHECK(sh.at(t).R - cd.at(t).R == doctest::Approx(0.01 + 0.2 * t + 1.5 * t * t));
  CHECK(sh.at(t).R1 - cd.at(t).R1 == doctest::Approx(0.2 + 3.0 * t));
}

TEST_CASE("prior field at N-") {
  const Scenario sc = synthesize_scenario({});
  const HardField f = evolve_prior_extrapolated(sc, kDomain, 1.0 / 128);
  const HardNode n = f.interpolate(0, 0);
  CHECK(n.zeta == doctest::Approx(1 / sc.inv.a_minus));
  CHECK(n.eta == doctest::Approx(sc.inv.a_minus));
  CHECK(n.r == doctest::Approx(sc.inv.r0));
  const HardDiagnostics d = hard_diagnostics(f);
  CHECK(d.max_sigma_identity <= 1e-12);
  CHECK(d.max_omega_identity <= 1e-12);
  CHECK(std::abs(interpolate_field(d.e, 0, 0)) <= 1e-8);
  CHECK(f.max_cell_iterations <= 50);
}

TEST_CASE("closed forms at the corner") {
  const NullPointInvariants v = make_invariants(1, 1, 1, 1, 2 * kPi);
  CHECK(v.e_plus0 == doctest::Approx(4 * v.a_minus * v.i0));
  CHECK(v.xi0 == doctest::Approx(-4 * kPi));
}

TEST_CASE("edge barrier is positive on the wedge edge") {
  const Scenario sc = synthesize_scenario({});
  const CharacteristicData cd = CharacteristicData::from_lines(sc, 0.05);
  for (double t = 1.0 / 1024; t <= 0.04; t += 1.0 / 1024) CHECK(cd.barrier(t) > 0);
}

TEST_CASE("discretization residuals shrink at second order") {
  const Scenario sc = synthesize_scenario({});
  const auto coarse = consistency_report(evolve_prior(sc, kDomain, 1.0 / 128));
  const auto fine = consistency_report(evolve_prior(sc, kDomain, 1.0 / 256));
  REQUIRE(coarse.size() == fine.size());
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    INFO(coarse[k].name);
    CHECK(std::isfinite(coarse[k].value));
    if (coarse[k].expected_order == 2 && coarse[k].value > 1e-13)
      CHECK(coarse[k].value / fine[k].value >= 3.4);
  }
}

TEST_CASE("a single cell of the flat vacuum system is exact") {
  // Minkowski: nu = kappa = 1/2, phi = (u + v)/2 solves the flat wave equation.
  const double d = 1.0 / 64;
  CellOptions opt;
  opt.flags.matter = false;
  const HardNode a = flat_node();
  HardNode bv = a, bu = a;  // A shifted by du and by dv
  bv.r = a.r - 0.5 * d;
  bu.r = a.r + 0.5 * d;
  bv.phi = bu.phi = a.phi + 0.5 * d;
  bu.r_alt = bu.r;
  bu.phi_alt = bu.phi;
  HardNode out;
  const int it = solve_cell(bv, bu, &a, d, d, opt, out);
  CHECK(it <= 50);
  CHECK(out.r == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out.phi == doctest::Approx(d).epsilon(1e-12));
  CHECK(out.zeta == doctest::Approx(1).epsilon(1e-12));
  CHECK(out.eta == doctest::Approx(1).epsilon(1e-12));
  CHECK(out.r_alt == doctest::Approx(out.r).epsilon(1e-12));
}
