#include <doctest.h>

#include <cmath>
#include <memory>

#include "xshock/soft_solver.hpp"

using namespace xs;

namespace {

std::shared_ptr<InterfaceCurve> canonical_sigma(double d) {
  const Scenario sc = synthesize_scenario({});
  const HardField f = evolve_prior_extrapolated(sc, {-0.08, 0.04, -0.03, 0.03}, d);
  return std::make_shared<InterfaceCurve>(build_interface(f));
}

}  // namespace

TEST_CASE("force-free flow lines are straight") {
  for (const auto& s : evolve_flowline(1.5, -0.3, 0.0, 0.0, 1.0, 1.0 / 64))
    CHECK(s.r == doctest::Approx(1.5 - 0.3 * s.tau).epsilon(1e-14));
}

TEST_CASE("flow line energy is conserved") {
  // r'' = -m/r^2 keeps rdot^2 - 2m/r fixed.
  double drift = 0;
  for (const auto& s : evolve_flowline(2.0, 0.0, 1.0, 0.0, 0.5, 1.0 / 256))
    drift = std::max(drift, std::abs(s.rdot * s.rdot - 2.0 / s.r + 1.0));
  CHECK(drift <= 1e-8);
}

TEST_CASE("flow line integration is fourth order") {
  auto end = [](double h) { return evolve_flowline(2.0, 0.3, 1.0, 0.0, 1.0, h).back().r; };
  const double ref = end(1.0 / 1024);
  const double e1 = std::abs(end(1.0 / 8) - ref), e2 = std::abs(end(1.0 / 16) - ref);
  CHECK(e1 / e2 == doctest::Approx(16).epsilon(0.25));
}

TEST_CASE("collapse reports the crossing time") {
  try {
    evolve_flowline(0.1, -1.0, 0.0, 0.0, 1.0, 1.0 / 64);
    FAIL("no collapse");
  } catch (const CollapseError& e) {
    CHECK(e.tau == doctest::Approx(0.1).epsilon(0.2));
  }
}

TEST_CASE("soft point algebra") {
  // Flat state: m = 0, rdot = 0, r_chi = 1 gives e^omega = 1 and a- = a+ = 1.
  const SoftPoint p = soft_point({2.0, 0.0, 1.0, 0.0}, 0.0, 0.0, 0.0, 0.0);
  CHECK(p.e_omega == doctest::Approx(1));
  CHECK(p.a_minus == doctest::Approx(1));
  CHECK(p.a_plus == doctest::Approx(1));
  const SoftPoint q = soft_point({1.0, 0.4, 0.8, 0.1}, 0.2, 0.3, 0.0, 0.0);
  CHECK(q.a_minus * q.a_plus + q.mu == doctest::Approx(1).epsilon(1e-12));
  CHECK_THROWS_AS(soft_point({1.0, 0.0, 1.0, 0.0}, 0.6, 0.0, 0.0, 0.0), SolverError);
}

TEST_CASE("soft data induced on Sigma") {
  const auto s = canonical_sigma(1.0 / 256);
  const SoftSlice sl = init_from_interface(*s);
  CHECK(sl.max_rho_defect <= 1e-6);
  CHECK(sl.max_omega_mismatch <= 1e-6);
  const SoftPoint n = sl.points.front();
  CHECK(n.e_omega == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("soft lattice diagnostics") {
  const auto s = canonical_sigma(1.0 / 256);
  SoftSolution sol(s);
  SoftField sf = evolve_soft(sol, 1.0 / 256, 0.09, 0.05);
  soft_diagnostics(sf);
  CHECK(sf.max_null_identity <= 1e-12);
  CHECK(sf.max_energy_drift <= 1e-8);
  CHECK(sf.max_mass_drift <= 1e-10);
  // rho = 1 on Sigma from the soft side.
  for (double chi : {0.01, 0.02, 0.04}) {
    const SoftPoint p = sol.at(sol.past(chi), chi);
    CHECK(p.rho == doctest::Approx(1).epsilon(1e-6));
  }
}

TEST_CASE("Hessian residual is second order") {
  double res[2];
  int k = 0;
  for (double d : {1.0 / 128, 1.0 / 256}) {
    SoftSolution sol(canonical_sigma(d));
    SoftField sf = evolve_soft(sol, d, 0.09, 0.05);
    soft_diagnostics(sf);
    res[k++] = sf.hessian_residual;
  }
  CHECK(res[0] / res[1] >= 3.4);
}

TEST_CASE("carried r_chi matches the lattice derivative of r") {
  const double d = 1.0 / 256;
  SoftSolution sol(canonical_sigma(d));
  SoftField sf = evolve_soft(sol, d, 0.09, 0.05);
  const ScalarField r = sf.field("r"), rc = sf.field("r_chi");
  const auto& g = *sf.grid;
  for (int j : {5, 8}) {
    const double tau = g.x(20), chi = g.y(j);
    CHECK(finite_difference(r, tau, chi, 0, 1) ==
          doctest::Approx(interpolate_field(rc, tau, chi)).epsilon(1e-4));
  }
}

TEST_CASE("return curve leaves N- with slope l/2") {
  SoftSolution sol(canonical_sigma(1.0 / 256));
  const std::vector<double> chis{0.001, 0.002};
  const ReturnCurve rc = rho_return_curve(sol, chis, 0.1);
  REQUIRE(!rc.open[0]);
  const double s1 = rc.tau[0] / chis[0], s2 = rc.tau[1] / chis[1];
  CHECK(2 * s1 - s2 == doctest::Approx(1.5).epsilon(0.05));
}

TEST_CASE("a density that never returns is flagged open") {
  SoftSolution sol(canonical_sigma(1.0 / 128));
  SoftField sf = evolve_soft(sol, 1.0 / 128, 0.09, 0.05);
  soft_diagnostics(sf);
  for (double& r : sf.rho)
    if (std::isfinite(r)) r = 1 - 1e-3;
  const ReturnCurve rc = rho_return_curve(sf);
  REQUIRE(!rc.open.empty());
  for (std::size_t k = 1; k < rc.open.size(); ++k) CHECK(rc.open[k]);
}
