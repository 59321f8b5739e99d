#include <doctest.h>

#include <cmath>
#include <random>

#include "xshock/asymptotics.hpp"

using namespace xs;

namespace {

std::vector<double> grid(double T, int n) {
  std::vector<double> t(n);
  for (int k = 0; k < n; ++k) t[k] = T * (k + 1) / n;
  return t;
}

}  // namespace

TEST_CASE("closed-form table on the canonical scenario") {
  const CoefficientTable t = closed_form_suite(make_invariants(1, 1, 1, 1, 2 * kPi));
  CHECK(t.at("chi_star_slope") == doctest::Approx(1));
  CHECK(t.at("beta0") == doctest::Approx(0.5));
  CHECK(t.at("E_over_tau2") == doctest::Approx(3 * kPi));
  CHECK(t.at("E2_tt") == doctest::Approx(4 * kPi));
  CHECK(t.at("E2_tx") == doctest::Approx(0).scale(1));
  CHECK(t.at("E2_xx") == doctest::Approx(-kPi));
  CHECK(t.at("rho_star_quadratic") == doctest::Approx(-1.5 * kPi));
  CHECK(t.at("gamma_quadratic") == doctest::Approx(-1.5 * kPi));
  CHECK(t.at("rho_minus_quadratic") == doctest::Approx(-8 * kPi));
  CHECK(t.at("phi_star_quintic") == doctest::Approx(-0.075 * kPi * kPi));
  CHECK(t.at("phi_star_quintic") == doctest::Approx(-0.74022).epsilon(1e-5));
  CHECK(t.at("r_edge_slope") == doctest::Approx(-0.25));
  CHECK(t.at("E_plus_X_over_t2") == doctest::Approx(2 * kPi));
  CHECK(t.at("H0") == doctest::Approx(-1));
  CHECK(t.at("H2") == doctest::Approx(-24 * kPi - 48 * kPi * kPi));
  CHECK(t.at("M_star_over_tau2") == doctest::Approx(-5.89049).epsilon(1e-5));
  CHECK(t.at("delta_over_tau2") == doctest::Approx(-0.535398).epsilon(1e-5));
  CHECK(t.at("hessian_identity") == doctest::Approx(0).scale(1));
  CHECK_THROWS(t.at("no_such_entry"));
}

TEST_CASE("table relations for random invariant sets") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.2, 2.0);
  for (int n = 0; n < 100; ++n) {
    const double am = U(rng), ap = U(rng) * 0.4 / am;
    const NullPointInvariants v = make_invariants(U(rng), am, ap, U(rng), U(rng) * 5);
    const CoefficientTable t = closed_form_suite(v);
    const double slope = t.at("chi_star_slope");
    CHECK(slope * (5 * v.i - 2 * v.i0) == doctest::Approx(2 * v.i + 4 * v.i0));
    CHECK(t.at("beta0") * (5 * v.l + 1) == doctest::Approx(5 + v.l));
    CHECK(slope == doctest::Approx(2 * t.at("beta0")));
    CHECK(std::abs(t.at("hessian_identity")) <= 1e-12 * (1 + std::abs(t.at("rho_tt"))));
  }
}

TEST_CASE("the table is a pure function of the invariants") {
  const NullPointInvariants v = make_invariants(1.2, 0.9, 0.7, 0.8, 4.0);
  const auto a = closed_form_suite(v).entries(), b = closed_form_suite(v).entries();
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].first == b[k].first);
    CHECK(a[k].second == b[k].second);
  }
}

TEST_CASE("exact quadratic data") {
  const auto t = grid(0.2, 200);
  std::vector<double> y;
  for (double s : t) y.push_back(1 + 3 * s * s);
  const FitResult f = fit_series(t, y, {0, 1, 2});
  CHECK(f.coefficient(2) == doctest::Approx(3).epsilon(1e-12));
  CHECK(f.coefficient(0) == doctest::Approx(1).epsilon(1e-12));
}

TEST_CASE("quintic coefficient of a truncated series") {
  const auto t = grid(0.2, 400);
  const double c5 = -0.075 * kPi * kPi;
  std::vector<double> y;
  for (double s : t) y.push_back(s + c5 * std::pow(s, 5));
  const FitResult f = fit_series(t, y, {1, 5, 6, 7});
  CHECK(f.coefficient(5) == doctest::Approx(c5).epsilon(0.01));
}

TEST_CASE("error bars cover the truth under jitter") {
  const auto t = grid(0.1, 300);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0, 1e-10);
  std::vector<double> y;
  for (double s : t) y.push_back(0.5 + 2 * s - 4 * s * s + noise(rng));
  const FitResult f = fit_series(t, y, {0, 1, 2});
  CHECK(std::abs(f.coefficient(1) - 2) <= f.error_of(1));
  CHECK(std::abs(f.coefficient(2) + 4) <= f.error_of(2));
}

TEST_CASE("too few samples per coefficient is a conditioning error") {
  const auto t = grid(0.1, 8);
  std::vector<double> y(t.size(), 1.0);
  try {
    fit_series(t, y, {0, 1, 2, 3});
    FAIL("fit accepted");
  } catch (const ConditioningError& e) {
    CHECK(e.suggested_window > 0);
  }
}

TEST_CASE("a non-shock table is refused") {
  const NullPointInvariants v = make_invariants(1, 1, 1, 1, kPi);
  ShockCurve c;
  const ValidationReport r = validate_run({&c, nullptr}, closed_form_suite(v));
  CHECK_FALSE(r.shock_case);
  CHECK(r.label == "non-shock");
  CHECK(r.entries.empty());
}
