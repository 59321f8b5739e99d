#include <doctest.h>

#include <cmath>
#include <cstring>
#include <memory>

#include "xshock/state_core.hpp"

using namespace xs;

namespace {

std::shared_ptr<const NullGrid> null_grid(double d, int rows) {
  return std::make_shared<NullGrid>(d, rows);
}

std::shared_ptr<const ComovingGrid> box(double d, int n) {
  return std::make_shared<ComovingGrid>(-0.5, d, n, -0.5, d, n, [](double) { return -1.0; });
}

}  // namespace

TEST_CASE("null grid is triangular and row-major") {
  const auto g = null_grid(0.25, 5);
  CHECK(g->size() == 15);
  CHECK(g->index(3, 2) == 3 * 4 / 2 + 2);
  CHECK(g->index(2, 3) == -1);
  CHECK(g->tau_hat() == doctest::Approx(1.0));
  for (std::size_t k = 0; k < g->size(); ++k) {
    const auto [i, j] = g->node(k);
    CHECK(j <= i);
  }
}

TEST_CASE("comoving grid keeps nodes on or after the past boundary") {
  const auto g = std::make_shared<ComovingGrid>(-1.0, 0.1, 21, 0.0, 0.1, 11,
                                                [](double chi) { return -chi; });
  for (std::size_t k = 0; k < g->size(); ++k) {
    const auto [i, j] = g->node(k);
    CHECK(g->x(i) >= g->past(g->y(j)) - 1e-12);
  }
}

TEST_CASE("interpolation reproduces constants and bilinear data") {
  const auto g = null_grid(1.0 / 16, 17);
  const ScalarField c = sample_field(g, [](double, double) { return 2.5; }, "c");
  CHECK(interpolate_field(c, 0.71, 0.33) == doctest::Approx(2.5).epsilon(1e-14));
  const ScalarField uv = sample_field(g, [](double u, double v) { return u * v; }, "uv");
  CHECK(interpolate_field(uv, 0.5, 0.25) == doctest::Approx(0.125).epsilon(1e-13));
  CHECK(interpolate_field(uv, 0.53, 0.21) == doctest::Approx(0.53 * 0.21).epsilon(1e-12));
}

TEST_CASE("interpolation is cubic in the interior") {
  auto err = [](double d) {
    const auto g = null_grid(d, static_cast<int>(std::lround(1.0 / d)) + 1);
    const ScalarField s = sample_field(g, [](double u, double v) { return std::sin(u + v); }, "s");
    return std::abs(interpolate_field(s, 0.6 + d / 3, 0.3 + d / 3) - std::sin(0.9 + 2 * d / 3));
  };
  CHECK(err(1.0 / 16) / err(1.0 / 32) >= 8);
}

TEST_CASE("interpolation outside the grid names the point") {
  const auto g = null_grid(0.25, 5);
  const ScalarField s = sample_field(g, [](double u, double) { return u; }, "s");
  CHECK_THROWS_AS(interpolate_field(s, 0.2, 0.5), DomainError);
  try {
    interpolate_field(s, 2.0, 0.0);
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}

TEST_CASE("finite differences of polynomials") {
  const double d = 1.0 / 64;
  const auto g = box(d, 65);
  const ScalarField t2 = sample_field(g, [](double t, double) { return t * t; }, "t2");
  CHECK(finite_difference(t2, 0.0, 0.0, 2, 0) == doctest::Approx(2).epsilon(1e-9));
  CHECK(finite_difference(t2, -0.5, 0.0, 2, 0) == doctest::Approx(2).epsilon(1e-9));
  const ScalarField u3 = sample_field(g, [](double t, double) { return t * t * t; }, "u3");
  CHECK(finite_difference(u3, 0.0, 0.0, 3, 0) == doctest::Approx(6).epsilon(1e-2));
  const ScalarField mixed = sample_field(g, [](double t, double x) { return t * x * x; }, "m");
  CHECK(finite_difference(mixed, 0.125, 0.25, 1, 2) == doctest::Approx(2).epsilon(1e-8));
}

TEST_CASE("finite differences converge at second order") {
  auto err = [](double d) {
    const auto g = box(d, static_cast<int>(std::lround(1.0 / d)) + 1);
    const ScalarField s = sample_field(g, [](double t, double x) { return std::sin(t) * std::exp(2 * x); }, "s");
    return std::abs(finite_difference(s, 0.25, 0.125, 1, 1) - 2 * std::cos(0.25) * std::exp(0.25));
  };
  const double order = std::log2(err(1.0 / 32) / err(1.0 / 64));
  CHECK(order == doctest::Approx(2).epsilon(0.15));
}

TEST_CASE("finite difference stencil that leaves the grid is refused") {
  const auto g = null_grid(0.25, 3);
  const ScalarField s = sample_field(g, [](double u, double) { return u; }, "s");
  CHECK_THROWS_AS(finite_difference(s, 0.25, 0.0, 3, 0), StencilError);
}

TEST_CASE("Fornberg weights") {
  const auto w = fornberg_weights(0.0, {-1.0, 0.0, 1.0}, 2);
  CHECK(w[0] == doctest::Approx(1));
  CHECK(w[1] == doctest::Approx(-2));
  CHECK(w[2] == doctest::Approx(1));
  const auto w1 = fornberg_weights(0.0, {0.0, 1.0, 2.0}, 1);
  CHECK(w1[0] == doctest::Approx(-1.5));
  CHECK(w1[1] == doctest::Approx(2));
  CHECK(w1[2] == doctest::Approx(-0.5));
}

TEST_CASE("operations are deterministic") {
  const auto g = null_grid(1.0 / 32, 33);
  const ScalarField s = sample_field(g, [](double u, double v) { return std::cos(3 * u - v); }, "s");
  const double a = interpolate_field(s, 0.4, 0.1), b = interpolate_field(s, 0.4, 0.1);
  CHECK(std::memcmp(&a, &b, sizeof a) == 0);
}
