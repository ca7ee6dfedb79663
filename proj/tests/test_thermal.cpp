#include <catch_amalgamated.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "qpf/thermal.hpp"
#include "support/reference.hpp"

using namespace qpf;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("thermal wavelength follows the square-root law", "[thermal]") {
  CHECK_THAT(thermal_wavelength(1.0, 2.0 * std::numbers::pi), WithinRel(1.0, 1e-15));
  CHECK_THAT(thermal_wavelength(0.5, 1.0), WithinRel(std::sqrt(std::numbers::pi), 1e-15));
  CHECK_THAT(thermal_wavelength(4.0, 3.0), WithinRel(2.0 * thermal_wavelength(1.0, 3.0), 1e-15));
  CHECK_THAT(thermal_wavelength(1.0, 1.0, 2.0), WithinRel(2.0 * thermal_wavelength(1.0, 1.0), 1e-15));
  CHECK_THROWS_AS(thermal_wavelength(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(thermal_wavelength(1.0, -1.0), std::domain_error);
}

TEST_CASE("system parameters validate every field", "[thermal]") {
  SystemParams p;
  CHECK_NOTHROW(p.validate());
  p.beta = 0.0;
  CHECK_THROWS_WITH(p.validate(), Catch::Matchers::StartsWith("beta"));
  p = SystemParams{};
  p.box_length = -1.0;
  CHECK_THROWS_WITH(p.validate(), Catch::Matchers::StartsWith("L"));
  p = SystemParams{};
  p.particles = 0;
  CHECK_THROWS_WITH(p.validate(), Catch::Matchers::StartsWith("N"));
  const auto q = SystemParams::from_mass(2, 1, 1.0, 1.0, 2.0 * std::numbers::pi, Statistics::fermi);
  CHECK_THAT(q.lambda, WithinRel(1.0, 1e-15));
  CHECK(parse_statistics("fermi") == Statistics::fermi);
  CHECK_THROWS_AS(parse_statistics("anyon"), std::domain_error);
}

TEST_CASE("theta sum special values", "[thermal]") {
  CHECK_THAT(theta_sum(1e3, 1), WithinAbs(1.0, 1e-300));
  const double closed = std::pow(std::numbers::pi, 0.25) / std::tgamma(0.75);
  CHECK_THAT(theta_sum(std::numbers::pi, 1), WithinRel(closed, 1e-14));
  CHECK_THAT(theta_sum(std::numbers::pi, 1), WithinRel(ref::theta_direct(std::numbers::pi, {0.0}, 20), 1e-15));
  for (double c : {0.05, 0.3, 1.0, 7.0})
    CHECK_THAT(theta_sum(c, 2), WithinRel(std::pow(theta_sum(c, 1), 2), 1e-14));
  CHECK_THROWS_AS(theta_sum(0.0, 1), std::domain_error);
  CHECK_THROWS_AS(theta_sum(-1.0, 1), std::domain_error);
}

TEST_CASE("theta truncation radius bounds the tail", "[thermal]") {
  CHECK(theta_truncation_radius(10.0, 1e-12) == 2);
  CHECK(theta_truncation_radius(std::numbers::pi, 1e-16) <= 4);
  int previous = 1 << 20;
  for (double c = 0.01; c < 50.0; c *= 1.7) {
    const int r = theta_truncation_radius(c, 1e-14);
    CHECK(r <= previous);
    previous = r;
    double tail = 0.0;
    for (int z = r; z < r + 400; ++z) tail += 2.0 * std::exp(-c * z * z);
    CHECK(tail < 1e-14);
  }
}

TEST_CASE("theta sum is periodic, even and maximal at zero shift", "[thermal][property]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> shift(-3.0, 3.0), width(0.05, 8.0);
  std::uniform_int_distribution<int> integer(-4, 4);
  for (int trial = 0; trial < 200; ++trial) {
    const double c = width(rng);
    const std::vector<double> s = {shift(rng), shift(rng)};
    const std::vector<double> moved = {s[0] + integer(rng), s[1] + integer(rng)};
    const std::vector<double> negated = {-s[0], -s[1]};
    const double value = theta_sum(c, s);
    CHECK_THAT(theta_sum(c, moved), WithinRel(value, 1e-13));
    CHECK_THAT(theta_sum(c, negated), WithinRel(value, 1e-13));
    CHECK(value <= theta_sum(c, 2) * (1.0 + 1e-14));
    CHECK_THAT(value, WithinRel(theta_sum_axis(c, s[0]) * theta_sum_axis(c, s[1]), 1e-14));
    CHECK_THAT(value, WithinRel(ref::theta_direct(c, s, 80), 1e-12));
  }
}

TEST_CASE("high-precision theta sum agrees with the double path", "[thermal]") {
  for (double c : {0.1, 1.0, 10.0})
    for (int d : {1, 3})
      CHECK_THAT(static_cast<double>(theta_sum_precise(c, d)), WithinRel(theta_sum(c, d), 1e-14));
}
