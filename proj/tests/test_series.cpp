#include <catch_amalgamated.hpp>
#include <cmath>

#include "qpf/errors.hpp"
#include "qpf/oracles.hpp"
#include "qpf/series.hpp"
#include "support/reference.hpp"

using namespace qpf;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SystemParams system(int n, int d, double l, double lambda, Statistics s = Statistics::bose) {
  SystemParams p;
  p.particles = n;
  p.dim = d;
  p.box_length = l;
  p.lambda = lambda;
  p.statistics = s;
  return p;
}

AlphaConfig single_pair(int n, int order) {
  AlphaConfig a(n);
  a.set(0, 1, order);
  return a;
}

// Exact-in-time reference for one or two events on a two-cycle: the
// integrand only depends on |t1 - t2|.
double two_cycle_reference(const SystemParams& p, const DualPotential& pot, int order, int radius) {
  const double c = p.cycle_coefficient(1);
  const double l = p.box_length;
  double total = 0.0;
  for (int z1 = -radius; z1 <= radius; ++z1) {
    if (z1 == 0) continue;
    const int a1[1] = {z1};
    if (order == 1) {
      const double shift[1] = {-0.5 * z1};
      total += pot.at_lattice(a1, l) * std::exp(-c * 0.5 * z1 * z1) * theta_sum(2.0 * c, shift);
      continue;
    }
    for (int z2 = -radius; z2 <= radius; ++z2) {
      if (z2 == 0) continue;
      const int a2[1] = {z2};
      const double shift[1] = {-0.5 * (z1 + z2)};
      const double th = theta_sum(2.0 * c, shift);
      auto g = [&](double u) {
        const double quad = 0.5 * (z1 * z1 + z2 * z2) + 2.0 * (0.5 - u) * z1 * z2;
        return 2.0 * (1.0 - u) * std::exp(-c * quad);
      };
      total += pot.at_lattice(a1, l) * pot.at_lattice(a2, l) * th * ref::adaptive_simpson(g, 0.0, 1.0, 1e-14);
    }
  }
  const double w = -p.beta / l;
  return order == 1 ? w * total : 0.5 * w * w * total;
}

}  // namespace

TEST_CASE("policy validation", "[series]") {
  TruncationPolicy p;
  CHECK_NOTHROW(p.validate());
  p.z_radius = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.alpha_max = 0;
  CHECK_NOTHROW(p.validate());
  p.quad_nodes = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  CHECK(TruncationPolicy{}.effective_coeff_bound() == TruncationPolicy{}.z_radius);
}

TEST_CASE("mean-field partition function", "[series]") {
  const auto p1 = system(1, 2, 1.5, 0.8);
  const auto pot = DualPotential::gaussian(2, 0.3, 1.0);
  CHECK_THAT(mean_field_Q(p1, pot), WithinRel(theta_sum(p1.cycle_coefficient(1), 2), 1e-14));
  for (auto s : {Statistics::bose, Statistics::fermi}) {
    const auto p = system(4, 1, 2.0, 1.0, s);
    CHECK_THAT(mean_field_Q(p, DualPotential::zero(1)), WithinRel(ideal_gas_Q(p), 1e-12));
    CHECK(mean_field_Q(p, DualPotential::gaussian(1, 0.3, 1.0)) < mean_field_Q(p, DualPotential::zero(1)));
  }
}

TEST_CASE("alpha configurations are enumerated lexicographically", "[series]") {
  const auto configs = enumerate_alpha_configs(3, 2);
  CHECK(configs.size() == 9);  // 3 of order 1, 6 of order 2
  for (std::size_t i = 1; i < configs.size(); ++i) CHECK(configs[i - 1].orders() < configs[i].orders());
  for (const auto& a : configs) {
    CHECK(a.total() >= 1);
    CHECK(a.total() <= 2);
  }
}

TEST_CASE("zero order and single-particle limits", "[series]") {
  const auto pot = DualPotential::gaussian(1, 0.5, 1.0);
  TruncationPolicy none;
  none.alpha_max = 0;
  const auto p = system(3, 1, 2.0, 0.9);
  const CycleStructure c{{2, 1}};
  const double expected = std::exp(-p.beta * pot.u_hat_zero() * 3.0 / p.box_length) *
                          theta_sum(p.cycle_coefficient(2), 1) * theta_sum(p.cycle_coefficient(1), 1);
  CHECK_THAT(evaluate_G(c, p, pot, none), WithinRel(expected, 1e-14));

  const auto single = system(1, 2, 1.3, 0.7);
  const auto r = evaluate_Q(single, DualPotential::gaussian(2, 2.0, 0.5), TruncationPolicy{});
  CHECK_THAT(r.Q, WithinRel(theta_sum(single.cycle_coefficient(1), 2), 1e-14));
  CHECK(r.breakdown.size() == 1);
}

TEST_CASE("zero potential reproduces the ideal gas", "[series][property]") {
  for (int n = 1; n <= 6; ++n)
    for (int d : {1, 2})
      for (auto s : {Statistics::bose, Statistics::fermi})
        for (double ratio : {0.3, 1.0, 3.0}) {
          const auto p = system(n, d, 1.0, ratio, s);
          TruncationPolicy policy;
          policy.alpha_max = 0;
          const auto r = evaluate_Q(p, DualPotential::zero(d), policy);
          CHECK_THAT(r.Q, WithinRel(ideal_gas_Q(p), 1e-12));
        }
}

TEST_CASE("a single inter-cycle event is a bridge and contributes nothing", "[series]") {
  const auto p = system(2, 1, 3.0, 1.0);
  const auto pot = DualPotential::gaussian(1, 0.4, 1.0);
  CHECK(evaluate_alpha_term(CycleStructure{{1, 1}}, single_pair(2, 1), p, pot, TruncationPolicy{}) == 0.0);
  const auto g = evaluate_G_by_order(CycleStructure{{1, 1}}, p, pot, TruncationPolicy{});
  CHECK(g.by_order[0] == 0.0);
  CHECK(g.skipped_invalid_alpha == 1);
}

TEST_CASE("two-cycle terms match exact one-dimensional quadrature", "[series]") {
  const auto p = system(2, 1, 3.0, 1.2);
  const auto pot = DualPotential::gaussian(1, 0.7, 1.0);
  TruncationPolicy policy;
  policy.z_radius = 10;
  policy.quad_nodes = 24;
  const CycleStructure two{{2}};
  CHECK_THAT(evaluate_alpha_term(two, single_pair(2, 1), p, pot, policy),
             WithinRel(two_cycle_reference(p, pot, 1, 10), 1e-12));
  CHECK_THAT(evaluate_alpha_term(two, single_pair(2, 2), p, pot, policy),
             WithinRel(two_cycle_reference(p, pot, 2, 10), 1e-10));
}

TEST_CASE("cycle order does not change G", "[series][property]") {
  const auto p = system(3, 1, 2.5, 1.0);
  const auto pot = DualPotential::gaussian(1, 0.6, 0.9);
  TruncationPolicy policy;
  policy.z_radius = 4;
  policy.quad_nodes = 6;
  CHECK_THAT(evaluate_G(CycleStructure{{1, 2}}, p, pot, policy),
             WithinRel(evaluate_G(CycleStructure{{2, 1}}, p, pot, policy), 1e-12));
}

TEST_CASE("inter-cycle weight loss scales as 1/L", "[series][property]") {
  // The z = 0 point is excluded from the lattice sum; with it restored the
  // second-order [1,1] term over the free weight is exactly proportional to 1/L.
  auto scaled = [](double l) {
    const auto p = system(2, 1, l, 1.0);
    const auto pot = DualPotential::gaussian(1, 1.0, 1.0);
    TruncationPolicy policy;
    policy.z_radius = static_cast<int>(3.5 * l);
    policy.quad_nodes = 12;
    const double term = evaluate_alpha_term(CycleStructure{{1, 1}}, single_pair(2, 2), p, pot, policy);
    const double free = std::pow(theta_sum(p.cycle_coefficient(1), 1), 2);
    const double origin = 0.5 * std::pow(p.beta * pot.u_hat_zero() / l, 2);
    return (term / free + origin) * l;
  };
  CHECK_THAT(scaled(16.0), WithinRel(scaled(8.0), 1e-9));
  CHECK_THAT(scaled(32.0), WithinRel(scaled(8.0), 1e-9));
}

TEST_CASE("breakdown, determinism and threads", "[series]") {
  const auto p = system(3, 1, 2.0, 1.0, Statistics::fermi);
  const auto pot = DualPotential::gaussian(1, 0.3, 1.0);
  TruncationPolicy policy;
  policy.z_radius = 3;
  policy.quad_nodes = 5;
  const auto a = evaluate_Q(p, pot, policy);
  policy.threads = 3;
  const auto b = evaluate_Q(p, pot, policy);
  CHECK(a.Q == b.Q);
  CHECK(a.breakdown == b.breakdown);
  CHECK(a.term_count == b.term_count);
  double sum = 0.0;
  for (const auto& [key, v] : a.breakdown) sum += v;
  CHECK_THAT(sum, WithinRel(a.Q, 1e-12));
  CHECK(a.tail_bound_estimate > 0.0);
  CHECK(a.skipped_invalid_alpha > 0);
}

TEST_CASE("first-order truncation changes stay below the tail bound", "[series][property]") {
  const auto p = system(2, 1, 3.0, 1.0);
  const auto pot = DualPotential::gaussian(1, 0.2, 1.0);
  TruncationPolicy coarse;
  coarse.alpha_max = 1;
  coarse.z_radius = 4;
  coarse.quad_nodes = 4;
  TruncationPolicy fine = coarse;
  fine.z_radius = 10;
  fine.quad_nodes = 12;
  const auto a = evaluate_Q(p, pot, coarse);
  const auto b = evaluate_Q(p, pot, fine);
  CHECK(std::abs(a.Q - b.Q) < a.tail_bound_estimate);
}

TEST_CASE("first-order coefficient against a finite difference of the series", "[series]") {
  const auto p = system(2, 1, 3.0, 1.0);
  TruncationPolicy policy;
  policy.alpha_max = 1;
  policy.z_radius = 12;
  const double g = 1e-4;
  const auto plus = evaluate_Q(p, DualPotential::gaussian(1, g, 1.0), policy);
  const auto minus = evaluate_Q(p, DualPotential::gaussian(1, -g, 1.0), policy);
  const double slope = (plus.Q - minus.Q) / (2.0 * g);
  CHECK_THAT(first_order_coefficient(plus, p, DualPotential::gaussian(1, g, 1.0), g), WithinRel(slope, 1e-6));
}
