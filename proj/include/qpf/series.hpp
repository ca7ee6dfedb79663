#pragma once

#include <map>
#include <utility>
#include <vector>

#include "qpf/coupling_graph.hpp"
#include "qpf/cycles.hpp"
#include "qpf/potential.hpp"
#include "qpf/precision.hpp"
#include "qpf/thermal.hpp"

namespace qpf {

/// Where the infinite series is cut.
///
/// alpha_max bounds the total interaction order. Intra-cycle event vectors run
/// over [-z_radius, z_radius]^d minus the origin; inter-cycle vectors are
/// cycle-basis combinations whose coefficient vectors lie in
/// [-coeff_bound, coeff_bound]^d (a negative coeff_bound means z_radius).
struct TruncationPolicy {
  int alpha_max = 2;
  int z_radius = 6;
  int coeff_bound = -1;
  int quad_nodes = 12;
  double theta_tol = kDefaultThetaTol;
  int threads = 1;

  int effective_coeff_bound() const { return coeff_bound < 0 ? z_radius : coeff_bound; }

  /// Throws ConfigError on negative bounds or alpha_max > 0 with z_radius = 0.
  void validate() const;
};

/// G for one cycle structure split by total interaction order. The prefactor
/// exp(-beta u_hat(0) N (N-1) / (2 L^d)) is kept apart.
struct GTerms {
  double prefactor = 1.0;
  HighReal order_zero = 0;
  std::vector<double> by_order;  // index alpha = 1 .. alpha_max at [alpha - 1]
  long long term_count = 0;
  long long skipped_invalid_alpha = 0;
};

struct EvaluationResult {
  double Q = 0.0;
  double log_abs_Q = 0.0;
  int sign = 1;
  double prefactor = 1.0;
  std::map<std::pair<int, int>, double> breakdown;  // (p, alpha) -> partial sum
  long long term_count = 0;
  long long skipped_invalid_alpha = 0;
  double tail_bound_estimate = 0.0;
};

/// exp(-beta u_hat(0) N (N-1) / (2 L^d)) times the ideal-gas cycle sum.
HighReal mean_field_Q_precise(const SystemParams& params, const DualPotential& pot);
double mean_field_Q(const SystemParams& params, const DualPotential& pot);

/// Every AlphaConfig with 1 <= total <= alpha_max, in lexicographic order of
/// the flattened pair grid.
std::vector<AlphaConfig> enumerate_alpha_configs(int particles, int alpha_max);

/// Contribution of one AlphaConfig to G without the prefactor: the order
/// weights prod (-beta/L^d)^alpha / alpha!, the dual-lattice sums and the
/// symmetric time integral. Zero for an invalid merger.
double evaluate_alpha_term(const CycleStructure& cycles, const AlphaConfig& alpha,
                           const SystemParams& params, const DualPotential& pot,
                           const TruncationPolicy& policy);

GTerms evaluate_G_by_order(const CycleStructure& cycles, const SystemParams& params,
                           const DualPotential& pot, const TruncationPolicy& policy);

/// Total G including the prefactor.
double evaluate_G(const CycleStructure& cycles, const SystemParams& params,
                  const DualPotential& pot, const TruncationPolicy& policy);

EvaluationResult evaluate_Q(const SystemParams& params, const DualPotential& pot,
                            const TruncationPolicy& policy, int max_particles = kDefaultMaxParticles);

/// The coefficient of g in Q for a potential proportional to a strength g,
/// read off the (p, 0) and (p, 1) breakdown entries.
double first_order_coefficient(const EvaluationResult& result, const SystemParams& params,
                               const DualPotential& pot, double strength);

}  // namespace qpf
