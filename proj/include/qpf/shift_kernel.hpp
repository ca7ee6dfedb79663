#pragma once

#include <span>
#include <vector>

#include "qpf/coupling_graph.hpp"
#include "qpf/cycles.hpp"
#include "qpf/thermal.hpp"

namespace qpf {

/// One interaction event between particles j < k (0-based): the r-th of the
/// alpha_{jk} events of that pair, at time t in [0, 1], carrying z != 0.
struct Event {
  int j = 0;
  int k = 0;
  int r = 0;
  double time = 0.0;
  std::vector<int> z;
};

/// Events kept in (j, k, r) order, which fixes tie-breaking at equal times.
class EventSet {
 public:
  EventSet(int particles, int dim);

  /// Appends the next repetition of pair (j, k). Throws std::domain_error for
  /// a bad pair, a time outside [0, 1], a zero vector or a wrong dimension.
  void add(int j, int k, double time, std::vector<int> z);

  int particles() const { return particles_; }
  int dim() const { return dim_; }
  const std::vector<Event>& events() const { return events_; }
  AlphaConfig alpha() const;

 private:
  int particles_;
  int dim_;
  std::vector<Event> events_;
};

/// Z^l_1: net vector of the events that couple cycle l to other cycles.
std::vector<long long> z_l1(const EventSet& events, const CycleStructure& cycles, int l);

/// Z_q(t) for particle q, read term by term from its four indicator sums.
std::vector<long long> shift_at(const EventSet& events, const CycleStructure& cycles, int q,
                                double t);

/// Z_q(t) as a step function: values[i] holds on (breakpoints[i], breakpoints[i+1]).
struct ShiftProfile {
  int particle = 0;
  std::vector<double> breakpoints;
  std::vector<std::vector<long long>> values;
};

ShiftProfile shift_profile(const EventSet& events, const CycleStructure& cycles, int q);

struct CycleMoments {
  std::vector<double> zbar;
  double z2bar = 0.0;
  double variance = 0.0;
};

/// Moments from the min-kernel sums over event endpoints inside cycle l.
CycleMoments cycle_moments_closed(const EventSet& events, const CycleStructure& cycles, int l);

/// Moments by integrating the step profiles of every particle of cycle l.
CycleMoments cycle_moments_direct(const EventSet& events, const CycleStructure& cycles, int l);

/// n_l * zbar from its per-pair form: the (k - j) weights for pairs inside
/// the cycle, endpoint offsets for pairs that leave it.
std::vector<double> cycle_mean_first_form(const EventSet& events, const CycleStructure& cycles,
                                          int l);

/// Differences of the min-coefficients A_kk', A_kj', A_jj' for two events
/// (j, k, t) and (j', k', t'), with particle indices in a common block.
enum class CoefficientCase {
  kjk,       // A_{kj'k'} = A_kk' - A_kj'
  jjk,       // A_{jj'k'} = A_jk' - A_jj'
  jjk_dual,  // A_{j'jk}  = A_kj' - A_jj'
};

struct EventIndex {
  int j = 0;
  int k = 0;
  double t = 0.0;
};

/// Five-case table value. Throws std::domain_error unless j < k and j' < k'.
double coefficient_difference(CoefficientCase which, EventIndex first, EventIndex second);

/// The same difference computed straight from the two min-expressions.
double coefficient_difference_direct(CoefficientCase which, EventIndex first, EventIndex second);

/// exp(-c variance) * theta(c, zbar) with c = pi n_l lambda^2 / L^2.
/// Throws InternalError if the variance is below -1e-12.
double cycle_boltzmann_factor(const CycleMoments& moments, int cycle_length,
                              const SystemParams& params, double theta_tol = kDefaultThetaTol);

/// Per-cycle quadratic forms in the event vectors at fixed times:
///   zbar     = sum_e mean[e] z_e
///   variance = sum_{e,e'} var[e * E + e'] z_e . z_e'
/// with E the number of events. Cycles not touched by any event have
/// touched == false and all-zero forms.
struct CycleKernel {
  int length = 0;
  bool touched = false;
  std::vector<double> mean;
  std::vector<double> second;  // the z2bar form
  std::vector<double> var;
};

struct EventSlot {
  int j = 0;
  int k = 0;
};

std::vector<CycleKernel> moment_kernels(const CycleStructure& cycles,
                                        std::span<const EventSlot> slots,
                                        std::span<const double> times);

}  // namespace qpf
