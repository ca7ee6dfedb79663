#include "qpf/shift_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

#include "qpf/errors.hpp"

namespace qpf {

EventSet::EventSet(int particles, int dim) : particles_(particles), dim_(dim) {
  if (particles < 1) throw std::domain_error("EventSet needs N >= 1");
  if (dim < 1) throw std::domain_error("EventSet needs d >= 1");
}

void EventSet::add(int j, int k, double time, std::vector<int> z) {
  if (j < 0 || k >= particles_ || j >= k) throw std::domain_error("event pair must satisfy j < k");
  if (!(time >= 0.0 && time <= 1.0)) throw std::domain_error("event time must lie in [0, 1]");
  if (static_cast<int>(z.size()) != dim_) throw std::domain_error("event vector has wrong dimension");
  if (std::all_of(z.begin(), z.end(), [](int c) { return c == 0; }))
    throw std::domain_error("event vector must be nonzero");
  int r = 0;
  for (const auto& e : events_)
    if (e.j == j && e.k == k) ++r;
  Event ev{j, k, r, time, std::move(z)};
  auto pos = std::upper_bound(events_.begin(), events_.end(), ev, [](const Event& a, const Event& b) {
    return std::tie(a.j, a.k, a.r) < std::tie(b.j, b.k, b.r);
  });
  events_.insert(pos, std::move(ev));
}

AlphaConfig EventSet::alpha() const {
  AlphaConfig a(particles_);
  for (const auto& e : events_) a.orders()[a.pair_index(e.j, e.k)] += 1;
  return a;
}

namespace {

void require_cycles(const EventSet& events, const CycleStructure& cycles) {
  if (events.particles() != cycles.particles())
    throw std::invalid_argument("EventSet and CycleStructure disagree on N");
}

void axpy(std::vector<long long>& acc, int sign, const std::vector<int>& z) {
  for (std::size_t i = 0; i < z.size(); ++i) acc[i] += sign * static_cast<long long>(z[i]);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::vector<long long> z_l1(const EventSet& events, const CycleStructure& cycles, int l) {
  require_cycles(events, cycles);
  const int begin = cycles.block_begin(l);
  const int end = cycles.block_end(l);
  std::vector<long long> out(events.dim(), 0);
  for (const auto& e : events.events()) {
    if (e.j < begin && e.k >= begin && e.k < end) axpy(out, -1, e.z);
    if (e.j >= begin && e.j < end && e.k >= end) axpy(out, +1, e.z);
  }
  return out;
}

std::vector<long long> shift_at(const EventSet& events, const CycleStructure& cycles, int q,
                                double t) {
  require_cycles(events, cycles);
  const int end = cycles.block_end(cycles.cycle_of(q));
  std::vector<long long> out(events.dim(), 0);
  for (const auto& e : events.events()) {
    if (e.time >= t) {
      if (e.j < q && e.k >= q && e.k < end) axpy(out, -1, e.z);
      if (e.j >= q && e.j < end && e.k >= end) axpy(out, +1, e.z);
    } else {
      if (e.j <= q && e.k > q && e.k < end) axpy(out, -1, e.z);
      if (e.j > q && e.j < end && e.k >= end) axpy(out, +1, e.z);
    }
  }
  return out;
}

ShiftProfile shift_profile(const EventSet& events, const CycleStructure& cycles, int q) {
  ShiftProfile prof;
  prof.particle = q;
  prof.breakpoints.push_back(0.0);
  std::vector<double> times;
  for (const auto& e : events.events())
    if (e.time > 0.0 && e.time < 1.0) times.push_back(e.time);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  prof.breakpoints.insert(prof.breakpoints.end(), times.begin(), times.end());
  prof.breakpoints.push_back(1.0);
  for (std::size_t i = 0; i + 1 < prof.breakpoints.size(); ++i) {
    const double mid = 0.5 * (prof.breakpoints[i] + prof.breakpoints[i + 1]);
    prof.values.push_back(shift_at(events, cycles, q, mid));
  }
  return prof;
}

std::vector<CycleKernel> moment_kernels(const CycleStructure& cycles,
                                        std::span<const EventSlot> slots,
                                        std::span<const double> times) {
  if (slots.size() != times.size()) throw std::invalid_argument("one time per event slot");
  const int p = cycles.cycles();
  const int n_events = static_cast<int>(slots.size());

  // Endpoint charges: -z at (k, t) and +z at (j, t), placed on the cycle's
  // unrolled time axis at x = (particle - block start) + t.
  struct Charge {
    int event;
    double sign;
    double x;
  };
  std::vector<std::vector<Charge>> charges(p);
  for (int e = 0; e < n_events; ++e) {
    const int lj = cycles.cycle_of(slots[e].j);
    const int lk = cycles.cycle_of(slots[e].k);
    charges[lk].push_back({e, -1.0, slots[e].k - cycles.block_begin(lk) + times[e]});
    charges[lj].push_back({e, +1.0, slots[e].j - cycles.block_begin(lj) + times[e]});
  }

  std::vector<CycleKernel> out(p);
  for (int l = 0; l < p; ++l) {
    CycleKernel& ker = out[l];
    ker.length = cycles.lengths[l];
    ker.touched = !charges[l].empty();
    ker.mean.assign(n_events, 0.0);
    ker.second.assign(static_cast<std::size_t>(n_events) * n_events, 0.0);
    ker.var.assign(static_cast<std::size_t>(n_events) * n_events, 0.0);
    const double n = ker.length;
    for (const auto& a : charges[l]) {
      ker.mean[a.event] += a.sign * a.x / n;
      for (const auto& b : charges[l]) {
        const double ss = a.sign * b.sign;
        const double m = std::min(a.x, b.x);
        const std::size_t idx = static_cast<std::size_t>(a.event) * n_events + b.event;
        ker.second[idx] += ss * m / n;
        ker.var[idx] += ss * (m - a.x * b.x / n) / n;
      }
    }
  }
  return out;
}

CycleMoments cycle_moments_closed(const EventSet& events, const CycleStructure& cycles, int l) {
  require_cycles(events, cycles);
  if (l < 0 || l >= cycles.cycles()) throw std::out_of_range("cycle index out of range");
  const auto& evs = events.events();
  const int n_events = static_cast<int>(evs.size());
  std::vector<EventSlot> slots;
  std::vector<double> times;
  for (const auto& e : evs) {
    slots.push_back({e.j, e.k});
    times.push_back(e.time);
  }
  const CycleKernel ker = moment_kernels(cycles, slots, times)[l];

  const int d = events.dim();
  CycleMoments mom;
  mom.zbar.assign(d, 0.0);
  for (int e = 0; e < n_events; ++e)
    for (int i = 0; i < d; ++i) mom.zbar[i] += ker.mean[e] * evs[e].z[i];
  for (int a = 0; a < n_events; ++a)
    for (int b = 0; b < n_events; ++b) {
      double zz = 0.0;
      for (int i = 0; i < d; ++i) zz += static_cast<double>(evs[a].z[i]) * evs[b].z[i];
      mom.z2bar += ker.second[static_cast<std::size_t>(a) * n_events + b] * zz;
      mom.variance += ker.var[static_cast<std::size_t>(a) * n_events + b] * zz;
    }
  return mom;
}

CycleMoments cycle_moments_direct(const EventSet& events, const CycleStructure& cycles, int l) {
  require_cycles(events, cycles);
  const int begin = cycles.block_begin(l);
  const int end = cycles.block_end(l);
  const double n = cycles.lengths[l];
  const int d = events.dim();
  CycleMoments mom;
  mom.zbar.assign(d, 0.0);
  for (int q = begin; q < end; ++q) {
    const ShiftProfile prof = shift_profile(events, cycles, q);
    for (std::size_t i = 0; i < prof.values.size(); ++i) {
      const double width = prof.breakpoints[i + 1] - prof.breakpoints[i];
      double sq = 0.0;
      for (int c = 0; c < d; ++c) {
        const double v = static_cast<double>(prof.values[i][c]);
        mom.zbar[c] += width * v / n;
        sq += v * v;
      }
      mom.z2bar += width * sq / n;
    }
  }
  mom.variance = mom.z2bar - dot(mom.zbar, mom.zbar);
  return mom;
}

std::vector<double> cycle_mean_first_form(const EventSet& events, const CycleStructure& cycles,
                                          int l) {
  require_cycles(events, cycles);
  const int begin = cycles.block_begin(l);
  const int end = cycles.block_end(l);
  std::vector<double> out(events.dim(), 0.0);
  auto add = [&](double w, const std::vector<int>& z) {
    for (std::size_t i = 0; i < z.size(); ++i) out[i] += w * z[i];
  };
  for (const auto& e : events.events()) {
    const bool j_in = e.j >= begin && e.j < end;
    const bool k_in = e.k >= begin && e.k < end;
    if (j_in && k_in)
      add(-static_cast<double>(e.k - e.j), e.z);
    else if (k_in)
      add(-(e.k - begin + e.time), e.z);
    else if (j_in)
      add(e.j - begin + e.time, e.z);
  }
  return out;
}

namespace {

void require_ordered(EventIndex a, EventIndex b) {
  if (a.j >= a.k || b.j >= b.k)
    throw std::domain_error("coefficient tables need j < k and j' < k'");
}

}  // namespace

double coefficient_difference(CoefficientCase which, EventIndex first, EventIndex second) {
  require_ordered(first, second);
  const double t = first.t;
  const double tp = second.t;
  const double lo = std::min(t, tp);
  switch (which) {
    case CoefficientCase::kjk:
    case CoefficientCase::jjk: {
      // A_{kj'k'} and A_{jj'k'} share one table with k -> j.
      const int a = which == CoefficientCase::kjk ? first.k : first.j;
      const int jp = second.j;
      const int kp = second.k;
      if (kp < a) return kp - jp;
      if (kp == a) return kp - jp + lo - tp;
      if (jp < a) return a - jp + t - tp;
      if (jp == a) return t - lo;
      return 0.0;
    }
    case CoefficientCase::jjk_dual: {
      const int j = first.j;
      const int k = first.k;
      const int jp = second.j;
      if (k < jp) return k - j;
      if (k == jp) return k - j + lo - t;
      if (j < jp) return jp - j + tp - t;
      if (j == jp) return tp - lo;
      return 0.0;
    }
  }
  return 0.0;
}

double coefficient_difference_direct(CoefficientCase which, EventIndex first, EventIndex second) {
  require_ordered(first, second);
  const double xj = first.j + first.t;
  const double xk = first.k + first.t;
  const double xjp = second.j + second.t;
  const double xkp = second.k + second.t;
  switch (which) {
    case CoefficientCase::kjk:
      return std::min(xk, xkp) - std::min(xk, xjp);
    case CoefficientCase::jjk:
      return std::min(xj, xkp) - std::min(xj, xjp);
    case CoefficientCase::jjk_dual:
      return std::min(xk, xjp) - std::min(xj, xjp);
  }
  return 0.0;
}

double cycle_boltzmann_factor(const CycleMoments& moments, int cycle_length,
                              const SystemParams& params, double theta_tol) {
  if (moments.variance < -1e-12)
    throw InternalError("negative cycle variance " + std::to_string(moments.variance));
  const double c = params.cycle_coefficient(cycle_length);
  const double variance = std::max(moments.variance, 0.0);
  return std::exp(-c * variance) * ThetaSum(c, theta_tol)(moments.zbar);
}

}  // namespace qpf
