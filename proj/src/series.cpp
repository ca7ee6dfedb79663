#include "qpf/series.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

#include "qpf/errors.hpp"
#include "qpf/quadrature.hpp"
#include "qpf/shift_kernel.hpp"

namespace qpf {

namespace {

/// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double log_prefactor(const SystemParams& params, const DualPotential& pot) {
  const double pairs = 0.5 * params.particles * (params.particles - 1.0);
  return -params.beta * pot.u_hat_zero() * pairs / params.volume();
}

void require_dims(const SystemParams& params, const DualPotential& pot) {
  params.validate();
  if (pot.dim() != params.dim)
    throw std::invalid_argument("potential dimension " + std::to_string(pot.dim()) +
                                " differs from d = " + std::to_string(params.dim));
}

/// Everything about one AlphaConfig that does not depend on the event vectors.
struct PreparedConfig {
  std::vector<EventSlot> slots;
  std::vector<int> edge_of_slot;  // -1 for intra-cycle events
  std::vector<int> intra_slots;
  CouplingGraph graph;
  NullspaceBasis basis;
  double order_weight = 1.0;
};

PreparedConfig prepare(const CycleStructure& cycles, const AlphaConfig& alpha,
                       const SystemParams& params) {
  PreparedConfig pc;
  pc.graph = build_coupling_graph(alpha, cycles);
  pc.basis = nullspace_basis(pc.graph);
  const double step = -params.beta / params.volume();
  int edge = 0;
  for (int idx = 0; idx < alpha.pair_count(); ++idx) {
    const int order = alpha.orders()[idx];
    if (order == 0) continue;
    const auto [j, k] = alpha.pair_at(idx);
    const bool inter = cycles.cycle_of(j) != cycles.cycle_of(k);
    double factorial = 1.0;
    for (int r = 0; r < order; ++r) {
      pc.order_weight *= step;
      factorial *= r + 1;
      if (inter) {
        pc.edge_of_slot.push_back(edge++);
      } else {
        pc.edge_of_slot.push_back(-1);
        pc.intra_slots.push_back(static_cast<int>(pc.slots.size()));
      }
      pc.slots.push_back({j, k});
    }
    pc.order_weight /= factorial;
  }
  if (edge != pc.graph.edge_count()) throw InternalError("event/edge bookkeeping mismatch");
  return pc;
}

/// Moment kernels of the touched cycles at every quadrature point. The unit
/// cube is split into the E! simplices of fixed event order, where the
/// integrand is smooth, and each simplex gets a conical-product Gauss rule.
struct NodeTable {
  int points = 0;
  std::vector<double> weight;
  std::vector<int> touched;  // cycle ids
  // [point][touched cycle] -> mean (E) and var (E*E), flattened
  std::vector<double> mean;
  std::vector<double> var;
};

NodeTable build_nodes(const CycleStructure& cycles, const PreparedConfig& pc, int order) {
  const GaussLegendre rule = gauss_legendre_unit(order);
  const int n_events = static_cast<int>(pc.slots.size());
  NodeTable table;
  {
    std::vector<double> mid_times(n_events, 0.5);
    const auto ker = moment_kernels(cycles, pc.slots, mid_times);
    for (int l = 0; l < cycles.cycles(); ++l)
      if (ker[l].touched) table.touched.push_back(l);
  }
  int per_simplex = 1, orderings = 1;
  for (int e = 0; e < n_events; ++e) {
    per_simplex *= order;
    orderings *= e + 1;
  }
  table.points = per_simplex * orderings;
  const std::size_t ee = static_cast<std::size_t>(n_events) * n_events;
  const std::size_t nt = table.touched.size();
  table.weight.resize(table.points);
  table.mean.resize(table.points * nt * n_events);
  table.var.resize(table.points * nt * ee);

  // Simplex 0 < s_0 < ... < s_{E-1} < 1 from y in [0, 1]^E:
  // s_{E-1} = y_{E-1}, s_i = s_{i+1} y_i, Jacobian prod_k y_k^k.
  std::vector<int> rank(n_events);
  std::iota(rank.begin(), rank.end(), 0);
  std::vector<double> times(n_events), sorted(n_events);
  int pt = 0;
  do {
    std::vector<int> digit(n_events, 0);
    for (int local = 0; local < per_simplex; ++local, ++pt) {
      double w = 1.0;
      double s = 1.0;
      for (int i = n_events - 1; i >= 0; --i) {
        const double y = rule.nodes[digit[i]];
        s *= y;
        sorted[i] = s;
        w *= rule.weights[digit[i]] * std::pow(y, i);
      }
      for (int e = 0; e < n_events; ++e) times[e] = sorted[rank[e]];
      table.weight[pt] = w;
      const auto ker = moment_kernels(cycles, pc.slots, times);
      for (std::size_t c = 0; c < nt; ++c) {
        const auto& kl = ker[table.touched[c]];
        std::copy(kl.mean.begin(), kl.mean.end(),
                  table.mean.begin() + (pt * nt + c) * n_events);
        std::copy(kl.var.begin(), kl.var.end(), table.var.begin() + (pt * nt + c) * ee);
      }
      for (int e = 0; e < n_events; ++e) {
        if (++digit[e] < order) break;
        digit[e] = 0;
      }
    }
  } while (std::next_permutation(rank.begin(), rank.end()));
  return table;
}

struct TermResult {
  double value = 0.0;
  long long terms = 0;
  bool valid = true;
};

TermResult alpha_term(const CycleStructure& cycles, const AlphaConfig& alpha,
                      const SystemParams& params, const DualPotential& pot,
                      const TruncationPolicy& policy) {
  TermResult out;
  const PreparedConfig pc = prepare(cycles, alpha, params);
  if (!is_valid_merger(pc.graph)) {
    out.valid = false;
    return out;
  }
  const int d = params.dim;
  const int n_events = static_cast<int>(pc.slots.size());
  const int n_intra = static_cast<int>(pc.intra_slots.size());
  const int n_basis = pc.basis.dimension();
  const int radius = policy.z_radius;
  const int coeff = policy.effective_coeff_bound();
  if (n_intra > 0 && radius == 0) return out;

  const NodeTable nodes = build_nodes(cycles, pc, policy.quad_nodes);
  const std::size_t nt = nodes.touched.size();
  const std::size_t ee = static_cast<std::size_t>(n_events) * n_events;

  std::vector<ThetaSum> theta;
  std::vector<double> c_touched;
  for (int l : nodes.touched) {
    const double c = params.cycle_coefficient(cycles.lengths[l]);
    theta.emplace_back(c, policy.theta_tol);
    c_touched.push_back(c);
  }
  double untouched = 1.0;
  for (int l = 0; l < cycles.cycles(); ++l)
    if (std::find(nodes.touched.begin(), nodes.touched.end(), l) == nodes.touched.end())
      untouched *= theta_sum(params.cycle_coefficient(cycles.lengths[l]), d, policy.theta_tol);

  // Free integer components: intra vectors first, then basis coefficient vectors.
  const int n_free = (n_intra + n_basis) * d;
  std::vector<int> lo(n_free), hi(n_free);
  for (int i = 0; i < n_free; ++i) {
    const int bound = i < n_intra * d ? radius : coeff;
    lo[i] = -bound;
    hi[i] = bound;
  }
  std::vector<int> free(lo);

  std::vector<std::vector<int>> z(n_events, std::vector<int>(d, 0));
  std::vector<double> gram(ee);
  std::vector<double> zbar(d);
  CompensatedSum acc;

  // Constraint check data: inter events touching each cycle with their sign.
  std::vector<std::vector<std::pair<int, int>>> incident(cycles.cycles());
  for (int e = 0; e < n_events; ++e) {
    if (pc.edge_of_slot[e] < 0) continue;
    incident[cycles.cycle_of(pc.slots[e].j)].push_back({e, +1});
    incident[cycles.cycle_of(pc.slots[e].k)].push_back({e, -1});
  }

  while (true) {
    bool usable = true;
    for (int a = 0; a < n_intra && usable; ++a) {
      auto& v = z[pc.intra_slots[a]];
      bool nonzero = false;
      for (int c = 0; c < d; ++c) {
        v[c] = free[a * d + c];
        nonzero = nonzero || v[c] != 0;
      }
      usable = nonzero;
    }
    if (usable) {
      for (int e = 0; e < n_events; ++e) {
        const int edge = pc.edge_of_slot[e];
        if (edge < 0) continue;
        bool nonzero = false;
        for (int c = 0; c < d; ++c) {
          long long s = 0;
          for (int b = 0; b < n_basis; ++b)
            s += static_cast<long long>(pc.basis.vectors[b][edge]) * free[(n_intra + b) * d + c];
          z[e][c] = static_cast<int>(s);
          nonzero = nonzero || s != 0;
        }
        if (!nonzero) {
          usable = false;
          break;
        }
      }
    }
    if (usable) {
      for (int l = 0; l < cycles.cycles(); ++l) {
        for (int c = 0; c < d; ++c) {
          long long s = 0;
          for (auto [e, sign] : incident[l]) s += sign * z[e][c];
          if (s != 0) throw InternalError("enumerated term violates Z^l_1 = 0");
        }
      }
      double w = 1.0;
      for (int e = 0; e < n_events && w != 0.0; ++e) w *= pot.at_lattice(z[e], params.box_length);
      if (w != 0.0) {
        for (int a = 0; a < n_events; ++a)
          for (int b = 0; b < n_events; ++b) {
            double s = 0.0;
            for (int c = 0; c < d; ++c) s += static_cast<double>(z[a][c]) * z[b][c];
            gram[a * n_events + b] = s;
          }
        CompensatedSum integral;
        for (int pt = 0; pt < nodes.points; ++pt) {
          double f = nodes.weight[pt];
          for (std::size_t t = 0; t < nt; ++t) {
            const double* mean = &nodes.mean[(pt * nt + t) * n_events];
            const double* var = &nodes.var[(pt * nt + t) * ee];
            double v = 0.0;
            for (std::size_t i = 0; i < ee; ++i) v += var[i] * gram[i];
            if (v < -1e-12 * (1.0 + std::abs(v)))
              throw InternalError("negative cycle variance in the series");
            std::fill(zbar.begin(), zbar.end(), 0.0);
            for (int e = 0; e < n_events; ++e)
              for (int c = 0; c < d; ++c) zbar[c] += mean[e] * z[e][c];
            f *= std::exp(-c_touched[t] * std::max(v, 0.0)) * theta[t](zbar);
          }
          integral.add(f);
        }
        acc.add(w * integral.value());
        ++out.terms;
      }
    }
    int i = 0;
    while (i < n_free && free[i] == hi[i]) {
      free[i] = lo[i];
      ++i;
    }
    if (i == n_free) break;
    ++free[i];
  }
  out.value = pc.order_weight * untouched * acc.value();
  return out;
}

/// sum_{a > amax} y^a / a!
double poisson_tail(double y, int amax) {
  if (y <= 0.0) return 0.0;
  double term = 1.0;
  for (int a = 1; a <= amax; ++a) term *= y / a;
  double total = 0.0;
  for (int a = amax + 1; a < amax + 10000; ++a) {
    term *= y / a;
    total += term;
    if (term < 1e-18 * total) break;
  }
  return total;
}

}  // namespace

void TruncationPolicy::validate() const {
  if (alpha_max < 0) throw ConfigError("alpha_max must be >= 0");
  if (z_radius < 0) throw ConfigError("z_radius must be >= 0");
  if (quad_nodes < 1) throw ConfigError("quad_nodes must be >= 1");
  if (!(theta_tol > 0.0 && theta_tol < 1.0)) throw ConfigError("theta_tol must lie in (0, 1)");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (alpha_max > 0 && z_radius == 0)
    throw ConfigError("alpha_max > 0 needs z_radius >= 1");
}

HighReal mean_field_Q_precise(const SystemParams& params, const DualPotential& pot) {
  require_dims(params, pot);
  std::map<int, HighReal> theta;
  HighReal total = 0;
  for (const auto& wc : enumerate_cycle_types(params.particles)) {
    HighReal term = to_high(wc.weight);
    for (int n : wc.cycles.lengths) {
      auto it = theta.find(n);
      if (it == theta.end())
        it = theta.emplace(n, theta_sum_precise(params.cycle_coefficient(n), params.dim)).first;
      term *= it->second;
    }
    total += statistics_sign(wc.cycles.cycles(), params.particles, params.statistics) * term;
  }
  return exp(HighReal(log_prefactor(params, pot))) * total;
}

double mean_field_Q(const SystemParams& params, const DualPotential& pot) {
  return static_cast<double>(mean_field_Q_precise(params, pot));
}

std::vector<AlphaConfig> enumerate_alpha_configs(int particles, int alpha_max) {
  std::vector<AlphaConfig> out;
  AlphaConfig current(particles);
  const int pairs = current.pair_count();
  std::function<void(int, int)> recurse = [&](int idx, int remaining) {
    if (idx == pairs) {
      if (current.total() > 0) out.push_back(current);
      return;
    }
    for (int a = 0; a <= remaining; ++a) {
      current.orders()[idx] = a;
      recurse(idx + 1, remaining - a);
    }
    current.orders()[idx] = 0;
  };
  if (alpha_max > 0 && pairs > 0) recurse(0, alpha_max);
  return out;
}

double evaluate_alpha_term(const CycleStructure& cycles, const AlphaConfig& alpha,
                           const SystemParams& params, const DualPotential& pot,
                           const TruncationPolicy& policy) {
  require_dims(params, pot);
  policy.validate();
  if (cycles.particles() != params.particles)
    throw std::invalid_argument("cycle lengths must sum to N");
  if (pot.is_zero() && alpha.total() > 0) return 0.0;
  return alpha_term(cycles, alpha, params, pot, policy).value;
}

GTerms evaluate_G_by_order(const CycleStructure& cycles, const SystemParams& params,
                           const DualPotential& pot, const TruncationPolicy& policy) {
  require_dims(params, pot);
  policy.validate();
  if (cycles.particles() != params.particles)
    throw std::invalid_argument("cycle lengths must sum to N");

  GTerms g;
  g.prefactor = std::exp(log_prefactor(params, pot));
  g.order_zero = 1;
  for (int n : cycles.lengths) g.order_zero *= theta_sum_precise(params.cycle_coefficient(n), params.dim);
  g.term_count = 1;
  g.by_order.assign(policy.alpha_max, 0.0);
  if (pot.is_zero() || policy.alpha_max == 0) return g;

  const std::vector<AlphaConfig> configs = enumerate_alpha_configs(params.particles, policy.alpha_max);
  std::vector<TermResult> slots(configs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (std::size_t i = next++; i < configs.size(); i = next++)
        slots[i] = alpha_term(cycles, configs[i], params, pot, policy);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = configs.size();
    }
  };
  const int n_threads = std::min<int>(policy.threads, static_cast<int>(configs.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<CompensatedSum> sums(policy.alpha_max);
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (!slots[i].valid) {
      ++g.skipped_invalid_alpha;
      continue;
    }
    sums[configs[i].total() - 1].add(slots[i].value);
    g.term_count += slots[i].terms;
  }
  for (int a = 0; a < policy.alpha_max; ++a) g.by_order[a] = sums[a].value();
  return g;
}

double evaluate_G(const CycleStructure& cycles, const SystemParams& params,
                  const DualPotential& pot, const TruncationPolicy& policy) {
  const GTerms g = evaluate_G_by_order(cycles, params, pot, policy);
  HighReal total = g.order_zero;
  for (double v : g.by_order) total += v;
  return static_cast<double>(total * g.prefactor);
}

EvaluationResult evaluate_Q(const SystemParams& params, const DualPotential& pot,
                            const TruncationPolicy& policy, int max_particles) {
  require_dims(params, pot);
  policy.validate();
  const auto types = enumerate_cycle_types(params.particles, max_particles);

  EvaluationResult res;
  const HighReal pref = exp(HighReal(log_prefactor(params, pot)));
  res.prefactor = static_cast<double>(pref);

  const int interacting_orders = pot.is_zero() || params.particles < 2 ? 0 : policy.alpha_max;
  std::map<std::pair<int, int>, HighReal> parts;
  HighReal q = 0;
  HighReal abs_weight_theta = 0;
  for (const auto& wc : types) {
    const int p = wc.cycles.cycles();
    const HighReal w = to_high(wc.weight) *
                       statistics_sign(p, params.particles, params.statistics) * pref;
    const GTerms g = evaluate_G_by_order(wc.cycles, params, pot, policy);
    parts[{p, 0}] += w * g.order_zero;
    q += w * g.order_zero;
    for (int a = 1; a <= interacting_orders; ++a) {
      const HighReal v = w * HighReal(g.by_order[a - 1]);
      parts[{p, a}] += v;
      q += v;
    }
    res.term_count += g.term_count;
    res.skipped_invalid_alpha += g.skipped_invalid_alpha;
    abs_weight_theta += abs(w) * g.order_zero;
  }

  double entry_sum = 0.0;
  double entry_abs = 0.0;
  for (const auto& [key, v] : parts) {
    const double dv = static_cast<double>(v);
    res.breakdown[key] = dv;
    entry_sum += dv;
    entry_abs += std::abs(dv);
  }
  res.Q = static_cast<double>(q);
  res.sign = q < 0 ? -1 : 1;
  res.log_abs_Q = q == 0 ? -std::numeric_limits<double>::infinity()
                         : static_cast<double>(log(abs(q)));
  if (std::abs(res.Q - entry_sum) > 1e-12 * entry_abs + 1e-300)
    throw InternalError("Q differs from the sum of its breakdown entries");

  if (!pot.is_zero()) {
    const double pairs = 0.5 * params.particles * (params.particles - 1.0);
    const double y = pairs * params.beta * dual_l1_total(pot, params.box_length);
    res.tail_bound_estimate = static_cast<double>(abs_weight_theta) * poisson_tail(y, policy.alpha_max);
  }
  return res;
}

double first_order_coefficient(const EvaluationResult& result, const SystemParams& params,
                               const DualPotential& pot, double strength) {
  if (strength == 0.0) throw std::domain_error("strength must be nonzero");
  double order0 = 0.0;
  double order1 = 0.0;
  for (const auto& [key, v] : result.breakdown) {
    if (key.second == 0) order0 += v / result.prefactor;
    if (key.second == 1) order1 += v / result.prefactor;
  }
  const double pairs = 0.5 * params.particles * (params.particles - 1.0);
  const double mean_field = params.beta * pot.u_hat_zero() * pairs / params.volume();
  return (order1 - mean_field * order0) / strength;
}

}  // namespace qpf
