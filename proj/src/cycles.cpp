#include "qpf/cycles.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qpf {

namespace {

void require_range(int n, int max_n) {
  if (n < 1 || n > max_n)
    throw std::domain_error("N must lie in [1, " + std::to_string(max_n) + "] (got " +
                            std::to_string(n) + ")");
}

bool by_count_then_lengths(const WeightedCycles& a, const WeightedCycles& b) {
  if (a.cycles.cycles() != b.cycles.cycles()) return a.cycles.cycles() < b.cycles.cycles();
  return a.cycles.lengths < b.cycles.lengths;
}

}  // namespace

int CycleStructure::particles() const { return std::accumulate(lengths.begin(), lengths.end(), 0); }

int CycleStructure::block_begin(int l) const {
  if (l < 0 || l >= cycles()) throw std::out_of_range("cycle index out of range");
  return std::accumulate(lengths.begin(), lengths.begin() + l, 0);
}

int CycleStructure::cycle_of(int particle) const {
  int end = 0;
  for (int l = 0; l < cycles(); ++l) {
    end += lengths[l];
    if (particle < end) return l;
  }
  throw std::out_of_range("particle index out of range");
}

std::vector<WeightedCycles> enumerate_cycle_types(int n, int max_n) {
  require_range(n, max_n);
  std::vector<WeightedCycles> out;
  std::vector<int> current;
  std::function<void(int, int)> recurse = [&](int remaining, int largest) {
    if (remaining == 0) {
      Rational w = 1;
      std::map<int, int> multiplicity;
      for (int len : current) ++multiplicity[len];
      for (auto [len, mu] : multiplicity) {
        Rational denom = 1;
        for (int i = 0; i < mu; ++i) denom *= len;
        for (int i = 2; i <= mu; ++i) denom *= i;
        w /= denom;
      }
      out.push_back({CycleStructure{current}, w});
      return;
    }
    for (int len = std::min(remaining, largest); len >= 1; --len) {
      current.push_back(len);
      recurse(remaining - len, len);
      current.pop_back();
    }
  };
  recurse(n, n);
  std::stable_sort(out.begin(), out.end(), by_count_then_lengths);
  return out;
}

std::vector<WeightedCycles> enumerate_compositions(int n, int max_n) {
  require_range(n, max_n);
  std::vector<WeightedCycles> out;
  std::vector<int> current;
  std::function<void(int, Rational)> recurse = [&](int remaining, Rational w) {
    if (remaining == 0) {
      out.push_back({CycleStructure{current}, w});
      return;
    }
    const Rational next = w / remaining;
    for (int len = 1; len <= remaining; ++len) {
      current.push_back(len);
      recurse(remaining - len, next);
      current.pop_back();
    }
  };
  recurse(n, Rational(1));
  std::stable_sort(out.begin(), out.end(), by_count_then_lengths);
  return out;
}

int statistics_sign(int p, int n, Statistics statistics) {
  if (p < 1 || p > n) throw std::domain_error("statistics_sign needs 1 <= p <= N");
  if (statistics == Statistics::bose) return 1;
  return (n - p) % 2 == 0 ? 1 : -1;
}

UnitySums unity_check(int n, int max_n) {
  UnitySums sums{0, 0};
  for (const auto& wc : enumerate_cycle_types(n, max_n)) sums.partition_sum += wc.weight;
  for (const auto& wc : enumerate_compositions(n, max_n)) sums.composition_sum += wc.weight;
  return sums;
}

}  // namespace qpf
