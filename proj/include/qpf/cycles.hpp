#pragma once

#include <vector>

#include "qpf/precision.hpp"
#include "qpf/thermal.hpp"

namespace qpf {

/// Largest N accepted by the enumerators unless a caller asks for more.
inline constexpr int kDefaultMaxParticles = 16;

/// A cycle type (n_1, ..., n_p) laid out as consecutive particle blocks.
///
/// Particles are 0-based here: block l holds [block_begin(l), block_end(l)).
struct CycleStructure {
  std::vector<int> lengths;

  int cycles() const { return static_cast<int>(lengths.size()); }
  int particles() const;
  int block_begin(int l) const;
  int block_end(int l) const { return block_begin(l) + lengths.at(l); }
  int cycle_of(int particle) const;

  friend bool operator==(const CycleStructure&, const CycleStructure&) = default;
};

struct WeightedCycles {
  CycleStructure cycles;
  Rational weight;
};

/// Partitions of N, lengths non-increasing, each with the collapsed weight
/// prod_n (1/n)^{mu_n} / mu_n!. Ordered lexicographically by (p, lengths).
std::vector<WeightedCycles> enumerate_cycle_types(int n, int max_n = kDefaultMaxParticles);

/// Ordered compositions of N with weight 1 / (N (N - N_1) ... (N - N_{p-1})).
/// Same ordering rule as enumerate_cycle_types.
std::vector<WeightedCycles> enumerate_compositions(int n, int max_n = kDefaultMaxParticles);

/// +1 for bosons, (-1)^{N-p} for fermions.
int statistics_sign(int p, int n, Statistics statistics);

struct UnitySums {
  Rational partition_sum;
  Rational composition_sum;
};

UnitySums unity_check(int n, int max_n = kDefaultMaxParticles);

}  // namespace qpf
