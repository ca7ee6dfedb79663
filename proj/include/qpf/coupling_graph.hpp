#pragma once

#include <Eigen/Core>
#include <optional>
#include <utility>
#include <vector>

#include "qpf/cycles.hpp"

namespace qpf {

/// Interaction orders alpha_{jk} for 0 <= j < k < N, stored on the flattened
/// pair grid (0,1), (0,2), ..., (0,N-1), (1,2), ...
class AlphaConfig {
 public:
  explicit AlphaConfig(int particles);

  int particles() const { return particles_; }
  int pair_count() const { return static_cast<int>(orders_.size()); }
  int pair_index(int j, int k) const;
  std::pair<int, int> pair_at(int index) const;

  int operator()(int j, int k) const { return orders_[pair_index(j, k)]; }
  void set(int j, int k, int order);
  int total() const;

  const std::vector<int>& orders() const { return orders_; }
  std::vector<int>& orders() { return orders_; }

 private:
  int particles_;
  std::vector<int> orders_;
};

/// One inter-cycle event as an edge between cycles from < to. The label
/// (j, k, r) names the particle pair and the event's repetition index.
struct GraphEdge {
  int from = 0;
  int to = 0;
  int j = -1;
  int k = -1;
  int r = 0;
};

using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

struct CouplingGraph {
  int vertices = 0;
  std::vector<GraphEdge> edges;

  /// Unlabelled multigraph; each pair is reordered so from < to.
  /// Throws std::invalid_argument on a self-loop or out-of-range vertex.
  static CouplingGraph from_edge_list(int vertices, const std::vector<std::pair<int, int>>& list);

  int edge_count() const { return static_cast<int>(edges.size()); }

  /// V x E matrix: +1 in row `from`, -1 in row `to`.
  IntMatrix incidence() const;
};

CouplingGraph build_coupling_graph(const AlphaConfig& alpha, const CycleStructure& cycles);

/// Component label of every vertex, numbered in order of first appearance.
std::vector<int> component_labels(const CouplingGraph& g);

/// Ids of the edges that lie on no cycle. Parallel edges are never bridges.
std::vector<int> bridge_edges(const CouplingGraph& g);

/// True iff every component is bridgeless.
bool is_valid_merger(const CouplingGraph& g);

/// Exact rank by fraction-free elimination.
int incidence_rank(const IntMatrix& m);

struct ConstraintRank {
  int rank = 0;        // K
  int components = 0;  // m
};

/// K = p - m; throws InternalError if it disagrees with the exact rank.
ConstraintRank constraint_rank(const CouplingGraph& g);

/// Fundamental cycles of a BFS spanning forest as signed edge indicators.
/// Each vector has +1 on its defining non-tree edge.
struct NullspaceBasis {
  std::vector<std::vector<int>> vectors;
  int dimension() const { return static_cast<int>(vectors.size()); }
};

NullspaceBasis nullspace_basis(const CouplingGraph& g);

/// Integer scalar x with incidence * x = 0 and every entry nonzero, or
/// nothing if the graph is not a valid merger.
std::optional<std::vector<long long>> nonzero_scalar_solution(const CouplingGraph& g);

/// Same, lifted to Z^d along the first axis: one vector per edge.
std::optional<std::vector<std::vector<long long>>> nonzero_integer_solution(const CouplingGraph& g,
                                                                            int dim);

}  // namespace qpf
