#include "qpf/coupling_graph.hpp"

#include <algorithm>
#include <boost/multiprecision/gmp.hpp>
#include <deque>
#include <functional>
#include <stdexcept>
#include <string>

#include "qpf/errors.hpp"

namespace qpf {

AlphaConfig::AlphaConfig(int particles) : particles_(particles) {
  if (particles < 1) throw std::domain_error("AlphaConfig needs N >= 1");
  orders_.assign(static_cast<std::size_t>(particles) * (particles - 1) / 2, 0);
}

int AlphaConfig::pair_index(int j, int k) const {
  if (j < 0 || k >= particles_ || j >= k)
    throw std::out_of_range("pair (" + std::to_string(j) + ", " + std::to_string(k) +
                            ") is not 0 <= j < k < N");
  return j * (2 * particles_ - j - 1) / 2 + (k - j - 1);
}

std::pair<int, int> AlphaConfig::pair_at(int index) const {
  if (index < 0 || index >= pair_count()) throw std::out_of_range("pair index out of range");
  int j = 0;
  int row = particles_ - 1;
  while (index >= row) {
    index -= row;
    ++j;
    --row;
  }
  return {j, j + 1 + index};
}

void AlphaConfig::set(int j, int k, int order) {
  if (order < 0) throw std::domain_error("interaction order must be >= 0");
  orders_[pair_index(j, k)] = order;
}

int AlphaConfig::total() const {
  int s = 0;
  for (int a : orders_) s += a;
  return s;
}

CouplingGraph CouplingGraph::from_edge_list(int vertices,
                                            const std::vector<std::pair<int, int>>& list) {
  CouplingGraph g;
  g.vertices = vertices;
  for (auto [a, b] : list) {
    if (a < 0 || b < 0 || a >= vertices || b >= vertices)
      throw std::invalid_argument("edge endpoint out of range");
    if (a == b) throw std::invalid_argument("self-loop at vertex " + std::to_string(a));
    g.edges.push_back({std::min(a, b), std::max(a, b), -1, -1, 0});
  }
  return g;
}

IntMatrix CouplingGraph::incidence() const {
  IntMatrix m = IntMatrix::Zero(vertices, edge_count());
  for (int e = 0; e < edge_count(); ++e) {
    m(edges[e].from, e) += 1;
    m(edges[e].to, e) -= 1;
  }
  return m;
}

CouplingGraph build_coupling_graph(const AlphaConfig& alpha, const CycleStructure& cycles) {
  if (alpha.particles() != cycles.particles())
    throw std::invalid_argument("AlphaConfig and CycleStructure disagree on N");
  CouplingGraph g;
  g.vertices = cycles.cycles();
  std::vector<int> owner(alpha.particles());
  for (int q = 0; q < alpha.particles(); ++q) owner[q] = cycles.cycle_of(q);
  for (int idx = 0; idx < alpha.pair_count(); ++idx) {
    const int order = alpha.orders()[idx];
    if (order == 0) continue;
    const auto [j, k] = alpha.pair_at(idx);
    if (owner[j] == owner[k]) continue;
    for (int r = 0; r < order; ++r) g.edges.push_back({owner[j], owner[k], j, k, r});
  }
  return g;
}

namespace {

struct Adjacency {
  // (neighbour, edge id) per vertex
  std::vector<std::vector<std::pair<int, int>>> out;
};

Adjacency adjacency(const CouplingGraph& g) {
  Adjacency adj;
  adj.out.resize(g.vertices);
  for (int e = 0; e < g.edge_count(); ++e) {
    adj.out[g.edges[e].from].push_back({g.edges[e].to, e});
    adj.out[g.edges[e].to].push_back({g.edges[e].from, e});
  }
  return adj;
}

}  // namespace

std::vector<int> component_labels(const CouplingGraph& g) {
  const Adjacency adj = adjacency(g);
  std::vector<int> label(g.vertices, -1);
  int next = 0;
  for (int s = 0; s < g.vertices; ++s) {
    if (label[s] >= 0) continue;
    std::deque<int> queue{s};
    label[s] = next;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (auto [w, e] : adj.out[v]) {
        if (label[w] < 0) {
          label[w] = next;
          queue.push_back(w);
        }
      }
    }
    ++next;
  }
  return label;
}

std::vector<int> bridge_edges(const CouplingGraph& g) {
  const Adjacency adj = adjacency(g);
  std::vector<int> disc(g.vertices, -1), low(g.vertices, 0);
  std::vector<int> bridges;
  int clock = 0;
  std::function<void(int, int)> dfs = [&](int v, int parent_edge) {
    disc[v] = low[v] = clock++;
    for (auto [w, e] : adj.out[v]) {
      if (e == parent_edge) continue;
      if (disc[w] < 0) {
        dfs(w, e);
        low[v] = std::min(low[v], low[w]);
        if (low[w] > disc[v]) bridges.push_back(e);
      } else {
        low[v] = std::min(low[v], disc[w]);
      }
    }
  };
  for (int v = 0; v < g.vertices; ++v)
    if (disc[v] < 0) dfs(v, -1);
  std::sort(bridges.begin(), bridges.end());
  return bridges;
}

bool is_valid_merger(const CouplingGraph& g) { return bridge_edges(g).empty(); }

int incidence_rank(const IntMatrix& input) {
  using boost::multiprecision::mpz_int;
  const int rows = static_cast<int>(input.rows());
  const int cols = static_cast<int>(input.cols());
  std::vector<std::vector<mpz_int>> a(rows, std::vector<mpz_int>(cols));
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a[i][j] = input(i, j);
  int rank = 0;
  mpz_int prev = 1;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int pivot = -1;
    for (int i = rank; i < rows; ++i)
      if (a[i][col] != 0) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    std::swap(a[pivot], a[rank]);
    for (int i = rank + 1; i < rows; ++i) {
      for (int j = col + 1; j < cols; ++j)
        a[i][j] = (a[rank][col] * a[i][j] - a[i][col] * a[rank][j]) / prev;
      a[i][col] = 0;
    }
    prev = a[rank][col];
    ++rank;
  }
  return rank;
}

ConstraintRank constraint_rank(const CouplingGraph& g) {
  const std::vector<int> labels = component_labels(g);
  const int m = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  ConstraintRank out{g.vertices - m, m};
  const int exact = incidence_rank(g.incidence());
  if (exact != out.rank)
    throw InternalError("incidence rank " + std::to_string(exact) + " differs from p - m = " +
                        std::to_string(out.rank));
  return out;
}

NullspaceBasis nullspace_basis(const CouplingGraph& g) {
  const Adjacency adj = adjacency(g);
  std::vector<int> parent(g.vertices, -1), parent_edge(g.vertices, -1), depth(g.vertices, -1);
  std::vector<bool> tree(g.edge_count(), false);
  for (int s = 0; s < g.vertices; ++s) {
    if (depth[s] >= 0) continue;
    depth[s] = 0;
    std::deque<int> queue{s};
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (auto [w, e] : adj.out[v]) {
        if (depth[w] >= 0) continue;
        depth[w] = depth[v] + 1;
        parent[w] = v;
        parent_edge[w] = e;
        tree[e] = true;
        queue.push_back(w);
      }
    }
  }

  // Sign of traversing edge e while stepping from vertex a to its other end.
  auto step_sign = [&](int e, int a) { return g.edges[e].from == a ? 1 : -1; };

  NullspaceBasis basis;
  for (int e = 0; e < g.edge_count(); ++e) {
    if (tree[e]) continue;
    std::vector<int> v(g.edge_count(), 0);
    v[e] = 1;
    // Close the loop: walk from the edge's head back to its tail in the tree.
    int a = g.edges[e].to;
    int b = g.edges[e].from;
    std::vector<int> down;  // child vertices on the tail side, climbed from b
    while (a != b) {
      if (depth[a] >= depth[b]) {
        v[parent_edge[a]] += step_sign(parent_edge[a], a);
        a = parent[a];
      } else {
        down.push_back(b);
        b = parent[b];
      }
    }
    for (auto it = down.rbegin(); it != down.rend(); ++it) {
      const int child = *it;
      v[parent_edge[child]] += step_sign(parent_edge[child], parent[child]);
    }
    basis.vectors.push_back(std::move(v));
  }
  return basis;
}

std::optional<std::vector<long long>> nonzero_scalar_solution(const CouplingGraph& g) {
  if (!is_valid_merger(g)) return std::nullopt;
  const NullspaceBasis basis = nullspace_basis(g);
  std::vector<long long> x(g.edge_count(), 0);
  for (const auto& b : basis.vectors) {
    // Each edge already carrying a value forbids at most one coefficient.
    auto cancels = [&](long long c) {
      for (int e = 0; e < g.edge_count(); ++e)
        if (b[e] != 0 && x[e] + c * b[e] == 0) return true;
      return false;
    };
    long long c = 1;
    while (cancels(c)) ++c;
    for (int e = 0; e < g.edge_count(); ++e) x[e] += c * b[e];
  }
  for (long long v : x)
    if (v == 0) throw InternalError("bridgeless graph left an edge uncovered by the cycle basis");
  const IntMatrix inc = g.incidence();
  for (int row = 0; row < g.vertices; ++row) {
    long long s = 0;
    for (int e = 0; e < g.edge_count(); ++e) s += inc(row, e) * x[e];
    if (s != 0) throw InternalError("cycle combination violates a vertex equation");
  }
  return x;
}

std::optional<std::vector<std::vector<long long>>> nonzero_integer_solution(const CouplingGraph& g,
                                                                            int dim) {
  if (dim < 1) throw std::domain_error("dimension must be >= 1");
  auto scalar = nonzero_scalar_solution(g);
  if (!scalar) return std::nullopt;
  std::vector<std::vector<long long>> out;
  out.reserve(scalar->size());
  for (long long v : *scalar) {
    std::vector<long long> z(dim, 0);
    z[0] = v;
    out.push_back(std::move(z));
  }
  return out;
}

}  // namespace qpf
