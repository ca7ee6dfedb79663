#pragma once

#include <vector>

namespace qpf {

/// Gauss-Legendre rule mapped to [0, 1]; weights sum to 1.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendre gauss_legendre_unit(int order);

}  // namespace qpf
