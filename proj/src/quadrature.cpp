#include "qpf/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qpf {

GaussLegendre gauss_legendre_unit(int order) {
  if (order < 1) throw std::domain_error("quadrature order must be >= 1");
  GaussLegendre rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int n = 2; n <= order; ++n) {
        const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.nodes[order - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = rule.weights[order - 1 - i] = 0.5 * w;
  }
  return rule;
}

}  // namespace qpf
