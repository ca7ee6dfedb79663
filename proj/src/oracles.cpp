#include "qpf/oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qpf/errors.hpp"

namespace qpf {

HighReal ideal_gas_Q_precise(const SystemParams& params) {
  params.validate();
  const int n = params.particles;
  std::vector<HighReal> q(n + 1), big_q(n + 1);
  for (int k = 1; k <= n; ++k) q[k] = theta_sum_precise(params.cycle_coefficient(k), params.dim);
  big_q[0] = 1;
  for (int size = 1; size <= n; ++size) {
    HighReal s = 0;
    for (int k = 1; k <= size; ++k) {
      const int sign = params.statistics == Statistics::fermi && (k - 1) % 2 == 1 ? -1 : 1;
      s += sign * q[k] * big_q[size - k];
    }
    big_q[size] = s / size;
  }
  return big_q[n];
}

double ideal_gas_Q(const SystemParams& params) {
  return static_cast<double>(ideal_gas_Q_precise(params));
}

double e_hat_m(std::span<const int> z, int m, const DualPotential& pot, const SystemParams& params) {
  if (m < 1) throw std::domain_error("m must be >= 1");
  const bool origin = std::all_of(z.begin(), z.end(), [](int c) { return c == 0; });
  const double delta = origin ? 1.0 : 0.0;
  return delta - params.beta * pot.at_lattice(z, params.box_length) / (m * params.volume());
}

namespace {

/// Fourier coefficients of exp(-(beta/m) u_L) for |z| <= zmax, d = 1.
std::vector<double> exact_slice_coefficients(int zmax, int m, const DualPotential& pot,
                                             const SystemParams& params, int grid_points) {
  if (params.dim != 1 || pot.dim() != 1) throw std::domain_error("exact slice factor needs d = 1");
  if (m < 1) throw std::domain_error("m must be >= 1");
  if (grid_points < 4 * zmax + 8) throw std::domain_error("grid too coarse for the requested z");
  const double L = params.box_length;
  int kmax = grid_points / 2 - 1;
  if (pot.kind() == DualPotential::Kind::tabulated) kmax = std::min(kmax, pot.table_radius());
  std::vector<double> u_hat(kmax + 1);
  for (int k = 0; k <= kmax; ++k) {
    const int zk[1] = {k};
    u_hat[k] = pot.at_lattice(zk, L);
  }
  std::vector<double> slice(grid_points);
  for (int n = 0; n < grid_points; ++n) {
    const double phase = 2.0 * std::numbers::pi * n / grid_points;
    double u = u_hat[0];
    for (int k = 1; k <= kmax; ++k) u += 2.0 * u_hat[k] * std::cos(k * phase);
    slice[n] = std::exp(-(params.beta / m) * u / L);
  }
  std::vector<double> coeff(2 * zmax + 1);
  for (int z = -zmax; z <= zmax; ++z) {
    double s = 0.0;
    for (int n = 0; n < grid_points; ++n)
      s += std::cos(2.0 * std::numbers::pi * z * n / grid_points) * slice[n];
    coeff[z + zmax] = s / grid_points;
  }
  return coeff;
}

/// Slice coefficients on the cube [-zmax, zmax]^d, indexed by odometer order.
class SliceTable {
 public:
  SliceTable(int zmax, int m, const DualPotential& pot, const SystemParams& params, bool exact)
      : zmax_(zmax), dim_(params.dim) {
    const int side = 2 * zmax + 1;
    if (exact) {
      const auto c = exact_slice_coefficients(zmax, m, pot, params, 4096);
      values_ = c;
      return;
    }
    int count = 1;
    for (int i = 0; i < dim_; ++i) count *= side;
    values_.resize(count);
    std::vector<int> z(dim_);
    for (int idx = 0; idx < count; ++idx) {
      int rest = idx;
      for (int i = 0; i < dim_; ++i) {
        z[i] = rest % side - zmax;
        rest /= side;
      }
      values_[idx] = e_hat_m(z, m, pot, params);
    }
  }

  double operator()(std::span<const int> z) const {
    const int side = 2 * zmax_ + 1;
    int idx = 0;
    for (int i = dim_ - 1; i >= 0; --i) idx = idx * side + (z[i] + zmax_);
    return values_[idx];
  }

 private:
  int zmax_;
  int dim_;
  std::vector<double> values_;
};

}  // namespace

double e_hat_m_exact(int z, int m, const DualPotential& pot, const SystemParams& params,
                     int grid_points) {
  const int zmax = std::abs(z);
  return exact_slice_coefficients(zmax, m, pot, params, grid_points)[z + zmax];
}

double discrete_G2(TwoParticlePartition which, const SystemParams& params, const DualPotential& pot,
                   const DiscretePolicy& policy) {
  params.validate();
  if (params.particles != 2) throw std::domain_error("discrete_G2 needs N = 2");
  if (policy.m < 1) throw std::domain_error("m must be >= 1");
  if (policy.alpha_max < 0 || policy.alpha_max > policy.m)
    throw std::domain_error("alpha_max must lie in [0, m]");
  if (policy.z_cutoff < 0) throw std::domain_error("z_cutoff must be >= 0");

  const int d = params.dim;
  const int m = policy.m;
  const double c = params.cycle_coefficient(1);
  const SliceTable e_hat(policy.z_cutoff, m, pot, params, policy.exact_e_hat);
  const std::vector<int> origin(d, 0);
  const double e0 = e_hat(origin);
  const ThetaSum theta_two(2.0 * c);
  const ThetaSum theta_one(c);

  // All nonzero lattice vectors in the cutoff cube.
  std::vector<std::vector<int>> lattice;
  {
    const int side = 2 * policy.z_cutoff + 1;
    int count = 1;
    for (int i = 0; i < d; ++i) count *= side;
    for (int idx = 0; idx < count; ++idx) {
      std::vector<int> z(d);
      int rest = idx;
      bool nonzero = false;
      for (int i = 0; i < d; ++i) {
        z[i] = rest % side - policy.z_cutoff;
        rest /= side;
        nonzero = nonzero || z[i] != 0;
      }
      if (nonzero) lattice.push_back(std::move(z));
    }
  }

  auto f = [&](const std::vector<double>& t, const std::vector<const std::vector<int>*>& z) {
    const int a = static_cast<int>(t.size());
    double quad = 0.0;
    std::vector<double> shift(d, 0.0);
    for (int r = 0; r < a; ++r) {
      for (int s = 0; s < a; ++s) {
        double zz = 0.0;
        for (int i = 0; i < d; ++i) zz += static_cast<double>((*z[r])[i]) * (*z[s])[i];
        if (which == TwoParticlePartition::two_cycle)
          quad += (0.5 - std::abs(t[r] - t[s])) * zz;
        else
          quad += (std::min(t[r], t[s]) - t[r] * t[s]) * zz;
      }
      for (int i = 0; i < d; ++i)
        shift[i] += which == TwoParticlePartition::two_cycle ? -0.5 * (*z[r])[i] : t[r] * (*z[r])[i];
    }
    if (which == TwoParticlePartition::two_cycle) return std::exp(-c * quad) * theta_two(shift);
    const double th = theta_one(shift);
    return std::exp(-2.0 * c * quad) * th * th;
  };

  double total = 0.0;
  for (int alpha = 0; alpha <= policy.alpha_max; ++alpha) {
    double block = 0.0;
    std::vector<const std::vector<int>*> zs(alpha);
    std::vector<double> times(alpha);
    // Sum over slice index sets i_1 < ... < i_alpha for a fixed vector tuple.
    auto slice_sum = [&]() {
      double s = 0.0;
      std::vector<int> idx(alpha);
      std::function<void(int, int)> rec = [&](int r, int start) {
        if (r == alpha) {
          s += f(times, zs);
          return;
        }
        for (int i = start; i <= m - (alpha - r - 1); ++i) {
          times[r] = static_cast<double>(i) / m;
          rec(r + 1, i + 1);
        }
      };
      rec(0, 1);
      return s;
    };
    std::function<void(int, double, std::vector<long long>&)> vec_rec =
        [&](int r, double weight, std::vector<long long>& sum) {
          if (r == alpha) {
            if (which == TwoParticlePartition::two_fixed &&
                std::any_of(sum.begin(), sum.end(), [](long long v) { return v != 0; }))
              return;
            block += weight * slice_sum();
            return;
          }
          for (const auto& z : lattice) {
            const double w = e_hat(z);
            if (w == 0.0) continue;
            zs[r] = &z;
            for (int i = 0; i < d; ++i) sum[i] += z[i];
            vec_rec(r + 1, weight * w, sum);
            for (int i = 0; i < d; ++i) sum[i] -= z[i];
          }
        };
    std::vector<long long> sum(d, 0);
    vec_rec(0, 1.0, sum);
    total += std::pow(e0, m - alpha) * block;
  }
  return total;
}

namespace {

/// Momenta of one particle: the cube [-cutoff, cutoff]^d in odometer order.
std::vector<std::vector<int>> momentum_cube(int dim, int cutoff) {
  const int side = 2 * cutoff + 1;
  int count = 1;
  for (int i = 0; i < dim; ++i) count *= side;
  std::vector<std::vector<int>> out(count, std::vector<int>(dim));
  for (int idx = 0; idx < count; ++idx) {
    int rest = idx;
    for (int i = 0; i < dim; ++i) {
      out[idx][i] = rest % side - cutoff;
      rest /= side;
    }
  }
  return out;
}

bool in_cube(const std::vector<int>& k, int cutoff) {
  return std::all_of(k.begin(), k.end(), [&](int c) { return std::abs(c) <= cutoff; });
}

double square(const std::vector<int>& k) {
  double s = 0.0;
  for (int c : k) s += static_cast<double>(c) * c;
  return s;
}

struct Block {
  std::vector<std::vector<int>> first;  // k_1; k_2 = K - k_1
  std::vector<int> partner;             // index of the swapped state
};

std::vector<Block> total_momentum_blocks(int dim, int cutoff) {
  const auto cube = momentum_cube(dim, cutoff);
  std::vector<Block> blocks;
  for (const auto& total : momentum_cube(dim, 2 * cutoff)) {
    Block b;
    for (const auto& k : cube) {
      std::vector<int> other(dim);
      for (int i = 0; i < dim; ++i) other[i] = total[i] - k[i];
      if (in_cube(other, cutoff)) b.first.push_back(k);
    }
    for (const auto& k : b.first) {
      std::vector<int> other(dim);
      for (int i = 0; i < dim; ++i) other[i] = total[i] - k[i];
      b.partner.push_back(static_cast<int>(std::find(b.first.begin(), b.first.end(), other) -
                                           b.first.begin()));
    }
    blocks.push_back(std::move(b));
  }
  return blocks;
}

std::vector<int> total_of(const Block& b) {
  std::vector<int> total = b.first.front();
  const auto& other = b.first[b.partner.front()];
  for (std::size_t i = 0; i < total.size(); ++i) total[i] += other[i];
  return total;
}

}  // namespace

ExactDiagResult exact_Q2(const SystemParams& params, const DualPotential& pot, int cutoff) {
  params.validate();
  if (params.particles != 2) throw std::domain_error("exact_Q2 needs N = 2");
  if (cutoff < 1) throw std::domain_error("momentum cutoff must be >= 1");
  if (pot.dim() != params.dim) throw std::invalid_argument("potential dimension differs from d");
  const int d = params.dim;
  const double kinetic = params.cycle_coefficient(1);  // beta eps(k) = pi lambda^2 k^2 / L^2
  const double coupling = params.beta / params.volume();
  const double exchange = params.statistics == Statistics::bose ? 1.0 : -1.0;

  double q = 0.0;
  for (const Block& b : total_momentum_blocks(d, cutoff)) {
    const int n = static_cast<int>(b.first.size());
    const std::vector<int> total = total_of(b);
    Eigen::MatrixXd h(n, n);
    std::vector<int> dz(d);
    for (int a = 0; a < n; ++a) {
      for (int c = 0; c < n; ++c) {
        for (int i = 0; i < d; ++i) dz[i] = b.first[a][i] - b.first[c][i];
        h(a, c) = coupling * pot.at_lattice(dz, params.box_length);
      }
      std::vector<int> other(d);
      for (int i = 0; i < d; ++i) other[i] = total[i] - b.first[a][i];
      h(a, a) += kinetic * (square(b.first[a]) + square(other));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success) throw InternalError("eigensolver failed");
    const Eigen::VectorXd boltz = (-solver.eigenvalues().array()).exp();
    const Eigen::MatrixXd& vecs = solver.eigenvectors();
    const Eigen::MatrixXd rho = vecs * boltz.asDiagonal() * vecs.transpose();
    double swapped = 0.0;
    for (int a = 0; a < n; ++a) swapped += rho(b.partner[a], a);
    q += 0.5 * (rho.trace() + exchange * swapped);
  }
  ExactDiagResult res;
  res.Q = q;
  res.boundary_weight = std::exp(-kinetic * static_cast<double>(cutoff) * cutoff);
  res.cutoff_adequate = res.boundary_weight < 1e-14;
  return res;
}

double trotter_Q2(const SystemParams& params, const DualPotential& pot, int m, int cutoff) {
  params.validate();
  if (params.particles != 2) throw std::domain_error("trotter_Q2 needs N = 2");
  if (params.dim != 1) throw std::domain_error("trotter_Q2 needs d = 1");
  if (m < 1 || cutoff < 1) throw std::domain_error("m and cutoff must be >= 1");
  const double kinetic = params.cycle_coefficient(1);
  const double exchange = params.statistics == Statistics::bose ? 1.0 : -1.0;
  const auto slice = exact_slice_coefficients(2 * cutoff, m, pot, params,
                                              std::max(4096, 16 * cutoff + 16));
  double q = 0.0;
  for (const Block& b : total_momentum_blocks(1, cutoff)) {
    const int n = static_cast<int>(b.first.size());
    const int total = total_of(b)[0];
    Eigen::VectorXd half(n);
    for (int a = 0; a < n; ++a) {
      const int k1 = b.first[a][0];
      const int k2 = total - k1;
      half(a) = std::exp(-0.5 * kinetic * (k1 * k1 + k2 * k2) / m);
    }
    Eigen::MatrixXd t(n, n);
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c)
        t(a, c) = half(a) * slice[b.first[a][0] - b.first[c][0] + 2 * cutoff] * half(c);
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
    for (int s = 0; s < m; ++s) power = power * t;
    double swapped = 0.0;
    for (int a = 0; a < n; ++a) swapped += power(b.partner[a], a);
    q += 0.5 * (power.trace() + exchange * swapped);
  }
  return q;
}

std::string MatrixACheck::report() const {
  std::ostringstream os;
  os.precision(6);
  os << "m=" << m << "\n"
     << "inverse_exact=" << (inverse_exact ? "pass" : "fail") << "\n"
     << "eigenpairs=" << (eigenpairs_ok ? "pass" : "fail") << "\n"
     << "degeneracy=" << (degeneracy_ok ? "pass" : "fail") << "\n"
     << "max_residual=" << std::scientific << max_residual << "\n";
  return os.str();
}

MatrixACheck matrix_A_check(int m) {
  if (m < 2) throw std::domain_error("matrix_A_check needs m >= 2");
  MatrixACheck res;
  res.m = m;

  // 4A and B are integer matrices; A B = I  <=>  (4A) B = 4 I.
  Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> a4(m, m), b(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      a4(i, j) = m - 2LL * std::abs(i - j);
      b(i, j) = i == j ? 2 : (std::abs(i - j) == 1 ? -1 : 0);
    }
  b(0, m - 1) += 1;
  b(m - 1, 0) += 1;
  const auto prod = (a4 * b).eval();
  res.inverse_exact = true;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (prod(i, j) != (i == j ? 4 : 0)) res.inverse_exact = false;

  const Eigen::MatrixXd bd = b.cast<double>();
  std::vector<Eigen::VectorXd> vectors;
  std::vector<double> values;
  for (int q = 1; q <= m / 2; ++q) {
    const double angle = (2.0 * q - 1.0) * std::numbers::pi / m;
    Eigen::VectorXd vs(m), vc(m);
    for (int j = 1; j <= m; ++j) {
      vs(j - 1) = std::sin(angle * j);
      vc(j - 1) = std::cos(angle * j);
    }
    const double lambda = 2.0 * (1.0 - std::cos(angle));
    vectors.push_back(vs);
    vectors.push_back(vc);
    values.push_back(lambda);
    values.push_back(lambda);
  }
  if (m % 2 == 1) {
    Eigen::VectorXd v(m);
    for (int j = 1; j <= m; ++j) v(j - 1) = j % 2 == 0 ? 1.0 : -1.0;
    vectors.push_back(v);
    values.push_back(4.0);
  }
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const double r = (bd * vectors[i] - values[i] * vectors[i]).cwiseAbs().maxCoeff();
    res.max_residual = std::max(res.max_residual, r);
  }
  res.eigenpairs_ok = static_cast<int>(vectors.size()) == m && res.max_residual < 1e-12;

  // A full orthogonal eigenbasis with the stated pairing of eigenvalues.
  bool ok = static_cast<int>(vectors.size()) == m;
  for (std::size_t i = 0; i < vectors.size() && ok; ++i)
    for (std::size_t j = i + 1; j < vectors.size() && ok; ++j)
      ok = std::abs(vectors[i].dot(vectors[j])) < 1e-9 * m;
  for (int q = 0; q + 1 < m / 2 && ok; ++q)
    ok = std::abs(values[2 * q] - values[2 * q + 2]) > 1e-9;
  res.degeneracy_ok = ok;
  return res;
}

}  // namespace qpf
