#pragma once

#include <span>
#include <string>
#include <vector>

#include "qpf/potential.hpp"
#include "qpf/precision.hpp"
#include "qpf/thermal.hpp"

namespace qpf {

/// Canonical ideal-gas recursion Q_N = (1/N) sum_k (+-1)^{k-1} q_k Q_{N-k}
/// with q_k the unshifted theta sum of a k-cycle.
HighReal ideal_gas_Q_precise(const SystemParams& params);
double ideal_gas_Q(const SystemParams& params);

/// delta_{z,0} - beta u_hat(z/L) / (m L^d), the first-order dual coefficient
/// of one time slice.
double e_hat_m(std::span<const int> z, int m, const DualPotential& pot, const SystemParams& params);

/// The same coefficient without the Taylor step: the Fourier coefficient of
/// exp(-(beta/m) u_L) with u_L synthesized from u_hat on a periodic grid.
/// Only d = 1.
double e_hat_m_exact(int z, int m, const DualPotential& pot, const SystemParams& params,
                     int grid_points = 4096);

enum class TwoParticlePartition { two_cycle, two_fixed };  // [2] and [1,1]

struct DiscretePolicy {
  int m = 16;
  int z_cutoff = 8;
  int alpha_max = 2;
  bool exact_e_hat = false;
};

/// G_m for N = 2: sum over alpha <= alpha_max nonzero slice vectors at slice
/// indices i_1 < ... < i_alpha of E_hat(0)^{m-alpha} prod E_hat(z_r) f(i/m, z).
double discrete_G2(TwoParticlePartition which, const SystemParams& params, const DualPotential& pot,
                   const DiscretePolicy& policy);

struct ExactDiagResult {
  double Q = 0.0;
  /// exp(-pi lambda^2 C^2 / L^2): Boltzmann weight of the outermost momentum.
  double boundary_weight = 0.0;
  bool cutoff_adequate = false;
};

/// Tr P_+- exp(-beta H) for two particles in the plane-wave basis with every
/// momentum component of each particle in [-cutoff, cutoff], block-diagonal in
/// the total momentum.
ExactDiagResult exact_Q2(const SystemParams& params, const DualPotential& pot, int cutoff);

/// Tr P_+- (exp(-beta T / 2m) W exp(-beta T / 2m))^m with W the exact slice
/// factor exp(-(beta/m) u_L(x_1 - x_2)). Only d = 1.
double trotter_Q2(const SystemParams& params, const DualPotential& pot, int m, int cutoff);

struct MatrixACheck {
  int m = 0;
  bool inverse_exact = false;
  bool eigenpairs_ok = false;
  bool degeneracy_ok = false;
  double max_residual = 0.0;

  bool passed() const { return inverse_exact && eigenpairs_ok && degeneracy_ok; }
  /// "key=value" lines.
  std::string report() const;
};

/// A_ij = m/4 - |i-j|/2 against the antiperiodic Laplacian B and its stated
/// sine/cosine eigenpairs.
MatrixACheck matrix_A_check(int m);

}  // namespace qpf
