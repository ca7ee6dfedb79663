#pragma once

#include <span>
#include <string>
#include <string_view>

#include "qpf/precision.hpp"

namespace qpf {

enum class Statistics { bose, fermi };

std::string_view to_string(Statistics s);
Statistics parse_statistics(std::string_view text);

/// Relative accuracy of every lattice theta sum unless overridden.
inline constexpr double kDefaultThetaTol = 1e-14;

/// N particles on a d-torus of side L at inverse temperature beta.
///
/// The mass and hbar only enter through the thermal wavelength, which is
/// stored directly.
struct SystemParams {
  int particles = 1;
  int dim = 1;
  double box_length = 1.0;
  double beta = 1.0;
  double lambda = 1.0;
  Statistics statistics = Statistics::bose;

  static SystemParams from_mass(int particles, int dim, double box_length, double beta,
                                double mass, Statistics statistics, double hbar = 1.0);

  /// Throws std::domain_error naming the offending field.
  void validate() const;

  /// pi * n * lambda^2 / L^2, the Gaussian width of an n-particle cycle.
  double cycle_coefficient(int cycle_length) const;

  /// L^d
  double volume() const;
};

/// sqrt(2 pi hbar^2 beta / mass)
double thermal_wavelength(double beta, double mass, double hbar = 1.0);

/// Smallest R >= 1 with 2 exp(-c R^2) / (1 - exp(-c (2R+1))) < tol.
///
/// The left side bounds the one-axis tail sum over |z| >= R. Evaluated in
/// log space so tolerances below the double range are accepted through
/// theta_truncation_radius_log.
int theta_truncation_radius(double c, double tol);
int theta_truncation_radius_log(double c, double log_tol);

/// One axis: sum_{z in Z} exp(-c (z + s)^2).
double theta_sum_axis(double c, double shift, double tol = kDefaultThetaTol);

/// sum_{z in Z^d} exp(-c |z + s|^2), d = shift.size(). Factorizes over axes.
double theta_sum(double c, std::span<const double> shift, double tol = kDefaultThetaTol);

/// Unshifted sum in d dimensions.
double theta_sum(double c, int dim, double tol = kDefaultThetaTol);

/// Unshifted sum carried to full HighReal precision.
HighReal theta_sum_precise(double c, int dim);

/// Reusable evaluator for a fixed width c; caches the truncation radius.
class ThetaSum {
 public:
  ThetaSum(double c, double tol = kDefaultThetaTol);

  double coefficient() const { return c_; }
  double axis(double shift) const;
  double operator()(std::span<const double> shift) const;

 private:
  double c_;
  int radius_;
};

}  // namespace qpf
