#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace qpf {

/// A pair potential held through its Fourier transform u_hat.
///
/// Three kinds exist:
///   - zero:      u_hat == 0
///   - gaussian:  u(x) = g exp(-pi |x|^2 / a^2), u_hat(v) = g a^d exp(-pi a^2 |v|^2)
///   - tabulated: values u_hat(z / L) keyed by the dual lattice point z for one
///                fixed box side L; no interpolation.
///
/// Evenness u_hat(-v) = u_hat(v) holds by construction for every kind.
class DualPotential {
 public:
  enum class Kind { zero, gaussian, tabulated };
  using Table = std::map<std::vector<int>, double>;

  static DualPotential zero(int dim);
  static DualPotential gaussian(int dim, double strength, double range);

  /// Throws std::invalid_argument if the table misses z = 0, is not even,
  /// or has inconsistent dimensions.
  static DualPotential tabulated(int dim, double box_length, Table values);

  /// Text table, one "z_1 ... z_d value" per line; '#' starts a comment.
  static DualPotential load_table(std::istream& in, double box_length);
  static DualPotential load_table_file(const std::string& path, double box_length);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool is_zero() const { return kind_ == Kind::zero; }

  double strength() const { return strength_; }
  double range() const { return range_; }
  double table_box_length() const { return table_box_length_; }

  /// Largest |z_i| present in the table (tabulated only).
  int table_radius() const { return table_radius_; }
  const Table& table() const { return table_; }

  /// u_hat(v) for a dual-space point v. For a table, v must be z / L for a
  /// stored z; otherwise std::out_of_range.
  double u_hat(std::span<const double> v) const;

  /// u_hat(z / L) for an integer lattice point z.
  double at_lattice(std::span<const int> z, double box_length) const;

  double u_hat_zero() const;

  /// Decay exponent eta of u(x) = O(|x|^{-d-eta}); metadata only.
  double decay_exponent() const { return decay_exponent_; }
  void set_decay_exponent(double eta);

 private:
  DualPotential(Kind kind, int dim) : kind_(kind), dim_(dim) {}

  Kind kind_;
  int dim_;
  double strength_ = 0.0;
  double range_ = 0.0;
  double table_box_length_ = 0.0;
  int table_radius_ = 0;
  Table table_;
  double decay_exponent_;
};

/// sum over 0 < max_i |z_i| <= cutoff of |u_hat(z / L)| / L^d.
double dual_l1_bound(const DualPotential& pot, double box_length, int cutoff);

/// The cutoff -> infinity limit of dual_l1_bound (whole table for a
/// tabulated potential); cutoffs double until the increment is below tol.
double dual_l1_total(const DualPotential& pot, double box_length, double tol = 1e-15);

}  // namespace qpf
