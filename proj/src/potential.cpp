#include "qpf/potential.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qpf/thermal.hpp"

namespace qpf {

namespace {

void require_dim(int dim) {
  if (dim < 1) throw std::domain_error("potential dimension must be >= 1");
}

std::vector<int> negated(const std::vector<int>& z) {
  std::vector<int> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = -z[i];
  return out;
}

// Visits every z in [-r, r]^d except the origin.
template <class F>
void for_each_nonzero_in_cube(int dim, int r, F&& f) {
  std::vector<int> z(dim, -r);
  while (true) {
    bool origin = true;
    for (int c : z) origin = origin && c == 0;
    if (!origin) f(std::span<const int>(z));
    int axis = 0;
    while (axis < dim && z[axis] == r) z[axis++] = -r;
    if (axis == dim) return;
    ++z[axis];
  }
}

}  // namespace

DualPotential DualPotential::zero(int dim) {
  require_dim(dim);
  DualPotential p(Kind::zero, dim);
  p.decay_exponent_ = std::numeric_limits<double>::infinity();
  return p;
}

DualPotential DualPotential::gaussian(int dim, double strength, double range) {
  require_dim(dim);
  if (!std::isfinite(strength)) throw std::domain_error("gaussian strength must be finite");
  if (!(range > 0.0) || !std::isfinite(range)) throw std::domain_error("gaussian range must be > 0");
  DualPotential p(Kind::gaussian, dim);
  p.strength_ = strength;
  p.range_ = range;
  p.decay_exponent_ = std::numeric_limits<double>::infinity();
  return p;
}

DualPotential DualPotential::tabulated(int dim, double box_length, Table values) {
  require_dim(dim);
  if (!(box_length > 0.0)) throw std::domain_error("table box length must be > 0");
  int radius = 0;
  for (const auto& [z, value] : values) {
    if (static_cast<int>(z.size()) != dim)
      throw std::invalid_argument("table entry has wrong dimension");
    if (!std::isfinite(value)) throw std::invalid_argument("table value is not finite");
    for (int c : z) radius = std::max(radius, std::abs(c));
  }
  if (!values.count(std::vector<int>(dim, 0)))
    throw std::invalid_argument("table must contain u_hat(0)");
  for (const auto& [z, value] : values) {
    auto it = values.find(negated(z));
    if (it == values.end()) {
      std::ostringstream os;
      os << "table is not even: missing -z for z =";
      for (int c : z) os << ' ' << c;
      throw std::invalid_argument(os.str());
    }
    if (std::abs(it->second - value) > 1e-12 * std::max(1.0, std::abs(value))) {
      std::ostringstream os;
      os << "table is not even at z =";
      for (int c : z) os << ' ' << c;
      throw std::invalid_argument(os.str());
    }
  }
  DualPotential p(Kind::tabulated, dim);
  p.table_box_length_ = box_length;
  p.table_radius_ = radius;
  p.table_ = std::move(values);
  p.decay_exponent_ = std::numeric_limits<double>::quiet_NaN();
  return p;
}

DualPotential DualPotential::load_table(std::istream& in, double box_length) {
  Table values;
  int dim = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    for (std::string tok; ls >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (tokens.size() < 2)
      throw std::invalid_argument("table line " + std::to_string(line_no) + ": need z_1..z_d value");
    const int this_dim = static_cast<int>(tokens.size()) - 1;
    if (dim == 0) dim = this_dim;
    if (this_dim != dim)
      throw std::invalid_argument("table line " + std::to_string(line_no) + ": inconsistent dimension");
    std::vector<int> z(dim);
    try {
      for (int i = 0; i < dim; ++i) {
        std::size_t used = 0;
        z[i] = std::stoi(tokens[i], &used);
        if (used != tokens[i].size()) throw std::invalid_argument("not an integer");
      }
      std::size_t used = 0;
      const double value = std::stod(tokens.back(), &used);
      if (used != tokens.back().size()) throw std::invalid_argument("not a number");
      if (!values.emplace(z, value).second)
        throw std::invalid_argument("duplicate lattice point");
    } catch (const std::logic_error& e) {
      throw std::invalid_argument("table line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (dim == 0) throw std::invalid_argument("table is empty");
  return tabulated(dim, box_length, std::move(values));
}

DualPotential DualPotential::load_table_file(const std::string& path, double box_length) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open potential table '" + path + "'");
  return load_table(in, box_length);
}

void DualPotential::set_decay_exponent(double eta) {
  if (!(eta > 0.0)) throw std::domain_error("decay exponent must be > 0");
  decay_exponent_ = eta;
}

double DualPotential::u_hat(std::span<const double> v) const {
  if (static_cast<int>(v.size()) != dim_) throw std::domain_error("u_hat: dimension mismatch");
  for (double c : v)
    if (!std::isfinite(c)) throw std::domain_error("u_hat: non-finite argument");
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::gaussian: {
      double v2 = 0.0;
      for (double c : v) v2 += c * c;
      return strength_ * std::pow(range_, dim_) * std::exp(-std::numbers::pi * range_ * range_ * v2);
    }
    case Kind::tabulated: {
      std::vector<int> z(dim_);
      for (int i = 0; i < dim_; ++i) {
        const double scaled = v[i] * table_box_length_;
        z[i] = static_cast<int>(std::lround(scaled));
        if (std::abs(scaled - z[i]) > 1e-9 * std::max(1.0, std::abs(scaled)))
          throw std::out_of_range("u_hat: point is not on the tabulated dual lattice");
      }
      auto it = table_.find(z);
      if (it == table_.end()) throw std::out_of_range("u_hat: point outside the tabulated grid");
      return it->second;
    }
  }
  return 0.0;
}

double DualPotential::at_lattice(std::span<const int> z, double box_length) const {
  if (static_cast<int>(z.size()) != dim_) throw std::domain_error("u_hat: dimension mismatch");
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::gaussian: {
      double z2 = 0.0;
      for (int c : z) z2 += static_cast<double>(c) * c;
      const double scale = range_ / box_length;
      return strength_ * std::pow(range_, dim_) * std::exp(-std::numbers::pi * scale * scale * z2);
    }
    case Kind::tabulated: {
      if (std::abs(box_length - table_box_length_) > 1e-12 * table_box_length_)
        throw std::out_of_range("u_hat: table was built for a different box length");
      auto it = table_.find(std::vector<int>(z.begin(), z.end()));
      if (it == table_.end()) throw std::out_of_range("u_hat: point outside the tabulated grid");
      return it->second;
    }
  }
  return 0.0;
}

double DualPotential::u_hat_zero() const {
  const std::vector<double> origin(dim_, 0.0);
  if (kind_ == Kind::tabulated) return table_.at(std::vector<int>(dim_, 0));
  return u_hat(origin);
}

double dual_l1_bound(const DualPotential& pot, double box_length, int cutoff) {
  if (cutoff < 1) throw std::domain_error("dual_l1_bound: cutoff must be >= 1");
  if (pot.is_zero()) return 0.0;
  if (pot.kind() == DualPotential::Kind::tabulated && cutoff > pot.table_radius())
    throw std::out_of_range("dual_l1_bound: cutoff exceeds the tabulated grid");
  double total = 0.0;
  for_each_nonzero_in_cube(pot.dim(), cutoff, [&](std::span<const int> z) {
    total += std::abs(pot.at_lattice(z, box_length));
  });
  return total / std::pow(box_length, pot.dim());
}

double dual_l1_total(const DualPotential& pot, double box_length, double tol) {
  switch (pot.kind()) {
    case DualPotential::Kind::zero:
      return 0.0;
    case DualPotential::Kind::gaussian: {
      // |g| a^d (theta(pi a^2 / L^2, d) - 1) / L^d, summed in closed theta form
      const double scale = pot.range() / box_length;
      const double c = std::numbers::pi * scale * scale;
      const double axis = theta_sum_axis(c, 0.0, std::min(tol, 1e-14));
      const double rest = std::pow(axis, pot.dim()) - 1.0;
      return std::abs(pot.strength()) * std::pow(scale, pot.dim()) * rest;
    }
    case DualPotential::Kind::tabulated: {
      double total = 0.0;
      for (const auto& [z, value] : pot.table()) {
        bool origin = true;
        for (int c : z) origin = origin && c == 0;
        if (!origin) total += std::abs(value);
      }
      return total / std::pow(box_length, pot.dim());
    }
  }
  return 0.0;
}

}  // namespace qpf
