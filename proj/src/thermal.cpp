#include "qpf/thermal.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qpf {

namespace {

[[noreturn]] void bad_field(const char* field, const char* rule, double value) {
  std::ostringstream os;
  os << field << " must be " << rule << " (got " << value << ")";
  throw std::domain_error(os.str());
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

std::string_view to_string(Statistics s) { return s == Statistics::bose ? "bose" : "fermi"; }

Statistics parse_statistics(std::string_view text) {
  if (text == "bose" || text == "Bose" || text == "boson" || text == "bosons") return Statistics::bose;
  if (text == "fermi" || text == "Fermi" || text == "fermion" || text == "fermions")
    return Statistics::fermi;
  throw std::domain_error("statistics must be 'bose' or 'fermi' (got '" + std::string(text) + "')");
}

SystemParams SystemParams::from_mass(int particles, int dim, double box_length, double beta,
                                     double mass, Statistics statistics, double hbar) {
  SystemParams p;
  p.particles = particles;
  p.dim = dim;
  p.box_length = box_length;
  p.beta = beta;
  p.lambda = thermal_wavelength(beta, mass, hbar);
  p.statistics = statistics;
  p.validate();
  return p;
}

void SystemParams::validate() const {
  if (particles < 1) bad_field("N", ">= 1", particles);
  if (dim < 1) bad_field("d", ">= 1", dim);
  if (!positive_finite(box_length)) bad_field("L", "> 0", box_length);
  if (!positive_finite(beta)) bad_field("beta", "> 0", beta);
  if (!positive_finite(lambda)) bad_field("lambda", "> 0", lambda);
}

double SystemParams::cycle_coefficient(int cycle_length) const {
  return std::numbers::pi * cycle_length * lambda * lambda / (box_length * box_length);
}

double SystemParams::volume() const { return std::pow(box_length, dim); }

double thermal_wavelength(double beta, double mass, double hbar) {
  if (!positive_finite(beta)) bad_field("beta", "> 0", beta);
  if (!positive_finite(mass)) bad_field("mass", "> 0", mass);
  if (!positive_finite(hbar)) bad_field("hbar", "> 0", hbar);
  return std::sqrt(2.0 * std::numbers::pi * hbar * hbar * beta / mass);
}

int theta_truncation_radius_log(double c, double log_tol) {
  if (!positive_finite(c)) bad_field("theta width c", "> 0", c);
  if (!(log_tol < 0.0)) bad_field("theta tolerance", "in (0, 1)", std::exp(log_tol));
  const double log2 = std::log(2.0);
  for (int r = 1;; ++r) {
    const double rr = static_cast<double>(r);
    const double log_bound = log2 - c * rr * rr - std::log1p(-std::exp(-c * (2.0 * rr + 1.0)));
    if (log_bound < log_tol) return r;
  }
}

int theta_truncation_radius(double c, double tol) {
  if (!(tol > 0.0 && tol < 1.0)) bad_field("theta tolerance", "in (0, 1)", tol);
  return theta_truncation_radius_log(c, std::log(tol));
}

ThetaSum::ThetaSum(double c, double tol) : c_(c), radius_(theta_truncation_radius(c, tol)) {}

double ThetaSum::axis(double shift) const {
  const double w = shift - std::nearbyint(shift);
  double total = 0.0;
  // outermost terms first
  for (int z = radius_ + 1; z >= 1; --z) {
    const double a = z + w;
    const double b = -z + w;
    total += std::exp(-c_ * a * a) + std::exp(-c_ * b * b);
  }
  return total + std::exp(-c_ * w * w);
}

double ThetaSum::operator()(std::span<const double> shift) const {
  double prod = 1.0;
  for (double s : shift) prod *= axis(s);
  return prod;
}

double theta_sum_axis(double c, double shift, double tol) { return ThetaSum(c, tol).axis(shift); }

double theta_sum(double c, std::span<const double> shift, double tol) {
  if (shift.empty()) throw std::domain_error("theta_sum needs dimension >= 1");
  return ThetaSum(c, tol)(shift);
}

double theta_sum(double c, int dim, double tol) {
  if (dim < 1) bad_field("d", ">= 1", dim);
  return std::pow(ThetaSum(c, tol).axis(0.0), dim);
}

HighReal theta_sum_precise(double c, int dim) {
  if (dim < 1) bad_field("d", ">= 1", dim);
  const double log_tol = -(static_cast<double>(kHighPrecisionDigits) + 10.0) * std::log(10.0);
  const int radius = theta_truncation_radius_log(c, log_tol);
  const HighReal q = exp(-HighReal(c));
  const HighReal q2 = q * q;
  HighReal term = q;        // q^{z^2}
  HighReal step = q * q2;   // q^{2z+1}
  HighReal tail = 0;
  for (int z = 1; z <= radius; ++z) {
    tail += term;
    term *= step;
    step *= q2;
  }
  return pow(1 + 2 * tail, dim);
}

}  // namespace qpf
