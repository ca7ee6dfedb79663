#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

namespace qpf {

/// Exact rational used for cycle weights and unity sums.
using Rational = boost::multiprecision::mpq_rational;

/// Working precision (decimal digits) of the order-zero block.
///
/// Fermi cycle sums cancel by many orders of magnitude at low temperature;
/// the ideal-gas part of every evaluation is carried in this type and only
/// rounded to double at the end.
inline constexpr unsigned kHighPrecisionDigits = 320;

using HighReal = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<kHighPrecisionDigits>,
    boost::multiprecision::et_off>;

inline HighReal to_high(const Rational& q) {
  return HighReal(boost::multiprecision::numerator(q).str()) /
         HighReal(boost::multiprecision::denominator(q).str());
}

}  // namespace qpf
