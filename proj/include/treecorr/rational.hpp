#pragma once

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>

namespace treecorr {

// Expression templates off: Eigen needs every operator to yield the scalar type.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Parses "p/q", integers, and decimal or scientific notation ("0.3", "-1.5e-2")
/// into an exact rational. A decimal string is taken verbatim, so "0.3" is 3/10.
Rational parse_rational(std::string_view text);

/// "p/q", or "p" when the denominator is one.
std::string to_string(const Rational& value);

double to_double(const Rational& value);

/// Exact binary value of a double.
Rational from_double(double value);

/// Round to nearest integer, halves away from zero.
Integer round_nearest(const Rational& value);

inline bool is_integer(const Rational& value) {
  return boost::multiprecision::denominator(value) == 1;
}

/// Scalar-dependent comparison policy: exact for Rational, relative tolerance for double.
template <typename Scalar>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool kExact = true;
  static bool equal(const Rational& a, const Rational& b) { return a == b; }
  static bool nonnegative(const Rational& a) { return a >= 0; }
  static Rational from_rational(const Rational& value) { return value; }
  static Rational zero() { return Rational(0); }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool kExact = false;
  static constexpr double kRelTol = 1e-9;
  static bool equal(double a, double b) {
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    return std::abs(a - b) <= kRelTol * scale;
  }
  static bool nonnegative(double a) { return a >= -kRelTol; }
  static double from_rational(const Rational& value) { return to_double(value); }
  static double zero() { return 0.0; }
};

template <typename To, typename From>
Matrix<To> convert(const Matrix<From>& m) {
  Matrix<To> out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if constexpr (std::is_same_v<To, From>) {
        out(i, j) = m(i, j);
      } else if constexpr (std::is_same_v<From, Rational>) {
        out(i, j) = to_double(m(i, j));
      } else {
        out(i, j) = from_double(m(i, j));
      }
    }
  return out;
}

}  // namespace treecorr
