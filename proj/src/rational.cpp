#include "treecorr/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "treecorr/errors.hpp"

namespace treecorr {

const char* error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kDimension: return "DimensionError";
    case ErrorCode::kIndex: return "IndexError";
    case ErrorCode::kOrder: return "OrderError";
    case ErrorCode::kHViolation: return "HViolation";
    case ErrorCode::kNotRepresentable: return "NotRepresentable";
    case ErrorCode::kInfeasibleDecomposition: return "InfeasibleDecomposition";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kUnsupportedFamily: return "UnsupportedFamily";
    case ErrorCode::kFamilyMismatch: return "FamilyMismatch";
    case ErrorCode::kMeanMismatch: return "MeanMismatch";
    case ErrorCode::kInconsistency: return "Inconsistency";
    case ErrorCode::kMissingVertex: return "MissingVertex";
    case ErrorCode::kCouplingUnavailable: return "CouplingUnavailable";
    case ErrorCode::kUnbounded: return "Unbounded";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kDegenerateMass: return "DegenerateMass";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kTreeMismatch: return "TreeMismatch";
  }
  return "Error";
}

namespace {

Integer parse_integer(std::string_view digits, std::string_view whole) {
  if (digits.empty()) throw ParseError("malformed rational '" + std::string(whole) + "'");
  for (char c : digits)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw ParseError("malformed rational '" + std::string(whole) + "'");
  return Integer(std::string(digits));
}

Integer pow10(long exponent) {
  Integer out = 1;
  for (long i = 0; i < exponent; ++i) out *= 10;
  return out;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw ParseError("empty rational");

  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }

  Rational value;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Integer num = parse_integer(s.substr(0, slash), text);
    Integer den = parse_integer(s.substr(slash + 1), text);
    if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    value = Rational(num, den);
  } else {
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
      std::string exp_text(s.substr(e + 1));
      char* end = nullptr;
      exponent = std::strtol(exp_text.c_str(), &end, 10);
      if (exp_text.empty() || *end != '\0')
        throw ParseError("malformed exponent in '" + std::string(text) + "'");
      s = s.substr(0, e);
    }
    std::string digits;
    long frac_digits = 0;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
      digits = std::string(s.substr(0, dot)) + std::string(s.substr(dot + 1));
      frac_digits = static_cast<long>(s.size() - dot - 1);
    } else {
      digits = std::string(s);
    }
    Integer mantissa = parse_integer(digits, text);
    long shift = exponent - frac_digits;
    if (shift >= 0) {
      value = Rational(mantissa * pow10(shift));
    } else {
      value = Rational(mantissa, pow10(-shift));
    }
  }
  return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& value) {
  if (is_integer(value)) return boost::multiprecision::numerator(value).str();
  return value.str();
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

Rational from_double(double value) {
  if (!std::isfinite(value)) throw InvalidArgument("non-finite value cannot be made rational");
  return Rational(value);
}

Integer round_nearest(const Rational& value) {
  Rational shifted = value >= 0 ? Rational(value + Rational(1, 2)) : Rational(value - Rational(1, 2));
  Integer num = boost::multiprecision::numerator(shifted);
  Integer den = boost::multiprecision::denominator(shifted);
  return num / den;  // truncates toward zero
}

}  // namespace treecorr
