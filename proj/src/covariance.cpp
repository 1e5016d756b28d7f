#include "treecorr/covariance.hpp"

#include <sstream>

namespace treecorr {

const char* family_name(Family family) {
  switch (family) {
    case Family::kBinomial: return "binomial";
    case Family::kPoisson: return "poisson";
    case Family::kGaussian: return "gaussian";
    case Family::kGamma: return "gamma";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "binomial") return Family::kBinomial;
  if (name == "poisson") return Family::kPoisson;
  if (name == "gaussian") return Family::kGaussian;
  if (name == "gamma") return Family::kGamma;
  throw ParseError("unknown family '" + std::string(name) + "'");
}

FeasibilityReport feasibility(const VarianceDecomposition<Rational>& dec, Family family,
                              const FamilyParams& params) {
  FeasibilityReport report;
  report.family = family;
  report.params = params;
  report.parameters = Vector<Rational>(dec.sigma2.size());

  Rational divisor(1);
  if (family == Family::kBinomial) {
    if (params.p < 0 || params.p > 1) throw InvalidArgument("binomial p must lie in [0, 1]");
    divisor = params.p * (1 - params.p);
  } else if (family == Family::kGamma) {
    if (params.theta <= 0) throw InvalidArgument("gamma scale theta must be positive");
    divisor = params.theta * params.theta;
  }

  for (Eigen::Index c = 0; c < dec.sigma2.size(); ++c) {
    const Pair p = pair_at(dec.dim, static_cast<std::size_t>(c));
    const Rational& s = dec.sigma2(c);
    if (s < 0) report.negative.emplace_back(p, s);

    if (family == Family::kBinomial && divisor == 0) {
      // p in {0, 1}: every component is degenerate, so only zero variance is reachable.
      report.parameters(c) = 0;
      if (s != 0) report.non_integral.emplace_back(p, s);
      continue;
    }
    const Rational value = s / divisor;
    report.parameters(c) = value;
    if (family == Family::kBinomial && !is_integer(value)) report.non_integral.emplace_back(p, value);
  }
  report.feasible = report.negative.empty() && report.non_integral.empty();
  return report;
}

namespace {

std::string describe(const FeasibilityReport& report) {
  std::vector<std::string> items;
  for (const auto& [p, v] : report.negative) items.push_back("sigma2(" + p.to_string() + ")=" + to_string(v) + " < 0");
  for (const auto& [p, v] : report.non_integral)
    items.push_back("count(" + p.to_string() + ")=" + to_string(v) + " not an integer");
  std::string out = std::string("decomposition infeasible for ") + family_name(report.family) + ":";
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "; " : " ") + items[i];
  return out;
}

}  // namespace

InfeasibleDecomposition::InfeasibleDecomposition(FeasibilityReport report)
    : Error(ErrorCode::kInfeasibleDecomposition, describe(report)), report_(std::move(report)) {}

}  // namespace treecorr
