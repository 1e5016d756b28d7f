#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "treecorr/models.hpp"
#include "treecorr/rational.hpp"

namespace treecorr {

/// Joint pmf of (X_1..X_d) on the box {0..extent_1} x ... x {0..extent_d},
/// stored lexicographically with coordinate 1 varying slowest.
template <typename Scalar>
struct TruncatedPmf {
  int dim = 0;
  std::vector<int> extent;
  std::vector<Scalar> mass;
  Scalar captured{};  // total mass inside the box; 1 - captured is the truncation defect

  std::size_t offset(std::span<const int> x) const {
    std::size_t out = 0;
    for (int i = 0; i < dim; ++i) out = out * static_cast<std::size_t>(extent[i] + 1) + static_cast<std::size_t>(x[i]);
    return out;
  }
  /// Zero outside the box.
  Scalar at(std::span<const int> x) const {
    for (int i = 0; i < dim; ++i)
      if (x[i] < 0 || x[i] > extent[i]) return Scalar(0);
    return mass[offset(x)];
  }
};

/// Enumeration budget: TREECORR_BUDGET if set, else 10^8 elementary updates.
std::uint64_t default_budget();

/// Per-component truncation caps with each component's tail mass below
/// total_tail / (#components). Binomial caps are the counts (no tail).
std::vector<int> component_caps(const Model& model, double total_tail = 1e-10);

/// Marginal pmf of one component on {0..cap}.
std::vector<Rational> binomial_pmf(std::int64_t count, const Rational& p, int cap);
std::vector<double> poisson_pmf(double lambda, int cap);
/// P(Poisson(lambda) > m).
double poisson_tail(double lambda, int m);

/// Exact joint pmf from truncated components. Rational mode supports binomial
/// only; double mode supports binomial and Poisson. Throws UnsupportedFamily for
/// continuous families and BudgetExceeded when the enumeration exceeds `budget`.
TruncatedPmf<Rational> exact_truncated_pmf_rational(const Model& model, std::optional<std::vector<int>> caps = {},
                                                    std::uint64_t budget = default_budget());
TruncatedPmf<double> exact_truncated_pmf_double(const Model& model, std::optional<std::vector<int>> caps = {},
                                                std::uint64_t budget = default_budget());

template <typename Scalar>
TruncatedPmf<Scalar> exact_truncated_pmf(const Model& model, std::optional<std::vector<int>> caps = {},
                                         std::uint64_t budget = default_budget()) {
  if constexpr (std::is_same_v<Scalar, Rational>) {
    return exact_truncated_pmf_rational(model, std::move(caps), budget);
  } else {
    return exact_truncated_pmf_double(model, std::move(caps), budget);
  }
}

/// Uniform cap m on every component.
template <typename Scalar>
TruncatedPmf<Scalar> exact_truncated_pmf(const Model& model, int cap, std::uint64_t budget = default_budget()) {
  return exact_truncated_pmf<Scalar>(model, std::vector<int>(tree_of(model).size(), cap), budget);
}

}  // namespace treecorr
