#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "treecorr/dependency_tree.hpp"
#include "treecorr/errors.hpp"
#include "treecorr/rational.hpp"

namespace treecorr {

/// Target covariance matrix (and optionally means) of a d-dimensional vector.
template <typename Scalar>
struct CovarianceSpec {
  Matrix<Scalar> matrix;
  std::optional<Vector<Scalar>> means;

  int dim() const { return static_cast<int>(matrix.rows()); }
};

/// Component variances sigma2_{k,l}, stored in pair order (see pair_index).
template <typename Scalar>
struct VarianceDecomposition {
  int dim = 0;
  Vector<Scalar> sigma2;

  static VarianceDecomposition zero(int d) {
    VarianceDecomposition out{d, Vector<Scalar>(static_cast<Eigen::Index>(pair_count(d)))};
    out.sigma2.setConstant(Scalar(0));
    return out;
  }

  Scalar& operator[](Pair p) { return sigma2(static_cast<Eigen::Index>(pair_index(dim, p))); }
  const Scalar& operator[](Pair p) const { return sigma2(static_cast<Eigen::Index>(pair_index(dim, p))); }

  std::vector<Pair> negative_pairs() const {
    std::vector<Pair> out;
    for (Eigen::Index c = 0; c < sigma2.size(); ++c)
      if (!ScalarTraits<Scalar>::nonnegative(sigma2(c))) out.push_back(pair_at(dim, static_cast<std::size_t>(c)));
    return out;
  }
  bool feasible() const { return negative_pairs().empty(); }
};

namespace detail {

template <typename Scalar>
void require_symmetric(const Matrix<Scalar>& m) {
  if (m.rows() != m.cols()) throw DimensionError("covariance matrix is not square");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (!ScalarTraits<Scalar>::nonnegative(m(i, i)))
      throw InvalidArgument("covariance diagonal entry " + std::to_string(i + 1) + " is negative");
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      if (!ScalarTraits<Scalar>::equal(m(i, j), m(j, i)))
        throw InvalidArgument("covariance matrix is not symmetric at (" + std::to_string(i + 1) + "," +
                              std::to_string(j + 1) + ")");
  }
}

template <typename Scalar>
const Scalar& cov_at(const Matrix<Scalar>& m, Pair p) {
  return m(p.k - 1, p.l - 1);
}

}  // namespace detail

/// Cov(X_i, X_j) = sum of sigma2_{k,l} over nodes with e_{i,j} ⪯ e_{k,l}.
template <typename Scalar>
CovarianceSpec<Scalar> forward_covariance(const DependencyTree& tree, const VarianceDecomposition<Scalar>& dec) {
  if (dec.dim != tree.dim() || dec.sigma2.size() != static_cast<Eigen::Index>(tree.size()))
    throw DimensionError("decomposition dimension " + std::to_string(dec.dim) + " does not match tree dimension " +
                         std::to_string(tree.dim()));
  const int d = tree.dim();
  CovarianceSpec<Scalar> out{Matrix<Scalar>(d, d), std::nullopt};
  for (std::size_t target = 0; target < tree.size(); ++target) {
    Scalar sum(0);
    for (std::size_t c = 0; c < tree.size(); ++c)
      if (precedes(tree.node(target), tree.node(c))) sum += dec.sigma2(static_cast<Eigen::Index>(c));
    const Pair p = tree.pair(target);
    out.matrix(p.k - 1, p.l - 1) = sum;
    out.matrix(p.l - 1, p.k - 1) = sum;
  }
  return out;
}

/// sigma2_{k,l} = sum over e_{k,l} ⪯ e_{i,j} of mu(e_{i,j}, e_{k,l}) Cov(X_i, X_j).
template <typename Scalar>
VarianceDecomposition<Scalar> invert_moebius(const DependencyTree& tree, const Matrix<Scalar>& cov) {
  auto out = VarianceDecomposition<Scalar>::zero(tree.dim());
  const auto& mu = tree.moebius();
  for (std::size_t above = 0; above < tree.size(); ++above) {
    const Scalar& c = detail::cov_at(cov, tree.pair(above));
    for (const auto& [below, weight] : mu.row(tree.node(above))) {
      const auto index = tree.find(below);
      if (!index) continue;
      out.sigma2(static_cast<Eigen::Index>(*index)) += Scalar(weight) * c;
    }
  }
  return out;
}

/// Root-to-leaves back substitution: each node takes its covariance minus the
/// variances already assigned to the nodes strictly above it.
template <typename Scalar>
VarianceDecomposition<Scalar> invert_recursive(const DependencyTree& tree, const Matrix<Scalar>& cov) {
  auto out = VarianceDecomposition<Scalar>::zero(tree.dim());
  std::vector<std::size_t> order(tree.size());
  for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return tree.node(a).size() > tree.node(b).size(); });
  for (std::size_t c : order) {
    Scalar value = detail::cov_at(cov, tree.pair(c));
    for (std::size_t other = 0; other < tree.size(); ++other)
      if (strictly_precedes(tree.node(c), tree.node(other))) value -= out.sigma2(static_cast<Eigen::Index>(other));
    out.sigma2(static_cast<Eigen::Index>(c)) = value;
  }
  return out;
}

/// Möbius inversion cross-checked against the recursive path and re-verified by
/// a forward pass. Negative components are allowed (see feasibility).
template <typename Scalar>
VarianceDecomposition<Scalar> invert_covariance(const DependencyTree& tree, const CovarianceSpec<Scalar>& spec) {
  if (spec.dim() != tree.dim())
    throw DimensionError("covariance dimension " + std::to_string(spec.dim()) + " does not match tree dimension " +
                         std::to_string(tree.dim()));
  detail::require_symmetric(spec.matrix);

  auto moebius_path = invert_moebius(tree, spec.matrix);
  auto recursive_path = invert_recursive(tree, spec.matrix);
  for (Eigen::Index c = 0; c < moebius_path.sigma2.size(); ++c)
    if (!ScalarTraits<Scalar>::equal(moebius_path.sigma2(c), recursive_path.sigma2(c)))
      throw Inconsistency("Möbius and recursive inversion disagree at (" +
                          tree.pair(static_cast<std::size_t>(c)).to_string() + ")");

  const auto check = forward_covariance(tree, moebius_path);
  for (Eigen::Index i = 0; i < check.matrix.rows(); ++i)
    for (Eigen::Index j = i; j < check.matrix.cols(); ++j)
      if (!ScalarTraits<Scalar>::equal(check.matrix(i, j), spec.matrix(i, j))) {
        std::string residual;
        if constexpr (ScalarTraits<Scalar>::kExact) {
          residual = to_string(Rational(check.matrix(i, j) - spec.matrix(i, j)));
        } else {
          residual = std::to_string(check.matrix(i, j) - spec.matrix(i, j));
        }
        throw NotRepresentable("covariance not representable on this tree: residual " + residual + " at (" +
                               std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
      }
  return moebius_path;
}

enum class Family { kBinomial, kPoisson, kGaussian, kGamma };

const char* family_name(Family family);
Family parse_family(std::string_view name);

/// Binomial success probability p (in (0,1)) and gamma scale theta (> 0).
struct FamilyParams {
  Rational p = Rational(1, 2);
  Rational theta = Rational(1);
};

struct FeasibilityReport {
  Family family = Family::kGaussian;
  FamilyParams params;
  bool feasible = false;
  std::vector<std::pair<Pair, Rational>> negative;      // sigma2 < 0
  std::vector<std::pair<Pair, Rational>> non_integral;  // binomial: sigma2 / (pq) not an integer
  /// Per-family component parameters, in pair order: binomial counts |A(e_{k,l})|,
  /// Poisson intensities, Gaussian variances, gamma shapes.
  Vector<Rational> parameters;
};

FeasibilityReport feasibility(const VarianceDecomposition<Rational>& dec, Family family,
                              const FamilyParams& params = {});

class InfeasibleDecomposition : public Error {
 public:
  explicit InfeasibleDecomposition(FeasibilityReport report);
  const FeasibilityReport& report() const { return report_; }

 private:
  FeasibilityReport report_;
};

}  // namespace treecorr
