#pragma once

#include <cstdint>
#include <random>
#include <variant>
#include <vector>

#include "treecorr/covariance.hpp"
#include "treecorr/dependency_tree.hpp"
#include "treecorr/rational.hpp"

namespace treecorr {

/// X_i = sum of independent Binomial(counts(k,l), p) components over nodes containing i.
struct BinomialModel {
  DependencyTree tree;
  Rational p;
  std::vector<std::int64_t> counts;  // pair order
};

/// Common-shock Poisson vector; the intensities are also the Lévy weights a_{k,l}.
struct PoissonModel {
  DependencyTree tree;
  Vector<Rational> intensities;
};

struct GaussianModel {
  DependencyTree tree;
  Vector<Rational> variances;
  Vector<Rational> component_means;
};

/// Shape-scale convention with one shared scale: Var = shape * theta^2.
struct GammaModel {
  DependencyTree tree;
  Rational theta;
  Vector<Rational> shapes;
};

using Model = std::variant<BinomialModel, PoissonModel, GaussianModel, GammaModel>;

Family family_of(const Model& model);
const DependencyTree& tree_of(const Model& model);
int dim_of(const Model& model);

/// Component variances sigma2_{k,l}.
VarianceDecomposition<Rational> decomposition(const Model& model);
/// Component means m_{k,l}.
Vector<Rational> component_means(const Model& model);

/// M(c, i) = 1 when index i belongs to node c.
template <typename Scalar>
Matrix<Scalar> incidence_matrix(const DependencyTree& tree) {
  Matrix<Scalar> m = Matrix<Scalar>::Zero(static_cast<Eigen::Index>(tree.size()), tree.dim());
  for (std::size_t c = 0; c < tree.size(); ++c)
    for (int i : tree.node(c).members()) m(static_cast<Eigen::Index>(c), i - 1) = Scalar(1);
  return m;
}

template <typename Scalar>
struct Moments {
  Vector<Scalar> means;
  Matrix<Scalar> covariance;
};

Moments<Rational> exact_moments(const Model& model);

/// Builds a model of the given family whose covariance is exactly `cov`.
/// Gaussian target means are carried by the leaf components; for the other
/// families means are fixed by the covariance and must agree (MeanMismatch).
Model construct(const DependencyTree& tree, const CovarianceSpec<Rational>& cov, Family family,
                const FamilyParams& params = {});

using Engine = std::mt19937_64;

/// Engine for stream `stream` of `seed`; distinct streams are independent.
Engine make_engine(std::uint64_t seed, std::uint64_t stream = 0);

/// Draws the independent components of a model.
class ComponentSampler {
 public:
  explicit ComponentSampler(const Model& model);

  std::size_t size() const { return kinds_.size(); }
  /// Fills `out` (length = number of components) with one draw.
  void draw(Engine& engine, double* out);

 private:
  enum class Kind { kZero, kBinomial, kPoisson, kNormal, kGamma };
  std::vector<Kind> kinds_;
  std::vector<std::binomial_distribution<std::int64_t>> binomial_;
  std::vector<std::poisson_distribution<std::int64_t>> poisson_;
  std::vector<std::normal_distribution<double>> normal_;
  std::vector<std::gamma_distribution<double>> gamma_;
  std::vector<std::size_t> slot_;
};

/// n i.i.d. draws, one per row. Deterministic for a given (seed, stream).
Matrix<double> sample(const Model& model, std::size_t n, std::uint64_t seed, std::uint64_t stream = 0);

/// Binomial approximation of a Gaussian target: counts = round(n sigma2 / (pq)),
/// standardized as U = (X - E[X]) / sqrt(n) + target means.
struct CltBridge {
  BinomialModel binomial;
  std::int64_t n = 1;
  Vector<Rational> offset;        // E[X]
  Vector<Rational> target_means;  // E[U]
};

CltBridge clt_bridge(const GaussianModel& target, std::int64_t n, const Rational& p = Rational(1, 2));

/// Exact moments of the standardized bridge: means = target means, covariance = Cov(X) / n.
Moments<Rational> bridge_moments(const CltBridge& bridge);

/// Entrywise bound on |Cov(U) - target covariance|: (#components) * pq / (2n).
Rational bridge_error_bound(const CltBridge& bridge);

Matrix<double> sample_bridge(const CltBridge& bridge, std::size_t n_samples, std::uint64_t seed,
                             std::uint64_t stream = 0);

}  // namespace treecorr
