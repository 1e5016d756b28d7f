#pragma once

// Test-side generators and brute-force oracles. Nothing here calls the
// library routine it is used to check.

#include <cstdint>
#include <map>
#include <vector>

#include "treecorr/dependency_tree.hpp"
#include "treecorr/models.hpp"
#include "treecorr/rational.hpp"

namespace treecorr::testing {

/// Random tree satisfying (H): pairs are visited in random order and each picks
/// {k,l} or an extension A + {k} of an existing node A with l in A such that
/// both masked copies are already present. `grow` is the chance of extending.
DependencyTree random_tree(int dim, Engine& engine, double grow = 0.7);

/// Random tree of random dimension in [lo, hi].
DependencyTree random_tree_between(int lo, int hi, Engine& engine);

Rational random_rational(Engine& engine, int max_num = 9, int max_den = 7);
/// Entries are zero with probability `zero`, else a random nonnegative rational.
Vector<Rational> random_nonnegative(std::size_t n, Engine& engine, double zero = 0.2, int max_num = 9,
                                    int max_den = 7);

/// Möbius function of (family ∪ {x, y}, ⊆) from the sum-over-intervals definition,
/// evaluated bottom-up: mu(y,y) = 1, mu(z,y) = -sum_{y <= w < z} mu(w,y).
/// Returns mu(x, y) with the convention that the first argument is the upper element.
long brute_moebius(const std::vector<std::uint64_t>& family, std::uint64_t x, std::uint64_t y);

/// Cov(X_i, X_j) = sum of sigma2 over nodes containing both i and j.
Matrix<Rational> brute_covariance(const DependencyTree& tree, const Vector<Rational>& sigma2);

/// Solves A x = b by fraction-exact Gauss-Jordan elimination; A must be invertible.
Vector<Rational> gauss_solve(Matrix<Rational> a, Vector<Rational> b);

/// Exact joint pmf of a binomial model by enumerating every tuple of component values.
std::map<std::vector<int>, Rational> brute_binomial_pmf(const BinomialModel& model);

/// min c'x over { x : A x >= b, lo <= x <= hi } by enumerating all basic points
/// (n active constraints at a time). Small n only.
double enumerate_lp_min(const Matrix<double>& a, const Vector<double>& b, const Vector<double>& c,
                        const Vector<double>& lo, const Vector<double>& hi);

/// Sample mean and covariance with per-entry standard errors of the covariance.
struct EmpiricalMoments {
  Vector<double> means;
  Matrix<double> covariance;
  Matrix<double> covariance_se;
};
EmpiricalMoments empirical_moments(const Matrix<double>& draws);

}  // namespace treecorr::testing
