#pragma once

#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "treecorr/battery.hpp"
#include "treecorr/models.hpp"

namespace treecorr {

enum class Relation { kSupermodular, kIncreasingSupermodular, kConvex };
enum class Holds { kYes, kNo, kNotDecided };

const char* relation_name(Relation r);
Relation parse_relation(std::string_view name);  // "sm", "ism", "cx" or full names
const char* holds_name(Holds h);

struct EntryComparison {
  int i = 0;
  int j = 0;  // i == j for means and variances
  Rational x;
  Rational y;
};

/// Why a verdict is `no`. `kind` is one of mean, variance, covariance,
/// product_moment, sum_variance, levy.
struct Witness {
  std::string kind;
  int i = 0;
  int j = 0;
  std::string function;     // test function for levy witnesses
  std::optional<Rational> value;  // e.g. E[phi(Y)] - E[phi(X)] at the Lévy level
};

struct OrderingVerdict {
  Relation relation = Relation::kSupermodular;
  Holds holds = Holds::kNotDecided;
  std::vector<EntryComparison> means;
  std::vector<EntryComparison> covariances;  // i <= j
  std::optional<Witness> witness;
  std::vector<std::string> notes;
};

/// Equal means and Cov_X <= Cov_Y off the diagonal (with equal variances).
/// `no` whenever a necessary condition fails; `yes` for binomial (same p) and
/// Poisson on a common tree and for Gaussian vectors; otherwise not decided.
OrderingVerdict check_supermodular(const Model& x, const Model& y);

/// Sums of independent parts X = sum X_r, Y = sum Y_r: `yes` when every part
/// pair is `yes` (closure under convolution), otherwise not decided.
OrderingVerdict check_supermodular_sum(const std::vector<Model>& xs, const std::vector<Model>& ys);

/// E[X_i] <= E[Y_i] and off-diagonal covariance dominance.
OrderingVerdict check_increasing_supermodular(const Model& x, const Model& y);

/// Poisson only: holds iff the Lévy measures coincide.
OrderingVerdict check_convex(const Model& x, const Model& y);

/// Real-valued function on hypercube vertices.
class VertexFunction {
 public:
  using Callable = std::function<Rational(const Vertex&)>;

  VertexFunction(std::string name, Callable f) : name_(std::move(name)), f_(std::move(f)) {}
  /// Values given on finitely many vertices; other lookups throw MissingVertex.
  static VertexFunction table(std::string name, std::unordered_map<Vertex, Rational, VertexHash> values);
  static VertexFunction from_battery(const SupermodularFunction& f);

  const std::string& name() const { return name_; }
  Rational operator()(const Vertex& v) const { return f_(v); }

 private:
  std::string name_;
  Callable f_;
};

/// max(0, x_l - x_k - sum_{a not in e} x_a): convex, four-term bracket -1 at (k,l).
VertexFunction convex_witness(const Vertex& e, int k, int l);
/// max(0, x_k + x_l - 1 - sum_{a not in e} x_a): convex, four-term bracket +1 at (k,l).
VertexFunction convex_witness_plus(const Vertex& e, int k, int l);
/// max(0, sum_{a in v} x_a - sum_{a not in v} x_a - |v| + 1): the indicator of v on C_d.
VertexFunction vertex_indicator(const Vertex& v);
VertexFunction coordinate_sum();
VertexFunction coordinate(int i, int sign = 1);
VertexFunction product(int i, int j);
VertexFunction nonzero_indicator();

/// phi(e_{i,j}) + phi(e_{i,j} \ {i,j}) - phi(e_{i,j} \ {i}) - phi(e_{i,j} \ {j}).
Rational bracket(const DependencyTree& tree, Pair p, const VertexFunction& phi);

struct LevyFunctional {
  Rational direct;            // sum a_{k,l} phi(e_{k,l})
  Rational covariance_form;   // sum E[X_i] phi(e_i) + sum_{i<j} Cov(X_i,X_j) bracket_{i,j}
};

/// Both evaluations; throws Inconsistency if they differ. Requires phi(0) = 0.
LevyFunctional levy_functional(const PoissonModel& model, const VertexFunction& phi);

/// int phi dnu - int phi dmu for X ~ mu, Y ~ nu, by direct summation; when the
/// trees coincide and the means agree it is cross-checked against the
/// covariance form.
Rational levy_difference(const PoissonModel& x, const PoissonModel& y, const VertexFunction& phi);

/// sum_{i<j} (Cov(Y) - Cov(X))_{i,j} bracket_{i,j}(phi). Throws TreeMismatch or MeanMismatch.
Rational levy_difference_covariance_form(const PoissonModel& x, const PoissonModel& y, const VertexFunction& phi);

/// Coupled pair (X_A, X_B) where B is given and A moves one unit of count from
/// (k,l) and its grandchild to the two children, so Cov_B(k,l) = Cov_A(k,l) + pq.
struct BinomialCoupling {
  BinomialModel a;
  BinomialModel b;
  Pair pair;
  DependencyTree::Links links;
};

/// Throws CouplingUnavailable when count_B(k,l) < 1, or when the grandchild is a
/// nonempty vertex that is not a node or has count_B < 1.
BinomialCoupling couple_binomial_increment(const BinomialModel& b, Pair pair);

/// n rows of [X_A(1..d), X_B(1..d)] sharing all component draws, with two fresh
/// Bernoulli(p) variables U, V moved between (k,l), the children and the grandchild.
Matrix<double> sample_coupled(const BinomialCoupling& coupling, std::size_t n, std::uint64_t seed,
                              std::uint64_t stream = 0);

/// The coupled pair reduced to the variables at positions k and l:
/// z_k = U, z_l = U (left) or V (right), others U + V. Returns
/// (E[phi(left)], E[phi(right)]) over the four atoms of (U, V).
std::pair<Rational, Rational> four_atom_expectations(const SupermodularFunction& phi, Pair pair, const Rational& p);

}  // namespace treecorr
