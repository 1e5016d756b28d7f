#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "treecorr/hypercube.hpp"
#include "treecorr/models.hpp"
#include "treecorr/rational.hpp"

namespace treecorr {

/// prod_i 1{x_i >= t_i}; indices without a threshold are unconstrained.
struct OrthantIndicator {
  std::vector<std::pair<int, Rational>> thresholds;  // (index, t)
};

enum class Outer {
  kSquare,       // s^2
  kExpCapped,    // sum_{r<=6} s^r / r!, convex on the whole line
  kPositivePart  // (s - shift)_+^power
};

/// g(sum_i c_i x_i) with c >= 0 and g convex.
struct ConvexOfSum {
  std::vector<Rational> coefficients;  // length d
  Outer outer = Outer::kSquare;
  Rational shift{0};
  int power = 1;
};

struct PairMin {
  int i = 1;
  int j = 2;
};

struct PairProduct {
  int i = 1;
  int j = 2;
};

class SupermodularFunction;

struct Mixture {
  std::vector<std::pair<Rational, std::shared_ptr<const SupermodularFunction>>> terms;  // weights >= 0
};

/// Closed-form supermodular function on R^d, evaluable exactly or in double.
class SupermodularFunction {
 public:
  using Form = std::variant<OrthantIndicator, ConvexOfSum, PairMin, PairProduct, Mixture>;

  SupermodularFunction(int dim, Form form);

  int dim() const { return dim_; }
  const Form& form() const { return form_; }
  std::string name() const;
  /// Nondecreasing in every coordinate on the nonnegative orthant.
  bool nondecreasing() const;

  Rational operator()(std::span<const Rational> x) const;
  double operator()(std::span<const double> x) const;
  /// On a hypercube vertex (0/1 coordinates).
  Rational at_vertex(const Vertex& v) const;

 private:
  template <typename Scalar>
  Scalar evaluate(std::span<const Scalar> x) const;

  int dim_;
  Form form_;
  std::vector<double> numeric_;  // parameters in double precision, in form order
};

/// Fixed members (orthants at 1, squares of pair sums, minima, products) plus
/// `random_count` random members drawn from `engine`.
std::vector<SupermodularFunction> make_battery(int dim, Engine& engine, int random_count = 8, int max_threshold = 3);

/// Deterministic members only.
std::vector<SupermodularFunction> standard_battery(int dim);

/// Checks Phi(x v y) + Phi(x ^ y) >= Phi(x) + Phi(y) on `pairs` random integer
/// point pairs in {-range..range}^d (exact arithmetic). Returns the first
/// violating pair, if any.
struct SupermodularityDefect {
  std::vector<Rational> x;
  std::vector<Rational> y;
  Rational gap;  // lhs - rhs < 0
};
std::optional<SupermodularityDefect> self_test(const SupermodularFunction& f, Engine& engine, int pairs = 200,
                                               int range = 4, bool nonnegative_only = false);

}  // namespace treecorr
