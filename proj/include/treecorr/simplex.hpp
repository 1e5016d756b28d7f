#pragma once

#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "treecorr/errors.hpp"
#include "treecorr/rational.hpp"

namespace treecorr::lp {

enum class Sense { kLessEqual, kGreaterEqual, kEqual };

/// minimize c'x subject to a x (sense) b and lower <= x <= upper.
/// Empty `lower` means x >= 0; a nullopt lower bound means the variable is free.
/// Empty `upper` means no upper bounds.
template <typename Scalar>
struct Problem {
  Vector<Scalar> c;
  Matrix<Scalar> a;
  std::vector<Sense> sense;
  Vector<Scalar> b;
  std::vector<std::optional<Scalar>> lower;
  std::vector<std::optional<Scalar>> upper;
};

template <typename Scalar>
struct Solution {
  Scalar value{};
  Vector<Scalar> x;
  /// One multiplier per row of `a`: value = b'y + bound terms, y >= 0 on >= rows, <= 0 on <= rows.
  Vector<Scalar> duals;
  std::size_t iterations = 0;
  Scalar duality_gap{};
};

struct Options {
  double tolerance = 1e-10;         // reduced-cost and feasibility tolerance (double mode)
  double pivot_tolerance = 1e-11;   // smallest admissible pivot magnitude (double mode)
  std::size_t stall_limit = 512;    // degenerate pivots before switching to Bland's rule
  std::size_t max_iterations = 0;   // 0: 50 * (rows + columns)
  std::uint64_t max_entries = 60'000'000;
  std::size_t max_size = 50'000;    // rows + columns
  bool check_gap = true;            // double mode: throw on a duality gap above 1e-9 (1 + |value|)
};

namespace detail {

inline std::string format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

template <typename Scalar>
struct Tol {
  static bool negative(const Scalar& v, double) { return v < 0; }
  static bool positive(const Scalar& v, double) { return v > 0; }
  static bool zero(const Scalar& v, double) { return v == 0; }
};

template <>
struct Tol<double> {
  static bool negative(double v, double tol) { return v < -tol; }
  static bool positive(double v, double tol) { return v > tol; }
  static bool zero(double v, double tol) { return std::abs(v) <= tol; }
};

template <typename Scalar>
class Tableau {
 public:
  using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Tableau(RowMatrix t, std::vector<std::size_t> basis, const Options& options)
      : t_(std::move(t)), basis_(std::move(basis)), options_(options) {}

  RowMatrix& table() { return t_; }
  const std::vector<std::size_t>& basis() const { return basis_; }
  std::size_t rows() const { return static_cast<std::size_t>(t_.rows()) - 1; }
  std::size_t cols() const { return static_cast<std::size_t>(t_.cols()) - 1; }
  const Scalar& rhs(std::size_t r) const { return t_(static_cast<Eigen::Index>(r), t_.cols() - 1); }
  /// Objective row is the last row; its entries are reduced costs, its rhs is -value.
  const Scalar& reduced(std::size_t j) const { return t_(t_.rows() - 1, static_cast<Eigen::Index>(j)); }

  void pivot(std::size_t row, std::size_t col) {
    const auto pr = static_cast<Eigen::Index>(row);
    const auto pc = static_cast<Eigen::Index>(col);
    const Scalar inv = Scalar(1) / t_(pr, pc);
    nonzero_.clear();
    for (Eigen::Index j = 0; j < t_.cols(); ++j) {
      if (t_(pr, j) != Scalar(0)) {
        t_(pr, j) *= inv;
        nonzero_.push_back(j);
      }
    }
    t_(pr, pc) = Scalar(1);
    for (Eigen::Index r = 0; r < t_.rows(); ++r) {
      if (r == pr) continue;
      const Scalar factor = t_(r, pc);
      if (factor == Scalar(0)) continue;
      for (Eigen::Index j : nonzero_) t_(r, j) -= factor * t_(pr, j);
      t_(r, pc) = Scalar(0);
    }
    basis_[row] = col;
    ++iterations_;
  }

  /// Runs the primal simplex on the current objective row. `allowed` masks entering columns.
  void optimize(const std::vector<bool>& allowed) {
    const std::size_t limit =
        options_.max_iterations ? options_.max_iterations : 50 * (rows() + cols()) + 1000;
    std::size_t stalled = 0;
    const double tol = options_.tolerance;
    while (true) {
      if (iterations_ > limit) throw NumericalFailure("simplex iteration limit reached");
      const bool bland = stalled >= options_.stall_limit;
      std::optional<std::size_t> enter;
      for (std::size_t j = 0; j < cols(); ++j) {
        if (!allowed[j] || !Tol<Scalar>::negative(reduced(j), tol)) continue;
        if (bland) {
          enter = j;
          break;
        }
        if (!enter || reduced(j) < reduced(*enter)) enter = j;
      }
      if (!enter) return;

      std::optional<std::size_t> leave;
      Scalar best{};
      const auto q = static_cast<Eigen::Index>(*enter);
      for (std::size_t r = 0; r < rows(); ++r) {
        const Scalar& coef = t_(static_cast<Eigen::Index>(r), q);
        if (!Tol<Scalar>::positive(coef, options_.pivot_tolerance)) continue;
        const Scalar ratio = rhs(r) / coef;
        if (!leave || ratio < best || (ratio == best && basis_[r] < basis_[*leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (!leave) throw Unbounded("linear program is unbounded along column " + std::to_string(*enter));
      stalled = Tol<Scalar>::zero(best, tol) ? stalled + 1 : 0;
      pivot(*leave, *enter);
    }
  }

  std::size_t iterations() const { return iterations_; }

 private:
  RowMatrix t_;
  std::vector<std::size_t> basis_;
  Options options_;
  std::vector<Eigen::Index> nonzero_;
  std::size_t iterations_ = 0;
};

}  // namespace detail

/// Two-phase dense tableau simplex, exact for Rational and toleranced for double.
/// Dantzig pricing with a switch to Bland's rule after repeated degenerate pivots.
template <typename Scalar>
Solution<Scalar> solve(const Problem<Scalar>& problem, const Options& options = {}) {
  const auto m0 = static_cast<std::size_t>(problem.a.rows());
  const auto n0 = static_cast<std::size_t>(problem.a.cols());
  if (static_cast<std::size_t>(problem.c.size()) != n0 || static_cast<std::size_t>(problem.b.size()) != m0 ||
      problem.sense.size() != m0)
    throw DimensionError("linear program dimensions are inconsistent");
  if (!problem.lower.empty() && problem.lower.size() != n0) throw DimensionError("lower bounds need one entry per variable");
  if (!problem.upper.empty() && problem.upper.size() != n0) throw DimensionError("upper bounds need one entry per variable");

  // Column map: x_j = shift_j + x+_j (- x-_j when free).
  std::vector<Scalar> shift(n0, Scalar(0));
  std::vector<bool> free(n0, false);
  for (std::size_t j = 0; j < n0; ++j) {
    if (!problem.lower.empty()) {
      if (problem.lower[j]) shift[j] = *problem.lower[j];
      else free[j] = true;
    }
  }
  std::vector<std::pair<std::size_t, Scalar>> upper_rows;  // (variable, upper - shift)
  for (std::size_t j = 0; j < n0 && !problem.upper.empty(); ++j)
    if (problem.upper[j]) {
      if (free[j]) throw InvalidArgument("upper bound on a free variable is not supported");
      const Scalar span = *problem.upper[j] - shift[j];
      if (span < Scalar(0)) throw InvalidArgument("variable " + std::to_string(j) + " has upper < lower");
      upper_rows.emplace_back(j, span);
    }

  const std::size_t m = m0 + upper_rows.size();
  std::size_t n_struct = 0;
  std::vector<std::size_t> pos(n0), neg(n0, SIZE_MAX);
  for (std::size_t j = 0; j < n0; ++j) {
    pos[j] = n_struct++;
    if (free[j]) neg[j] = n_struct++;
  }
  std::vector<int> slack_sign(m, 0);
  std::size_t n_slack = 0;
  for (std::size_t i = 0; i < m0; ++i)
    if (problem.sense[i] != Sense::kEqual) ++n_slack;
  n_slack += upper_rows.size();

  // Rows of the standard form: a' x' + s = b' with row signs making b' >= 0.
  Matrix<Scalar> a_std = Matrix<Scalar>::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n_struct + n_slack));
  Vector<Scalar> b_std(static_cast<Eigen::Index>(m));
  Vector<Scalar> c_std = Vector<Scalar>::Zero(static_cast<Eigen::Index>(n_struct + n_slack));
  Scalar constant(0);
  for (std::size_t j = 0; j < n0; ++j) {
    c_std(static_cast<Eigen::Index>(pos[j])) = problem.c(static_cast<Eigen::Index>(j));
    if (free[j]) c_std(static_cast<Eigen::Index>(neg[j])) = -problem.c(static_cast<Eigen::Index>(j));
    constant += problem.c(static_cast<Eigen::Index>(j)) * shift[j];
  }
  std::size_t slack = n_struct;
  std::vector<std::optional<std::size_t>> slack_of(m);
  for (std::size_t i = 0; i < m0; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    Scalar rhs = problem.b(r);
    for (std::size_t j = 0; j < n0; ++j) {
      const Scalar& v = problem.a(r, static_cast<Eigen::Index>(j));
      if (v == Scalar(0)) continue;
      a_std(r, static_cast<Eigen::Index>(pos[j])) = v;
      if (free[j]) a_std(r, static_cast<Eigen::Index>(neg[j])) = -v;
      rhs -= v * shift[j];
    }
    b_std(r) = rhs;
    if (problem.sense[i] == Sense::kLessEqual) a_std(r, static_cast<Eigen::Index>(slack)) = 1;
    if (problem.sense[i] == Sense::kGreaterEqual) a_std(r, static_cast<Eigen::Index>(slack)) = -1;
    if (problem.sense[i] != Sense::kEqual) slack_of[i] = slack++;
  }
  for (std::size_t u = 0; u < upper_rows.size(); ++u) {
    const auto r = static_cast<Eigen::Index>(m0 + u);
    a_std(r, static_cast<Eigen::Index>(pos[upper_rows[u].first])) = 1;
    a_std(r, static_cast<Eigen::Index>(slack)) = 1;
    slack_of[m0 + u] = slack++;
    b_std(r) = upper_rows[u].second;
  }
  for (std::size_t i = 0; i < m; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    if (b_std(r) < Scalar(0)) {
      a_std.row(r) = -a_std.row(r);
      b_std(r) = -b_std(r);
      slack_sign[i] = -1;
    } else {
      slack_sign[i] = 1;
    }
  }

  // Crash basis: a column that is a positive singleton in its row; artificials elsewhere.
  const std::size_t n_std = n_struct + n_slack;
  std::vector<std::optional<std::size_t>> crash(m);
  for (std::size_t j = 0; j < n_std; ++j) {
    std::optional<std::size_t> only;
    bool singleton = true;
    for (std::size_t i = 0; i < m && singleton; ++i) {
      if (a_std(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == Scalar(0)) continue;
      if (only) singleton = false;
      else only = i;
    }
    if (!singleton || !only || crash[*only]) continue;
    if (a_std(static_cast<Eigen::Index>(*only), static_cast<Eigen::Index>(j)) > Scalar(0)) crash[*only] = j;
  }
  std::size_t n_art = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (!crash[i]) ++n_art;

  const std::size_t total = n_std + n_art;
  if (m + total > options.max_size)
    throw BudgetExceeded("linear program with " + std::to_string(m) + " rows and " + std::to_string(total) +
                         " columns exceeds the size limit");
  if (static_cast<std::uint64_t>(m + 1) * (total + 1) > options.max_entries)
    throw BudgetExceeded("simplex tableau would need " + std::to_string((m + 1) * (total + 1)) + " entries");

  using Tab = detail::Tableau<Scalar>;
  typename Tab::RowMatrix t = Tab::RowMatrix::Zero(static_cast<Eigen::Index>(m + 1), static_cast<Eigen::Index>(total + 1));
  std::vector<std::size_t> basis(m);
  std::size_t art = n_std;
  for (std::size_t i = 0; i < m; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    t.row(r).head(static_cast<Eigen::Index>(n_std)) = a_std.row(r);
    t(r, static_cast<Eigen::Index>(total)) = b_std(r);
    if (crash[i]) {
      const Scalar scale = a_std(r, static_cast<Eigen::Index>(*crash[i]));
      if (scale != Scalar(1)) {
        t.row(r) /= scale;
      }
      basis[i] = *crash[i];
    } else {
      t(r, static_cast<Eigen::Index>(art)) = 1;
      basis[i] = art++;
    }
  }

  Tab tab(std::move(t), std::move(basis), options);
  auto& tt = tab.table();
  const auto obj = static_cast<Eigen::Index>(m);
  const double tol = options.tolerance;

  std::vector<bool> allowed(total, true);
  if (n_art > 0) {
    tt.row(obj).setZero();
    for (std::size_t j = n_std; j < total; ++j) tt(obj, static_cast<Eigen::Index>(j)) = 1;
    for (std::size_t i = 0; i < m; ++i)
      if (tab.basis()[i] >= n_std) tt.row(obj) -= tt.row(static_cast<Eigen::Index>(i));
    tab.optimize(allowed);
    const Scalar infeasibility = -tt(obj, static_cast<Eigen::Index>(total));
    if (detail::Tol<Scalar>::positive(infeasibility, tol * (1 + static_cast<double>(m))))
      throw InvalidArgument("linear program is infeasible");
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (tab.basis()[i] < n_std) continue;
      const auto r = static_cast<Eigen::Index>(i);
      for (std::size_t j = 0; j < n_std; ++j)
        if (!detail::Tol<Scalar>::zero(tt(r, static_cast<Eigen::Index>(j)), options.pivot_tolerance)) {
          tab.pivot(i, j);
          break;
        }
    }
    for (std::size_t j = n_std; j < total; ++j) allowed[j] = false;
  }

  tt.row(obj).setZero();
  for (std::size_t j = 0; j < n_std; ++j) tt(obj, static_cast<Eigen::Index>(j)) = c_std(static_cast<Eigen::Index>(j));
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t bj = tab.basis()[i];
    if (bj >= n_std) continue;
    const Scalar cb = c_std(static_cast<Eigen::Index>(bj));
    if (cb != Scalar(0)) tt.row(obj) -= cb * tt.row(static_cast<Eigen::Index>(i));
  }
  tab.optimize(allowed);

  Vector<Scalar> x_std = Vector<Scalar>::Zero(static_cast<Eigen::Index>(n_std));
  for (std::size_t i = 0; i < m; ++i)
    if (tab.basis()[i] < n_std) x_std(static_cast<Eigen::Index>(tab.basis()[i])) = tab.rhs(i);

  // Row multipliers y with c_std - a_std' y = reduced costs. The basis inverse is
  // carried by the crash/artificial columns of each row.
  Vector<Scalar> y(static_cast<Eigen::Index>(m));
  {
    std::size_t a_col = n_std;
    std::vector<std::size_t> identity_col(m);
    for (std::size_t i = 0; i < m; ++i) identity_col[i] = crash[i] ? *crash[i] : a_col++;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = identity_col[i];
      const Scalar cj = j < n_std ? c_std(static_cast<Eigen::Index>(j)) : Scalar(0);
      // The crash column was scaled to a unit vector, so a_std(i, j) = scale.
      const Scalar scale = j < n_std ? a_std(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) : Scalar(1);
      y(static_cast<Eigen::Index>(i)) = (cj - tab.reduced(j)) / scale;
    }
  }

  Solution<Scalar> out;
  out.iterations = tab.iterations();
  out.x = Vector<Scalar>(static_cast<Eigen::Index>(n0));
  for (std::size_t j = 0; j < n0; ++j) {
    Scalar v = shift[j] + x_std(static_cast<Eigen::Index>(pos[j]));
    if (free[j]) v -= x_std(static_cast<Eigen::Index>(neg[j]));
    out.x(static_cast<Eigen::Index>(j)) = v;
  }
  const Scalar primal = c_std.dot(x_std);
  const Scalar dual = b_std.dot(y);
  out.value = primal + constant;
  out.duality_gap = primal - dual;
  if constexpr (!ScalarTraits<Scalar>::kExact) {
    if (options.check_gap && std::abs(out.duality_gap) > 1e-9 * (1 + std::abs(out.value)))
      throw NumericalFailure("duality gap " + detail::format(out.duality_gap) + " exceeds tolerance after " +
                             std::to_string(out.iterations) + " pivots (value " + detail::format(out.value) + ")");
    const Vector<double> residual = a_std * x_std - b_std;
    if (residual.cwiseAbs().maxCoeff() > 1e-7 * (1 + b_std.cwiseAbs().maxCoeff()))
      throw NumericalFailure("primal residual " + detail::format(residual.cwiseAbs().maxCoeff()) + " too large");
  } else {
    if (out.duality_gap != 0) throw NumericalFailure("nonzero duality gap in exact mode");
  }

  out.duals = Vector<Scalar>(static_cast<Eigen::Index>(m0));
  for (std::size_t i = 0; i < m0; ++i)
    out.duals(static_cast<Eigen::Index>(i)) = slack_sign[i] < 0 ? Scalar(-y(static_cast<Eigen::Index>(i)))
                                                                : y(static_cast<Eigen::Index>(i));
  return out;
}

}  // namespace treecorr::lp
