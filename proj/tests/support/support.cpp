#include "support.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <set>

#include <Eigen/LU>

namespace treecorr::testing {

DependencyTree random_tree(int dim, Engine& engine, double grow) {
  std::vector<Pair> order;
  for (int k = 1; k <= dim; ++k)
    for (int l = k + 1; l <= dim; ++l) order.push_back(Pair{k, l});
  std::shuffle(order.begin(), order.end(), engine);

  std::set<std::uint64_t> family;
  for (int i = 1; i <= dim; ++i) family.insert(std::uint64_t{1} << (i - 1));
  NodeMap nodes;
  std::bernoulli_distribution extend(grow);
  for (const Pair& p : order) {
    const std::uint64_t bk = std::uint64_t{1} << (p.k - 1);
    const std::uint64_t bl = std::uint64_t{1} << (p.l - 1);
    std::vector<std::uint64_t> options;
    for (std::uint64_t a : family) {
      if (!(a & bl) || (a & bk)) continue;
      const std::uint64_t s = a | bk;
      if (s == (bk | bl)) continue;
      if (family.count(s & ~bl) && !family.count(s)) options.push_back(s);
    }
    std::uint64_t chosen = bk | bl;
    if (!options.empty() && extend(engine)) {
      std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
      chosen = options[pick(engine)];
    }
    family.insert(chosen);
    nodes[p] = Vertex(dim, chosen);
  }
  return validate_tree(dim, nodes);
}

DependencyTree random_tree_between(int lo, int hi, Engine& engine) {
  std::uniform_int_distribution<int> d(lo, hi);
  return random_tree(d(engine), engine);
}

Rational random_rational(Engine& engine, int max_num, int max_den) {
  std::uniform_int_distribution<int> num(0, max_num);
  std::uniform_int_distribution<int> den(1, max_den);
  return Rational(num(engine), den(engine));
}

Vector<Rational> random_nonnegative(std::size_t n, Engine& engine, double zero, int max_num, int max_den) {
  std::bernoulli_distribution is_zero(zero);
  Vector<Rational> out(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out(i) = is_zero(engine) ? Rational(0) : random_rational(engine, max_num, max_den);
  return out;
}

long brute_moebius(const std::vector<std::uint64_t>& family, std::uint64_t x, std::uint64_t y) {
  auto below = [](std::uint64_t a, std::uint64_t b) { return (a & ~b) == 0; };
  if (!below(y, x)) return 0;
  std::set<std::uint64_t> poset(family.begin(), family.end());
  poset.insert(x);
  poset.insert(y);
  // Elements of the interval [y, x], sorted so every element follows its subsets.
  std::vector<std::uint64_t> interval;
  for (std::uint64_t z : poset)
    if (below(y, z) && below(z, x)) interval.push_back(z);
  std::sort(interval.begin(), interval.end(), [](std::uint64_t a, std::uint64_t b) {
    const int pa = __builtin_popcountll(a), pb = __builtin_popcountll(b);
    return pa != pb ? pa < pb : a < b;
  });
  std::map<std::uint64_t, long> mu;
  for (std::uint64_t z : interval) {
    if (z == y) {
      mu[z] = 1;
      continue;
    }
    long sum = 0;
    for (const auto& [w, m] : mu)
      if (w != z && below(w, z)) sum += m;
    mu[z] = -sum;
  }
  return mu.at(x);
}

Matrix<Rational> brute_covariance(const DependencyTree& tree, const Vector<Rational>& sigma2) {
  const int d = tree.dim();
  Matrix<Rational> out(d, d);
  for (int i = 1; i <= d; ++i)
    for (int j = 1; j <= d; ++j) {
      Rational s(0);
      for (std::size_t c = 0; c < tree.size(); ++c) {
        const std::uint64_t bits = tree.node(c).bits();
        if ((bits >> (i - 1) & 1U) && (bits >> (j - 1) & 1U)) s += sigma2(static_cast<Eigen::Index>(c));
      }
      out(i - 1, j - 1) = s;
    }
  return out;
}

Vector<Rational> gauss_solve(Matrix<Rational> a, Vector<Rational> b) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    while (pivot < n && a(pivot, col) == 0) ++pivot;
    if (pivot == n) throw std::runtime_error("singular system");
    a.row(col).swap(a.row(pivot));
    std::swap(b(col), b(pivot));
    const Rational inv = Rational(1) / a(col, col);
    a.row(col) *= inv;
    b(col) *= inv;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == col || a(r, col) == 0) continue;
      const Rational f = a(r, col);
      a.row(r) -= f * a.row(col);
      b(r) -= f * b(col);
    }
  }
  return b;
}

std::map<std::vector<int>, Rational> brute_binomial_pmf(const BinomialModel& model) {
  const DependencyTree& tree = model.tree;
  const int d = tree.dim();
  const Rational q = 1 - model.p;
  // Scalar binomial pmf by the product formula.
  auto pmf = [&](std::int64_t n, std::int64_t k) {
    Integer choose = 1;
    for (std::int64_t i = 0; i < k; ++i) choose = choose * (n - i) / (i + 1);
    Rational out(choose);
    for (std::int64_t i = 0; i < k; ++i) out *= model.p;
    for (std::int64_t i = 0; i < n - k; ++i) out *= q;
    return out;
  };
  std::map<std::vector<int>, Rational> out;
  std::vector<int> x(static_cast<std::size_t>(d), 0);
  std::function<void(std::size_t, Rational)> walk = [&](std::size_t c, Rational weight) {
    if (weight == 0) return;
    if (c == tree.size()) {
      out[x] += weight;
      return;
    }
    const auto n = model.counts[c];
    const auto members = tree.node(c).members();
    for (std::int64_t k = 0; k <= n; ++k) {
      for (int i : members) x[static_cast<std::size_t>(i - 1)] += static_cast<int>(k);
      walk(c + 1, weight * pmf(n, k));
      for (int i : members) x[static_cast<std::size_t>(i - 1)] -= static_cast<int>(k);
    }
  };
  walk(0, Rational(1));
  return out;
}

double enumerate_lp_min(const Matrix<double>& a, const Vector<double>& b, const Vector<double>& c,
                        const Vector<double>& lo, const Vector<double>& hi) {
  const Eigen::Index n = c.size();
  const Eigen::Index m = a.rows() + 2 * n;
  Matrix<double> g(m, n);
  Vector<double> h(m);
  g.topRows(a.rows()) = a;
  h.head(a.rows()) = b;
  for (Eigen::Index i = 0; i < n; ++i) {
    g.row(a.rows() + i).setZero();
    g(a.rows() + i, i) = 1;
    h(a.rows() + i) = lo(i);
    g.row(a.rows() + n + i).setZero();
    g(a.rows() + n + i, i) = -1;
    h(a.rows() + n + i) = -hi(i);
  }
  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> mask(static_cast<std::size_t>(m), false);
  std::fill(mask.begin(), mask.begin() + n, true);
  do {
    Matrix<double> gs(n, n);
    Vector<double> hs(n);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < m; ++i)
      if (mask[static_cast<std::size_t>(i)]) {
        gs.row(r) = g.row(i);
        hs(r) = h(i);
        ++r;
      }
    Eigen::FullPivLU<Matrix<double>> lu(gs);
    if (lu.rank() < n) continue;
    const Vector<double> x = lu.solve(hs);
    if (((g * x - h).array() >= -1e-9).all()) best = std::min(best, c.dot(x));
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

EmpiricalMoments empirical_moments(const Matrix<double>& draws) {
  const auto n = static_cast<double>(draws.rows());
  EmpiricalMoments out;
  out.means = draws.colwise().mean().transpose();
  const Matrix<double> centered = draws.rowwise() - out.means.transpose();
  const Eigen::Index d = draws.cols();
  out.covariance = Matrix<double>(d, d);
  out.covariance_se = Matrix<double>(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const Vector<double> prod = centered.col(i).cwiseProduct(centered.col(j));
      const double mean = prod.mean();
      const double var = (prod.array() - mean).square().sum() / (n - 1);
      out.covariance(i, j) = prod.sum() / (n - 1);
      out.covariance_se(i, j) = std::sqrt(var / n);
    }
  return out;
}

}  // namespace treecorr::testing
