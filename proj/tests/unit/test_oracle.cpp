#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"
#include "treecorr/io.hpp"
#include "treecorr/oracle.hpp"
#include "treecorr/ordering.hpp"
#include "treecorr/simplex.hpp"

using namespace treecorr;

namespace {

PoissonModel poisson2(Rational a11, Rational a22, Rational a12) {
  Vector<Rational> a(3);
  a(static_cast<Eigen::Index>(pair_index(2, Pair{1, 1}))) = a11;
  a(static_cast<Eigen::Index>(pair_index(2, Pair{2, 2}))) = a22;
  a(static_cast<Eigen::Index>(pair_index(2, Pair{1, 2}))) = a12;
  return PoissonModel{build_pairwise(2), a};
}

BinomialModel binomial2(std::int64_t n11, std::int64_t n22, std::int64_t n12, Rational p = Rational(1, 2)) {
  std::vector<std::int64_t> counts(3);
  counts[pair_index(2, Pair{1, 1})] = n11;
  counts[pair_index(2, Pair{2, 2})] = n22;
  counts[pair_index(2, Pair{1, 2})] = n12;
  return BinomialModel{build_pairwise(2), p, counts};
}

/// Global supermodularity of a grid function: every pair of points.
template <typename Scalar>
bool globally_supermodular(const TruncatedGrid& grid, const std::vector<Scalar>& phi, double tol) {
  const std::size_t n = grid.points();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto x = grid.point(a), y = grid.point(b);
      std::vector<int> lo(x.size()), hi(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        lo[i] = std::min(x[i], y[i]);
        hi[i] = std::max(x[i], y[i]);
      }
      const auto gap = phi[grid.index(hi)] + phi[grid.index(lo)] - phi[a] - phi[b];
      if constexpr (std::is_same_v<Scalar, double>) {
        if (gap < -tol) return false;
      } else {
        if (gap < 0) return false;
      }
    }
  return true;
}

}  // namespace

TEST_CASE("simplex on small problems") {
  lp::Problem<double> p1;
  p1.c = Vector<double>::Constant(1, 1.0);
  p1.a = Matrix<double>(0, 1);
  p1.b = Vector<double>(0);
  p1.lower = {-1.0};
  p1.upper = {1.0};
  CHECK(lp::solve(p1).value == Catch::Approx(-1));

  lp::Problem<Rational> p2;
  p2.c = Vector<Rational>(2);
  p2.c << -1, -1;
  p2.a = Matrix<Rational>(1, 2);
  p2.a << 1, 1;
  p2.b = Vector<Rational>::Constant(1, Rational(1));
  p2.sense = {lp::Sense::kLessEqual};
  p2.upper = {Rational(1), Rational(1)};
  const auto s2 = lp::solve(p2);
  CHECK(s2.value == -1);
  CHECK(s2.duality_gap == 0);

  lp::Problem<double> unbounded;
  unbounded.c = Vector<double>::Constant(1, -1.0);
  unbounded.a = Matrix<double>(0, 1);
  unbounded.b = Vector<double>(0);
  CHECK_THROWS_AS(lp::solve(unbounded), Unbounded);

  lp::Problem<double> infeasible;
  infeasible.c = Vector<double>::Constant(1, 1.0);
  infeasible.a = Matrix<double>::Constant(1, 1, 1.0);
  infeasible.b = Vector<double>::Constant(1, -1.0);
  infeasible.sense = {lp::Sense::kEqual};
  CHECK_THROWS_AS(lp::solve(infeasible), InvalidArgument);
}

TEST_CASE("simplex agrees with vertex enumeration on random boxed problems") {
  Engine engine = make_engine(51);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_int_distribution<int> small(-3, 3);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 3, m = 1 + trial % 4;
    Matrix<double> a(m, n);
    Vector<double> b(m), c(n);
    for (int r = 0; r < m; ++r) {
      for (int j = 0; j < n; ++j) a(r, j) = small(engine);
      b(r) = small(engine) - 4;  // keeps x = 0 feasible
    }
    for (int j = 0; j < n; ++j) c(j) = u(engine);
    const Vector<double> lo = Vector<double>::Constant(n, -1), hi = Vector<double>::Constant(n, 1);
    lp::Problem<double> prob;
    prob.c = c;
    prob.a = a;
    prob.b = b;
    prob.sense.assign(static_cast<std::size_t>(m), lp::Sense::kGreaterEqual);
    prob.lower.assign(static_cast<std::size_t>(n), -1.0);
    prob.upper.assign(static_cast<std::size_t>(n), 1.0);
    const auto s = lp::solve(prob);
    CHECK(s.value == Catch::Approx(testing::enumerate_lp_min(a, b, c, lo, hi)).margin(1e-9));
    CHECK(std::abs(s.duality_gap) <= 1e-9 * (1 + std::abs(s.value)));

    lp::Problem<Rational> exact;
    exact.c = Vector<Rational>(n);
    for (int j = 0; j < n; ++j) exact.c(j) = Rational(static_cast<int>(std::round(c(j) * 100)), 100);
    exact.a = convert<Rational>(a);
    exact.b = convert<Rational>(Matrix<double>(b));
    exact.sense = prob.sense;
    exact.lower.assign(static_cast<std::size_t>(n), Rational(-1));
    exact.upper.assign(static_cast<std::size_t>(n), Rational(1));
    const auto se = lp::solve(exact);
    CHECK(to_double(se.value) ==
          Catch::Approx(testing::enumerate_lp_min(a, b, Vector<double>(convert<double>(Matrix<Rational>(exact.c))), lo, hi)).margin(1e-12));
  }
}

TEST_CASE("local constraints") {
  const TruncatedGrid grid{2, 2};
  CHECK(grid.points() == 9);
  CHECK(local_constraints<double>(grid, false).rows() == 4);
  CHECK(local_constraints<double>(grid, true).rows() == 4 + 12);
  const TruncatedGrid g3{3, 1};
  CHECK(local_constraints<Rational>(g3, false).rows() == 3 * 2);
  const std::vector<int> x{1, 0, 1};
  CHECK(g3.point(g3.index(x)) == x);
}

TEST_CASE("identical vectors are certified with value zero") {
  const Model b = binomial2(1, 2, 1, Rational(1, 3));
  const auto exact = certify_exact(b, b);
  CHECK(exact.verdict == CertificateVerdict::kCertified);
  CHECK(exact.value == 0);
  CHECK(exact.defect_x == 0);
  const Model p = poisson2(Rational(1, 2), Rational(1, 3), Rational(1, 4));
  const auto fl = certify(p, p);
  CHECK(fl.verdict == CertificateVerdict::kCertified);
  CHECK(std::abs(fl.value) <= fl.threshold);
}

TEST_CASE("two-dimensional Poisson example") {
  const Model x = poisson2(1, 1, 0), y = poisson2(0, 0, 1);
  OracleOptions options;
  options.cap = 8;
  const auto forward = certify(x, y, options);
  CHECK(forward.verdict == CertificateVerdict::kCertified);
  CHECK(check_supermodular(x, y).holds == Holds::kYes);

  const auto reverse = certify(y, x, options);
  CHECK(reverse.verdict == CertificateVerdict::kViolated);
  CHECK(reverse.value < -0.5);
  CHECK(check_supermodular(y, x).holds == Holds::kNo);
  CHECK(globally_supermodular(reverse.grid, reverse.phi, 1e-7));
  for (double v : reverse.phi) CHECK(std::abs(v) <= 1 + 1e-9);

  // Shrinking the violating function keeps it feasible and scales its value.
  std::vector<double> half(reverse.phi);
  for (auto& v : half) v *= 0.5;
  CHECK(globally_supermodular(reverse.grid, half, 1e-7));
}

TEST_CASE("hand-built two-by-two instance matches vertex enumeration") {
  const Model independent = binomial2(1, 1, 0), comonotone = binomial2(0, 0, 1);
  for (const auto& [x, y] : {std::pair{independent, comonotone}, std::pair{comonotone, independent}}) {
    OracleOptions options;
    options.cap = 1;
    const auto cert = certify_exact(x, y, options);
    const auto px = exact_truncated_pmf<double>(x, 1), py = exact_truncated_pmf<double>(y, 1);
    Vector<double> c(4);
    for (std::size_t i = 0; i < 4; ++i) {
      const auto pt = cert.grid.point(i);
      c(static_cast<Eigen::Index>(i)) = py.at(pt) - px.at(pt);
    }
    const Matrix<double> d = local_constraints<double>(cert.grid, false);
    const double expected = testing::enumerate_lp_min(d, Vector<double>::Zero(d.rows()), c,
                                                      Vector<double>::Constant(4, -1), Vector<double>::Constant(4, 1));
    CHECK(to_double(cert.value) == Catch::Approx(expected).margin(1e-12));
    CHECK(certify(x, y, options).value == Catch::Approx(expected).margin(1e-9));
  }
}

TEST_CASE("exact and float oracles agree on random binomial pairs") {
  Engine engine = make_engine(52);
  std::uniform_int_distribution<int> count(0, 2);
  for (int trial = 0; trial < 12; ++trial) {
    const Model x = binomial2(count(engine), count(engine), count(engine));
    const Model y = binomial2(count(engine), count(engine), count(engine));
    const auto e = certify_exact(x, y);
    const auto f = certify(x, y);
    CHECK(e.verdict == f.verdict);
    if (e.verdict == CertificateVerdict::kViolated) CHECK(to_double(e.value) == Catch::Approx(f.value).margin(1e-9));
    if (e.verdict == CertificateVerdict::kViolated)
      CHECK(globally_supermodular(e.grid, e.phi, 0));
    const auto v = check_supermodular(x, y);
    if (v.holds == Holds::kYes) CHECK(e.verdict == CertificateVerdict::kCertified);
    if (v.holds == Holds::kNo) CHECK(e.verdict == CertificateVerdict::kViolated);
  }
}

TEST_CASE("monotone variant") {
  const Model x = poisson2(Rational(1, 4), Rational(1, 4), 0);
  const Model y = poisson2(Rational(1, 4), Rational(1, 4), Rational(1, 4));
  OracleOptions options;
  options.monotone = true;
  CHECK(certify(x, y, options).verdict == CertificateVerdict::kCertified);
  CHECK(certify(y, x, options).verdict == CertificateVerdict::kViolated);
  options.monotone = false;
  CHECK(certify(x, y, options).verdict == CertificateVerdict::kViolated);
}

TEST_CASE("oracle errors") {
  const Model g = GaussianModel{build_pairwise(2), Vector<Rational>::Constant(3, Rational(1)),
                                Vector<Rational>::Constant(3, Rational(0))};
  CHECK_THROWS_AS(certify(g, g), UnsupportedFamily);
  const Model p = poisson2(2, 2, 2);
  OracleOptions tight;
  tight.cap = 1;
  CHECK_THROWS_AS(certify(p, p, tight), DegenerateMass);
  OracleOptions small;
  small.budget = 100;
  CHECK_THROWS_AS(certify(p, p, small), BudgetExceeded);
  CHECK_THROWS_AS(certify(p, Model(PoissonModel{build_pairwise(3), Vector<Rational>::Constant(6, Rational(1))})),
                  DimensionError);
}

TEST_CASE("grid cap follows the tail policy") {
  const Model x = poisson2(1, 1, 0), y = poisson2(0, 0, 1);
  const int cap = grid_cap(x, y);
  double tail = 0;
  for (int i = 0; i < 2; ++i) tail += poisson_tail(1.0, cap);
  CHECK(tail < 1e-10);
  CHECK(2 * poisson_tail(1.0, cap - 1) >= 1e-10);
  CHECK(grid_cap(binomial2(1, 2, 3), binomial2(0, 0, 4)) == 5);
}

TEST_CASE("battery members are supermodular") {
  Engine engine = make_engine(53);
  for (int d = 1; d <= 5; ++d)
    for (const auto& f : make_battery(d, engine)) {
      CHECK_FALSE(self_test(f, engine, 100, 4, false).has_value());
      if (f.nondecreasing()) CHECK_FALSE(self_test(f, engine, 100, 4, true).has_value());
    }
}

TEST_CASE("battery estimates") {
  Engine engine = make_engine(54);
  const auto battery = make_battery(2, engine);
  const Model x = poisson2(1, 1, 0);
  for (const auto& e : battery_estimate(x, x, battery, 50000, 5)) {
    CHECK_FALSE(e.flagged);
    CHECK(std::abs(e.estimate) <= 5 * e.standard_error + 1e-12);
  }
  const Model y = poisson2(0, 0, 1);
  bool product_flagged = false;
  for (const auto& e : battery_estimate(y, x, battery, 50000, 6))
    if (e.function == "x1*x2") product_flagged = e.flagged;
  CHECK(product_flagged);

  const auto tree = build_pairwise(2);
  GaussianModel g1{tree, Vector<Rational>::Constant(3, Rational(1)), Vector<Rational>::Constant(3, Rational(0))};
  GaussianModel g2 = g1;
  g2.variances << Rational(1, 2), Rational(3, 2), Rational(1, 2);
  REQUIRE(check_supermodular(g1, g2).holds == Holds::kYes);
  for (const auto& e : battery_estimate(g1, g2, battery, 200000, 7)) CHECK_FALSE(e.flagged);
}

TEST_CASE("certificate JSON") {
  const Model x = binomial2(1, 1, 0), y = binomial2(0, 0, 1);
  const auto doc = io::certificate_to_json(certify_exact(y, x));
  CHECK(doc["verdict"] == "violated");
  CHECK(doc["phi"].size() == doc["grid"]["points"].get<std::size_t>());
  CHECK(doc["arithmetic"] == "exact");
}
