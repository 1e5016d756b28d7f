#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"
#include "treecorr/covariance.hpp"
#include "treecorr/io.hpp"

using namespace treecorr;

namespace {

DependencyTree d5() {
  return io::tree_from_json(io::read_file(std::string(TREECORR_FIXTURE_DIR) + "/table_d5.json"));
}

VarianceDecomposition<Rational> constant(int d, const Rational& v) {
  auto dec = VarianceDecomposition<Rational>::zero(d);
  dec.sigma2.setConstant(v);
  return dec;
}

/// Column c of the forward map is the covariance contributed by a unit at node c.
Matrix<Rational> forward_matrix(const DependencyTree& tree) {
  const auto n = static_cast<Eigen::Index>(tree.size());
  Matrix<Rational> a(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    Vector<Rational> unit = Vector<Rational>::Constant(n, Rational(0));
    unit(c) = 1;
    const auto cov = testing::brute_covariance(tree, unit);
    for (Eigen::Index r = 0; r < n; ++r) {
      const Pair p = tree.pair(static_cast<std::size_t>(r));
      a(r, c) = cov(p.k - 1, p.l - 1);
    }
  }
  return a;
}

}  // namespace

TEST_CASE("forward covariance on the five-dimensional table") {
  const auto tree = d5();
  const auto cov = forward_covariance(tree, constant(5, Rational(1)));
  CHECK(cov.matrix(1, 2) == 6);
  CHECK(cov.matrix(2, 2) == 7);
  const auto zero = forward_covariance(tree, VarianceDecomposition<Rational>::zero(5));
  CHECK(zero.matrix.isZero());
}

TEST_CASE("forward covariance matches membership enumeration on random trees") {
  Engine engine = make_engine(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto tree = testing::random_tree_between(1, 7, engine);
    const VarianceDecomposition<Rational> dec{tree.dim(), testing::random_nonnegative(tree.size(), engine)};
    CHECK(forward_covariance(tree, dec).matrix == testing::brute_covariance(tree, dec.sigma2));
  }
}

TEST_CASE("inversion recovers the decomposition and both paths agree") {
  Engine engine = make_engine(22);
  for (int trial = 0; trial < 100; ++trial) {
    const auto tree = testing::random_tree_between(1, 8, engine);
    const VarianceDecomposition<Rational> dec{tree.dim(), testing::random_nonnegative(tree.size(), engine)};
    const auto cov = forward_covariance(tree, dec);
    const auto back = invert_covariance(tree, cov);
    CHECK(back.sigma2 == dec.sigma2);
    CHECK(invert_moebius(tree, cov.matrix).sigma2 == invert_recursive(tree, cov.matrix).sigma2);
  }
}

TEST_CASE("inversion agrees with a linear solve of the forward map") {
  Engine engine = make_engine(23);
  for (int trial = 0; trial < 30; ++trial) {
    const auto tree = testing::random_tree_between(2, 6, engine);
    CovarianceSpec<Rational> spec;
    const int d = tree.dim();
    spec.matrix = Matrix<Rational>(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        Rational v = testing::random_rational(engine, 20, 5) - (i == j ? 0 : 4);
        spec.matrix(i, j) = spec.matrix(j, i) = v;
      }
    Vector<Rational> rhs(static_cast<Eigen::Index>(tree.size()));
    for (std::size_t c = 0; c < tree.size(); ++c) {
      const Pair p = tree.pair(c);
      rhs(static_cast<Eigen::Index>(c)) = spec.matrix(p.k - 1, p.l - 1);
    }
    const auto expected = testing::gauss_solve(forward_matrix(tree), rhs);
    CHECK(invert_covariance(tree, spec).sigma2 == expected);
  }
}

TEST_CASE("inversion is linear") {
  Engine engine = make_engine(24);
  for (int trial = 0; trial < 40; ++trial) {
    const auto tree = testing::random_tree_between(2, 6, engine);
    const int d = tree.dim();
    const VarianceDecomposition<Rational> da{d, testing::random_nonnegative(tree.size(), engine)};
    const VarianceDecomposition<Rational> db{d, testing::random_nonnegative(tree.size(), engine)};
    const auto a = forward_covariance(tree, da).matrix;
    const auto b = forward_covariance(tree, db).matrix;
    const Rational alpha = testing::random_rational(engine), beta = testing::random_rational(engine);
    const Matrix<Rational> mix = alpha * a + beta * b;
    const auto lhs = invert_covariance(tree, CovarianceSpec<Rational>{mix, std::nullopt}).sigma2;
    const Vector<Rational> rhs = alpha * da.sigma2 + beta * db.sigma2;
    CHECK(lhs == rhs);
  }
}

TEST_CASE("a covariance increment at one pair moves sigma2 on the four-node pattern") {
  Engine engine = make_engine(25);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto tree = testing::random_tree_between(2, 7, engine);
    const int d = tree.dim();
    const VarianceDecomposition<Rational> dec{d, testing::random_nonnegative(tree.size(), engine)};
    const auto cov = forward_covariance(tree, dec);
    for (std::size_t c = 0; c < tree.size(); ++c) {
      const Pair p = tree.pair(c);
      if (p.is_leaf()) continue;
      const auto links = tree.links(c);
      if (!links.grandchild_node) continue;
      const Rational delta(3, 7);
      auto bumped = cov;
      bumped.matrix(p.k - 1, p.l - 1) += delta;
      bumped.matrix(p.l - 1, p.k - 1) += delta;
      const auto diff = (invert_covariance(tree, bumped).sigma2 - dec.sigma2).eval();
      Vector<Rational> expected = Vector<Rational>::Constant(diff.size(), Rational(0));
      expected(static_cast<Eigen::Index>(c)) += delta;
      expected(static_cast<Eigen::Index>(links.child_k)) -= delta;
      expected(static_cast<Eigen::Index>(links.child_l)) -= delta;
      expected(static_cast<Eigen::Index>(*links.grandchild_node)) += delta;
      CHECK(diff == expected);
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("inversion input errors") {
  const auto tree = build_pairwise(2);
  CovarianceSpec<Rational> asym{Matrix<Rational>(2, 2), std::nullopt};
  asym.matrix << 1, 2, 3, 1;
  CHECK_THROWS_AS(invert_covariance(tree, asym), InvalidArgument);
  CovarianceSpec<Rational> wrong{Matrix<Rational>::Identity(3, 3), std::nullopt};
  CHECK_THROWS_AS(invert_covariance(tree, wrong), DimensionError);
  CovarianceSpec<Rational> one{Matrix<Rational>(1, 1), std::nullopt};
  one.matrix(0, 0) = Rational(5, 3);
  CHECK(invert_covariance(build_pairwise(1), one).sigma2(0) == Rational(5, 3));
}

TEST_CASE("float-valued covariance inputs invert within tolerance") {
  const auto tree = build_prior_structure(3);
  VarianceDecomposition<double> dec{3, Vector<double>(6)};
  dec.sigma2 << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6;
  const auto cov = forward_covariance(tree, dec);
  const auto back = invert_covariance(tree, cov);
  CHECK((back.sigma2 - dec.sigma2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("feasibility per family") {
  const auto tree = build_pairwise(2);
  SECTION("sigma2 = pq gives unit counts") {
    const auto r = feasibility(constant(2, Rational(1, 4)), Family::kBinomial);
    CHECK(r.feasible);
    for (Eigen::Index c = 0; c < 3; ++c) CHECK(r.parameters(c) == 1);
  }
  SECTION("a negative component is infeasible everywhere") {
    auto dec = constant(2, Rational(1));
    dec[Pair{1, 2}] = Rational(-1, 4);
    for (Family f : {Family::kBinomial, Family::kPoisson, Family::kGaussian, Family::kGamma}) {
      const auto r = feasibility(dec, f);
      CHECK_FALSE(r.feasible);
      REQUIRE(r.negative.size() == 1);
      CHECK(r.negative[0].first == Pair{1, 2});
    }
  }
  SECTION("non-integral counts only matter for the binomial family") {
    auto dec = constant(2, Rational(1, 4));
    dec[Pair{1, 2}] = parse_rational("0.3");
    CHECK(feasibility(dec, Family::kGaussian).feasible);
    CHECK(feasibility(dec, Family::kPoisson).feasible);
    const auto r = feasibility(dec, Family::kBinomial);
    CHECK_FALSE(r.feasible);
    REQUIRE(r.non_integral.size() == 1);
    CHECK(r.non_integral[0].second == Rational(6, 5));
  }
  SECTION("gamma shapes divide by theta squared") {
    const auto r = feasibility(constant(2, Rational(2)), Family::kGamma, FamilyParams{Rational(1, 2), Rational(2)});
    CHECK(r.parameters(0) == Rational(1, 2));
  }
  SECTION("invalid parameters") {
    CHECK_THROWS_AS(feasibility(constant(2, Rational(1)), Family::kBinomial, FamilyParams{Rational(3, 2), Rational(1)}),
                    InvalidArgument);
    CHECK_THROWS_AS(feasibility(constant(2, Rational(1)), Family::kGamma, FamilyParams{Rational(1, 2), Rational(0)}),
                    InvalidArgument);
  }
}

TEST_CASE("covariance and decomposition JSON round trip") {
  io::ReadContext ctx;
  const auto doc = io::Json::parse(R"({"dim": 2, "matrix": [["2", 1], ["1", 0.5]], "means": ["1/3", 2]})");
  const auto spec = io::covariance_from_json(doc, ctx);
  CHECK(spec.matrix(1, 1) == Rational(1, 2));
  CHECK((*spec.means)(0) == Rational(1, 3));
  CHECK(ctx.warnings.size() == 1);
  io::ReadContext again;
  const auto back = io::covariance_from_json(io::covariance_to_json(spec), again);
  CHECK(back.matrix == spec.matrix);
  CHECK(*back.means == *spec.means);
  CHECK(again.warnings.empty());

  const auto dec = invert_covariance(build_pairwise(2), spec);
  const auto dec_back = io::decomposition_from_json(io::decomposition_to_json(dec), again);
  CHECK(dec_back.sigma2 == dec.sigma2);

  io::ReadContext lax{false, {}, {}};
  io::covariance_from_json(doc, lax);
  CHECK(lax.warnings.empty());
  CHECK(parse_rational("0.1") == Rational(1, 10));
}
