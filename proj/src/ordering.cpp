#include "treecorr/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace treecorr {

const char* relation_name(Relation r) {
  switch (r) {
    case Relation::kSupermodular: return "supermodular";
    case Relation::kIncreasingSupermodular: return "increasing_supermodular";
    case Relation::kConvex: return "convex";
  }
  return "unknown";
}

Relation parse_relation(std::string_view name) {
  if (name == "sm" || name == "supermodular") return Relation::kSupermodular;
  if (name == "ism" || name == "increasing_supermodular") return Relation::kIncreasingSupermodular;
  if (name == "cx" || name == "convex") return Relation::kConvex;
  throw ParseError("unknown relation '" + std::string(name) + "' (expected sm, ism or cx)");
}

const char* holds_name(Holds h) {
  switch (h) {
    case Holds::kYes: return "yes";
    case Holds::kNo: return "no";
    case Holds::kNotDecided: return "not_decided_by_criterion";
  }
  return "unknown";
}

namespace {

struct Compared {
  Moments<Rational> x;
  Moments<Rational> y;
  OrderingVerdict verdict;
};

Compared compare(const Model& x, const Model& y, Relation relation) {
  if (dim_of(x) != dim_of(y))
    throw DimensionError("cannot compare dimensions " + std::to_string(dim_of(x)) + " and " +
                         std::to_string(dim_of(y)));
  Compared out{exact_moments(x), exact_moments(y), {}};
  out.verdict.relation = relation;
  const int d = dim_of(x);
  for (int i = 0; i < d; ++i) out.verdict.means.push_back({i + 1, i + 1, out.x.means(i), out.y.means(i)});
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      out.verdict.covariances.push_back({i + 1, j + 1, out.x.covariance(i, j), out.y.covariance(i, j)});
  return out;
}

void require_same_family(const Model& x, const Model& y) {
  if (family_of(x) != family_of(y))
    throw FamilyMismatch(std::string("cannot compare ") + family_name(family_of(x)) + " with " +
                         family_name(family_of(y)));
  if (const auto* bx = std::get_if<BinomialModel>(&x)) {
    const auto& by = std::get<BinomialModel>(y);
    if (bx->p != by.p)
      throw FamilyMismatch("binomial vectors with different p (" + to_string(bx->p) + " vs " + to_string(by.p) + ")");
  }
}

OrderingVerdict& reject(OrderingVerdict& v, std::string kind, int i, int j, std::optional<Rational> value = {}) {
  v.holds = Holds::kNo;
  v.witness = Witness{std::move(kind), i, j, "", std::move(value)};
  return v;
}

}  // namespace

OrderingVerdict check_supermodular(const Model& x, const Model& y) {
  require_same_family(x, y);
  auto [mx, my, verdict] = compare(x, y, Relation::kSupermodular);
  const int d = dim_of(x);

  for (int i = 0; i < d; ++i)
    if (mx.means(i) != my.means(i)) return reject(verdict, "mean", i + 1, i + 1, my.means(i) - mx.means(i));
  for (int i = 0; i < d; ++i)
    if (mx.covariance(i, i) != my.covariance(i, i))
      return reject(verdict, "variance", i + 1, i + 1, my.covariance(i, i) - mx.covariance(i, i));
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (mx.covariance(i, j) > my.covariance(i, j))
        return reject(verdict, "covariance", i + 1, j + 1, my.covariance(i, j) - mx.covariance(i, j));

  const bool same_tree = tree_of(x) == tree_of(y);
  switch (family_of(x)) {
    case Family::kBinomial:
    case Family::kPoisson:
      if (same_tree) {
        verdict.holds = Holds::kYes;
      } else {
        verdict.notes.push_back("criterion satisfied but the vectors live on different trees");
      }
      break;
    case Family::kGaussian:
      verdict.holds = Holds::kYes;
      break;
    case Family::kGamma:
      verdict.notes.push_back("criterion satisfied; sufficiency is not established for gamma vectors");
      break;
  }
  return verdict;
}

OrderingVerdict check_supermodular_sum(const std::vector<Model>& xs, const std::vector<Model>& ys) {
  if (xs.size() != ys.size() || xs.empty()) throw InvalidArgument("sum comparison needs matching nonempty part lists");
  OrderingVerdict out;
  out.relation = Relation::kSupermodular;
  out.holds = Holds::kYes;
  const int d = dim_of(xs.front());
  Vector<Rational> mean_x = Vector<Rational>::Zero(d), mean_y = Vector<Rational>::Zero(d);
  Matrix<Rational> cov_x = Matrix<Rational>::Zero(d, d), cov_y = Matrix<Rational>::Zero(d, d);
  for (std::size_t r = 0; r < xs.size(); ++r) {
    const auto part = check_supermodular(xs[r], ys[r]);
    const auto mx = exact_moments(xs[r]);
    const auto my = exact_moments(ys[r]);
    mean_x += mx.means;
    mean_y += my.means;
    cov_x += mx.covariance;
    cov_y += my.covariance;
    if (part.holds != Holds::kYes) {
      out.holds = Holds::kNotDecided;
      out.notes.push_back("part " + std::to_string(r + 1) + " is " + holds_name(part.holds));
    }
  }
  for (int i = 0; i < d; ++i) out.means.push_back({i + 1, i + 1, mean_x(i), mean_y(i)});
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) out.covariances.push_back({i + 1, j + 1, cov_x(i, j), cov_y(i, j)});
  return out;
}

OrderingVerdict check_increasing_supermodular(const Model& x, const Model& y) {
  require_same_family(x, y);
  auto [mx, my, verdict] = compare(x, y, Relation::kIncreasingSupermodular);
  const int d = dim_of(x);
  const Family family = family_of(x);
  const bool nonnegative = family != Family::kGaussian;

  // Necessary conditions, each from an increasing supermodular test function.
  for (int i = 0; i < d; ++i)
    if (mx.means(i) > my.means(i)) return reject(verdict, "mean", i + 1, i + 1, my.means(i) - mx.means(i));
  for (int i = 0; i < d; ++i)
    if (mx.means(i) == my.means(i) && mx.covariance(i, i) > my.covariance(i, i))
      return reject(verdict, "variance", i + 1, i + 1, my.covariance(i, i) - mx.covariance(i, i));
  // Normal marginals are ordered by 1{x_i > t} only when their variances agree.
  if (family == Family::kGaussian)
    for (int i = 0; i < d; ++i)
      if (mx.covariance(i, i) != my.covariance(i, i))
        return reject(verdict, "variance", i + 1, i + 1, my.covariance(i, i) - mx.covariance(i, i));
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      if (nonnegative) {
        const Rational px = mx.covariance(i, j) + mx.means(i) * mx.means(j);
        const Rational py = my.covariance(i, j) + my.means(i) * my.means(j);
        if (px > py) return reject(verdict, "product_moment", i + 1, j + 1, py - px);
      }
      if (mx.means(i) == my.means(i) && mx.means(j) == my.means(j)) {
        const Rational vx = mx.covariance(i, i) + mx.covariance(j, j) + 2 * mx.covariance(i, j);
        const Rational vy = my.covariance(i, i) + my.covariance(j, j) + 2 * my.covariance(i, j);
        if (vx > vy) return reject(verdict, "sum_variance", i + 1, j + 1, vy - vx);
      }
    }

  bool criterion = true;
  for (int i = 0; i < d && criterion; ++i)
    for (int j = i + 1; j < d; ++j)
      if (mx.covariance(i, j) > my.covariance(i, j)) {
        criterion = false;
        verdict.notes.push_back("covariance dominance fails at (" + std::to_string(i + 1) + "," +
                                std::to_string(j + 1) + ")");
        break;
      }
  if (!criterion) return verdict;

  const bool same_tree = tree_of(x) == tree_of(y);
  switch (family) {
    case Family::kPoisson:
      if (same_tree) verdict.holds = Holds::kYes;
      else verdict.notes.push_back("criterion satisfied but the vectors live on different trees");
      break;
    case Family::kBinomial:
    case Family::kGaussian:
      verdict.holds = Holds::kYes;
      verdict.notes.push_back("criterion satisfied; stated for Poisson vectors and applied here as a criterion");
      break;
    case Family::kGamma:
      verdict.notes.push_back("criterion satisfied; sufficiency is not established for gamma vectors");
      break;
  }
  return verdict;
}

// ---------------------------------------------------------------------------
// Vertex functions and Lévy functionals

VertexFunction VertexFunction::table(std::string name, std::unordered_map<Vertex, Rational, VertexHash> values) {
  auto shared = std::make_shared<const std::unordered_map<Vertex, Rational, VertexHash>>(std::move(values));
  return VertexFunction(std::move(name), [shared](const Vertex& v) -> Rational {
    if (auto it = shared->find(v); it != shared->end()) return it->second;
    if (v.is_empty()) return Rational(0);
    throw MissingVertex("test function undefined at vertex " + v.to_string());
  });
}

VertexFunction VertexFunction::from_battery(const SupermodularFunction& f) {
  return VertexFunction(f.name(), [f](const Vertex& v) { return f.at_vertex(v); });
}

namespace {

int bit(const Vertex& v, int i) { return static_cast<int>((v.bits() >> (i - 1)) & 1U); }

int outside_count(const Vertex& v, const Vertex& e) { return std::popcount(v.bits() & ~e.bits()); }

}  // namespace

VertexFunction convex_witness(const Vertex& e, int k, int l) {
  if (!e.contains(k) || !e.contains(l)) throw InvalidArgument("convex witness needs k and l inside the node");
  return VertexFunction("max(0,x" + std::to_string(l) + "-x" + std::to_string(k) + "-sum_out(" + e.to_string() + "))",
                        [e, k, l](const Vertex& v) {
                          return Rational(std::max(0, bit(v, l) - bit(v, k) - outside_count(v, e)));
                        });
}

VertexFunction convex_witness_plus(const Vertex& e, int k, int l) {
  if (!e.contains(k) || !e.contains(l)) throw InvalidArgument("convex witness needs k and l inside the node");
  return VertexFunction(
      "max(0,x" + std::to_string(k) + "+x" + std::to_string(l) + "-1-sum_out(" + e.to_string() + "))",
      [e, k, l](const Vertex& v) { return Rational(std::max(0, bit(v, k) + bit(v, l) - 1 - outside_count(v, e))); });
}

VertexFunction vertex_indicator(const Vertex& target) {
  return VertexFunction("indicator(" + target.to_string() + ")", [target](const Vertex& v) {
    const int inside = std::popcount(v.bits() & target.bits());
    return Rational(std::max(0, inside - outside_count(v, target) - target.size() + 1));
  });
}

VertexFunction coordinate_sum() {
  return VertexFunction("sum(x)", [](const Vertex& v) { return Rational(v.size()); });
}

VertexFunction coordinate(int i, int sign) {
  return VertexFunction(std::string(sign < 0 ? "-" : "") + "x" + std::to_string(i),
                        [i, sign](const Vertex& v) { return Rational(sign * bit(v, i)); });
}

VertexFunction product(int i, int j) {
  return VertexFunction("x" + std::to_string(i) + "*x" + std::to_string(j),
                        [i, j](const Vertex& v) { return Rational(bit(v, i) * bit(v, j)); });
}

VertexFunction nonzero_indicator() {
  return VertexFunction("1{x!=0}", [](const Vertex& v) { return Rational(v.is_empty() ? 0 : 1); });
}

Rational bracket(const DependencyTree& tree, Pair p, const VertexFunction& phi) {
  const Vertex& e = tree.node(p);
  if (p.is_leaf()) return phi(e);
  return phi(e) + phi(remove(remove(e, p.k), p.l)) - phi(remove(e, p.k)) - phi(remove(e, p.l));
}

namespace {

void require_origin_zero(int dim, const VertexFunction& phi) {
  if (phi(Vertex::empty(dim)) != 0) throw InvalidArgument("Lévy test function must vanish at the origin");
}

Rational direct_sum(const PoissonModel& m, const VertexFunction& phi) {
  Rational out(0);
  for (std::size_t c = 0; c < m.tree.size(); ++c) {
    const Rational& a = m.intensities(static_cast<Eigen::Index>(c));
    if (a != 0) out += a * phi(m.tree.node(c));
  }
  return out;
}

}  // namespace

LevyFunctional levy_functional(const PoissonModel& model, const VertexFunction& phi) {
  const int d = model.tree.dim();
  require_origin_zero(d, phi);
  for (Eigen::Index c = 0; c < model.intensities.size(); ++c)
    if (model.intensities(c) < 0) throw InvalidArgument("Lévy weights must be nonnegative");

  LevyFunctional out{direct_sum(model, phi), Rational(0)};
  const auto moments = exact_moments(Model(model));
  for (int i = 1; i <= d; ++i) out.covariance_form += moments.means(i - 1) * phi(Vertex::basis(d, i));
  for (int i = 1; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j) {
      const Rational& cov = moments.covariance(i - 1, j - 1);
      if (cov != 0) out.covariance_form += cov * bracket(model.tree, Pair{i, j}, phi);
    }
  if (out.direct != out.covariance_form)
    throw Inconsistency("Lévy functional mismatch for " + phi.name() + ": direct " + to_string(out.direct) +
                        " vs covariance form " + to_string(out.covariance_form));
  return out;
}

Rational levy_difference_covariance_form(const PoissonModel& x, const PoissonModel& y, const VertexFunction& phi) {
  if (!(x.tree == y.tree)) throw TreeMismatch("covariance form of the Lévy difference needs a common tree");
  const auto mx = exact_moments(Model(x));
  const auto my = exact_moments(Model(y));
  const int d = x.tree.dim();
  for (int i = 0; i < d; ++i)
    if (mx.means(i) != my.means(i))
      throw MeanMismatch("means differ at X" + std::to_string(i + 1) + ": " + to_string(mx.means(i)) + " vs " +
                         to_string(my.means(i)));
  require_origin_zero(d, phi);
  Rational out(0);
  for (int i = 1; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j) {
      const Rational gap = my.covariance(i - 1, j - 1) - mx.covariance(i - 1, j - 1);
      if (gap != 0) out += gap * bracket(x.tree, Pair{i, j}, phi);
    }
  return out;
}

Rational levy_difference(const PoissonModel& x, const PoissonModel& y, const VertexFunction& phi) {
  if (x.tree.dim() != y.tree.dim()) throw DimensionError("Lévy difference needs equal dimensions");
  require_origin_zero(x.tree.dim(), phi);
  const Rational direct = direct_sum(y, phi) - direct_sum(x, phi);
  if (x.tree == y.tree && exact_moments(Model(x)).means == exact_moments(Model(y)).means) {
    const Rational other = levy_difference_covariance_form(x, y, phi);
    if (other != direct)
      throw Inconsistency("Lévy difference mismatch for " + phi.name() + ": direct " + to_string(direct) +
                          " vs covariance form " + to_string(other));
  }
  return direct;
}

// ---------------------------------------------------------------------------
// Convex order

namespace {

std::map<std::uint64_t, Rational> measure(const PoissonModel& m) {
  std::map<std::uint64_t, Rational> out;
  for (std::size_t c = 0; c < m.tree.size(); ++c) {
    const Rational& a = m.intensities(static_cast<Eigen::Index>(c));
    if (a != 0) out[m.tree.node(c).bits()] += a;
  }
  return out;
}

}  // namespace

OrderingVerdict check_convex(const Model& x, const Model& y) {
  const auto* px = std::get_if<PoissonModel>(&x);
  const auto* py = std::get_if<PoissonModel>(&y);
  if (!px || !py) throw FamilyMismatch("convex order is decided for Poisson vectors only");
  auto [mx, my, verdict] = compare(x, y, Relation::kConvex);
  const int d = dim_of(x);

  const auto mu = measure(*px);
  const auto nu = measure(*py);
  if (mu == nu) {
    verdict.holds = Holds::kYes;
    return verdict;
  }
  verdict.holds = Holds::kNo;

  std::vector<std::pair<VertexFunction, Pair>> candidates;
  for (int i = 1; i <= d; ++i)
    if (mx.means(i - 1) != my.means(i - 1))
      candidates.emplace_back(coordinate(i, mx.means(i - 1) < my.means(i - 1) ? -1 : 1), Pair{i, i});

  std::vector<std::pair<Rational, Pair>> gaps;
  for (int k = 1; k <= d; ++k)
    for (int l = k + 1; l <= d; ++l) {
      const Rational gap = my.covariance(k - 1, l - 1) - mx.covariance(k - 1, l - 1);
      if (gap != 0) gaps.emplace_back(gap, Pair{k, l});
    }
  std::stable_sort(gaps.begin(), gaps.end(), [](const auto& a, const auto& b) { return abs(a.first) > abs(b.first); });
  for (const auto& [gap, p] : gaps) {
    const Vertex& e = px->tree.node(p);
    if (gap > 0) {
      candidates.emplace_back(convex_witness(e, p.k, p.l), p);
      candidates.emplace_back(convex_witness(e, p.l, p.k), p);
    } else {
      candidates.emplace_back(convex_witness_plus(e, p.k, p.l), p);
    }
  }
  for (const auto& [bits, a] : mu) {
    auto it = nu.find(bits);
    if (it == nu.end() || it->second < a) candidates.emplace_back(vertex_indicator(Vertex(d, bits)), Pair{0, 0});
  }
  candidates.emplace_back(VertexFunction("-sum(x)", [](const Vertex& v) { return Rational(-v.size()); }), Pair{0, 0});

  for (const auto& [phi, p] : candidates) {
    const Rational value = levy_difference(*px, *py, phi);
    if (value < 0) {
      verdict.witness = Witness{"levy", p.k, p.l, phi.name(), value};
      return verdict;
    }
  }
  verdict.notes.push_back("Lévy measures differ but no candidate test function separated them");
  return verdict;
}

}  // namespace treecorr
