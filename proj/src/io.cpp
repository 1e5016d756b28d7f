#include "treecorr/io.hpp"

#include <fstream>
#include <sstream>

#include "treecorr/errors.hpp"

namespace treecorr::io {

namespace {

const Json& require(const Json& doc, const char* key, std::string_view what) {
  if (!doc.is_object() || !doc.contains(key))
    throw ParseError(std::string(what) + ": missing field \"" + key + "\"");
  return doc.at(key);
}

int read_dim(const Json& doc, std::string_view what) {
  const Json& d = require(doc, "dim", what);
  if (!d.is_number_integer()) throw ParseError(std::string(what) + ": \"dim\" must be an integer");
  const auto dim = d.get<std::int64_t>();
  if (dim < 1 || dim > Vertex::kMaxDim) throw DimensionError(std::string(what) + ": dim outside [1, 64]");
  return static_cast<int>(dim);
}

Pair read_pair(const std::string& key, int dim, std::string_view what) {
  const Pair p = parse_pair(key);
  if (p.k < 1 || p.l > dim)
    throw IndexError(std::string(what) + ": pair (" + key + ") outside dimension " + std::to_string(dim));
  return p;
}

Json components_json(const DependencyTree& tree, const Vector<Rational>& values) {
  Json out = Json::object();
  for (std::size_t c = 0; c < tree.size(); ++c)
    out[tree.pair(c).to_string()] = to_json(values(static_cast<Eigen::Index>(c)));
  return out;
}

Vector<Rational> components_from_json(const Json& doc, int dim, ReadContext& ctx, std::string_view what) {
  Vector<Rational> out(static_cast<Eigen::Index>(pair_count(dim)));
  out.setConstant(Rational(0));
  if (!doc.is_object()) throw ParseError(std::string(what) + ": components must be an object keyed by \"k,l\"");
  for (const auto& [key, value] : doc.items()) {
    const Pair p = read_pair(key, dim, what);
    out(static_cast<Eigen::Index>(pair_index(dim, p))) =
        rational_from_json(value, ctx, std::string(what) + " (" + key + ")");
  }
  return out;
}

void require_nonnegative(const Vector<Rational>& v, int dim, std::string_view what) {
  for (Eigen::Index c = 0; c < v.size(); ++c)
    if (v(c) < 0)
      throw InvalidArgument(std::string(what) + " at (" + pair_at(dim, static_cast<std::size_t>(c)).to_string() +
                            ") is negative");
}

Json entries_json(const std::vector<EntryComparison>& entries) {
  Json out = Json::array();
  for (const auto& e : entries)
    out.push_back({{"i", e.i}, {"j", e.j}, {"x", to_json(e.x)}, {"y", to_json(e.y)}});
  return out;
}

template <typename Scalar>
Json certificate_json(const LpCertificate<Scalar>& cert, bool exact) {
  auto num = [&](const Scalar& v) -> Json {
    if constexpr (ScalarTraits<Scalar>::kExact) {
      return to_json(v);
    } else {
      return v;
    }
  };
  Json phi = Json::array();
  for (const auto& v : cert.phi) phi.push_back(num(v));
  return Json{{"verdict", verdict_name(cert.verdict)},
              {"arithmetic", exact ? "exact" : "float"},
              {"value", num(cert.value)},
              {"threshold", num(cert.threshold)},
              {"defect_x", num(cert.defect_x)},
              {"defect_y", num(cert.defect_y)},
              {"grid", {{"dim", cert.grid.dim}, {"cap", cert.grid.cap}, {"points", cert.grid.points()}}},
              {"monotone", cert.monotone},
              {"iterations", cert.iterations},
              {"phi", phi},
              {"notes", cert.notes}};
}

}  // namespace

Json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

Rational rational_from_json(const Json& value, ReadContext& ctx, std::string_view where) {
  if (value.is_string()) return parse_rational(value.get<std::string>());
  if (value.is_number_integer()) return parse_rational(value.dump());
  if (value.is_number_float()) {
    const std::string text = value.dump();
    if (ctx.exact)
      ctx.warnings.push_back(std::string(where) + ": JSON number " + text + " read as its decimal text");
    return parse_rational(text);
  }
  throw ParseError(std::string(where) + ": expected a number or a rational string");
}

Json to_json(const Rational& value) { return to_string(value); }

std::pair<int, NodeMap> tree_candidate_from_json(const Json& doc) {
  const int dim = read_dim(doc, "tree");
  NodeMap nodes;
  if (doc.contains("nodes")) {
    const Json& map = doc.at("nodes");
    if (!map.is_object()) throw ParseError("tree: \"nodes\" must be an object keyed by \"k,l\"");
    for (const auto& [key, bits] : map.items()) {
      if (!bits.is_string()) throw ParseError("tree: node (" + key + ") must be a bitstring");
      const Pair p = parse_pair(key);
      nodes[p] = Vertex::parse(bits.get<std::string>());
    }
  }
  return {dim, std::move(nodes)};
}

DependencyTree tree_from_json(const Json& doc) {
  if (doc.is_object() && doc.contains("builder")) {
    const std::string builder = doc.at("builder").get<std::string>();
    const int dim = read_dim(doc, "tree");
    if (builder == "pairwise") return build_pairwise(dim);
    if (builder == "prior") return build_prior_structure(dim);
    throw ParseError("tree: unknown builder '" + builder + "'");
  }
  auto [dim, nodes] = tree_candidate_from_json(doc);
  return validate_tree(dim, nodes);
}

Json tree_to_json(const DependencyTree& tree, bool include_leaves) {
  Json nodes = Json::object();
  for (std::size_t c = 0; c < tree.size(); ++c) {
    const Pair p = tree.pair(c);
    if (p.is_leaf() && !include_leaves) continue;
    nodes[p.to_string()] = tree.node(c).to_string();
  }
  return Json{{"dim", tree.dim()}, {"nodes", nodes}};
}

Json violations_to_json(const std::vector<Violation>& violations) {
  Json out = Json::array();
  for (const auto& v : violations) {
    Json item{{"kind", violation_name(v.kind)}, {"pair", v.pair.to_string()}, {"detail", v.detail}};
    if (v.other) item["other"] = v.other->to_string();
    out.push_back(item);
  }
  return out;
}

CovarianceSpec<Rational> covariance_from_json(const Json& doc, ReadContext& ctx) {
  const Json& rows = require(doc, "matrix", "covariance");
  if (!rows.is_array() || rows.empty()) throw ParseError("covariance: \"matrix\" must be a nonempty array of rows");
  const auto d = static_cast<Eigen::Index>(rows.size());
  if (doc.contains("dim") && read_dim(doc, "covariance") != d)
    throw DimensionError("covariance: \"dim\" disagrees with the matrix size");
  CovarianceSpec<Rational> spec;
  spec.matrix = Matrix<Rational>(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const Json& row = rows.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d)
      throw DimensionError("covariance: row " + std::to_string(i + 1) + " has the wrong length");
    for (Eigen::Index j = 0; j < d; ++j)
      spec.matrix(i, j) = rational_from_json(row.at(static_cast<std::size_t>(j)), ctx,
                                             "covariance [" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "]");
  }
  if (doc.contains("means") && !doc.at("means").is_null()) {
    const Json& means = doc.at("means");
    if (!means.is_array() || static_cast<Eigen::Index>(means.size()) != d)
      throw DimensionError("covariance: \"means\" must have one entry per coordinate");
    Vector<Rational> m(d);
    for (Eigen::Index i = 0; i < d; ++i)
      m(i) = rational_from_json(means.at(static_cast<std::size_t>(i)), ctx, "means [" + std::to_string(i + 1) + "]");
    spec.means = m;
  }
  return spec;
}

Json covariance_to_json(const CovarianceSpec<Rational>& spec) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < spec.matrix.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < spec.matrix.cols(); ++j) row.push_back(to_json(spec.matrix(i, j)));
    rows.push_back(row);
  }
  Json out{{"dim", spec.dim()}, {"matrix", rows}};
  if (spec.means) {
    Json means = Json::array();
    for (Eigen::Index i = 0; i < spec.means->size(); ++i) means.push_back(to_json((*spec.means)(i)));
    out["means"] = means;
  }
  return out;
}

VarianceDecomposition<Rational> decomposition_from_json(const Json& doc, ReadContext& ctx) {
  const int dim = read_dim(doc, "decomposition");
  VarianceDecomposition<Rational> dec{dim, components_from_json(require(doc, "components", "decomposition"), dim, ctx,
                                                                "decomposition")};
  return dec;
}

Json decomposition_to_json(const VarianceDecomposition<Rational>& dec) {
  Json components = Json::object();
  for (Eigen::Index c = 0; c < dec.sigma2.size(); ++c)
    components[pair_at(dec.dim, static_cast<std::size_t>(c)).to_string()] = to_json(dec.sigma2(c));
  Json negative = Json::array();
  for (const Pair& p : dec.negative_pairs()) negative.push_back(p.to_string());
  return Json{{"dim", dec.dim}, {"components", components}, {"negative", negative}};
}

Json feasibility_to_json(const FeasibilityReport& report) {
  auto listing = [](const std::vector<std::pair<Pair, Rational>>& items) {
    Json out = Json::array();
    for (const auto& [p, v] : items) out.push_back({{"pair", p.to_string()}, {"value", to_json(v)}});
    return out;
  };
  Json out{{"family", family_name(report.family)}, {"feasible", report.feasible},
           {"negative", listing(report.negative)}, {"non_integral", listing(report.non_integral)}};
  if (report.family == Family::kBinomial) out["p"] = to_json(report.params.p);
  if (report.family == Family::kGamma) out["theta"] = to_json(report.params.theta);
  Json params = Json::array();
  for (Eigen::Index c = 0; c < report.parameters.size(); ++c) params.push_back(to_json(report.parameters(c)));
  out["parameters"] = params;
  return out;
}

Model model_from_json(const Json& doc, ReadContext& ctx) {
  const Family family = parse_family(require(doc, "family", "model").get<std::string>());
  const Json& tree_doc = require(doc, "tree", "model");
  DependencyTree tree = [&] {
    if (tree_doc.is_string()) {
      std::filesystem::path path = tree_doc.get<std::string>();
      if (path.is_relative()) path = ctx.base_dir / path;
      return tree_from_json(read_file(path));
    }
    return tree_from_json(tree_doc);
  }();
  const int dim = tree.dim();
  const Json params = doc.contains("params") ? doc.at("params") : Json::object();
  if (!params.is_object()) throw ParseError("model: \"params\" must be an object");
  const Vector<Rational> values = components_from_json(require(doc, "components", "model"), dim, ctx, "components");
  require_nonnegative(values, dim, "component parameter");

  switch (family) {
    case Family::kBinomial: {
      const Rational p = params.contains("p") ? rational_from_json(params.at("p"), ctx, "p") : Rational(1, 2);
      if (p < 0 || p > 1) throw InvalidArgument("binomial p must lie in [0, 1]");
      std::vector<std::int64_t> counts(static_cast<std::size_t>(values.size()));
      for (Eigen::Index c = 0; c < values.size(); ++c) {
        if (!is_integer(values(c)))
          throw InvalidArgument("binomial count at (" + tree.pair(static_cast<std::size_t>(c)).to_string() +
                                ") is not an integer");
        counts[static_cast<std::size_t>(c)] = static_cast<std::int64_t>(numerator(values(c)));
      }
      return BinomialModel{std::move(tree), p, std::move(counts)};
    }
    case Family::kPoisson:
      return PoissonModel{std::move(tree), values};
    case Family::kGaussian: {
      Vector<Rational> means(values.size());
      means.setConstant(Rational(0));
      if (params.contains("means")) means = components_from_json(params.at("means"), dim, ctx, "means");
      return GaussianModel{std::move(tree), values, means};
    }
    case Family::kGamma: {
      const Rational theta = params.contains("theta") ? rational_from_json(params.at("theta"), ctx, "theta") : Rational(1);
      if (theta <= 0) throw InvalidArgument("gamma theta must be positive");
      return GammaModel{std::move(tree), theta, values};
    }
  }
  throw UnsupportedFamily("unknown family");
}

Json model_to_json(const Model& model) {
  const DependencyTree& tree = tree_of(model);
  Json out{{"family", family_name(family_of(model))}, {"tree", tree_to_json(tree)}, {"params", Json::object()}};
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BinomialModel>) {
          out["params"]["p"] = to_json(m.p);
          Json components = Json::object();
          for (std::size_t c = 0; c < tree.size(); ++c) components[tree.pair(c).to_string()] = m.counts[c];
          out["components"] = components;
        } else if constexpr (std::is_same_v<T, PoissonModel>) {
          out["components"] = components_json(tree, m.intensities);
        } else if constexpr (std::is_same_v<T, GaussianModel>) {
          out["params"]["means"] = components_json(tree, m.component_means);
          out["components"] = components_json(tree, m.variances);
        } else {
          out["params"]["theta"] = to_json(m.theta);
          out["components"] = components_json(tree, m.shapes);
        }
      },
      model);
  return out;
}

Json moments_to_json(const Moments<Rational>& moments) {
  return covariance_to_json(CovarianceSpec<Rational>{moments.covariance, moments.means});
}

Json verdict_to_json(const OrderingVerdict& verdict) {
  Json out{{"relation", relation_name(verdict.relation)},
           {"holds", holds_name(verdict.holds)},
           {"means", entries_json(verdict.means)},
           {"covariances", entries_json(verdict.covariances)}};
  if (verdict.witness) {
    const Witness& w = *verdict.witness;
    Json witness{{"kind", w.kind}, {"i", w.i}, {"j", w.j}};
    if (!w.function.empty()) witness["function"] = w.function;
    if (w.value) witness["value"] = to_json(*w.value);
    out["witness"] = witness;
  } else {
    out["witness"] = nullptr;
  }
  out["notes"] = verdict.notes;
  return out;
}

Json certificate_to_json(const LpCertificate<double>& cert) { return certificate_json(cert, false); }
Json certificate_to_json(const LpCertificate<Rational>& cert) { return certificate_json(cert, true); }

}  // namespace treecorr::io
