#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "treecorr/io.hpp"

using namespace treecorr;
using io::Json;

namespace {

enum Exit { kOk = 0, kNegative = 1, kInputError = 2, kUndecided = 3 };

struct Options {
  std::string arith = "exact";
  bool arith_given = false;
  std::string tree, cov, dec, model, x, y, out, pair, family = "gaussian", p = "1/2", theta = "1", relation = "sm";
  std::string builder;
  int dim = 0;
  std::size_t n = 0;
  std::optional<std::uint64_t> seed;
  std::optional<int> cap;
  bool monotone = false;
  bool exact = false;
};

io::ReadContext context(const Options& o, const std::string& path = {}) {
  io::ReadContext ctx;
  ctx.exact = o.arith == "exact";
  if (!path.empty()) ctx.base_dir = std::filesystem::path(path).parent_path();
  return ctx;
}

void flush_warnings(const io::ReadContext& ctx) {
  for (const auto& w : ctx.warnings) std::cerr << "warning: " << w << "\n";
}

void emit(const Json& doc) { std::cout << doc.dump(2) << "\n"; }

Model load_model(const Options& o, const std::string& path) {
  auto ctx = context(o, path);
  Model m = io::model_from_json(io::read_file(path), ctx);
  flush_warnings(ctx);
  return m;
}

FamilyParams family_params(const Options& o) {
  return FamilyParams{parse_rational(o.p), parse_rational(o.theta)};
}

std::uint64_t require_seed(const Options& o) {
  if (!o.seed) throw InvalidArgument("--seed is required for sampling");
  return *o.seed;
}

std::size_t require_n(const Options& o) {
  if (o.n < 1) throw InvalidArgument("--n must be at least 1");
  return o.n;
}

/// CSV to --out, or stdout when no path is given.
void write_csv(const Options& o, const std::vector<std::string>& header, const Matrix<double>& rows) {
  std::ofstream file;
  if (!o.out.empty()) {
    file.open(o.out);
    if (!file) throw InvalidArgument("cannot write " + o.out);
  }
  std::ostream& out = o.out.empty() ? std::cout : file;
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << "\n";
  char buf[32];
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", rows(r, c));
      out << (c ? "," : "") << buf;
    }
    out << "\n";
  }
}

std::vector<std::string> columns(const std::string& prefix, int d) {
  std::vector<std::string> out;
  for (int i = 1; i <= d; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

int exit_for(Holds h) {
  switch (h) {
    case Holds::kYes:
      return kOk;
    case Holds::kNo:
      return kNegative;
    case Holds::kNotDecided:
      return kUndecided;
  }
  return kUndecided;
}

int exit_for(CertificateVerdict v) {
  switch (v) {
    case CertificateVerdict::kCertified:
      return kOk;
    case CertificateVerdict::kViolated:
      return kNegative;
    case CertificateVerdict::kInconclusive:
      return kUndecided;
  }
  return kUndecided;
}

// ---------------------------------------------------------------------------

int tree_validate(const Options& o) {
  auto [dim, nodes] = io::tree_candidate_from_json(io::read_file(o.tree));
  const auto violations = check_hypothesis(dim, nodes);
  emit(Json{{"valid", violations.empty()}, {"dim", dim}, {"violations", io::violations_to_json(violations)}});
  std::cerr << (violations.empty() ? "tree is valid" : std::to_string(violations.size()) + " violation(s)") << "\n";
  return violations.empty() ? kOk : kNegative;
}

int tree_build(const Options& o) {
  if (o.dim < 1) throw InvalidArgument("--dim must be at least 1");
  const DependencyTree tree = o.builder == "pairwise" ? build_pairwise(o.dim) : build_prior_structure(o.dim);
  Json doc = io::tree_to_json(tree);
  Json rows = Json::array();
  for (const auto& row : membership(tree).rows) {
    Json r = Json::array();
    for (const Pair& p : row) r.push_back(p.to_string());
    rows.push_back(r);
  }
  doc["membership"] = rows;
  emit(doc);
  std::cerr << o.builder << " tree, dim " << o.dim << ", " << tree.size() << " nodes\n";
  return kOk;
}

int forward(const Options& o) {
  const DependencyTree tree = io::tree_from_json(io::read_file(o.tree));
  auto ctx = context(o);
  const auto dec = io::decomposition_from_json(io::read_file(o.dec), ctx);
  flush_warnings(ctx);
  if (dec.dim != tree.dim()) throw DimensionError("decomposition and tree dimensions differ");
  emit(io::covariance_to_json(forward_covariance(tree, dec)));
  std::cerr << "covariance of dimension " << tree.dim() << "\n";
  return kOk;
}

int invert(const Options& o, bool family_given) {
  const DependencyTree tree = io::tree_from_json(io::read_file(o.tree));
  auto ctx = context(o);
  const auto spec = io::covariance_from_json(io::read_file(o.cov), ctx);
  flush_warnings(ctx);
  const auto dec = invert_covariance(tree, spec);
  Json doc = io::decomposition_to_json(dec);
  Json feas = Json::object();
  const FamilyParams params = family_params(o);
  if (family_given) {
    const Family f = parse_family(o.family);
    feas[family_name(f)] = io::feasibility_to_json(feasibility(dec, f, params));
  } else {
    for (Family f : {Family::kBinomial, Family::kPoisson, Family::kGaussian, Family::kGamma})
      feas[family_name(f)] = io::feasibility_to_json(feasibility(dec, f, params));
  }
  doc["feasibility"] = feas;
  emit(doc);
  std::cerr << "decomposition with " << dec.negative_pairs().size() << " negative component(s)\n";
  return kOk;
}

int construct_cmd(const Options& o) {
  const DependencyTree tree = io::tree_from_json(io::read_file(o.tree));
  auto ctx = context(o);
  const auto spec = io::covariance_from_json(io::read_file(o.cov), ctx);
  flush_warnings(ctx);
  const Model model = construct(tree, spec, parse_family(o.family), family_params(o));
  emit(io::model_to_json(model));
  std::cerr << family_name(family_of(model)) << " model on " << tree.size() << " components\n";
  return kOk;
}

int moments_cmd(const Options& o) {
  const Model model = load_model(o, o.model);
  emit(io::moments_to_json(exact_moments(model)));
  std::cerr << "exact moments of a " << family_name(family_of(model)) << " model\n";
  return kOk;
}

int sample_cmd(const Options& o) {
  const Model model = load_model(o, o.model);
  const auto draws = sample(model, require_n(o), require_seed(o));
  write_csv(o, columns("X", dim_of(model)), draws);
  std::cerr << draws.rows() << " draws\n";
  return kOk;
}

int order_check(const Options& o) {
  const Model x = load_model(o, o.x);
  const Model y = load_model(o, o.y);
  OrderingVerdict verdict;
  switch (parse_relation(o.relation)) {
    case Relation::kSupermodular:
      verdict = check_supermodular(x, y);
      break;
    case Relation::kIncreasingSupermodular:
      verdict = check_increasing_supermodular(x, y);
      break;
    case Relation::kConvex:
      verdict = check_convex(x, y);
      break;
  }
  emit(io::verdict_to_json(verdict));
  std::cerr << relation_name(verdict.relation) << ": " << holds_name(verdict.holds) << "\n";
  return exit_for(verdict.holds);
}

int order_couple(const Options& o) {
  const Model model = load_model(o, o.model);
  const auto* b = std::get_if<BinomialModel>(&model);
  if (!b) throw UnsupportedFamily("coupling needs a binomial model");
  const auto coupling = couple_binomial_increment(*b, parse_pair(o.pair));
  const auto draws = sample_coupled(coupling, require_n(o), require_seed(o));
  auto header = columns("XA", b->tree.dim());
  for (auto& c : columns("XB", b->tree.dim())) header.push_back(c);
  write_csv(o, header, draws);
  std::cerr << draws.rows() << " coupled draws at (" << coupling.pair.to_string() << ")\n";
  return kOk;
}

int order_oracle(const Options& o) {
  const Model x = load_model(o, o.x);
  const Model y = load_model(o, o.y);
  OracleOptions options;
  options.cap = o.cap;
  options.monotone = o.monotone;
  const bool exact = o.exact || (o.arith_given && o.arith == "exact");
  Json doc;
  CertificateVerdict verdict;
  if (exact) {
    const auto cert = certify_exact(x, y, options);
    doc = io::certificate_to_json(cert);
    verdict = cert.verdict;
  } else {
    const auto cert = certify(x, y, options);
    doc = io::certificate_to_json(cert);
    verdict = cert.verdict;
  }
  emit(doc);
  std::cerr << "oracle: " << verdict_name(verdict) << " (value " << doc["value"].dump() << ", threshold "
            << doc["threshold"].dump() << ")\n";
  return exit_for(verdict);
}

int order_battery(const Options& o) {
  const Model x = load_model(o, o.x);
  const Model y = load_model(o, o.y);
  if (dim_of(x) != dim_of(y)) throw DimensionError("models differ in dimension");
  const auto seed = require_seed(o);
  Engine engine = make_engine(seed, 2);
  const auto battery = make_battery(dim_of(x), engine);
  const auto estimates = battery_estimate(x, y, battery, require_n(o), seed);
  std::ofstream file;
  if (!o.out.empty()) {
    file.open(o.out);
    if (!file) throw InvalidArgument("cannot write " + o.out);
  }
  std::ostream& out = o.out.empty() ? std::cout : file;
  out << "function,estimate,standard_error,flagged\n";
  std::size_t flagged = 0;
  char buf[64];
  for (const auto& e : estimates) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g", e.estimate, e.standard_error);
    out << '"' << e.function << "\"," << buf << "," << (e.flagged ? 1 : 0) << "\n";
    flagged += e.flagged ? 1 : 0;
  }
  std::cerr << estimates.size() << " functions, " << flagged << " flagged\n";
  return flagged ? kNegative : kOk;
}

Json levy_terms(const PoissonModel& m, const VertexFunction& phi) {
  const auto lf = levy_functional(m, phi);
  const auto moments = exact_moments(Model(m));
  const int d = m.tree.dim();
  Json terms = Json::array();
  for (int i = 1; i <= d; ++i)
    terms.push_back({{"pair", Pair{i, i}.to_string()},
                     {"weight", io::to_json(moments.means(i - 1))},
                     {"bracket", io::to_json(phi(Vertex::basis(d, i)))}});
  for (int i = 1; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j)
      terms.push_back({{"pair", Pair{i, j}.to_string()},
                       {"weight", io::to_json(moments.covariance(i - 1, j - 1))},
                       {"bracket", io::to_json(bracket(m.tree, Pair{i, j}, phi))}});
  return Json{{"function", phi.name()},
              {"direct", io::to_json(lf.direct)},
              {"covariance_form", io::to_json(lf.covariance_form)},
              {"terms", terms}};
}

int levy_decompose(const Options& o) {
  const Model model = load_model(o, o.model);
  const auto* x = std::get_if<PoissonModel>(&model);
  if (!x) throw UnsupportedFamily("Lévy decomposition needs a Poisson model");
  const int d = x->tree.dim();
  std::vector<VertexFunction> functions{coordinate_sum(), nonzero_indicator()};
  for (int i = 1; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j) functions.push_back(product(i, j));
  for (const auto& f : standard_battery(d)) {
    const auto base = VertexFunction::from_battery(f);
    const Rational origin = base(Vertex::empty(d));
    functions.emplace_back(f.name() + " - origin", [base, origin](const Vertex& v) { return base(v) - origin; });
  }
  Json out = Json::array();
  for (const auto& phi : functions) out.push_back(levy_terms(*x, phi));
  Json doc{{"functions", out}};

  if (!o.y.empty()) {
    const Model other = load_model(o, o.y);
    const auto* y = std::get_if<PoissonModel>(&other);
    if (!y) throw UnsupportedFamily("Lévy difference needs Poisson models");
    Json diffs = Json::array();
    for (const auto& phi : functions)
      diffs.push_back({{"function", phi.name()}, {"difference", io::to_json(levy_difference(*x, *y, phi))}});
    if (x->tree == y->tree)
      for (std::size_t c = 0; c < x->tree.size(); ++c) {
        const Pair p = x->tree.pair(c);
        if (p.is_leaf()) continue;
        const auto phi = convex_witness(x->tree.node(c), p.k, p.l);
        diffs.push_back({{"function", phi.name()}, {"difference", io::to_json(levy_difference(*x, *y, phi))}});
      }
    doc["differences"] = diffs;
  }
  emit(doc);
  std::cerr << functions.size() << " functions decomposed\n";
  return kOk;
}

int report_error(const Error& e, Json extra = Json::object()) {
  Json err{{"code", static_cast<int>(e.code())}, {"name", error_name(e.code())}, {"message", e.what()}};
  for (auto& [k, v] : extra.items()) err[k] = v;
  emit(Json{{"error", err}});
  std::cerr << "error " << static_cast<int>(e.code()) << " (" << error_name(e.code()) << "): " << e.what() << "\n";
  return kInputError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tree-structured dependent random vectors and stochastic order checks", "treecorr"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--arith", o.arith, "Arithmetic mode")->check(CLI::IsMember({"exact", "float"}));

  auto* tree = app.add_subcommand("tree", "Dependency trees")->require_subcommand(1);
  auto* validate = tree->add_subcommand("validate", "Check a tree document");
  validate->add_option("file", o.tree, "Tree JSON")->required();
  auto* build = tree->add_subcommand("build", "Build a standard tree");
  build->add_option("kind", o.builder, "pairwise or prior")->required()->check(CLI::IsMember({"pairwise", "prior"}));
  build->add_option("--dim", o.dim, "Dimension")->required();

  auto* fwd = app.add_subcommand("forward", "Covariance of a decomposition");
  fwd->add_option("--tree", o.tree)->required();
  fwd->add_option("--dec", o.dec)->required();

  auto* inv = app.add_subcommand("invert", "Component variances of a covariance matrix");
  inv->add_option("--tree", o.tree)->required();
  inv->add_option("--cov", o.cov)->required();
  auto* inv_family = inv->add_option("--family", o.family, "Restrict the feasibility block to one family");
  inv->add_option("--p", o.p, "Binomial success probability");
  inv->add_option("--theta", o.theta, "Gamma scale");

  auto* cons = app.add_subcommand("construct", "Model with a prescribed covariance");
  cons->add_option("--tree", o.tree)->required();
  cons->add_option("--cov", o.cov)->required();
  cons->add_option("--family", o.family)->required();
  cons->add_option("--p", o.p, "Binomial success probability");
  cons->add_option("--theta", o.theta, "Gamma scale");

  auto* mom = app.add_subcommand("moments", "Exact means and covariance of a model");
  mom->add_option("--model", o.model)->required();

  auto* smp = app.add_subcommand("sample", "Draw from a model");
  smp->add_option("--model", o.model)->required();
  smp->add_option("--n", o.n)->required();
  smp->add_option("--seed", o.seed)->required();
  smp->add_option("--out", o.out, "CSV path (default stdout)");

  auto* order = app.add_subcommand("order", "Stochastic order checks")->require_subcommand(1);
  auto* check = order->add_subcommand("check", "Decide an order from covariance criteria");
  check->add_option("--relation", o.relation)->check(CLI::IsMember({"sm", "ism", "cx"}));
  check->add_option("--x", o.x)->required();
  check->add_option("--y", o.y)->required();
  auto* couple = order->add_subcommand("couple", "Coupled samples for a unit covariance increment");
  couple->add_option("--model", o.model, "Binomial model B")->required();
  couple->add_option("--pair", o.pair, "k,l")->required();
  couple->add_option("--n", o.n)->required();
  couple->add_option("--seed", o.seed)->required();
  couple->add_option("--out", o.out, "CSV path (default stdout)");
  auto* oracle = order->add_subcommand("oracle", "LP certificate on the truncated lattice");
  oracle->add_option("--x", o.x)->required();
  oracle->add_option("--y", o.y)->required();
  oracle->add_option("--cap", o.cap, "Grid cap m (default: tail policy)");
  oracle->add_flag("--monotone", o.monotone, "Increasing supermodular variant");
  oracle->add_flag("--exact", o.exact, "Exact rational LP");
  auto* battery = order->add_subcommand("battery", "Monte Carlo estimates over the test battery");
  battery->add_option("--x", o.x)->required();
  battery->add_option("--y", o.y)->required();
  battery->add_option("--n", o.n)->required();
  battery->add_option("--seed", o.seed)->required();
  battery->add_option("--out", o.out, "CSV path (default stdout)");

  auto* levy = app.add_subcommand("levy", "Lévy measure reports")->require_subcommand(1);
  auto* decompose = levy->add_subcommand("decompose", "Direct and covariance forms of Lévy functionals");
  decompose->add_option("--model", o.model, "Poisson model")->required();
  decompose->add_option("--y", o.y, "Second Poisson model for differences");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kInputError;
  }
  o.arith_given = app.get_option("--arith")->count() > 0;

  try {
    if (validate->parsed()) return tree_validate(o);
    if (build->parsed()) return tree_build(o);
    if (fwd->parsed()) return forward(o);
    if (inv->parsed()) return invert(o, inv_family->count() > 0);
    if (cons->parsed()) return construct_cmd(o);
    if (mom->parsed()) return moments_cmd(o);
    if (smp->parsed()) return sample_cmd(o);
    if (check->parsed()) return order_check(o);
    if (couple->parsed()) return order_couple(o);
    if (oracle->parsed()) return order_oracle(o);
    if (battery->parsed()) return order_battery(o);
    if (decompose->parsed()) return levy_decompose(o);
  } catch (const InfeasibleDecomposition& e) {
    return report_error(e, Json{{"feasibility", io::feasibility_to_json(e.report())}});
  } catch (const HViolation& e) {
    return report_error(e, Json{{"violations", io::violations_to_json(e.violations())}});
  } catch (const Error& e) {
    return report_error(e);
  } catch (const std::exception& e) {
    emit(Json{{"error", {{"code", 1}, {"name", "internal"}, {"message", e.what()}}}});
    std::cerr << "internal error: " << e.what() << "\n";
    return kInputError;
  }
  std::cerr << app.help();
  return kInputError;
}
