#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "treecorr/covariance.hpp"
#include "treecorr/dependency_tree.hpp"
#include "treecorr/models.hpp"
#include "treecorr/oracle.hpp"
#include "treecorr/ordering.hpp"

namespace treecorr::io {

using Json = nlohmann::ordered_json;

/// Parsing state shared by the readers. In exact mode a non-integral JSON
/// number is accepted through its shortest decimal text and a warning is recorded.
struct ReadContext {
  bool exact = true;
  std::filesystem::path base_dir;  // resolves relative "tree" paths inside model files
  std::vector<std::string> warnings;
};

Json read_file(const std::filesystem::path& path);

/// Strings ("p/q", "0.25", "3") and JSON numbers.
Rational rational_from_json(const Json& value, ReadContext& ctx, std::string_view where);
Json to_json(const Rational& value);

/// { "dim": d, "nodes": { "k,l": "bitstring" } }; leaves may be omitted.
/// The first character of a bitstring is index 1.
std::pair<int, NodeMap> tree_candidate_from_json(const Json& doc);
DependencyTree tree_from_json(const Json& doc);
Json tree_to_json(const DependencyTree& tree, bool include_leaves = false);
Json violations_to_json(const std::vector<Violation>& violations);

/// { "dim": d, "matrix": [[...]], "means": [...] }.
CovarianceSpec<Rational> covariance_from_json(const Json& doc, ReadContext& ctx);
Json covariance_to_json(const CovarianceSpec<Rational>& spec);

/// { "dim": d, "components": { "k,l": value } }; missing pairs are zero.
VarianceDecomposition<Rational> decomposition_from_json(const Json& doc, ReadContext& ctx);
Json decomposition_to_json(const VarianceDecomposition<Rational>& dec);
Json feasibility_to_json(const FeasibilityReport& report);

/// { "family": ..., "tree": {...} or "path", "params": {...}, "components": { "k,l": value } }.
/// params: binomial "p", gamma "theta", gaussian "means" (per component, "k,l" keyed).
Model model_from_json(const Json& doc, ReadContext& ctx);
Json model_to_json(const Model& model);

Json moments_to_json(const Moments<Rational>& moments);
Json verdict_to_json(const OrderingVerdict& verdict);
Json certificate_to_json(const LpCertificate<double>& cert);
Json certificate_to_json(const LpCertificate<Rational>& cert);

}  // namespace treecorr::io
