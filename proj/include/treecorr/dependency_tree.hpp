#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "treecorr/errors.hpp"
#include "treecorr/hypercube.hpp"

namespace treecorr {

/// Unordered index pair {k, l} stored with 1 <= k <= l.
struct Pair {
  int k = 0;
  int l = 0;

  bool is_leaf() const { return k == l; }
  std::string to_string() const { return std::to_string(k) + "," + std::to_string(l); }
  auto operator<=>(const Pair&) const = default;
};

/// Normalizes the order of k and l.
Pair pair_of(int a, int b);
/// Parses "k,l" (either order).
Pair parse_pair(std::string_view text);

/// Number of pairs 1 <= k <= l <= d, i.e. d(d+1)/2.
constexpr std::size_t pair_count(int dim) {
  return static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim + 1) / 2;
}
/// Lexicographic position of (k, l) among all pairs of dimension d.
std::size_t pair_index(int dim, Pair p);
Pair pair_at(int dim, std::size_t index);

using NodeMap = std::map<Pair, Vertex>;

enum class ViolationKind {
  kDimensionMismatch,
  kUnknownPair,
  kMissingNode,
  kWrongLeaf,
  kIndexNotMember,
  kDuplicateVertex,
  kMissingChild,
};

const char* violation_name(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  Pair pair;
  std::optional<Pair> other;  // duplicate partner
  std::string detail;
};

class HViolation : public Error {
 public:
  explicit HViolation(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Family (e_{k,l}) on C_d satisfying hypothesis (H): every internal node e_{k,l}
/// has both e_{k,l}\{k} and e_{k,l}\{l} in the family, leaves are e_{i,i} = {i},
/// k and l belong to e_{k,l}, and nodes are pairwise distinct.
///
/// Immutable; only obtainable through validate_tree or the builders.
class DependencyTree {
 public:
  /// Lookup results for an internal node (k < l). Indices are node positions.
  struct Links {
    std::size_t child_k;  // node equal to e_{k,l} \ {k}
    std::size_t child_l;  // node equal to e_{k,l} \ {l}
    Vertex grandchild;    // e_{k,l} \ {k,l}
    std::optional<std::size_t> grandchild_node;
  };

  int dim() const { return dim_; }
  std::size_t size() const { return nodes_.size(); }

  const Vertex& node(Pair p) const;
  const Vertex& node(std::size_t index) const { return nodes_.at(index); }
  Pair pair(std::size_t index) const { return pair_at(dim_, index); }
  const std::vector<Vertex>& nodes() const { return nodes_; }

  std::optional<std::size_t> find(const Vertex& v) const;
  /// Children and grandchild located by vertex value. Requires k < l.
  Links links(std::size_t index) const;

  const MoebiusFunction& moebius() const { return *moebius_; }

  bool operator==(const DependencyTree& other) const {
    return dim_ == other.dim_ && nodes_ == other.nodes_;
  }

 private:
  friend DependencyTree validate_tree(int dim, const NodeMap& candidate);
  DependencyTree(int dim, std::vector<Vertex> nodes);

  int dim_ = 0;
  std::vector<Vertex> nodes_;
  std::unordered_map<Vertex, std::size_t, VertexHash> index_of_;
  std::shared_ptr<const MoebiusFunction> moebius_;
};

/// Every violated clause of (H) and of the structural invariants; empty when valid.
/// Leaves may be omitted from the candidate (they are implied).
std::vector<Violation> check_hypothesis(int dim, const NodeMap& candidate);

/// Throws HViolation listing all offending pairs, or DimensionError.
DependencyTree validate_tree(int dim, const NodeMap& candidate);

/// node(k,l) = {k,l}.
DependencyTree build_pairwise(int dim);
/// node(i,j) = {1,...,i} ∪ {j} for i < j.
DependencyTree build_prior_structure(int dim);

/// Row i lists the pairs (k,l) whose node contains i, in pair order.
struct MembershipTable {
  int dim = 0;
  std::vector<std::vector<Pair>> rows;

  const std::vector<Pair>& row(int index) const { return rows.at(static_cast<std::size_t>(index - 1)); }
};

MembershipTable membership(const DependencyTree& tree);

}  // namespace treecorr
