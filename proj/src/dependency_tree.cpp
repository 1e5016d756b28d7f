#include "treecorr/dependency_tree.hpp"

#include <charconv>
#include <sstream>

namespace treecorr {

Pair pair_of(int a, int b) { return a <= b ? Pair{a, b} : Pair{b, a}; }

Pair parse_pair(std::string_view text) {
  auto comma = text.find(',');
  if (comma == std::string_view::npos) throw ParseError("pair '" + std::string(text) + "' is not of the form k,l");
  auto parse_int = [&](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw ParseError("pair '" + std::string(text) + "' is not of the form k,l");
    return value;
  };
  return pair_of(parse_int(text.substr(0, comma)), parse_int(text.substr(comma + 1)));
}

std::size_t pair_index(int dim, Pair p) {
  if (p.k < 1 || p.l > dim || p.k > p.l)
    throw IndexError("pair (" + p.to_string() + ") invalid for dimension " + std::to_string(dim));
  const auto d = static_cast<std::size_t>(dim);
  const auto k = static_cast<std::size_t>(p.k);
  return (k - 1) * d - (k - 1) * (k - 2) / 2 + static_cast<std::size_t>(p.l - p.k);
}

Pair pair_at(int dim, std::size_t index) {
  if (index >= pair_count(dim)) throw IndexError("pair position " + std::to_string(index) + " out of range");
  int k = 1;
  std::size_t row_len = static_cast<std::size_t>(dim);
  while (index >= row_len) {
    index -= row_len;
    --row_len;
    ++k;
  }
  return Pair{k, k + static_cast<int>(index)};
}

const char* violation_name(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kDimensionMismatch: return "dimension_mismatch";
    case ViolationKind::kUnknownPair: return "unknown_pair";
    case ViolationKind::kMissingNode: return "missing_node";
    case ViolationKind::kWrongLeaf: return "wrong_leaf";
    case ViolationKind::kIndexNotMember: return "index_not_member";
    case ViolationKind::kDuplicateVertex: return "duplicate_vertex";
    case ViolationKind::kMissingChild: return "missing_child";
  }
  return "unknown";
}

namespace {

std::string summarize(const std::vector<Violation>& violations) {
  std::ostringstream out;
  out << "tree hypothesis violated:";
  for (const auto& v : violations) out << " [" << violation_name(v.kind) << " at " << v.pair.to_string() << "]";
  return out.str();
}

}  // namespace

HViolation::HViolation(std::vector<Violation> violations)
    : Error(ErrorCode::kHViolation, summarize(violations)), violations_(std::move(violations)) {}

DependencyTree::DependencyTree(int dim, std::vector<Vertex> nodes) : dim_(dim), nodes_(std::move(nodes)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) index_of_.emplace(nodes_[i], i);
  moebius_ = std::make_shared<const MoebiusFunction>(nodes_);
}

const Vertex& DependencyTree::node(Pair p) const { return nodes_.at(pair_index(dim_, p)); }

std::optional<std::size_t> DependencyTree::find(const Vertex& v) const {
  if (auto it = index_of_.find(v); it != index_of_.end()) return it->second;
  return std::nullopt;
}

DependencyTree::Links DependencyTree::links(std::size_t index) const {
  const Pair p = pair(index);
  if (p.is_leaf()) throw InvalidArgument("leaf (" + p.to_string() + ") has no children");
  const Vertex& e = nodes_[index];
  Links out{*find(remove(e, p.k)), *find(remove(e, p.l)), remove(remove(e, p.k), p.l), std::nullopt};
  out.grandchild_node = find(out.grandchild);
  return out;
}

std::vector<Violation> check_hypothesis(int dim, const NodeMap& candidate) {
  if (dim < 1 || dim > Vertex::kMaxDim)
    throw DimensionError("tree dimension " + std::to_string(dim) + " outside [1, 64]");
  std::vector<Violation> out;

  std::map<Pair, Vertex> nodes;
  for (const auto& [p, v] : candidate) {
    if (p.k < 1 || p.l > dim || p.k > p.l) {
      out.push_back({ViolationKind::kUnknownPair, p, std::nullopt, "pair outside 1 <= k <= l <= d"});
      continue;
    }
    if (v.dim() != dim) {
      out.push_back({ViolationKind::kDimensionMismatch, p, std::nullopt,
                     "vertex " + v.to_string() + " has dimension " + std::to_string(v.dim())});
      continue;
    }
    nodes.emplace(p, v);
  }

  for (int i = 1; i <= dim; ++i) {
    const Pair leaf{i, i};
    auto it = nodes.find(leaf);
    if (it == nodes.end()) {
      nodes.emplace(leaf, Vertex::basis(dim, i));
    } else if (it->second != Vertex::basis(dim, i)) {
      out.push_back({ViolationKind::kWrongLeaf, leaf, std::nullopt,
                     "leaf is " + it->second.to_string() + ", expected " + Vertex::basis(dim, i).to_string()});
    }
  }

  std::unordered_map<Vertex, Pair, VertexHash> owner;
  for (const auto& [p, v] : nodes) {
    auto [it, inserted] = owner.emplace(v, p);
    if (!inserted)
      out.push_back({ViolationKind::kDuplicateVertex, p, it->second, "vertex " + v.to_string() + " repeated"});
  }

  for (int k = 1; k <= dim; ++k) {
    for (int l = k + 1; l <= dim; ++l) {
      const Pair p{k, l};
      auto it = nodes.find(p);
      if (it == nodes.end()) {
        out.push_back({ViolationKind::kMissingNode, p, std::nullopt, "no vertex given"});
        continue;
      }
      const Vertex& e = it->second;
      if (!e.contains(k) || !e.contains(l)) {
        out.push_back({ViolationKind::kIndexNotMember, p, std::nullopt,
                       "vertex " + e.to_string() + " must contain both " + std::to_string(k) + " and " +
                           std::to_string(l)});
        continue;
      }
      for (int drop : {k, l}) {
        const Vertex child = remove(e, drop);
        if (!owner.contains(child))
          out.push_back({ViolationKind::kMissingChild, p, std::nullopt,
                         "child " + child.to_string() + " (removing " + std::to_string(drop) + ") not in family"});
      }
    }
  }
  return out;
}

DependencyTree validate_tree(int dim, const NodeMap& candidate) {
  auto violations = check_hypothesis(dim, candidate);
  if (!violations.empty()) throw HViolation(std::move(violations));

  std::vector<Vertex> nodes(pair_count(dim));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Pair p = pair_at(dim, i);
    auto it = candidate.find(p);
    nodes[i] = it != candidate.end() ? it->second : Vertex::basis(dim, p.k);
  }
  return DependencyTree(dim, std::move(nodes));
}

DependencyTree build_pairwise(int dim) {
  NodeMap nodes;
  for (int k = 1; k <= dim; ++k)
    for (int l = k + 1; l <= dim; ++l) nodes.emplace(Pair{k, l}, Vertex::from_members(dim, {k, l}));
  return validate_tree(dim, nodes);
}

DependencyTree build_prior_structure(int dim) {
  NodeMap nodes;
  for (int i = 1; i <= dim; ++i) {
    for (int j = i + 1; j <= dim; ++j) {
      std::uint64_t bits = (std::uint64_t{1} << i) - 1;  // {1..i}
      bits |= std::uint64_t{1} << (j - 1);
      nodes.emplace(Pair{i, j}, Vertex(dim, bits));
    }
  }
  return validate_tree(dim, nodes);
}

MembershipTable membership(const DependencyTree& tree) {
  MembershipTable table{tree.dim(), std::vector<std::vector<Pair>>(static_cast<std::size_t>(tree.dim()))};
  for (std::size_t c = 0; c < tree.size(); ++c)
    for (int i : tree.node(c).members()) table.rows[static_cast<std::size_t>(i - 1)].push_back(tree.pair(c));
  return table;
}

}  // namespace treecorr
