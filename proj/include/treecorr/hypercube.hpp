#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace treecorr {

/// A vertex of the d-dimensional unit hypercube C_d, i.e. a subset of {1..d}.
///
/// Index i (1-based) is stored in bit i-1. The textual form is a bitstring whose
/// first character is index 1, so {1,2,5} in d=5 prints as "11001".
class Vertex {
 public:
  static constexpr int kMaxDim = 64;

  Vertex() = default;
  /// Throws DimensionError if dim is outside [1, 64] or bits has members beyond dim.
  Vertex(int dim, std::uint64_t bits);

  static Vertex empty(int dim) { return Vertex(dim, 0); }
  static Vertex full(int dim);
  static Vertex basis(int dim, int index);
  static Vertex from_members(int dim, std::initializer_list<int> members);
  static Vertex from_members(int dim, std::span<const int> members);
  /// Parses "11001"-style strings; throws ParseError on other characters.
  static Vertex parse(std::string_view bitstring);

  int dim() const noexcept { return dim_; }
  std::uint64_t bits() const noexcept { return bits_; }
  int size() const noexcept;
  bool is_empty() const noexcept { return bits_ == 0; }

  /// 1-based membership; throws IndexError when out of range.
  bool contains(int index) const;
  std::vector<int> members() const;
  std::string to_string() const;

  bool operator==(const Vertex&) const = default;

 private:
  int dim_ = 0;
  std::uint64_t bits_ = 0;
};

struct VertexHash {
  std::size_t operator()(const Vertex& v) const noexcept {
    return std::hash<std::uint64_t>{}(v.bits()) ^ (static_cast<std::size_t>(v.dim()) << 58);
  }
};

/// x ⪯ y, i.e. members(x) ⊆ members(y). Throws DimensionError on mismatched dims.
bool precedes(const Vertex& x, const Vertex& y);
bool strictly_precedes(const Vertex& x, const Vertex& y);

/// x with index a cleared (1-based); idempotent when a is absent.
Vertex remove(const Vertex& x, int index);

/// Möbius function of a finite family of hypercube vertices ordered by inclusion.
///
/// `value(x, y)` follows the top-down recursion mu(x,x) = 1,
/// mu(x,y) = -sum_{y < z <= x} mu(x,z), with z ranging over the family plus {x, y}.
/// Rows mu(x, .) are memoized; the memo is guarded so a single instance can be
/// shared between threads.
class MoebiusFunction {
 public:
  explicit MoebiusFunction(std::span<const Vertex> family);

  /// Requires y ⪯ x (OrderError otherwise).
  long value(const Vertex& x, const Vertex& y) const;

  /// All nonzero mu(x, z) for z in family ∪ {x} below x.
  std::vector<std::pair<Vertex, long>> row(const Vertex& x) const;

  std::span<const Vertex> family() const { return family_; }

 private:
  using Row = std::unordered_map<Vertex, long, VertexHash>;
  const Row& row_for(const Vertex& x) const;

  int dim_ = 0;
  std::vector<Vertex> family_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<Vertex, Row, VertexHash> memo_;
};

/// mu(x, y) in the sub-poset induced by `within` ∪ {x, y}. Memoized per call.
long moebius(const Vertex& x, const Vertex& y, std::span<const Vertex> within);

}  // namespace treecorr
