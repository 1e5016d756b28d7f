#include "treecorr/hypercube.hpp"

#include <algorithm>
#include <bit>

#include "treecorr/errors.hpp"

namespace treecorr {

namespace {

std::uint64_t dim_mask(int dim) {
  return dim == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << dim) - 1);
}

void check_dim(int dim) {
  if (dim < 1 || dim > Vertex::kMaxDim)
    throw DimensionError("hypercube dimension " + std::to_string(dim) + " outside [1, 64]");
}

void check_index(int dim, int index) {
  if (index < 1 || index > dim)
    throw IndexError("index " + std::to_string(index) + " outside [1, " + std::to_string(dim) + "]");
}

}  // namespace

Vertex::Vertex(int dim, std::uint64_t bits) : dim_(dim), bits_(bits) {
  check_dim(dim);
  if ((bits & ~dim_mask(dim)) != 0)
    throw DimensionError("vertex has members beyond dimension " + std::to_string(dim));
}

Vertex Vertex::full(int dim) {
  check_dim(dim);
  return Vertex(dim, dim_mask(dim));
}

Vertex Vertex::basis(int dim, int index) {
  check_dim(dim);
  check_index(dim, index);
  return Vertex(dim, std::uint64_t{1} << (index - 1));
}

Vertex Vertex::from_members(int dim, std::initializer_list<int> members) {
  return from_members(dim, std::span<const int>(members.begin(), members.size()));
}

Vertex Vertex::from_members(int dim, std::span<const int> members) {
  check_dim(dim);
  std::uint64_t bits = 0;
  for (int i : members) {
    check_index(dim, i);
    bits |= std::uint64_t{1} << (i - 1);
  }
  return Vertex(dim, bits);
}

Vertex Vertex::parse(std::string_view bitstring) {
  const int dim = static_cast<int>(bitstring.size());
  if (dim < 1 || dim > kMaxDim)
    throw DimensionError("bitstring length " + std::to_string(dim) + " outside [1, 64]");
  std::uint64_t bits = 0;
  for (int i = 0; i < dim; ++i) {
    if (bitstring[i] == '1') {
      bits |= std::uint64_t{1} << i;
    } else if (bitstring[i] != '0') {
      throw ParseError("bitstring '" + std::string(bitstring) + "' has characters other than 0/1");
    }
  }
  return Vertex(dim, bits);
}

int Vertex::size() const noexcept { return std::popcount(bits_); }

bool Vertex::contains(int index) const {
  check_index(dim_, index);
  return (bits_ >> (index - 1)) & 1U;
}

std::vector<int> Vertex::members() const {
  std::vector<int> out;
  for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b) + 1);
  return out;
}

std::string Vertex::to_string() const {
  std::string out(static_cast<std::size_t>(dim_), '0');
  for (int i = 0; i < dim_; ++i)
    if ((bits_ >> i) & 1U) out[static_cast<std::size_t>(i)] = '1';
  return out;
}

bool precedes(const Vertex& x, const Vertex& y) {
  if (x.dim() != y.dim())
    throw DimensionError("comparing vertices of dimension " + std::to_string(x.dim()) + " and " +
                         std::to_string(y.dim()));
  return (x.bits() & ~y.bits()) == 0;
}

bool strictly_precedes(const Vertex& x, const Vertex& y) { return precedes(x, y) && x != y; }

Vertex remove(const Vertex& x, int index) {
  check_index(x.dim(), index);
  return Vertex(x.dim(), x.bits() & ~(std::uint64_t{1} << (index - 1)));
}

MoebiusFunction::MoebiusFunction(std::span<const Vertex> family)
    : family_(family.begin(), family.end()) {
  if (!family_.empty()) dim_ = family_.front().dim();
  for (const auto& v : family_)
    if (v.dim() != dim_) throw DimensionError("Möbius family mixes dimensions");
  std::sort(family_.begin(), family_.end(),
            [](const Vertex& a, const Vertex& b) { return a.bits() < b.bits(); });
  family_.erase(std::unique(family_.begin(), family_.end()), family_.end());
}

const MoebiusFunction::Row& MoebiusFunction::row_for(const Vertex& x) const {
  std::lock_guard lock(mutex_);
  if (auto it = memo_.find(x); it != memo_.end()) return it->second;

  // Members of family ∪ {x} lying below x, processed from the top down.
  std::vector<Vertex> below;
  for (const auto& z : family_)
    if (precedes(z, x)) below.push_back(z);
  if (std::find(below.begin(), below.end(), x) == below.end()) below.push_back(x);
  std::sort(below.begin(), below.end(),
            [](const Vertex& a, const Vertex& b) { return a.size() > b.size(); });

  Row row;
  for (const auto& z : below) {
    if (z == x) {
      row[z] = 1;
      continue;
    }
    long sum = 0;
    for (const auto& [w, mu] : row)
      if (strictly_precedes(z, w)) sum += mu;
    row[z] = -sum;
  }
  return memo_.emplace(x, std::move(row)).first->second;
}

long MoebiusFunction::value(const Vertex& x, const Vertex& y) const {
  if (!precedes(y, x))
    throw OrderError("moebius(x, y) requires y ⪯ x; got x=" + x.to_string() + ", y=" + y.to_string());
  const Row& row = row_for(x);
  if (auto it = row.find(y); it != row.end()) return it->second;
  long sum = 0;
  for (const auto& [z, mu] : row)
    if (strictly_precedes(y, z)) sum += mu;
  return -sum;
}

std::vector<std::pair<Vertex, long>> MoebiusFunction::row(const Vertex& x) const {
  std::vector<std::pair<Vertex, long>> out;
  for (const auto& [z, mu] : row_for(x))
    if (mu != 0) out.emplace_back(z, mu);
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first.bits() > b.first.bits(); });
  return out;
}

long moebius(const Vertex& x, const Vertex& y, std::span<const Vertex> within) {
  MoebiusFunction mu(within);
  return mu.value(x, y);
}

}  // namespace treecorr
