#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"
#include "treecorr/hypercube.hpp"

using namespace treecorr;

namespace {

Vertex v(int d, std::initializer_list<int> members) { return Vertex::from_members(d, members); }

}  // namespace

TEST_CASE("bitstrings put index 1 first") {
  const Vertex x = Vertex::parse("11001");
  CHECK(x.dim() == 5);
  CHECK(x.members() == std::vector<int>{1, 2, 5});
  CHECK(x.to_string() == "11001");
  CHECK(x.contains(1));
  CHECK_FALSE(x.contains(3));
  CHECK_THROWS_AS(Vertex::parse("10a"), ParseError);
  CHECK_THROWS_AS(Vertex::parse(""), DimensionError);
  CHECK_THROWS_AS(x.contains(6), IndexError);
}

TEST_CASE("precedes is set inclusion") {
  CHECK(precedes(v(5, {2, 3}), v(5, {1, 2, 3, 5})));
  CHECK(precedes(v(5, {1}), v(5, {1})));
  CHECK_FALSE(precedes(v(5, {1, 4}), v(5, {1, 2, 3, 5})));
  CHECK_FALSE(strictly_precedes(v(5, {1}), v(5, {1})));
  CHECK(strictly_precedes(Vertex::empty(3), v(3, {2})));
  CHECK_THROWS_AS(precedes(v(3, {1}), v(4, {1})), DimensionError);
}

TEST_CASE("remove clears one index") {
  CHECK(remove(v(5, {1, 2, 5}), 1) == v(5, {2, 5}));
  CHECK(remove(v(5, {2}), 1) == v(5, {2}));
  CHECK(remove(Vertex::parse("11001"), 1) == Vertex::parse("01001"));
  CHECK_THROWS_AS(remove(v(3, {1}), 4), IndexError);
  CHECK_THROWS_AS(remove(v(3, {1}), 0), IndexError);
}

TEST_CASE("Möbius function on the full Boolean lattice alternates in sign") {
  const int d = 4;
  std::vector<Vertex> all;
  for (std::uint64_t b = 0; b < (1U << d); ++b) all.emplace_back(d, b);
  const MoebiusFunction mu(all);
  for (const auto& x : all)
    for (const auto& y : all)
      if (precedes(y, x)) CHECK(mu.value(x, y) == ((x.size() - y.size()) % 2 ? -1 : 1));
}

TEST_CASE("Möbius function errors") {
  std::vector<Vertex> family{v(3, {1}), v(3, {1, 2})};
  const MoebiusFunction mu(family);
  CHECK(mu.value(v(3, {1, 2}), v(3, {1, 2})) == 1);
  CHECK_THROWS_AS(mu.value(v(3, {1}), v(3, {1, 2})), OrderError);
  CHECK_THROWS_AS(moebius(v(3, {1}), v(3, {2}), family), OrderError);
}

TEST_CASE("Möbius function matches the interval definition on random families") {
  Engine engine = make_engine(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int d = 2 + trial % 5;
    std::uniform_int_distribution<std::uint64_t> bits(0, (std::uint64_t{1} << d) - 1);
    std::vector<Vertex> family;
    std::vector<std::uint64_t> raw;
    for (int i = 0; i < 10; ++i) {
      const auto b = bits(engine);
      family.emplace_back(d, b);
      raw.push_back(b);
    }
    const MoebiusFunction mu(family);
    for (std::uint64_t x : raw)
      for (std::uint64_t y : raw)
        if ((y & ~x) == 0) {
          CHECK(mu.value(Vertex(d, x), Vertex(d, y)) == testing::brute_moebius(raw, x, y));
          CHECK(moebius(Vertex(d, x), Vertex(d, y), family) == testing::brute_moebius(raw, x, y));
        }
  }
}
