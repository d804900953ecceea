#include <catch2/catch_amalgamated.hpp>

#include "realmono/measure.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace realmono;
using namespace realmono::testing;

namespace {

std::vector<Rational> fif(std::vector<long> n) {
  std::vector<Rational> out;
  for (long k : n) out.push_back(q(k, 15));
  return out;
}

// Sample points: every breakpoint, the midpoint of every piece, and some
// random rationals.
std::vector<Rational> probes(Rng& rng, const StepFunction& f) {
  std::vector<Rational> out;
  for (std::size_t i = 0; i + 1 < f.breakpoints.size(); ++i) {
    out.push_back(f.breakpoints[i]);
    out.push_back(Rational(f.breakpoints[i] + f.breakpoints[i + 1]) / 2);
  }
  for (int k = 0; k < 20; ++k) out.push_back(q(static_cast<long>(rng.below(997)), 997));
  return out;
}

}  // namespace

TEST_CASE("RationalMeasure validation", "[measure]") {
  REQUIRE_THROWS_AS(RationalMeasure({q(1, 2), q(1, 3)}), InvalidInput);
  REQUIRE_THROWS_AS(RationalMeasure({q(3, 2), q(-1, 2)}), InvalidInput);
  REQUIRE_NOTHROW(RationalMeasure({q(0, 1), q(1, 1)}));
  REQUIRE(RationalMeasure::uniform(3)[1] == q(1, 3));
  REQUIRE(RationalMeasure::point_mass(3, 2)[2] == 1);
  auto r = worked_rooting();
  REQUIRE_THROWS_AS(dist_fn(RationalMeasure::uniform(5), r.tree), DomainMismatch);
  REQUIRE_THROWS_AS(inverse_transform(RationalMeasure::uniform(5), r.extension), DomainMismatch);
}

TEST_CASE("distribution functions on the six-element example", "[measure]") {
  auto r = worked_rooting();
  auto f = dist_fn(worked_p1(), r.tree);
  CHECK(f[X] == q(3, 15));
  CHECK(f[Z] == q(6, 15));
  CHECK(f[W] == q(14, 15));
  CHECK(f[TAU] == 1);

  std::vector<Rational> expected1, expected2;
  auto f1 = dist_fn_linext(worked_p1(), r.extension);
  auto f2 = dist_fn_linext(worked_p2(), r.extension);
  for (Element e : r.extension.order) {
    expected1.push_back(f1[e]);
    expected2.push_back(f2[e]);
  }
  CHECK(expected1 == fif({3, 5, 6, 7, 14, 15}));
  CHECK(expected2 == fif({1, 2, 8, 11, 13, 15}));
}

TEST_CASE("inverse_transform on the six-element example", "[measure]") {
  auto r = worked_rooting();
  auto p1 = inverse_transform(worked_p1(), r.extension);
  auto p2 = inverse_transform(worked_p2(), r.extension);
  CHECK(p1.breakpoints == fif({0, 3, 5, 6, 7, 14, 15}));
  CHECK(p1.values == std::vector<Element>{X, Y, Z, V, W, TAU});
  CHECK(p2.breakpoints == fif({0, 1, 2, 8, 11, 13, 15}));
  CHECK(p2.values == std::vector<Element>{X, Y, Z, V, W, TAU});
  CHECK(p1(q(0, 1)) == X);
  CHECK(p1(q(3, 15)) == Y);
  CHECK(p1(q(14, 15)) == TAU);
  CHECK_THROWS_AS(p1(q(1, 1)), InvalidInput);
  CHECK_THROWS_AS(p1(q(-1, 15)), InvalidInput);
}

TEST_CASE("zero masses vanish from the step function", "[measure]") {
  auto ext = LinearExtension::from_order({0, 1, 2});
  auto f = inverse_transform(RationalMeasure({q(1, 2), q(0, 1), q(1, 2)}), ext);
  CHECK(f.values == std::vector<Element>{0, 2});
  CHECK(f.breakpoints == std::vector<Rational>{q(0, 1), q(1, 2), q(1, 1)});
}

TEST_CASE("inverse_transform properties", "[measure]") {
  Rng rng(17);
  SECTION("pointwise least element with t < F<x>, and push-forward is the measure") {
    for (int trial = 0; trial < 300; ++trial) {
      auto p = random_tree_poset(rng, 1 + rng.below(9));
      auto leaves = cover_graph(p).leaves();
      auto r = root_tree(p, leaves[rng.below(leaves.size())]);
      auto m = random_measure(rng, p.size(), 1 + rng.below(30));
      auto f = inverse_transform(m, r.extension);
      for (const auto& t : probes(rng, f)) REQUIRE(f(t) == brute_inverse(m, r.extension, t));
      for (Element e = 0; e < p.size(); ++e) REQUIRE(f.length_of(e) == m[e]);
      // Canonical form: positive pieces, no equal neighbours.
      for (std::size_t i = 0; i < f.pieces(); ++i) {
        REQUIRE(f.breakpoints[i] < f.breakpoints[i + 1]);
        if (i) REQUIRE(f.values[i] != f.values[i - 1]);
      }
    }
  }
  SECTION("on a chain it equals the classical transform") {
    for (int trial = 0; trial < 200; ++trial) {
      auto c = chain(1 + rng.below(8));
      auto m = random_measure(rng, c.size(), 1 + rng.below(30));
      auto ext = root_tree(c, c.size() - 1).extension;
      REQUIRE(inverse_transform(m, ext) == classical_inverse(m, c));
    }
    REQUIRE_THROWS_AS(classical_inverse(RationalMeasure::uniform(4), diamond()), NotAChain);
  }
  SECTION("on a path rooted at an end F and F<> coincide") {
    for (int trial = 0; trial < 200; ++trial) {
      auto p = random_path_poset(rng, 1 + rng.below(9));
      auto leaves = cover_graph(p).leaves();
      auto r = root_tree(p, leaves[rng.below(leaves.size())]);
      auto m = random_measure(rng, p.size(), 1 + rng.below(30));
      REQUIRE(dist_fn(m, r.tree).values == dist_fn_linext(m, r.extension).values);
    }
  }
}
