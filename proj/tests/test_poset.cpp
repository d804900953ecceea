#include <catch2/catch_amalgamated.hpp>

#include "realmono/poset.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace realmono;
using namespace realmono::testing;

TEST_CASE("validate_poset closes and checks the relation", "[poset]") {
  SECTION("single element is reflexive") {
    auto p = validate_poset({"a"}, {});
    REQUIRE(p.size() == 1);
    REQUIRE(p.leq(0, 0));
  }
  SECTION("two-cycle is rejected") {
    REQUIRE_THROWS_AS(validate_poset({"a", "b"}, {{"a", "b"}, {"b", "a"}}), CycleError);
  }
  SECTION("longer cycles are caught after closure") {
    REQUIRE_THROWS_AS(validate_poset({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}, {"c", "a"}}), CycleError);
  }
  SECTION("dangling names") {
    REQUIRE_THROWS_AS(validate_poset({"a"}, {{"a", "q"}}), UnknownElement);
    REQUIRE_THROWS_AS(validate_poset({"a", "a"}, {}), InvalidInput);
  }
  SECTION("arbitrary order pairs are closed transitively") {
    auto p = validate_poset({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}});
    REQUIRE(p.leq(0, 2));
    REQUIRE_FALSE(p.leq(2, 0));
  }
  SECTION("six-element example has exactly five strict relations") {
    auto p = worked_poset();
    std::size_t strict = 0;
    for (Element a = 0; a < p.size(); ++a)
      for (Element b = 0; b < p.size(); ++b) strict += p.lt(a, b);
    REQUIRE(strict == 5);
    REQUIRE(p.covers(Z, Y));
    REQUIRE(classify(p) == PosetClass::W);
  }
}

TEST_CASE("cover_graph", "[poset]") {
  SECTION("2-chain") {
    auto g = cover_graph(chain(2));
    REQUIRE(g.edges == std::vector<CoverEdge>{{0, 1}});
  }
  SECTION("six-element example is a tree") {
    auto g = cover_graph(worked_poset());
    std::vector<CoverEdge> expected{{X, Z}, {Y, Z}, {W, Z}, {W, V}, {W, TAU}};
    std::sort(expected.begin(), expected.end());
    REQUIRE(g.edges == expected);
    REQUIRE(g.is_tree());
  }
  SECTION("diamond is a 4-cycle") {
    auto g = cover_graph(diamond());
    REQUIRE(g.edges.size() == 4);
    REQUIRE_FALSE(g.is_tree());
    for (Element x = 0; x < 4; ++x) REQUIRE(g.degree(x) == 2);
  }
  SECTION("rebuilding from covers reproduces the order") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
      auto p = trial % 2 ? random_tree_poset(rng, 2 + rng.below(9)) : random_poset(rng, 1 + rng.below(9));
      std::vector<OrderPair> covers;
      for (const auto& e : cover_graph(p).edges) covers.push_back({p.name(e.lower), p.name(e.upper)});
      REQUIRE(validate_poset(p.names(), covers) == p);
    }
  }
}

TEST_CASE("up_sets", "[poset]") {
  SECTION("small cases") {
    REQUIRE(up_sets(chain(2)).size() == 3);
    REQUIRE(up_sets(antichain(2)).size() == 4);
  }
  SECTION("six-element example matches the subset filter") {
    auto p = worked_poset();
    auto ups = up_sets(p);
    REQUIRE(ups.size() == brute_antichains(p));
    REQUIRE(std::set<std::vector<Element>>(ups.begin(), ups.end()) == brute_up_sets(p));
  }
  SECTION("random posets up to 12 elements match the subset filter without duplicates") {
    Rng rng(5);
    for (int trial = 0; trial < 120; ++trial) {
      auto p = random_poset(rng, 1 + rng.below(12), rng.below(60));
      auto ups = up_sets(p);
      std::set<std::vector<Element>> unique(ups.begin(), ups.end());
      REQUIRE(unique.size() == ups.size());
      REQUIRE(unique == brute_up_sets(p));
    }
  }
  SECTION("cap") {
    REQUIRE_THROWS_AS(up_sets(antichain(6), 63), SizeLimit);
    REQUIRE(up_sets(antichain(6), 64).size() == 64);
  }
}

TEST_CASE("classify", "[poset]") {
  REQUIRE(classify(chain(3)) == PosetClass::Z);
  REQUIRE(classify(chain(1)) == PosetClass::Z);
  REQUIRE(classify(worked_poset()) == PosetClass::W);
  REQUIRE(classify(diamond()) == PosetClass::NonAcyclicOrDisconnected);
  REQUIRE(classify(antichain(2)) == PosetClass::NonAcyclicOrDisconnected);
  // c has degree three and lies strictly between a and d, e.
  REQUIRE(classify(validate_poset({"a", "c", "d", "e"}, {{"a", "c"}, {"c", "d"}, {"c", "e"}})) == PosetClass::BY);
  // A zigzag path stays Z even though its middle elements are not extremal.
  REQUIRE(classify(validate_poset({"a", "b", "c", "d"}, {{"a", "b"}, {"c", "b"}, {"c", "d"}})) == PosetClass::Z);

  SECTION("Z implies degrees at most two; W and BY split on degree-three elements") {
    Rng rng(21);
    for (int trial = 0; trial < 300; ++trial) {
      auto p = random_tree_poset(rng, 1 + rng.below(9));
      auto g = cover_graph(p);
      auto c = classify(p);
      if (c == PosetClass::Z) {
        for (Element x = 0; x < p.size(); ++x) REQUIRE(g.degree(x) <= 2);
        continue;
      }
      bool bad = false;
      for (Element x = 0; x < p.size(); ++x)
        if (g.degree(x) >= 3 && !p.is_minimal(x) && !p.is_maximal(x)) bad = true;
      REQUIRE(c == (bad ? PosetClass::BY : PosetClass::W));
    }
  }
  SECTION("generated Class W posets classify as W") {
    Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) REQUIRE(classify(random_class_w_poset(rng, 4 + rng.below(5))) == PosetClass::W);
  }
}

TEST_CASE("root_tree", "[poset]") {
  auto s = worked_poset();
  SECTION("chosen orders z < v and x < y") {
    auto r = worked_rooting();
    REQUIRE(r.extension.order == std::vector<Element>{X, Y, Z, V, W, TAU});
    REQUIRE(r.tree.root == TAU);
    REQUIRE(r.tree.children[W] == std::vector<Element>{Z, V});
    REQUIRE(!r.tree.parent[TAU].has_value());
    REQUIRE(*r.tree.parent[X] == Z);
  }
  SECTION("v before z puts the whole subtree of z after v") {
    auto r = root_tree(s, TAU, {{W, {V, Z}}, {Z, {X, Y}}});
    REQUIRE(r.extension.order == std::vector<Element>{V, X, Y, Z, W, TAU});
  }
  SECTION("chain rooted at its top is the chain itself") {
    auto c = chain(3);
    REQUIRE(root_tree(c, 2).extension.order == std::vector<Element>{0, 1, 2});
    REQUIRE(root_tree(c, 0).extension.order == std::vector<Element>{2, 1, 0});
  }
  SECTION("errors") {
    REQUIRE_THROWS_AS(root_tree(diamond(), 0), NotATree);
    REQUIRE_THROWS_AS(root_tree(s, Z), NotALeaf);
    REQUIRE_THROWS_AS(root_tree(s, TAU, {{W, {Z}}}), InvalidInput);
    REQUIRE_THROWS_AS(root_tree(s, TAU, {{W, {Z, X}}}), InvalidInput);
  }
  SECTION("extension follows the two-case rule for every leaf and ordering") {
    Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
      auto p = random_tree_poset(rng, 1 + rng.below(9));
      auto leaves = cover_graph(p).leaves();
      Element root = leaves[rng.below(leaves.size())];
      auto base = root_tree(p, root);
      ChildOrderings orders;
      for (Element x = 0; x < p.size(); ++x) {
        auto c = base.tree.children[x];
        rng.shuffle(c);
        if (!c.empty()) orders[x] = c;
      }
      auto r = root_tree(p, root, orders);
      const auto& t = r.tree;
      const auto& e = r.extension;
      for (Element a = 0; a < p.size(); ++a)
        for (Element b = 0; b < p.size(); ++b) {
          REQUIRE((a == b || e.precedes(a, b)) == psi_leq_by_rule(t, a, b));
          if (t.tau_leq(a, b)) REQUIRE((a == b || e.precedes(a, b)));
          // Ancestors of a common element are comparable in the rooted order.
          if (t.tau_leq(0, a) && t.tau_leq(0, b)) REQUIRE((t.tau_leq(a, b) || t.tau_leq(b, a)));
        }
      // Parent edges are exactly the cover edges.
      std::size_t parent_edges = 0;
      for (Element x = 0; x < p.size(); ++x)
        if (t.parent[x]) {
          ++parent_edges;
          REQUIRE(p.comparable(x, *t.parent[x]));
          REQUIRE((p.covers(x, *t.parent[x]) || p.covers(*t.parent[x], x)));
        }
      REQUIRE(parent_edges + 1 == p.size());
    }
  }
}
