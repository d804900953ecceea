#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "realmono/error.hpp"

namespace realmono {

/// Index of an element in its poset's input order.
using Element = std::size_t;

/// A relation pair given by element names: `lower <= upper`.
struct OrderPair {
  std::string lower;
  std::string upper;
};

/// Finite partially ordered set with a dense order matrix.
///
/// Elements keep their input order; that order is the tie-breaker wherever a
/// deterministic choice is needed. Construct through validate_poset().
class Poset {
 public:
  Poset() = default;

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(Element e) const { return names_.at(e); }

  std::optional<Element> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  Element index(std::string_view name) const {
    if (auto e = find(name)) return *e;
    throw UnknownElement("unknown element '" + std::string(name) + "'");
  }

  bool leq(Element a, Element b) const { return leq_[a * size() + b] != 0; }
  bool lt(Element a, Element b) const { return a != b && leq(a, b); }
  bool comparable(Element a, Element b) const { return leq(a, b) || leq(b, a); }

  /// True when `upper` covers `lower`: lower < upper with nothing in between.
  bool covers(Element upper, Element lower) const {
    if (!lt(lower, upper)) return false;
    for (Element k = 0; k < size(); ++k)
      if (lt(lower, k) && lt(k, upper)) return false;
    return true;
  }

  bool is_minimal(Element x) const {
    for (Element y = 0; y < size(); ++y)
      if (lt(y, x)) return false;
    return true;
  }

  bool is_maximal(Element x) const {
    for (Element y = 0; y < size(); ++y)
      if (lt(x, y)) return false;
    return true;
  }

  std::vector<Element> minimal_elements() const {
    std::vector<Element> out;
    for (Element x = 0; x < size(); ++x)
      if (is_minimal(x)) out.push_back(x);
    return out;
  }

  std::vector<Element> maximal_elements() const {
    std::vector<Element> out;
    for (Element x = 0; x < size(); ++x)
      if (is_maximal(x)) out.push_back(x);
    return out;
  }

  std::optional<Element> minimum() const {
    auto m = minimal_elements();
    if (m.size() == 1) return m.front();
    return std::nullopt;
  }

  std::optional<Element> maximum() const {
    auto m = maximal_elements();
    if (m.size() == 1) return m.front();
    return std::nullopt;
  }

  bool is_chain() const {
    for (Element a = 0; a < size(); ++a)
      for (Element b = a + 1; b < size(); ++b)
        if (!comparable(a, b)) return false;
    return true;
  }

  /// Elements sorted so that a < b implies a comes first. Ties follow the
  /// number of strict predecessors, then input order.
  std::vector<Element> topological_order() const {
    std::vector<std::size_t> below(size(), 0);
    for (Element a = 0; a < size(); ++a)
      for (Element b = 0; b < size(); ++b)
        if (lt(b, a)) ++below[a];
    std::vector<Element> order(size());
    std::iota(order.begin(), order.end(), Element{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Element a, Element b) { return below[a] < below[b]; });
    return order;
  }

  friend bool operator==(const Poset& a, const Poset& b) {
    return a.names_ == b.names_ && a.leq_ == b.leq_;
  }

  friend Poset validate_poset(std::vector<std::string> elements, std::span<const OrderPair> pairs);

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Element> index_;
  std::vector<char> leq_;
};

/// Builds a poset from element names and relation pairs (covers or arbitrary
/// order pairs). The reflexive-transitive closure is taken; it must be
/// antisymmetric.
inline Poset validate_poset(std::vector<std::string> elements, std::span<const OrderPair> pairs) {
  Poset p;
  const std::size_t n = elements.size();
  for (Element i = 0; i < n; ++i) {
    if (elements[i].empty()) throw InvalidInput("empty element name");
    if (!p.index_.emplace(elements[i], i).second)
      throw InvalidInput("duplicate element '" + elements[i] + "'");
  }
  p.names_ = std::move(elements);
  p.leq_.assign(n * n, 0);
  for (Element i = 0; i < n; ++i) p.leq_[i * n + i] = 1;
  for (const auto& pr : pairs) p.leq_[p.index(pr.lower) * n + p.index(pr.upper)] = 1;
  for (Element k = 0; k < n; ++k)
    for (Element i = 0; i < n; ++i)
      if (p.leq_[i * n + k])
        for (Element j = 0; j < n; ++j)
          if (p.leq_[k * n + j]) p.leq_[i * n + j] = 1;
  for (Element i = 0; i < n; ++i)
    for (Element j = i + 1; j < n; ++j)
      if (p.leq_[i * n + j] && p.leq_[j * n + i])
        throw CycleError("relation is cyclic: '" + p.names_[i] + "' and '" + p.names_[j] +
                         "' are mutually below each other");
  return p;
}

inline Poset validate_poset(std::vector<std::string> elements, std::initializer_list<OrderPair> pairs) {
  return validate_poset(std::move(elements), std::span<const OrderPair>(pairs.begin(), pairs.size()));
}

/// An edge of the cover graph. The graph is undirected; the orientation is
/// kept because the poset determines it anyway.
struct CoverEdge {
  Element lower;
  Element upper;
  friend auto operator<=>(const CoverEdge&, const CoverEdge&) = default;
};

struct CoverGraph {
  std::size_t vertex_count = 0;
  std::vector<CoverEdge> edges;
  std::vector<std::vector<Element>> adjacency;

  std::size_t degree(Element x) const { return adjacency[x].size(); }

  bool has_edge(Element a, Element b) const {
    const auto& adj = adjacency[a];
    return std::find(adj.begin(), adj.end(), b) != adj.end();
  }

  bool is_connected() const {
    if (vertex_count == 0) return true;
    std::vector<char> seen(vertex_count, 0);
    std::vector<Element> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      Element x = stack.back();
      stack.pop_back();
      for (Element y : adjacency[x])
        if (!seen[y]) {
          seen[y] = 1;
          ++count;
          stack.push_back(y);
        }
    }
    return count == vertex_count;
  }

  bool is_tree() const { return vertex_count > 0 && edges.size() + 1 == vertex_count && is_connected(); }

  bool is_path() const {
    if (!is_tree()) return false;
    return std::all_of(adjacency.begin(), adjacency.end(), [](const auto& a) { return a.size() <= 2; });
  }

  std::vector<Element> leaves() const {
    std::vector<Element> out;
    for (Element x = 0; x < vertex_count; ++x)
      if (degree(x) <= 1) out.push_back(x);
    return out;
  }
};

inline CoverGraph cover_graph(const Poset& p) {
  CoverGraph g;
  g.vertex_count = p.size();
  g.adjacency.resize(p.size());
  for (Element a = 0; a < p.size(); ++a)
    for (Element b = 0; b < p.size(); ++b)
      if (p.covers(b, a)) {
        g.edges.push_back({a, b});
        g.adjacency[a].push_back(b);
        g.adjacency[b].push_back(a);
      }
  for (auto& adj : g.adjacency) std::sort(adj.begin(), adj.end());
  return g;
}

/// Sorted element indices of one up-set.
using UpSet = std::vector<Element>;

inline constexpr std::size_t kDefaultUpSetCap = std::size_t{1} << 20;

/// Every up-set of `p` (including the empty set and the whole set), each
/// exactly once. Throws SizeLimit when more than `cap` exist.
inline std::vector<UpSet> up_sets(const Poset& p, std::size_t cap = kDefaultUpSetCap) {
  auto order = p.topological_order();
  std::reverse(order.begin(), order.end());  // largest first
  std::vector<char> in(p.size(), 0);
  std::vector<UpSet> out;

  // Deciding elements top-down means every strict upper bound of the current
  // element is already decided.
  std::function<void(std::size_t)> rec = [&](std::size_t depth) {
    if (depth == order.size()) {
      if (out.size() >= cap) throw SizeLimit("up-set count exceeds cap " + std::to_string(cap));
      UpSet u;
      for (Element x = 0; x < p.size(); ++x)
        if (in[x]) u.push_back(x);
      out.push_back(std::move(u));
      return;
    }
    Element x = order[depth];
    rec(depth + 1);
    bool allowed = true;
    for (Element y = 0; y < p.size() && allowed; ++y)
      if (p.lt(x, y) && !in[y]) allowed = false;
    if (allowed) {
      in[x] = 1;
      rec(depth + 1);
      in[x] = 0;
    }
  };
  rec(0);
  return out;
}

enum class PosetClass { Z, W, BY, NonAcyclicOrDisconnected };

inline std::string_view to_string(PosetClass c) {
  switch (c) {
    case PosetClass::Z: return "Z";
    case PosetClass::W: return "W";
    case PosetClass::BY: return "BY";
    case PosetClass::NonAcyclicOrDisconnected: return "NonAcyclicOrDisconnected";
  }
  return "?";
}

/// The orientation of a tree-shaped cover graph towards a leaf root.
///
/// x <=_tau y holds iff y lies on the cover-graph path from the root to x,
/// i.e. y is an ancestor of x (or x itself). The root is the maximum.
struct RootedTree {
  Element root = 0;
  std::vector<std::optional<Element>> parent;
  /// Children sets C(x) in their chosen linear order.
  std::vector<std::vector<Element>> children;

  std::size_t size() const { return parent.size(); }

  bool tau_leq(Element x, Element y) const {
    for (std::optional<Element> cur = x; cur; cur = parent[*cur])
      if (*cur == y) return true;
    return false;
  }
};

/// A total order of all elements, smallest first.
struct LinearExtension {
  std::vector<Element> order;
  std::vector<std::size_t> rank;

  static LinearExtension from_order(std::vector<Element> order) {
    LinearExtension ext;
    ext.rank.assign(order.size(), 0);
    for (std::size_t i = 0; i < order.size(); ++i) ext.rank[order[i]] = i;
    ext.order = std::move(order);
    return ext;
  }

  std::size_t size() const { return order.size(); }
  bool precedes(Element a, Element b) const { return rank[a] < rank[b]; }
  friend bool operator==(const LinearExtension&, const LinearExtension&) = default;
};

struct Rooting {
  RootedTree tree;
  LinearExtension extension;
};

/// Chosen orders of children sets, keyed by parent. Parents not listed use
/// input element order.
using ChildOrderings = std::map<Element, std::vector<Element>>;

/// Roots the tree-shaped cover graph of `p` at the leaf `root` and derives the
/// linear extension: descendants precede ancestors, and the whole subtree of an
/// earlier child precedes the subtree of a later sibling.
inline Rooting root_tree(const Poset& p, Element root, const ChildOrderings& orderings = {}) {
  auto g = cover_graph(p);
  if (!g.is_tree()) throw NotATree("cover graph is not a tree");
  if (root >= p.size()) throw UnknownElement("root index out of range");
  if (g.degree(root) > 1) throw NotALeaf("'" + p.name(root) + "' is not a leaf of the cover graph");

  Rooting r;
  auto& t = r.tree;
  t.root = root;
  t.parent.assign(p.size(), std::nullopt);
  t.children.assign(p.size(), {});
  std::vector<char> seen(p.size(), 0);
  std::vector<Element> queue{root};
  seen[root] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Element x = queue[head];
    for (Element y : g.adjacency[x])  // adjacency is sorted, i.e. input order
      if (!seen[y]) {
        seen[y] = 1;
        t.parent[y] = x;
        t.children[x].push_back(y);
        queue.push_back(y);
      }
  }

  for (const auto& [x, chosen] : orderings) {
    if (x >= p.size()) throw UnknownElement("child ordering for unknown element");
    auto expected = t.children[x];
    auto given = chosen;
    std::sort(expected.begin(), expected.end());
    std::sort(given.begin(), given.end());
    if (expected != given)
      throw InvalidInput("child ordering for '" + p.name(x) + "' is not a permutation of its children");
    t.children[x] = chosen;
  }

  std::vector<Element> order;
  order.reserve(p.size());
  std::function<void(Element)> post = [&](Element x) {
    for (Element c : t.children[x]) post(c);
    order.push_back(x);
  };
  post(root);
  r.extension = LinearExtension::from_order(std::move(order));
  return r;
}

/// Roots at the first cover-graph leaf in input order with default orderings.
inline Rooting default_rooting(const Poset& p) {
  auto g = cover_graph(p);
  if (!g.is_tree()) throw NotATree("cover graph is not a tree");
  return root_tree(p, g.leaves().front());
}

/// Classifies an acyclic connected poset as Z (path), W (every element that
/// branches under some leaf rooting is extremal) or BY (otherwise).
inline PosetClass classify(const Poset& p) {
  auto g = cover_graph(p);
  if (!g.is_tree()) return PosetClass::NonAcyclicOrDisconnected;
  if (g.is_path()) return PosetClass::Z;

  std::vector<char> branching(p.size(), 0);
  for (Element leaf : g.leaves()) {
    auto r = root_tree(p, leaf);
    for (Element x = 0; x < p.size(); ++x)
      if (r.tree.children[x].size() >= 2) branching[x] = 1;
  }
  for (Element x = 0; x < p.size(); ++x)
    if (branching[x] && !p.is_minimal(x) && !p.is_maximal(x)) return PosetClass::BY;
  return PosetClass::W;
}

}  // namespace realmono
