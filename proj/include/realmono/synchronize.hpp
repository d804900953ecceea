#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "realmono/coupling.hpp"
#include "realmono/error.hpp"
#include "realmono/measure.hpp"
#include "realmono/poset.hpp"
#include "realmono/rational.hpp"

namespace realmono {

/// A uniform-preserving self-map of [0,1) that translates each of L equal
/// cells onto another: phi(t) = (perm[i] + (tL - i)) / L for t in cell i.
/// Bijectivity of `perm` is exactly invariance of the uniform law.
struct CellPermutation {
  std::size_t cells = 1;
  std::vector<std::size_t> perm{0};

  static CellPermutation identity(std::size_t cells) {
    CellPermutation p;
    p.cells = cells;
    p.perm.resize(cells);
    std::iota(p.perm.begin(), p.perm.end(), std::size_t{0});
    return p;
  }

  bool is_bijection() const {
    if (perm.size() != cells) return false;
    std::vector<char> hit(cells, 0);
    for (auto c : perm) {
      if (c >= cells || hit[c]) return false;
      hit[c] = 1;
    }
    return true;
  }

  bool is_identity() const {
    for (std::size_t i = 0; i < perm.size(); ++i)
      if (perm[i] != i) return false;
    return true;
  }

  Rational operator()(const Rational& t) const {
    if (t < 0 || t >= 1) throw InvalidInput("argument outside [0,1)");
    Rational scaled = t * Rational(Integer(static_cast<unsigned long>(cells)));
    Integer floor_part = scaled.get_num() / scaled.get_den();
    std::size_t i = floor_part.get_ui();
    return (Rational(Integer(static_cast<unsigned long>(perm[i]))) + (scaled - Rational(floor_part))) /
           Rational(Integer(static_cast<unsigned long>(cells)));
  }

  friend bool operator==(const CellPermutation&, const CellPermutation&) = default;
};

namespace detail {
inline std::size_t to_size(const Integer& v) {
  if (!v.fits_ulong_p()) throw SizeLimit("grid resolution does not fit in a machine word");
  return v.get_ui();
}
inline Rational from_size(std::size_t v) { return Rational(Integer(static_cast<unsigned long>(v))); }
}  // namespace detail

/// Least common multiple of every mass denominator in the system.
inline std::size_t common_grid(const MeasureSystem& sys) {
  Integer l = 1;
  for (const auto& m : sys.measures) l = lcm_of_denominators(m.masses(), l);
  return detail::to_size(l);
}

/// As above, also covering the atom weights of `coupling`.
inline std::size_t common_grid(const MeasureSystem& sys, const Coupling& coupling) {
  Integer l = 1;
  for (const auto& m : sys.measures) l = lcm_of_denominators(m.masses(), l);
  for (const auto& a : coupling.atoms) l = lcm_of_denominators(std::span<const Rational>(&a.weight, 1), l);
  return detail::to_size(l);
}

/// f o phi as a step function, exact.
inline StepFunction compose(const StepFunction& f, const CellPermutation& phi) {
  if (!phi.is_bijection()) throw InvalidInput("cell map is not a bijection");
  const Rational width = Rational(1) / detail::from_size(phi.cells);
  StepFunction out;
  out.breakpoints = {Rational(0)};
  out.values.clear();
  for (std::size_t i = 0; i < phi.cells; ++i) {
    Rational lo = detail::from_size(phi.perm[i]) * width;
    Rational hi = lo + width;
    Rational shift = (detail::from_size(i) - detail::from_size(phi.perm[i])) * width;
    for (std::size_t k = 0; k < f.values.size(); ++k) {
      Rational a = std::max(lo, f.breakpoints[k]);
      Rational b = std::min(hi, f.breakpoints[k + 1]);
      if (a >= b) continue;
      out.values.push_back(f.values[k]);
      out.breakpoints.push_back(b + shift);
    }
  }
  out.canonicalize();
  return out;
}

/// Builds one cell permutation per index from a feasible coupling.
///
/// The coupling's atoms are laid out over the grid as unit cells, sorted
/// lexicographically by the extension ranks of their coordinates. For each
/// index alpha, the cells carrying state s are sent, in order, onto the grid
/// cells where the inverse transform of P_alpha equals s. Both sides hold
/// P_alpha(s) * L cells, so every cell finds a target. Afterwards the
/// composed transform of alpha on cell i returns the alpha-coordinate of the
/// atom laid on cell i, which makes the family pointwise monotone.
///
/// `extensions` holds one extension per index or a single shared one.
/// `grid` overrides the resolution; it must be a multiple of common_grid().
inline std::vector<CellPermutation> synchronize_from_coupling(const Coupling& coupling, const MeasureSystem& sys,
                                                              const std::vector<LinearExtension>& extensions,
                                                              std::optional<std::size_t> grid = std::nullopt) {
  sys.validate();
  const std::size_t na = sys.index.size();
  const std::size_t ns = sys.state.size();
  if (extensions.size() != na && extensions.size() != 1)
    throw DomainMismatch("need one linear extension per index or a single shared one");
  for (const auto& e : extensions)
    if (e.size() != ns) throw DomainMismatch("linear extension does not cover the state poset");
  auto ext = [&](Element alpha) -> const LinearExtension& {
    return extensions.size() == 1 ? extensions.front() : extensions[alpha];
  };
  for (const auto& a : coupling.atoms)
    if (a.tuple.size() != na) throw InfeasibleInput("coupling tuple length does not match the index poset");
  if (!reproduces(coupling, sys)) throw InfeasibleInput("coupling does not reproduce the system's marginals");

  const std::size_t required = common_grid(sys, coupling);
  const std::size_t cells = grid.value_or(required);
  if (cells == 0 || cells % required != 0)
    throw GridMismatch("grid of " + std::to_string(cells) + " cells is not a multiple of " +
                       std::to_string(required));
  const Rational scale = detail::from_size(cells);

  std::vector<std::pair<std::vector<std::size_t>, const Atom*>> order;
  for (const auto& a : coupling.atoms) {
    std::vector<std::size_t> key(na);
    for (Element alpha = 0; alpha < na; ++alpha) key[alpha] = ext(alpha).rank[a.tuple[alpha]];
    order.push_back({std::move(key), &a});
  }
  std::sort(order.begin(), order.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

  std::vector<Element> layout;  // atom index per coupling cell
  layout.reserve(cells);
  for (std::size_t k = 0; k < order.size(); ++k) {
    Rational count = order[k].second->weight * scale;
    for (std::size_t c = 0; c < detail::to_size(count.get_num()); ++c) layout.push_back(k);
  }
  if (layout.size() != cells) throw Error("synchronize: atom cells do not fill the grid");

  std::vector<CellPermutation> out;
  for (Element alpha = 0; alpha < na; ++alpha) {
    const auto& m = sys.measures[alpha];
    std::vector<std::size_t> next(ns, 0);
    std::vector<std::size_t> end(ns, 0);
    Rational acc = 0;
    for (Element s : ext(alpha).order) {
      next[s] = detail::to_size(Rational(acc * scale).get_num());
      acc += m[s];
      end[s] = detail::to_size(Rational(acc * scale).get_num());
    }
    CellPermutation phi;
    phi.cells = cells;
    phi.perm.assign(cells, 0);
    for (std::size_t i = 0; i < cells; ++i) {
      Element s = order[layout[i]].second->tuple[alpha];
      if (next[s] >= end[s]) throw Error("synchronize: cell counts disagree with marginal");
      phi.perm[i] = next[s]++;
    }
    for (Element s = 0; s < ns; ++s)
      if (next[s] != end[s]) throw Error("synchronize: cell counts disagree with marginal");
    out.push_back(std::move(phi));
  }
  return out;
}

/// Per-index composed transforms P_alpha^{-1} o phi_alpha.
inline std::vector<StepFunction> composed_transforms(const std::vector<CellPermutation>& phis,
                                                     const MeasureSystem& sys,
                                                     const std::vector<LinearExtension>& extensions) {
  std::vector<StepFunction> out;
  for (Element alpha = 0; alpha < sys.index.size(); ++alpha) {
    const auto& e = extensions.size() == 1 ? extensions.front() : extensions.at(alpha);
    out.push_back(compose(inverse_transform(sys.measures[alpha], e), phis.at(alpha)));
  }
  return out;
}

/// First subinterval [lo, hi) of [0,1) where P_alpha^{-1}(phi_alpha(t)) is
/// not below P_beta^{-1}(phi_beta(t)).
struct SyncWitness {
  Element alpha;
  Element beta;
  Rational lo;
  Rational hi;
  std::size_t cell;
};

struct SyncVerdict {
  bool ok = false;
  std::optional<SyncWitness> witness;
  std::string reason;
  explicit operator bool() const { return ok; }
};

/// Checks that each phi is a bijection on a shared grid, that each composed
/// transform pushes the uniform law to P_alpha, and that the composed
/// transforms are pointwise ordered along every comparable index pair.
inline SyncVerdict verify_synchronized(const std::vector<CellPermutation>& phis, const MeasureSystem& sys,
                                       const std::vector<LinearExtension>& extensions) {
  sys.validate();
  SyncVerdict v;
  if (phis.size() != sys.index.size()) {
    v.reason = "expected one cell map per index";
    return v;
  }
  if (extensions.size() != sys.index.size() && extensions.size() != 1) {
    v.reason = "need one linear extension per index or a single shared one";
    return v;
  }
  for (const auto& phi : phis) {
    if (phi.cells != phis.front().cells) {
      v.reason = "cell maps use different grids";
      return v;
    }
    if (!phi.is_bijection()) {
      v.reason = "cell map is not a bijection";
      return v;
    }
  }
  const auto composed = composed_transforms(phis, sys, extensions);
  for (Element alpha = 0; alpha < sys.index.size(); ++alpha)
    for (Element s = 0; s < sys.state.size(); ++s)
      if (composed[alpha].length_of(s) != sys.measures[alpha][s]) {
        v.reason = "composed transform of '" + sys.index.name(alpha) + "' misses its marginal at '" +
                   sys.state.name(s) + "'";
        return v;
      }

  const Rational cells = detail::from_size(phis.front().cells);
  for (Element a = 0; a < sys.index.size(); ++a)
    for (Element b = 0; b < sys.index.size(); ++b) {
      if (a == b || !sys.index.leq(a, b)) continue;
      const auto& fa = composed[a];
      const auto& fb = composed[b];
      std::vector<Rational> cuts = fa.breakpoints;
      cuts.insert(cuts.end(), fb.breakpoints.begin(), fb.breakpoints.end());
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
        if (!sys.state.leq(fa(cuts[k]), fb(cuts[k]))) {
          Rational scaled = cuts[k] * cells;
          Integer cell = scaled.get_num() / scaled.get_den();
          v.witness = SyncWitness{a, b, cuts[k], cuts[k + 1], detail::to_size(cell)};
          v.reason = "'" + sys.state.name(fa(cuts[k])) + "' is not below '" + sys.state.name(fb(cuts[k])) + "'";
          return v;
        }
    }
  v.ok = true;
  return v;
}

/// Every maximal subinterval [lo, hi) of [0,1) on which f(t) <= g(t) fails
/// in `s`, in increasing order.
inline std::vector<std::pair<Rational, Rational>> pointwise_violations(const StepFunction& f, const StepFunction& g,
                                                                        const Poset& s) {
  std::vector<Rational> cuts = f.breakpoints;
  cuts.insert(cuts.end(), g.breakpoints.begin(), g.breakpoints.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<std::pair<Rational, Rational>> out;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (s.leq(f(cuts[k]), g(cuts[k]))) continue;
    if (!out.empty() && out.back().second == cuts[k]) out.back().second = cuts[k + 1];
    else out.push_back({cuts[k], cuts[k + 1]});
  }
  return out;
}

/// Cell maps for a system together with how they were obtained.
struct Synchronization {
  bool feasible = false;
  /// Identity maps used (path-shaped cover graph); no LP was solved.
  bool identity = false;
  std::vector<CellPermutation> phis;
  Realization realization;
};

/// Identity maps when the state cover graph is a path, otherwise the LP
/// coupling laid out by synchronize_from_coupling().
inline Synchronization synchronize_system(const MeasureSystem& sys, const LinearExtension& extension,
                                          std::size_t tuple_cap = kDefaultTupleCap) {
  sys.validate();
  Synchronization out;
  if (classify(sys.state) == PosetClass::Z) {
    out.feasible = true;
    out.identity = true;
    out.phis.assign(sys.index.size(), CellPermutation::identity(common_grid(sys)));
    return out;
  }
  out.realization = realize(sys, tuple_cap);
  out.feasible = out.realization.feasible;
  if (out.feasible) out.phis = synchronize_from_coupling(out.realization.coupling, sys, {extension});
  return out;
}

enum class Side { Minimal, Maximal };

/// Interlacing graph on the minimal (or maximal) elements of a poset: two
/// distinct vertices are joined when they share a strict upper (lower) bound.
struct InterlacingGraph {
  Side side = Side::Minimal;
  std::vector<Element> vertices;
  std::vector<std::pair<Element, Element>> edges;
};

inline InterlacingGraph interlacing_graph(const Poset& a, Side side) {
  InterlacingGraph g;
  g.side = side;
  g.vertices = side == Side::Minimal ? a.minimal_elements() : a.maximal_elements();
  for (std::size_t i = 0; i < g.vertices.size(); ++i)
    for (std::size_t j = i + 1; j < g.vertices.size(); ++j) {
      Element u = g.vertices[i];
      Element v = g.vertices[j];
      for (Element b = 0; b < a.size(); ++b) {
        bool bound = side == Side::Minimal ? (a.lt(u, b) && a.lt(v, b)) : (a.lt(b, u) && a.lt(b, v));
        if (bound) {
          g.edges.push_back({u, v});
          break;
        }
      }
    }
  return g;
}

inline std::pair<InterlacingGraph, InterlacingGraph> interlacing_graphs(const Poset& a) {
  return {interlacing_graph(a, Side::Minimal), interlacing_graph(a, Side::Maximal)};
}

struct SpanningTreeWitness {
  Side side = Side::Minimal;
  std::vector<std::pair<Element, Element>> edges;
};

inline constexpr std::size_t kDefaultTreeCap = 100'000;

/// Searches for a spanning tree of `g` whose restriction to every local set
/// D(alpha) = {extremal v : v <= alpha} (dually >= for the maximal side) is
/// connected. Exhaustive backtracking over edge inclusion; a branch is cut
/// once the edges still available cannot connect the whole vertex set or
/// some local set. Throws SizeLimit after `cap` complete candidate trees.
inline std::optional<SpanningTreeWitness> locally_connected_spanning_tree(const InterlacingGraph& g,
                                                                          const Poset& a,
                                                                          std::size_t cap = kDefaultTreeCap) {
  const std::size_t nv = g.vertices.size();
  SpanningTreeWitness w;
  w.side = g.side;
  if (nv <= 1) return w;

  std::vector<std::size_t> pos(a.size(), nv);
  for (std::size_t i = 0; i < nv; ++i) pos[g.vertices[i]] = i;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (auto [u, v] : g.edges) edges.push_back({pos[u], pos[v]});

  // Local vertex sets with at least two members, deduplicated.
  std::vector<std::vector<char>> locals;
  for (Element alpha = 0; alpha < a.size(); ++alpha) {
    std::vector<char> in(nv, 0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < nv; ++i) {
      Element v = g.vertices[i];
      if (g.side == Side::Minimal ? a.leq(v, alpha) : a.leq(alpha, v)) {
        in[i] = 1;
        ++count;
      }
    }
    if (count >= 2 && std::find(locals.begin(), locals.end(), in) == locals.end()) locals.push_back(in);
  }
  std::vector<char> everything(nv, 1);

  enum : char { Undecided, In, Out };
  std::vector<char> status(edges.size(), Undecided);

  auto find = [](std::vector<std::size_t>& parent, std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  // Is `set` connected using edges inside it whose status passes `usable`?
  auto connected = [&](const std::vector<char>& set, bool allow_undecided) {
    std::vector<std::size_t> parent(nv);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (status[e] == Out || (!allow_undecided && status[e] == Undecided)) continue;
      auto [u, v] = edges[e];
      if (set[u] && set[v]) parent[find(parent, u)] = find(parent, v);
    }
    std::size_t root = nv;
    for (std::size_t i = 0; i < nv; ++i) {
      if (!set[i]) continue;
      std::size_t r = find(parent, i);
      if (root == nv) root = r;
      else if (r != root) return false;
    }
    return true;
  };
  auto creates_cycle = [&](std::size_t edge) {
    std::vector<std::size_t> parent(nv);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (status[e] == In) parent[find(parent, edges[e].first)] = find(parent, edges[e].second);
    return find(parent, edges[edge].first) == find(parent, edges[edge].second);
  };

  std::size_t candidates = 0;
  std::function<bool(std::size_t, std::size_t)> rec = [&](std::size_t e, std::size_t chosen) -> bool {
    if (!connected(everything, true)) return false;
    for (const auto& set : locals)
      if (!connected(set, true)) return false;
    if (chosen + 1 == nv) {
      if (++candidates > cap) throw SizeLimit("spanning-tree search exceeds cap " + std::to_string(cap));
      std::vector<char> saved = status;
      for (std::size_t k = e; k < edges.size(); ++k) status[k] = Out;
      bool ok = std::all_of(locals.begin(), locals.end(), [&](const auto& set) { return connected(set, false); });
      if (!ok) status = saved;
      return ok;
    }
    if (e == edges.size()) return false;
    if (!creates_cycle(e)) {
      status[e] = In;
      if (rec(e + 1, chosen + 1)) return true;
    }
    status[e] = Out;
    if (rec(e + 1, chosen)) return true;
    status[e] = Undecided;
    return false;
  };
  if (!rec(0, 0)) return std::nullopt;
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (status[e] == In) w.edges.push_back({g.vertices[edges[e].first], g.vertices[edges[e].second]});
  return w;
}

struct SynchronizabilityReport {
  std::optional<SpanningTreeWitness> minimal_side;
  std::optional<SpanningTreeWitness> maximal_side;
  bool synchronizable() const { return minimal_side.has_value() && maximal_side.has_value(); }
};

inline SynchronizabilityReport synchronizability(const Poset& a, std::size_t cap = kDefaultTreeCap) {
  auto [lo, hi] = interlacing_graphs(a);
  SynchronizabilityReport r;
  r.minimal_side = locally_connected_spanning_tree(lo, a, cap);
  if (r.minimal_side) r.maximal_side = locally_connected_spanning_tree(hi, a, cap);
  return r;
}

inline bool is_synchronizable(const Poset& a, std::size_t cap = kDefaultTreeCap) {
  return synchronizability(a, cap).synchronizable();
}

}  // namespace realmono
