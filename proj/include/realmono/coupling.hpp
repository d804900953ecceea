#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "realmono/error.hpp"
#include "realmono/max_flow.hpp"
#include "realmono/measure.hpp"
#include "realmono/poset.hpp"
#include "realmono/rational.hpp"
#include "realmono/simplex.hpp"

namespace realmono {

/// A family of measures on the state poset indexed by the index poset.
struct MeasureSystem {
  Poset index;
  Poset state;
  /// One measure per index element, in index input order.
  std::vector<RationalMeasure> measures;

  void validate() const {
    if (measures.size() != index.size())
      throw DomainMismatch("system has " + std::to_string(measures.size()) + " measures for " +
                           std::to_string(index.size()) + " indices");
    for (const auto& m : measures) check_domain(m, state.size());
  }
};

/// Assignment index element -> state element, one entry per index.
using MonotoneTuple = std::vector<Element>;

struct Atom {
  MonotoneTuple tuple;
  Rational weight;
  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Finite joint law of (X_alpha) given by its atoms.
struct Coupling {
  std::vector<Atom> atoms;

  Rational total() const {
    Rational t = 0;
    for (const auto& a : atoms) t += a.weight;
    return t;
  }

  /// Law of coordinate `alpha` on `state_count` states.
  std::vector<Rational> marginal(std::size_t alpha, std::size_t state_count) const {
    std::vector<Rational> m(state_count, Rational(0));
    for (const auto& a : atoms) m.at(a.tuple.at(alpha)) += a.weight;
    return m;
  }

  friend bool operator==(const Coupling&, const Coupling&) = default;
};

inline bool is_monotone_tuple(const MonotoneTuple& t, const Poset& index, const Poset& state) {
  if (t.size() != index.size()) return false;
  for (Element a = 0; a < index.size(); ++a) {
    if (t[a] >= state.size()) return false;
    for (Element b = 0; b < index.size(); ++b)
      if (index.leq(a, b) && !state.leq(t[a], t[b])) return false;
  }
  return true;
}

/// True when the coupling has positive weights on monotone tuples and
/// reproduces every measure of the system exactly.
inline bool reproduces(const Coupling& c, const MeasureSystem& sys) {
  for (const auto& a : c.atoms)
    if (a.weight <= 0 || !is_monotone_tuple(a.tuple, sys.index, sys.state)) return false;
  for (Element alpha = 0; alpha < sys.index.size(); ++alpha)
    if (c.marginal(alpha, sys.state.size()) != sys.measures[alpha].masses()) return false;
  return true;
}

/// P1 <= P2 in the stochastic order: P1(U) <= P2(U) on every up-set U.
inline bool stochastically_leq(const RationalMeasure& p1, const RationalMeasure& p2, const Poset& s,
                               std::size_t cap = kDefaultUpSetCap) {
  check_domain(p1, s.size());
  check_domain(p2, s.size());
  for (const auto& u : up_sets(s, cap))
    if (p1.mass_of(u) > p2.mass_of(u)) return false;
  return true;
}

/// The up-set violating P1 <= P2, if any. The first in enumeration order.
inline std::optional<UpSet> dominance_violation(const RationalMeasure& p1, const RationalMeasure& p2,
                                                const Poset& s, std::size_t cap = kDefaultUpSetCap) {
  check_domain(p1, s.size());
  check_domain(p2, s.size());
  for (auto& u : up_sets(s, cap))
    if (p1.mass_of(u) > p2.mass_of(u)) return std::move(u);
  return std::nullopt;
}

/// A coupling of (P1, P2) supported on {(a, b) : a <= b}, or nullopt when
/// none exists. Computed as a bipartite max flow: source -> a (capacity
/// P1(a)), a -> b' for a <= b, b' -> sink (capacity P2(b)); the flow value
/// reaches one exactly when P1 is dominated by P2.
inline std::optional<Coupling> strassen_coupling(const RationalMeasure& p1, const RationalMeasure& p2,
                                                 const Poset& s) {
  check_domain(p1, s.size());
  check_domain(p2, s.size());
  const std::size_t n = s.size();
  const std::size_t source = 2 * n;
  const std::size_t sink = 2 * n + 1;
  RationalMaxFlow flow(2 * n + 2);
  for (Element a = 0; a < n; ++a) flow.add_edge(source, a, p1[a]);
  for (Element b = 0; b < n; ++b) flow.add_edge(n + b, sink, p2[b]);
  std::vector<std::pair<std::pair<Element, Element>, std::size_t>> middle;
  for (Element a = 0; a < n; ++a)
    for (Element b = 0; b < n; ++b)
      if (s.leq(a, b)) middle.push_back({{a, b}, flow.add_edge(a, n + b, Rational(1))});

  if (flow.run(source, sink) != 1) return std::nullopt;
  Coupling c;
  for (const auto& [pair, id] : middle)
    if (flow.flow(id) > 0) c.atoms.push_back({{pair.first, pair.second}, flow.flow(id)});
  return c;
}

/// Failing comparable index pair alpha <= beta and the up-set separating them.
struct MonotonicityViolation {
  Element alpha;
  Element beta;
  UpSet upset;
};

struct MonotonicityReport {
  std::optional<MonotonicityViolation> violation;
  bool monotone() const { return !violation.has_value(); }
  explicit operator bool() const { return monotone(); }
};

/// Checks P_alpha <= P_beta for every alpha <= beta of the index poset.
inline MonotonicityReport is_stoch_monotone(const MeasureSystem& sys, std::size_t cap = kDefaultUpSetCap) {
  sys.validate();
  auto ups = up_sets(sys.state, cap);
  for (Element a = 0; a < sys.index.size(); ++a)
    for (Element b = 0; b < sys.index.size(); ++b) {
      if (a == b || !sys.index.leq(a, b)) continue;
      for (const auto& u : ups)
        if (sys.measures[a].mass_of(u) > sys.measures[b].mass_of(u))
          return {MonotonicityViolation{a, b, u}};
    }
  return {};
}

inline constexpr std::size_t kDefaultTupleCap = 1'000'000;

/// Every order-preserving map index -> state, in lexicographic order of
/// (state index of alpha_0, state index of alpha_1, ...).
inline std::vector<MonotoneTuple> monotone_tuples(const Poset& index, const Poset& state,
                                                  std::size_t cap = kDefaultTupleCap) {
  const auto order = index.topological_order();
  std::vector<MonotoneTuple> out;
  MonotoneTuple cur(index.size(), 0);
  std::function<void(std::size_t)> rec = [&](std::size_t depth) {
    if (depth == order.size()) {
      if (out.size() >= cap) throw SizeLimit("monotone tuple count exceeds cap " + std::to_string(cap));
      out.push_back(cur);
      return;
    }
    Element alpha = order[depth];
    for (Element s = 0; s < state.size(); ++s) {
      bool ok = true;
      for (std::size_t k = 0; k < depth && ok; ++k) {
        Element beta = order[k];
        if (index.leq(beta, alpha) && !state.leq(cur[beta], s)) ok = false;
        if (index.leq(alpha, beta) && !state.leq(s, cur[beta])) ok = false;
      }
      if (!ok) continue;
      cur[alpha] = s;
      rec(depth + 1);
    }
  };
  rec(0);
  std::sort(out.begin(), out.end());
  return out;
}

/// Outcome of the realizability oracle.
struct Realization {
  bool feasible = false;
  /// Feasible case: a realizing coupling, atoms in tuple order.
  Coupling coupling;
  /// Infeasible case: dual weights y[alpha][s] with
  /// sum_alpha y[alpha][t(alpha)] <= 0 for every monotone tuple t and
  /// sum_{alpha,s} y[alpha][s] P_alpha(s) > 0.
  std::vector<std::vector<Rational>> certificate;
  std::size_t tuple_count = 0;
  std::size_t pivots = 0;
};

/// Decides realizable monotonicity with an exact feasibility LP over the
/// weights of all monotone tuples, constrained to reproduce every P_alpha.
inline Realization realize(const MeasureSystem& sys, std::size_t tuple_cap = kDefaultTupleCap) {
  sys.validate();
  const std::size_t na = sys.index.size();
  const std::size_t ns = sys.state.size();
  auto tuples = monotone_tuples(sys.index, sys.state, tuple_cap);

  std::vector<SparseColumn> columns;
  columns.reserve(tuples.size());
  for (const auto& t : tuples) {
    SparseColumn col;
    for (Element a = 0; a < na; ++a) col.push_back({a * ns + t[a], Rational(1)});
    columns.push_back(std::move(col));
  }
  std::vector<Rational> rhs(na * ns);
  for (Element a = 0; a < na; ++a)
    for (Element s = 0; s < ns; ++s) rhs[a * ns + s] = sys.measures[a][s];

  auto lp = solve_feasibility(na * ns, columns, std::move(rhs));
  Realization r;
  r.feasible = lp.feasible;
  r.tuple_count = tuples.size();
  r.pivots = lp.pivots;
  if (lp.feasible) {
    for (std::size_t j = 0; j < tuples.size(); ++j)
      if (lp.solution[j] > 0) r.coupling.atoms.push_back({tuples[j], lp.solution[j]});
  } else {
    r.certificate.assign(na, std::vector<Rational>(ns, Rational(0)));
    for (Element a = 0; a < na; ++a)
      for (Element s = 0; s < ns; ++s) r.certificate[a][s] = lp.certificate[a * ns + s];
  }
  return r;
}

/// Re-checks a Farkas certificate against the system from scratch.
inline bool verify_certificate(const MeasureSystem& sys, const std::vector<std::vector<Rational>>& y,
                               std::size_t tuple_cap = kDefaultTupleCap) {
  sys.validate();
  if (y.size() != sys.index.size()) return false;
  for (const auto& row : y)
    if (row.size() != sys.state.size()) return false;
  for (const auto& t : monotone_tuples(sys.index, sys.state, tuple_cap)) {
    Rational lhs = 0;
    for (Element a = 0; a < t.size(); ++a) lhs += y[a][t[a]];
    if (lhs > 0) return false;
  }
  Rational bound = 0;
  for (Element a = 0; a < sys.index.size(); ++a)
    for (Element s = 0; s < sys.state.size(); ++s) bound += y[a][s] * sys.measures[a][s];
  return bound > 0;
}

}  // namespace realmono
