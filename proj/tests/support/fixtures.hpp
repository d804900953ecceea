#pragma once

#include <string>
#include <vector>

#include "realmono/realmono.hpp"

namespace realmono::testing {

inline Rational q(long p, long d) {
  Rational r(p, d);
  r.canonicalize();
  return r;
}

inline RationalMeasure fifteenths(std::vector<long> numerators) {
  std::vector<Rational> m;
  for (long n : numerators) m.push_back(q(n, 15));
  return RationalMeasure(std::move(m));
}

/// Six-element Class W poset: x, y, w below z; w below v and tau.
inline Poset worked_poset() {
  return validate_poset({"x", "y", "z", "v", "w", "tau"},
                        {{"x", "z"}, {"y", "z"}, {"w", "z"}, {"w", "v"}, {"w", "tau"}});
}

// Element indices of the six-element poset, input order.
enum Worked : Element { X = 0, Y = 1, Z = 2, V = 3, W = 4, TAU = 5 };

inline RationalMeasure worked_p1() { return fifteenths({3, 2, 1, 1, 7, 1}); }
inline RationalMeasure worked_p2() { return fifteenths({1, 1, 6, 3, 2, 2}); }

inline Poset chain(std::size_t n, const std::string& prefix = "c") {
  std::vector<std::string> nm;
  std::vector<OrderPair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    nm.push_back(prefix + std::to_string(i));
    if (i) pairs.push_back({nm[i - 1], nm[i]});
  }
  return validate_poset(nm, pairs);
}

inline Poset antichain(std::size_t n, const std::string& prefix = "a") {
  std::vector<std::string> nm;
  for (std::size_t i = 0; i < n; ++i) nm.push_back(prefix + std::to_string(i));
  return validate_poset(nm, std::span<const OrderPair>{});
}

inline Poset diamond() {
  return validate_poset({"bot", "a", "b", "top"}, {{"bot", "a"}, {"bot", "b"}, {"a", "top"}, {"b", "top"}});
}

inline MeasureSystem worked_system() {
  return MeasureSystem{chain(2, "alpha"), worked_poset(), {worked_p1(), worked_p2()}};
}

/// Rooting at tau with z < v among the children of w and x < y among those of z.
inline Rooting worked_rooting() {
  auto s = worked_poset();
  return root_tree(s, TAU, {{W, {Z, V}}, {Z, {X, Y}}});
}

/// A hand-checked coupling of (P1, P2) supported on comparable pairs.
inline Coupling worked_coupling() {
  auto a = [](Element lo, Element hi, long n) { return Atom{{lo, hi}, q(n, 15)}; };
  return Coupling{{a(X, X, 1), a(X, Z, 2), a(Y, Y, 1), a(Y, Z, 1), a(Z, Z, 1), a(V, V, 1), a(W, Z, 2), a(W, V, 2),
                   a(W, W, 2), a(W, TAU, 1), a(TAU, TAU, 1)}};
}

/// Stochastically monotone but not realizable system on the diamond with
/// index poset = state poset, found by the seeded search in the acceptance
/// suite. Rows in the order bot, a, b, top.
inline MeasureSystem diamond_counterexample() {
  auto d = diamond();
  auto m = [](std::vector<Rational> v) { return RationalMeasure(std::move(v)); };
  return MeasureSystem{d,
                       d,
                       {m({q(1, 3), q(1, 3), q(1, 3), q(0, 1)}), m({q(1, 3), q(1, 3), q(0, 1), q(1, 3)}),
                        m({q(1, 3), q(0, 1), q(1, 3), q(1, 3)}), m({q(0, 1), q(1, 3), q(1, 6), q(1, 2)})}};
}

/// Farkas weights y[alpha][s] proving the counterexample infeasible: every
/// monotone tuple scores <= 0 while the measures score 2/3.
inline std::vector<std::vector<Rational>> diamond_certificate() {
  auto r = [](std::vector<long> v) {
    std::vector<Rational> out;
    for (long x : v) out.push_back(Rational(x));
    return out;
  };
  return {r({-3, 1, 1, 1}), r({1, 1, -3, 1}), r({1, -3, 1, 1}), r({1, 1, 1, -3})};
}

}  // namespace realmono::testing
