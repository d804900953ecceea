#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "realmono/error.hpp"
#include "realmono/poset.hpp"
#include "realmono/rational.hpp"

namespace realmono {

/// Probability measure on the elements of a finite poset with exact rational
/// masses. Zero masses are allowed; the total is exactly one.
class RationalMeasure {
 public:
  RationalMeasure() = default;

  explicit RationalMeasure(std::vector<Rational> mass) : mass_(std::move(mass)) {
    Rational total = 0;
    for (auto& m : mass_) {
      m.canonicalize();
      if (m < 0) throw InvalidInput("negative mass " + format_rational(m));
      total += m;
    }
    if (total != 1) throw InvalidInput("masses sum to " + format_rational(total) + ", not 1");
  }

  static RationalMeasure point_mass(std::size_t n, Element at) {
    std::vector<Rational> m(n, Rational(0));
    m.at(at) = 1;
    return RationalMeasure(std::move(m));
  }

  static RationalMeasure uniform(std::size_t n) {
    return RationalMeasure(std::vector<Rational>(n, Rational(1, n)));
  }

  std::size_t size() const noexcept { return mass_.size(); }
  const Rational& operator[](Element e) const { return mass_.at(e); }
  const std::vector<Rational>& masses() const noexcept { return mass_; }

  Rational mass_of(std::span<const Element> set) const {
    Rational total = 0;
    for (Element e : set) total += mass_.at(e);
    return total;
  }

  friend bool operator==(const RationalMeasure&, const RationalMeasure&) = default;

 private:
  std::vector<Rational> mass_;
};

inline void check_domain(const RationalMeasure& m, std::size_t n) {
  if (m.size() != n)
    throw DomainMismatch("measure has " + std::to_string(m.size()) + " masses, expected " + std::to_string(n));
}

/// Cumulative distribution values indexed by element.
struct DistFn {
  std::vector<Rational> values;
  const Rational& operator[](Element e) const { return values.at(e); }
};

/// F(x): mass of all z with z <=_tau x, i.e. of the subtree hanging at x.
inline DistFn dist_fn(const RationalMeasure& m, const RootedTree& tree) {
  check_domain(m, tree.size());
  DistFn f{std::vector<Rational>(tree.size(), Rational(0))};
  for (Element z = 0; z < tree.size(); ++z)
    for (std::optional<Element> cur = z; cur; cur = tree.parent[*cur]) f.values[*cur] += m[z];
  return f;
}

/// F<x>: mass of all z preceding or equal to x in the linear extension.
inline DistFn dist_fn_linext(const RationalMeasure& m, const LinearExtension& ext) {
  check_domain(m, ext.size());
  DistFn f{std::vector<Rational>(ext.size(), Rational(0))};
  Rational acc = 0;
  for (Element x : ext.order) {
    acc += m[x];
    f.values[x] = acc;
  }
  return f;
}

/// Map [0,1) -> elements, constant on half-open pieces [breakpoints[i], breakpoints[i+1]).
struct StepFunction {
  std::vector<Rational> breakpoints{Rational(0), Rational(1)};
  std::vector<Element> values{0};

  std::size_t pieces() const { return values.size(); }

  Element operator()(const Rational& t) const {
    if (t < 0 || t >= 1) throw InvalidInput("argument outside [0,1)");
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    return values[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
  }

  /// Lebesgue measure of the preimage of `e`.
  Rational length_of(Element e) const {
    Rational total = 0;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i] == e) total += breakpoints[i + 1] - breakpoints[i];
    return total;
  }

  /// Drops empty pieces and merges adjacent pieces with equal values.
  void canonicalize() {
    std::vector<Rational> b{breakpoints.front()};
    std::vector<Element> v;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (breakpoints[i + 1] == breakpoints[i]) continue;
      if (!v.empty() && v.back() == values[i]) {
        b.back() = breakpoints[i + 1];
      } else {
        v.push_back(values[i]);
        b.push_back(breakpoints[i + 1]);
      }
    }
    breakpoints = std::move(b);
    values = std::move(v);
  }

  friend bool operator==(const StepFunction&, const StepFunction&) = default;
};

/// Generalized inverse probability transform: t -> least x (in the
/// extension) with t < F<x>. Zero-mass elements never appear.
inline StepFunction inverse_transform(const RationalMeasure& m, const LinearExtension& ext) {
  check_domain(m, ext.size());
  StepFunction f;
  f.breakpoints = {Rational(0)};
  f.values.clear();
  Rational acc = 0;
  for (Element x : ext.order) {
    if (m[x] == 0) continue;
    acc += m[x];
    f.values.push_back(x);
    f.breakpoints.push_back(acc);
  }
  f.canonicalize();
  return f;
}

/// The classical transform on a chain, t -> min{x : t < F(x)} with
/// F(x) = P(z <= x) read off the order itself.
inline StepFunction classical_inverse(const RationalMeasure& m, const Poset& chain) {
  check_domain(m, chain.size());
  if (!chain.is_chain()) throw NotAChain("poset is not a chain");
  std::vector<Rational> cdf(chain.size(), Rational(0));
  for (Element x = 0; x < chain.size(); ++x)
    for (Element z = 0; z < chain.size(); ++z)
      if (chain.leq(z, x)) cdf[x] += m[z];

  // The element taking value on [s, F(x)) is x itself, where s is the
  // distribution value just below x.
  std::vector<Element> elems(chain.size());
  std::iota(elems.begin(), elems.end(), Element{0});
  std::sort(elems.begin(), elems.end(), [&](Element a, Element b) { return chain.lt(a, b); });
  StepFunction f;
  f.breakpoints = {Rational(0)};
  f.values.clear();
  for (Element x : elems) {
    if (cdf[x] == f.breakpoints.back()) continue;
    f.values.push_back(x);
    f.breakpoints.push_back(cdf[x]);
  }
  f.canonicalize();
  return f;
}

}  // namespace realmono
