#pragma once

#include <boost/math/distributions/chi_squared.hpp>

#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "realmono/coupling.hpp"
#include "realmono/error.hpp"
#include "realmono/measure.hpp"
#include "realmono/poset.hpp"
#include "realmono/rational.hpp"
#include "realmono/synchronize.hpp"

namespace realmono {

/// Markov transition matrix on a poset state space, one row per state.
struct Kernel {
  Poset states;
  std::vector<RationalMeasure> rows;

  MeasureSystem as_system() const {
    MeasureSystem sys{states, states, rows};
    sys.validate();
    return sys;
  }
};

class NotStochMonotone : public Error {
 public:
  NotStochMonotone(const std::string& what, MonotonicityViolation v) : Error(what), violation_(std::move(v)) {}
  const MonotonicityViolation& violation() const noexcept { return violation_; }

 private:
  MonotonicityViolation violation_;
};

/// The realizability LP has no solution; carries its Farkas certificate.
class Infeasible : public Error {
 public:
  Infeasible(const std::string& what, std::vector<std::vector<Rational>> certificate)
      : Error(what), certificate_(std::move(certificate)) {}
  const std::vector<std::vector<Rational>>& certificate() const noexcept { return certificate_; }

 private:
  std::vector<std::vector<Rational>> certificate_;
};

/// Simultaneous one-step update of every state driven by one grid cell.
struct GrandCoupling {
  enum class Source { Identity, Synchronized, Direct };

  Poset states;
  std::size_t cells = 1;
  /// update[x][i]: successor of x when cell i is drawn.
  std::vector<std::vector<Element>> update;
  Source source = Source::Identity;

  Element operator()(Element x, std::size_t cell) const { return update[x][cell]; }
};

/// Both invariants: per-row cell counts reproduce the kernel exactly, and
/// x <= y implies update(x, i) <= update(y, i) for every cell.
inline bool is_valid_grand_coupling(const GrandCoupling& gc, const Kernel& k) {
  const std::size_t n = k.states.size();
  if (gc.update.size() != n) return false;
  const Rational cells = detail::from_size(gc.cells);
  for (Element x = 0; x < n; ++x) {
    if (gc.update[x].size() != gc.cells) return false;
    std::vector<std::size_t> count(n, 0);
    for (Element y : gc.update[x]) {
      if (y >= n) return false;
      ++count[y];
    }
    for (Element y = 0; y < n; ++y)
      if (detail::from_size(count[y]) != k.rows[x][y] * cells) return false;
  }
  for (Element x = 0; x < n; ++x)
    for (Element y = 0; y < n; ++y)
      if (k.states.leq(x, y))
        for (std::size_t i = 0; i < gc.cells; ++i)
          if (!k.states.leq(gc.update[x][i], gc.update[y][i])) return false;
  return true;
}

/// Realizes the kernel's rows monotonically on a common grid.
///
/// Path-shaped state spaces use plain inverse transforms; other tree-shaped
/// ones lay the LP coupling out with synchronizing cell maps; anything else
/// reads updates straight off the LP coupling's atoms.
inline GrandCoupling build_grand_coupling(const Kernel& k, std::size_t tuple_cap = kDefaultTupleCap) {
  const auto sys = k.as_system();
  if (auto report = is_stoch_monotone(sys); !report)
    throw NotStochMonotone("kernel rows are not stochastically monotone: row '" +
                               k.states.name(report.violation->alpha) + "' exceeds row '" +
                               k.states.name(report.violation->beta) + "' on an up-set",
                           *report.violation);

  const std::size_t n = k.states.size();
  GrandCoupling gc;
  gc.states = k.states;
  const auto cls = classify(k.states);
  if (cls != PosetClass::NonAcyclicOrDisconnected) {
    const auto rooting = default_rooting(k.states);
    auto sync = synchronize_system(sys, rooting.extension, tuple_cap);
    if (!sync.feasible) throw Infeasible("kernel is not realizably monotone", sync.realization.certificate);
    gc.cells = sync.phis.front().cells;
    gc.source = sync.identity ? GrandCoupling::Source::Identity : GrandCoupling::Source::Synchronized;
    const auto composed = composed_transforms(sync.phis, sys, {rooting.extension});
    const Rational width = Rational(1) / detail::from_size(gc.cells);
    gc.update.assign(n, std::vector<Element>(gc.cells, 0));
    for (Element x = 0; x < n; ++x)
      for (std::size_t i = 0; i < gc.cells; ++i) gc.update[x][i] = composed[x](detail::from_size(i) * width);
  } else {
    auto r = realize(sys, tuple_cap);
    if (!r.feasible) throw Infeasible("kernel is not realizably monotone", r.certificate);
    gc.cells = common_grid(sys, r.coupling);
    gc.source = GrandCoupling::Source::Direct;
    gc.update.assign(n, {});
    const Rational scale = detail::from_size(gc.cells);
    for (const auto& atom : r.coupling.atoms) {
      std::size_t count = detail::to_size(Rational(atom.weight * scale).get_num());
      for (Element x = 0; x < n; ++x) gc.update[x].insert(gc.update[x].end(), count, atom.tuple[x]);
    }
  }
  if (!is_valid_grand_coupling(gc, k)) throw Error("grand coupling failed its invariants");
  return gc;
}

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Counter-based cell draws: the cell used at time -t depends only on
/// (seed, t), so every epoch sees the same past randomness.
class CellStream {
 public:
  CellStream(std::uint64_t seed, std::size_t cells) : seed_(seed), cells_(cells) {
    if (cells == 0) throw InvalidInput("cell stream needs at least one cell");
  }

  /// Uniform cell in [0, cells) for time -t; rejection avoids modulo bias.
  std::size_t at(std::uint64_t t) const {
    const std::uint64_t l = cells_;
    const std::uint64_t threshold = (0 - l) % l;
    for (std::uint64_t k = 0;; ++k) {
      std::uint64_t r = detail::splitmix64(detail::splitmix64(seed_ ^ detail::splitmix64(t)) + k);
      if (r >= threshold) return static_cast<std::size_t>(r % l);
    }
  }

  std::size_t cells() const noexcept { return cells_; }

 private:
  std::uint64_t seed_;
  std::size_t cells_;
};

struct TransitionSupport {
  std::vector<std::vector<Element>> successors;
};

inline TransitionSupport support_of(const Kernel& k) {
  TransitionSupport s{std::vector<std::vector<Element>>(k.states.size())};
  for (Element x = 0; x < k.states.size(); ++x)
    for (Element y = 0; y < k.states.size(); ++y)
      if (k.rows[x][y] > 0) s.successors[x].push_back(y);
  return s;
}

inline bool is_irreducible(const Kernel& k) {
  const auto sup = support_of(k);
  const std::size_t n = k.states.size();
  for (Element start = 0; start < n; ++start) {
    std::vector<char> seen(n, 0);
    std::vector<Element> stack{start};
    seen[start] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      Element x = stack.back();
      stack.pop_back();
      for (Element y : sup.successors[x])
        if (!seen[y]) {
          seen[y] = 1;
          ++count;
          stack.push_back(y);
        }
    }
    if (count != n) return false;
  }
  return true;
}

/// Period of an irreducible chain: gcd of level(u) + 1 - level(v) over
/// support edges u -> v, with BFS levels from state 0.
inline std::size_t period(const Kernel& k) {
  const auto sup = support_of(k);
  const std::size_t n = k.states.size();
  const std::size_t unset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> level(n, unset);
  std::vector<Element> queue{0};
  level[0] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head)
    for (Element y : sup.successors[queue[head]])
      if (level[y] == unset) {
        level[y] = level[queue[head]] + 1;
        queue.push_back(y);
      }
  std::size_t g = 0;
  for (Element u = 0; u < n; ++u)
    for (Element v : sup.successors[u]) {
      long long diff = static_cast<long long>(level[u]) + 1 - static_cast<long long>(level[v]);
      g = std::gcd(g, static_cast<std::size_t>(diff < 0 ? -diff : diff));
    }
  return g;
}

inline void require_ergodic(const Kernel& k) {
  if (!is_irreducible(k)) throw NotErgodic("kernel is not irreducible");
  if (period(k) != 1) throw NotErgodic("kernel is periodic");
}

/// Exact stationary law: solves pi P = pi, sum pi = 1 by rational
/// Gauss-Jordan elimination.
inline RationalMeasure stationary_exact(const Kernel& k) {
  k.as_system();
  if (!is_irreducible(k)) throw NotErgodic("kernel is not irreducible");
  const std::size_t n = k.states.size();
  // Row j: sum_i pi_i (P_ij - [i == j]) = 0; the last row is replaced by
  // the normalization.
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n + 1, Rational(0)));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) a[j][i] = k.rows[i][j] - (i == j ? 1 : 0);
  for (std::size_t i = 0; i < n; ++i) a[n - 1][i] = 1;
  a[n - 1][n] = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col] == 0) ++piv;
    if (piv == n) throw NotErgodic("stationary equations are singular");
    std::swap(a[piv], a[col]);
    Rational lead = a[col][col];
    for (auto& v : a[col]) v /= lead;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      Rational f = a[r][col];
      for (std::size_t c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<Rational> pi(n);
  for (std::size_t i = 0; i < n; ++i) pi[i] = a[i][n];
  return RationalMeasure(std::move(pi));
}

struct CftpOptions {
  /// Largest look-back (in steps) before giving up.
  std::uint64_t max_epoch = std::uint64_t{1} << 30;
  /// Also track only the extremal states and require the same answer.
  bool cross_check = true;
};

struct CftpResult {
  Element state;
  /// Look-back length of the epoch that coalesced.
  std::uint64_t epoch;
  /// Extremal tracking reached the same verdict and value at every epoch.
  bool tracking_agreed;
};

/// Propp-Wilson coupling from the past over a monotone grand coupling, with
/// doubling epochs and reused randomness.
class CftpSampler {
 public:
  explicit CftpSampler(GrandCoupling gc, CftpOptions options = {}) : gc_(std::move(gc)), options_(options) {
    Kernel support_kernel{gc_.states, {}};
    // Ergodicity depends only on the support, which the update table carries.
    const std::size_t n = gc_.states.size();
    for (Element x = 0; x < n; ++x) {
      std::vector<Rational> row(n, Rational(0));
      for (Element y : gc_.update[x]) row[y] += Rational(1, gc_.cells);
      support_kernel.rows.emplace_back(std::move(row));
    }
    require_ergodic(support_kernel);
    for (Element x : gc_.states.minimal_elements()) extremal_.push_back(x);
    for (Element x : gc_.states.maximal_elements())
      if (std::find(extremal_.begin(), extremal_.end(), x) == extremal_.end()) extremal_.push_back(x);
    all_.resize(n);
    std::iota(all_.begin(), all_.end(), Element{0});
  }

  CftpResult sample(std::uint64_t seed) const {
    CellStream stream(seed, gc_.cells);
    for (std::uint64_t epoch = 1;; epoch *= 2) {
      if (epoch > options_.max_epoch)
        throw BudgetExceeded("no coalescence within " + std::to_string(options_.max_epoch) + " steps");
      auto full = run_from(all_, epoch, stream);
      bool agreed = true;
      if (options_.cross_check) {
        auto ext = run_from(extremal_, epoch, stream);
        agreed = ext == full;
        if (!agreed) throw Error("extremal and full coalescence tracking disagree");
      }
      if (full) return {*full, epoch, agreed};
    }
  }

  const GrandCoupling& grand_coupling() const noexcept { return gc_; }

 private:
  // Image of `start` under the updates at times -epoch, ..., -1; the common
  // value if it is a single state.
  std::optional<Element> run_from(const std::vector<Element>& start, std::uint64_t epoch,
                                  const CellStream& stream) const {
    std::vector<Element> cur = start;
    std::vector<char> mark(gc_.states.size(), 0);
    for (std::uint64_t t = epoch; t >= 1; --t) {
      std::size_t cell = stream.at(t);
      std::vector<Element> next;
      for (Element x : cur) {
        Element y = gc_.update[x][cell];
        if (!mark[y]) {
          mark[y] = 1;
          next.push_back(y);
        }
      }
      for (Element y : next) mark[y] = 0;
      cur = std::move(next);
    }
    if (cur.size() == 1) return cur.front();
    return std::nullopt;
  }

  GrandCoupling gc_;
  CftpOptions options_;
  std::vector<Element> extremal_;
  std::vector<Element> all_;
};

inline CftpResult cftp_sample(const GrandCoupling& gc, std::uint64_t seed, CftpOptions options = {}) {
  return CftpSampler(gc, options).sample(seed);
}

/// Seed of the i-th independent run in a stream derived from one seed.
inline std::uint64_t run_seed(std::uint64_t seed, std::uint64_t run) {
  return detail::splitmix64(seed ^ detail::splitmix64(run + 0x5bd1e995ULL));
}

struct ChiSquare {
  double statistic = 0;
  std::size_t dof = 0;
  double p_value = 1;
};

/// Pearson goodness of fit of `counts` against an exact law. States of zero
/// probability are excluded from the degrees of freedom; any count there
/// makes the fit fail outright.
inline ChiSquare chi_square_test(const std::vector<std::size_t>& counts, const RationalMeasure& law) {
  check_domain(law, counts.size());
  std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  ChiSquare out;
  std::size_t support = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    double p = to_double(law[i]);
    if (p == 0) {
      if (counts[i] > 0) {
        out.statistic = std::numeric_limits<double>::infinity();
        out.p_value = 0;
        return out;
      }
      continue;
    }
    ++support;
    double expected = p * static_cast<double>(total);
    double diff = static_cast<double>(counts[i]) - expected;
    out.statistic += diff * diff / expected;
  }
  out.dof = support > 0 ? support - 1 : 0;
  if (out.dof == 0) return out;
  boost::math::chi_squared_distribution<double> dist(static_cast<double>(out.dof));
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

}  // namespace realmono
