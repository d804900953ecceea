#include <catch2/catch_amalgamated.hpp>

#include "realmono/cftp.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace realmono;
using namespace realmono::testing;

namespace {

Kernel two_chain_kernel() {
  return Kernel{chain(2), {RationalMeasure({q(2, 3), q(1, 3)}), RationalMeasure({q(1, 3), q(2, 3)})}};
}

Kernel identity_kernel(std::size_t n) {
  Kernel k{chain(n), {}};
  for (Element x = 0; x < n; ++x) k.rows.push_back(RationalMeasure::point_mass(n, x));
  return k;
}

// pi P == pi, computed directly.
bool is_stationary(const RationalMeasure& pi, const Kernel& k) {
  for (Element y = 0; y < k.states.size(); ++y) {
    Rational s = 0;
    for (Element x = 0; x < k.states.size(); ++x) s += pi[x] * k.rows[x][y];
    if (s != pi[y]) return false;
  }
  return true;
}

std::vector<std::size_t> histogram(const CftpSampler& sampler, std::uint64_t seed, std::size_t n, std::size_t states) {
  std::vector<std::size_t> counts(states, 0);
  for (std::size_t i = 0; i < n; ++i) ++counts[sampler.sample(run_seed(seed, i)).state];
  return counts;
}

}  // namespace

TEST_CASE("splitmix64 matches the reference sequence", "[cftp]") {
  // Reference outputs for the generator started at state 0.
  std::uint64_t state = 0;
  auto next = [&] {
    std::uint64_t out = detail::splitmix64(state);
    state += 0x9e3779b97f4a7c15ULL;
    return out;
  };
  CHECK(next() == 0xe220a8397b1dcdafULL);
  CHECK(next() == 0x6e789e6aa1b965f4ULL);
  CHECK(next() == 0x06c45d188009454fULL);
}

TEST_CASE("build_grand_coupling", "[cftp]") {
  SECTION("2-chain kernel") {
    auto k = two_chain_kernel();
    auto gc = build_grand_coupling(k);
    CHECK(gc.cells == 3);
    CHECK(gc.source == GrandCoupling::Source::Identity);
    // Any table works if bottom uses its state twice as often, top likewise,
    // and bottom never lands above top on the same cell.
    CHECK(std::count(gc.update[0].begin(), gc.update[0].end(), Element{0}) == 2);
    CHECK(std::count(gc.update[1].begin(), gc.update[1].end(), Element{1}) == 2);
    for (std::size_t i = 0; i < 3; ++i) CHECK(gc.update[0][i] <= gc.update[1][i]);
    CHECK(is_valid_grand_coupling(gc, k));
  }
  SECTION("identity kernel maps every state to itself") {
    auto gc = build_grand_coupling(identity_kernel(3));
    for (Element x = 0; x < 3; ++x)
      for (auto y : gc.update[x]) CHECK(y == x);
  }
  SECTION("rows that are not monotone are refused with a witness") {
    Kernel k{chain(2), {RationalMeasure({q(1, 3), q(2, 3)}), RationalMeasure({q(2, 3), q(1, 3)})}};
    try {
      build_grand_coupling(k);
      FAIL("expected NotStochMonotone");
    } catch (const NotStochMonotone& e) {
      CHECK(e.violation().alpha == 0);
      CHECK(e.violation().beta == 1);
    }
  }
  SECTION("the diamond counterexample is refused with a certificate") {
    auto sys = diamond_counterexample();
    Kernel k{sys.state, sys.measures};
    try {
      build_grand_coupling(k);
      FAIL("expected Infeasible");
    } catch (const Infeasible& e) {
      CHECK(verify_certificate(sys, e.certificate()));
    }
  }
  SECTION("random monotone kernels on trees and general posets") {
    Rng rng(90);
    std::size_t synchronized = 0, direct = 0;
    for (int trial = 0; trial < 120; ++trial) {
      Poset s;
      switch (trial % 3) {
        case 0: s = random_path_poset(rng, 2 + rng.below(5)); break;
        case 1: s = random_class_w_poset(rng, 4 + rng.below(3)); break;
        default: s = random_bounded_poset(rng, 1 + rng.below(3)); break;
      }
      auto sys = random_stoch_monotone_system(rng, s, s, 6);
      Kernel k{s, sys.measures};
      try {
        auto gc = build_grand_coupling(k);
        REQUIRE(is_valid_grand_coupling(gc, k));
        if (classify(s) == PosetClass::Z) REQUIRE(gc.source == GrandCoupling::Source::Identity);
        synchronized += gc.source == GrandCoupling::Source::Synchronized;
        direct += gc.source == GrandCoupling::Source::Direct;
      } catch (const Infeasible& e) {
        REQUIRE(classify(s) == PosetClass::NonAcyclicOrDisconnected);
        REQUIRE(verify_certificate(k.as_system(), e.certificate()));
      }
    }
    CHECK(synchronized > 0);
    CHECK(direct > 0);
  }
}

TEST_CASE("ergodicity and the stationary law", "[cftp]") {
  CHECK(stationary_exact(two_chain_kernel()) == RationalMeasure({q(1, 2), q(1, 2)}));
  CHECK_THROWS_AS(stationary_exact(identity_kernel(2)), NotErgodic);
  CHECK_THROWS_AS(CftpSampler(build_grand_coupling(identity_kernel(2))), NotErgodic);

  // Absorbing top: reducible.
  Kernel absorbing{chain(2), {RationalMeasure({q(1, 2), q(1, 2)}), RationalMeasure::point_mass(2, 1)}};
  CHECK_FALSE(is_irreducible(absorbing));
  CHECK_THROWS_AS(CftpSampler(build_grand_coupling(absorbing)), NotErgodic);

  // Deterministic flip on an antichain: irreducible with period two.
  Kernel flip{antichain(2), {RationalMeasure::point_mass(2, 1), RationalMeasure::point_mass(2, 0)}};
  CHECK(is_irreducible(flip));
  CHECK(period(flip) == 2);
  CHECK_THROWS_AS(require_ergodic(flip), NotErgodic);

  SECTION("doubly stochastic kernel has the uniform law") {
    Kernel k{chain(3), {RationalMeasure({q(1, 2), q(1, 2), q(0, 1)}), RationalMeasure({q(1, 2), q(0, 1), q(1, 2)}),
                        RationalMeasure({q(0, 1), q(1, 2), q(1, 2)})}};
    CHECK(stationary_exact(k) == RationalMeasure::uniform(3));
  }
  SECTION("random irreducible kernels") {
    Rng rng(91);
    for (int trial = 0; trial < 100; ++trial) {
      std::size_t n = 1 + rng.below(6);
      Kernel k{antichain(n), {}};
      for (std::size_t x = 0; x < n; ++x) k.rows.push_back(random_measure(rng, n, 1 + rng.below(10)));
      if (!is_irreducible(k)) continue;
      REQUIRE(is_stationary(stationary_exact(k), k));
    }
  }
}

TEST_CASE("chi_square_test", "[cftp]") {
  auto half = RationalMeasure({q(1, 2), q(1, 2)});
  auto even = chi_square_test({50, 50}, half);
  CHECK(even.statistic == 0);
  CHECK(even.dof == 1);
  CHECK(even.p_value == Catch::Approx(1.0));
  auto skew = chi_square_test({60, 40}, half);
  CHECK(skew.statistic == Catch::Approx(4.0));
  CHECK(skew.p_value == Catch::Approx(0.0455003).epsilon(1e-5));
  CHECK(chi_square_test({1, 9}, RationalMeasure({q(0, 1), q(1, 1)})).p_value == 0);
}

TEST_CASE("cftp sampling", "[cftp]") {
  SECTION("cell draws depend only on seed and time") {
    CellStream a(7, 15), b(7, 15), c(8, 15);
    std::size_t differ = 0;
    for (std::uint64_t t = 1; t <= 1000; ++t) {
      REQUIRE(a.at(t) == b.at(t));
      REQUIRE(a.at(t) < 15);
      differ += a.at(t) != c.at(t);
    }
    CHECK(differ > 800);
  }
  SECTION("cell draws are uniform") {
    CellStream s(3, 7);
    std::vector<std::size_t> counts(7, 0);
    for (std::uint64_t t = 1; t <= 70000; ++t) ++counts[s.at(t)];
    CHECK(chi_square_test(counts, RationalMeasure::uniform(7)).p_value > 0.001);
  }
  SECTION("constant rows coalesce in one step with law mu") {
    auto mu = RationalMeasure({q(1, 4), q(1, 2), q(1, 4)});
    Kernel k{chain(3), {mu, mu, mu}};
    CftpSampler sampler(build_grand_coupling(k));
    std::vector<std::size_t> counts(3, 0);
    for (std::size_t i = 0; i < 20000; ++i) {
      auto r = sampler.sample(run_seed(5, i));
      REQUIRE(r.epoch == 1);
      ++counts[r.state];
    }
    CHECK(chi_square_test(counts, mu).p_value > 0.001);
  }
  SECTION("reruns are bit-identical and tracking agrees") {
    CftpSampler sampler(build_grand_coupling(two_chain_kernel()));
    for (std::uint64_t i = 0; i < 2000; ++i) {
      auto a = sampler.sample(run_seed(42, i));
      auto b = cftp_sample(sampler.grand_coupling(), run_seed(42, i));
      REQUIRE(a.state == b.state);
      REQUIRE(a.epoch == b.epoch);
      REQUIRE(a.tracking_agreed);
    }
  }
  SECTION("2-chain law") {
    CftpSampler sampler(build_grand_coupling(two_chain_kernel()));
    auto counts = histogram(sampler, 1, 20000, 2);
    CHECK(chi_square_test(counts, stationary_exact(two_chain_kernel())).p_value > 0.001);
  }
  SECTION("epoch cap") {
    CftpOptions opts;
    opts.max_epoch = 1;
    Kernel slow{chain(2), {RationalMeasure({q(99, 100), q(1, 100)}), RationalMeasure({q(1, 100), q(99, 100)})}};
    CftpSampler sampler(build_grand_coupling(slow), opts);
    std::size_t exceeded = 0;
    for (std::uint64_t i = 0; i < 50; ++i) {
      try {
        sampler.sample(i);
      } catch (const BudgetExceeded&) {
        ++exceeded;
      }
    }
    CHECK(exceeded > 40);
  }
  SECTION("random ergodic kernels on tree-shaped and bounded posets") {
    Rng rng(92);
    int tested = 0;
    for (int trial = 0; trial < 200 && tested < 12; ++trial) {
      Poset s = trial % 2 ? random_class_w_poset(rng, 4 + rng.below(2)) : random_bounded_poset(rng, 1 + rng.below(2));
      auto sys = random_stoch_monotone_system(rng, s, s, 4, 40);
      Kernel k{s, sys.measures};
      if (!is_irreducible(k) || period(k) != 1) continue;
      GrandCoupling gc;
      try {
        gc = build_grand_coupling(k);
      } catch (const Infeasible&) {
        continue;
      }
      ++tested;
      CftpSampler sampler(gc);
      auto counts = histogram(sampler, 100 + trial, 8000, s.size());
      auto fit = chi_square_test(counts, stationary_exact(k));
      INFO("trial " << trial << " chi2 " << fit.statistic << " dof " << fit.dof);
      REQUIRE(fit.p_value > 0.001);
    }
    CHECK(tested >= 6);
  }
}
