#include <doctest.h>

#include <cmath>
#include <numbers>
#include <queue>
#include <set>

#include "kcsep/binomial.hpp"
#include "kcsep/constraints.hpp"
#include "kcsep/errors.hpp"
#include "kcsep/rate_index.hpp"
#include "kcsep/rng.hpp"
#include "kcsep/simulator.hpp"
#include "test_support.hpp"

using namespace kcsep;
using kcsep::testing::random_configuration;
using kcsep::testing::random_int;

namespace {

ModelSpec with_perturbation(ModelSpec s, Perturbation::Mode mode, double param) {
  s.perturbation = {mode, param};
  return s;
}

const Profile kHalf = [](double) { return 0.5; };

}  // namespace

TEST_SUITE("simulator") {
  TEST_CASE("rng streams are reproducible and distinct") {
    Rng a = Rng::stream(42, 0);
    Rng b = Rng::stream(42, 0);
    Rng c = Rng::stream(42, 1);
    int same = 0;
    for (int i = 0; i < 1000; ++i) {
      const auto x = a.next();
      CHECK(x == b.next());
      same += x == c.next();
    }
    CHECK(same == 0);
    std::set<std::uint64_t> seeds;
    for (int r = 0; r < 1000; ++r) seeds.insert(realization_seed(7, r));
    CHECK(seeds.size() == 1000);

    Rng u(3);
    double mean = 0.0;
    for (int i = 0; i < 100000; ++i) {
      const double v = u.uniform();
      REQUIRE(v >= 0.0);
      REQUIRE(v < 1.0);
      mean += v;
    }
    CHECK(mean / 100000 == doctest::Approx(0.5).epsilon(0.01));
  }

  TEST_CASE("rate index finds bonds proportionally and skips zero rates") {
    Rng rng(12);
    for (int t = 0; t < 50; ++t) {
      const int n = random_int(rng, 1, 300);
      std::vector<double> rates(static_cast<std::size_t>(n));
      for (auto& r : rates) r = rng.uniform() < 0.4 ? 0.0 : rng.uniform();
      rates[static_cast<std::size_t>(random_int(rng, 0, n - 1))] = 0.5;
      RateIndex index(n);
      index.assign(rates);
      for (int k = 0; k < 20; ++k) {
        const int b = random_int(rng, 0, n - 1);
        rates[static_cast<std::size_t>(b)] = rng.uniform() < 0.5 ? 0.0 : rng.uniform();
        index.update(b, rates[static_cast<std::size_t>(b)]);
      }
      double total = 0.0;
      for (double r : rates) total += r;
      CHECK(index.total() == doctest::Approx(total).epsilon(1e-12));
      for (int k = 0; k < 200; ++k) {
        const double u = rng.uniform() * index.total();
        const int b = index.find(u);
        REQUIRE(rates[static_cast<std::size_t>(b)] > 0.0);
        // linear-scan reference
        double acc = 0.0;
        int expected = -1;
        for (int i = 0; i < n; ++i) {
          acc += rates[static_cast<std::size_t>(i)];
          if (u < acc) {
            expected = i;
            break;
          }
        }
        if (expected >= 0 && rates[static_cast<std::size_t>(expected)] > 0.0) CHECK(b == expected);
      }
    }
  }

  TEST_CASE("box sizes") {
    CHECK(box_size_for(512, 1.0 / 32) == 16);
    CHECK(box_size_for(128, 1.0 / 32) == 4);
    CHECK(box_size_for(100, 0.1) == 10);
    CHECK_THROWS_AS(box_size_for(127, 1.0 / 32), ConfigError);
    CHECK_THROWS_AS(box_size_for(64, 0.0), ConfigError);
    const auto p = coarse_grain(Configuration::from_string("11010000"), 4);
    CHECK(p.values == std::vector<double>{0.75, 0.0});
  }

  TEST_CASE("rates are N^2 (c + p_N) on discordant bonds") {
    Rng rng(31);
    const auto spec = ModelSpec::interpolating(1, 0.5);
    const auto cfg = random_configuration(rng, 64);
    Simulation sim(spec, cfg, Rng(1));
    CHECK(sim.perturbation() == doctest::Approx(1.0 / 64));
    const auto resolved = spec.resolve(64);
    for (int b = 0; b < 64; ++b) {
      CHECK(sim.rates().rate(b) == doctest::Approx(64.0 * 64.0 * bond_rate(cfg, b, resolved)).epsilon(1e-12));
    }
    CHECK(Simulation(ModelSpec::ssep(), cfg, Rng(1)).perturbation() == 0.0);
    CHECK(Simulation(with_perturbation(ModelSpec::pmm(2), Perturbation::Mode::kPower, 0.5), cfg, Rng(1)).perturbation() ==
          doctest::Approx(1.0 / 8));
  }

  TEST_CASE("incremental rates match a rebuild after 1e5 events") {
    Rng rng(77);
    for (const auto& spec : {ModelSpec::interpolating(1, 0.5), ModelSpec::pmm(2), ModelSpec::bernstein(2, 5)}) {
      CAPTURE(spec.to_string());
      Simulation sim(spec, random_configuration(rng, 96), Rng(5));
      const int count = sim.configuration().particle_count();
      for (int i = 0; i < 100000 && !sim.absorbed(); ++i) sim.step();
      CHECK(sim.rate_drift() <= 1e-9);
      CHECK(sim.configuration().particle_count() == count);
      for (int b = 0; b < 96; ++b) REQUIRE(sim.rates().rate(b) == doctest::Approx(sim.fresh_rate(b)).epsilon(1e-9));
    }
  }

  TEST_CASE("every event exchanges a discordant bond") {
    Rng rng(4);
    Simulation sim(ModelSpec::pmm(1), random_configuration(rng, 40), Rng(2));
    for (int i = 0; i < 2000; ++i) {
      const auto before = sim.configuration();
      const auto r = sim.step();
      REQUIRE(r.bond >= 0);
      REQUIRE(r.wait > 0.0);
      REQUIRE(before.occupation(r.bond) != before.occupation(r.bond + 1));
      REQUIRE(sim.configuration() == exchange(before, r.bond, r.bond + 1));
    }
  }

  TEST_CASE("detailed balance at N = 6") {
    // nu_alpha weighs eta and its exchange equally, so reversibility reduces to
    // equal forward and backward rates.
    constexpr int kN = 6;
    for (const auto& spec : {ModelSpec::ssep(), ModelSpec::pmm(1), ModelSpec::pmm(2), ModelSpec::bernstein(1, 2),
                             ModelSpec::bernstein(0, 2)}) {
      for (std::uint64_t mask = 0; mask < (1U << kN); ++mask) {
        const auto cfg = Configuration::from_mask(kN, mask);
        for (int x = 0; x < kN; ++x) {
          const auto next = exchange(cfg, x, x + 1);
          REQUIRE(bond_rate(cfg, x, spec) == bond_rate(next, x, spec));
        }
      }
    }
  }

  TEST_CASE("perturbed chain is irreducible on each particle-number sector at N = 8") {
    constexpr int kN = 8;
    const auto spec = ModelSpec::pmm(2);  // p_N = 1/N
    for (int k = 0; k <= kN; ++k) {
      std::set<std::uint64_t> seen;
      std::queue<Configuration> frontier;
      const auto start = Configuration::from_mask(kN, (std::uint64_t{1} << k) - 1);
      frontier.push(start);
      seen.insert(start.extract(0, kN));
      while (!frontier.empty()) {
        const auto cur = frontier.front();
        frontier.pop();
        for (int x = 0; x < kN; ++x) {
          if (bond_rate(cur, x, spec) <= 0.0) continue;
          const auto next = exchange(cur, x, x + 1);
          if (seen.insert(next.extract(0, kN)).second) frontier.push(next);
        }
      }
      CHECK(seen.size() == static_cast<std::size_t>(std::lround(choose(kN, k))));
    }
  }

  TEST_CASE("blocked configuration is absorbing without perturbation") {
    const auto spec = with_perturbation(ModelSpec::pmm(2), Perturbation::Mode::kValue, 0.0);
    Simulation sim(spec, Configuration::from_string("1000100010001000"), Rng(1));
    const auto r = sim.step();
    CHECK(r.absorbed);
    CHECK(sim.absorbed());
    sim.advance_to(0.3);
    CHECK(sim.time() == 0.3);
    CHECK(sim.configuration().to_string() == "1000100010001000");

    const RunConfig config{16, 0.1, {0.0, 0.1}, 0.25};
    const auto traj = run(spec, config, [](double u) { return std::fmod(u * 4, 1.0) < 0.25 ? 1.0 : 0.0; }, 3);
    CHECK(traj.absorbed);
    CHECK(traj.events == 0);
  }

  TEST_CASE("trajectories conserve particles and are deterministic") {
    const Profile sine = [](double u) { return 0.5 + 0.25 * std::sin(2 * std::numbers::pi * u); };
    const RunConfig config{128, 0.02, {0.0, 0.01, 0.02}, 1.0 / 32};
    for (const auto& spec : {ModelSpec::ssep(), ModelSpec::pmm(2), ModelSpec::interpolating(1, 0.5)}) {
      const auto a = run(spec, config, sine, 99);
      const auto b = run(spec, config, sine, 99);
      CHECK(a.times == b.times);
      CHECK(a.profiles == b.profiles);
      CHECK(a.events == b.events);
      CHECK(a.box_size == 4);
      for (int c : a.particle_counts) CHECK(c == a.particle_counts.front());
      for (const auto& p : a.profiles) {
        CHECK(p.mean() == doctest::Approx(static_cast<double>(a.particle_counts.front()) / 128).epsilon(1e-14));
      }
      CHECK(run(spec, config, sine, 100).profiles != a.profiles);
    }
  }

  TEST_CASE("realizations do not depend on the execution mode") {
    const RunConfig config{64, 0.02, {0.02}, 1.0 / 16};
    const auto serial = run_realizations(ModelSpec::pmm(1), config, kHalf, 5, 6, Exec::kSerial);
    const auto parallel = run_realizations(ModelSpec::pmm(1), config, kHalf, 5, 6, Exec::kParallel);
    REQUIRE(serial.size() == 6);
    for (std::size_t r = 0; r < serial.size(); ++r) {
      CHECK(serial[r].seed == realization_seed(5, r));
      CHECK(serial[r].profiles == parallel[r].profiles);
      CHECK(serial[r].events == parallel[r].events);
    }
  }

  TEST_CASE("initial sampling") {
    const auto full = sample_initial([](double) { return 1.0; }, 50, 1);
    CHECK(full.particle_count() == 50);
    const auto a = sample_initial(kHalf, 4096, 2);
    CHECK(a.particle_count() == doctest::Approx(2048).epsilon(0.05));
    CHECK(a == sample_initial(kHalf, 4096, 2));
    CHECK_THROWS_AS(sample_initial([](double) { return 1.5; }, 10, 1), ConfigError);
  }

  TEST_CASE("run rejects bad observation times") {
    CHECK_THROWS_AS(run(ModelSpec::ssep(), RunConfig{64, 0.1, {0.2}, 1.0 / 16}, kHalf, 1), ConfigError);
    CHECK_THROWS_AS(run(ModelSpec::ssep(), RunConfig{64, 0.1, {0.05, 0.01}, 1.0 / 16}, kHalf, 1), ConfigError);
    CHECK_THROWS_AS(run(ModelSpec::ssep(), RunConfig{70, 0.1, {0.1}, 1.0 / 32}, kHalf, 1), ConfigError);
  }

  TEST_CASE("pairing with test functions") {
    Rng rng(6);
    const auto one = [](double) { return 1.0; };
    const auto sine = [](double u) { return std::sin(2 * std::numbers::pi * u); };
    for (int t = 0; t < 20; ++t) {
      const auto cfg = random_configuration(rng, 64);
      CHECK(pair_with_test_function(cfg, one) == doctest::Approx(cfg.particle_count() / 64.0));
      CHECK(pair_with_test_function(coarse_grain(cfg, 8), one) == doctest::Approx(cfg.particle_count() / 64.0));
    }
    for (int n : {8, 64, 512}) {
      Configuration alt(n);
      for (int x = 0; x < n; x += 2) alt.set(x, 1);
      CHECK(std::fabs(pair_with_test_function(alt, sine)) <= 4.0 / n);
      const auto cosine = [](double u) { return std::cos(2 * std::numbers::pi * u) + u * u; };
      double riemann = 0.0;
      for (int x = 0; x < n; ++x) riemann += cosine(static_cast<double>(x) / n);
      CHECK(pair_with_test_function(Configuration(n, true), cosine) == doctest::Approx(riemann / n));
    }
  }

  TEST_CASE("aggregate") {
    const RunConfig config{64, 0.01, {0.0, 0.01}, 1.0 / 16};
    const auto runs = run_realizations(ModelSpec::ssep(), config, [](double) { return 1.0; }, 3, 4);
    const auto agg = aggregate(runs);
    CHECK(agg.realizations == 4);
    CHECK(agg.times == std::vector<double>{0.0, 0.01});
    for (std::size_t k = 0; k < agg.times.size(); ++k) {
      for (std::size_t b = 0; b < agg.mean[k].size(); ++b) {
        CHECK(agg.mean[k][b] == 1.0);
        CHECK(agg.stderr_[k][b] == 0.0);
      }
    }
    CHECK_THROWS_AS(aggregate({runs[0]}), ConfigError);
    auto other = runs;
    other[1].times = {0.0, 0.02};
    CHECK_THROWS_AS(aggregate(other), ConfigError);
  }

  TEST_CASE("stderr has the binomial order of magnitude") {
    // SSEP at half filling: box variance about alpha (1 - alpha) / box_size.
    const RunConfig config{512, 0.01, {0.01}, 1.0 / 32};
    const auto agg = aggregate(run_realizations(ModelSpec::ssep(), config, kHalf, 17, 20));
    const double expected = std::sqrt(0.25 / 16 / 20);
    double mean_se = 0.0;
    for (double s : agg.stderr_[0]) mean_se += s;
    mean_se /= static_cast<double>(agg.stderr_[0].size());
    CHECK(mean_se > expected / 3);
    CHECK(mean_se < expected * 3);
  }
}
