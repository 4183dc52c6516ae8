#include <doctest.h>

#include "kcsep/errors.hpp"
#include "kcsep/lattice.hpp"
#include "test_support.hpp"

using namespace kcsep;
using kcsep::testing::random_configuration;
using kcsep::testing::random_int;

TEST_SUITE("lattice") {
  TEST_CASE("occupation wraps around") {
    const auto cfg = Configuration::from_string("101");
    CHECK(cfg.occupation(0) == 1);
    CHECK(cfg.occupation(3) == 1);
    CHECK(cfg.occupation(-1) == 1);
    CHECK(cfg.occupation(-2) == 0);
    CHECK(occupation(cfg, 1) == 0);
  }

  TEST_CASE("string round trip") {
    for (const char* s : {"0", "1", "1101010011", "0000000000000000000000000000000000000000000000000000000000000000011"}) {
      CHECK(Configuration::from_string(s).to_string() == s);
    }
    CHECK_THROWS_AS(Configuration::from_string("10x"), ConfigError);
  }

  TEST_CASE("exchange") {
    const auto cfg = Configuration::from_string("101");
    CHECK(exchange(cfg, 0, 1).to_string() == "011");
    CHECK(exchange(cfg, 0, 0) == cfg);
    Rng rng(3);
    for (int t = 0; t < 200; ++t) {
      const auto c = random_configuration(rng, random_int(rng, 3, 130));
      CHECK(exchange(exchange(c, 0, 2), 0, 2) == c);
      const int x = random_int(rng, -200, 200);
      const int y = random_int(rng, -200, 200);
      CHECK(exchange(c, x, y).particle_count() == c.particle_count());
    }
  }

  TEST_CASE("window_count examples") {
    const Window w = node_window(1, 2);  // [-1, 2] minus {0, 1}
    CHECK(window_count(Configuration::from_string("11010100"), 0, w) == 0);
    CHECK(window_count(Configuration(8, true), 3, w) == 2);
    CHECK(window_count(Configuration(8, false), 3, w) == 0);
    CHECK(window_count(Configuration(20, true), 5, node_window(2, 6)) == 6);
  }

  TEST_CASE("window_count popcount agrees with the site loop") {
    Rng rng(17);
    for (int t = 0; t < 10000; ++t) {
      const int n = random_int(rng, 6, 300);
      const auto cfg = random_configuration(rng, n, rng.uniform());
      const int width = random_int(rng, 1, n - 2 > 60 ? 60 : n - 2);
      const Window w = node_window(random_int(rng, 0, width), width);
      const int x = random_int(rng, -1000, 1000);
      REQUIRE(window_count(cfg, x, w) == window_count_naive(cfg, x, w));
    }
  }

  TEST_CASE("window_count rejects windows wider than the lattice") {
    CHECK_THROWS_AS(window_count(Configuration(6), 0, node_window(0, 6)), SizeError);
  }

  TEST_CASE("shift covariance") {
    Rng rng(5);
    for (int t = 0; t < 300; ++t) {
      const int n = random_int(rng, 8, 150);
      const auto cfg = random_configuration(rng, n);
      const int width = random_int(rng, 1, n - 2 > 40 ? 40 : n - 2);
      const Window w = node_window(random_int(rng, 0, width), width);
      const auto shifted = shift(cfg, 1);
      for (int x = 0; x < n; ++x) REQUIRE(window_count(shifted, x, w) == window_count(cfg, x + 1, w));
      const int k = random_int(rng, -500, 500);
      const int y = random_int(rng, -500, 500);
      CHECK(shift(cfg, k).occupation(y) == cfg.occupation(y + k));
    }
  }

  TEST_CASE("complement") {
    Rng rng(9);
    for (int t = 0; t < 100; ++t) {
      const auto cfg = random_configuration(rng, random_int(rng, 1, 200));
      const auto comp = complement(cfg);
      CHECK(comp.particle_count() == cfg.size() - cfg.particle_count());
      for (int x = 0; x < cfg.size(); ++x) REQUIRE(comp.occupation(x) == 1 - cfg.occupation(x));
    }
  }

  TEST_CASE("count_range and extract agree with site reads") {
    Rng rng(11);
    for (int t = 0; t < 2000; ++t) {
      const int n = random_int(rng, 1, 260);
      const auto cfg = random_configuration(rng, n);
      const int start = random_int(rng, -600, 600);
      const int len = random_int(rng, 0, 64);
      int count = 0;
      std::uint64_t bits = 0;
      for (int i = 0; i < len; ++i) {
        count += cfg.occupation(start + i);
        bits |= static_cast<std::uint64_t>(cfg.occupation(start + i)) << i;
      }
      REQUIRE(cfg.extract(start, len) == bits);
      if (len <= n) REQUIRE(cfg.count_range(start, len) == count);
    }
  }

  TEST_CASE("local_average") {
    CHECK(local_average(Configuration(10, true), 4, 5) == 1.0);
    CHECK(local_average(Configuration::from_string("1010"), 0, 4) == 0.5);
    CHECK(local_average(Configuration::from_string("11010100"), 2, 3) == doctest::Approx(1.0 / 3));
  }
}
