#include <doctest.h>

#include <random>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "radial_lab/errors.hpp"
#include "radial_lab/frostman.hpp"

using namespace radial_lab;

namespace {

CubeSet diagonal(int level) {
  std::vector<DyadicCube> cubes;
  for (std::uint32_t k = 0; k < (1u << level); ++k) cubes.push_back(DyadicCube{level, k, k});
  return CubeSet(level, cubes);
}

CubeSet singleton(int level) { return CubeSet(level, {DyadicCube{level, 3, 1}}); }

// Full level-4 subtree below level-2 cube (1, 2), plus one far cube.
CubeSet subtree_plus_stray() {
  std::vector<DyadicCube> cubes;
  for (std::uint32_t i = 4; i < 8; ++i) {
    for (std::uint32_t j = 8; j < 12; ++j) cubes.push_back(DyadicCube{4, i, j});
  }
  cubes.push_back(DyadicCube{4, 15, 0});
  return CubeSet(4, cubes);
}

}  // namespace

TEST_SUITE("frostman") {
  TEST_CASE("ball checker") {
    CHECK(check_ball_frostman(CubeSet::full_grid(3), Rational(2), Rational(64)).verified);
    const auto single = check_ball_frostman(singleton(4), Rational(1), Rational(1));
    CHECK_FALSE(single.verified);
    REQUIRE(single.witness);
    CHECK(single.witness->scale == 4);
    CHECK(single.witness->count == 1);
    CHECK(single.witness->bound == doctest::Approx(1.0 / 16));
    CHECK(check_ball_frostman(diagonal(4), Rational(0), Rational(1)).verified);
    CHECK_THROWS_AS(check_ball_frostman(CubeSet(3, {}), Rational(1), Rational(1)), ArgumentError);
    CHECK_THROWS_AS(check_ball_frostman(diagonal(3), Rational(3), Rational(1)), ArgumentError);
    CHECK_THROWS_AS(check_ball_frostman(diagonal(3), Rational(1), Rational(0)), ArgumentError);
  }

  TEST_CASE("dyadic checker") {
    CHECK(check_dyadic_frostman(CubeSet::full_grid(4), Rational(2), Rational(1)).verified);
    CHECK(check_dyadic_frostman(diagonal(3), Rational(1), Rational(1)).verified);
    std::vector<DyadicCube> column;
    for (std::uint32_t j = 0; j < 8; ++j) column.push_back(DyadicCube{3, 0, j});
    const auto c = check_dyadic_frostman(CubeSet(3, column), Rational(2), Rational(1));
    CHECK_FALSE(c.verified);
    REQUIRE(c.witness);
    // The worst ratio count / (2^{-2m} 8) is at the finest level: 1 / (1/8).
    CHECK(c.witness->scale == 3);
    CHECK(c.witness->count == 1);
    CHECK(c.witness_ratio() == doctest::Approx(8.0));
    CHECK_THROWS_AS(check_dyadic_frostman(CubeSet(3, {}), Rational(1), Rational(1)), ArgumentError);
  }

  TEST_CASE("witness ratio brackets 1 exactly when verified") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 40; ++trial) {
      const int n = 1 + trial % 6;
      const auto s = oracle::cube_set(n, oracle::random_cells(rng, n, 0.3));
      const Rational exp(static_cast<std::int64_t>(rng() % 9), 4);
      for (const auto& cert : {check_dyadic_frostman(s, exp, Rational(2)), check_ball_frostman(s, exp, Rational(8))}) {
        REQUIRE(cert.witness);
        if (cert.verified) CHECK(cert.witness_ratio() <= 1.0 + 1e-12);
        else CHECK(cert.witness_ratio() > 1.0 - 1e-12);
      }
    }
  }

  TEST_CASE("certificate JSON layout") {
    const auto cert = check_dyadic_frostman(diagonal(3), Rational(1), Rational(1));
    const auto j = to_json(cert);
    CHECK(j["kind"] == "dyadic");
    CHECK(j["verified"] == true);
    CHECK(j["s"].get<double>() == 1.0);
    CHECK(j["C"].get<double>() == 1.0);
    CHECK(j["witness"].contains("scale"));
    CHECK(j["witness"].contains("index"));
    CHECK(j["witness"].contains("count"));
    CHECK(j["witness"].contains("bound"));
  }

  TEST_CASE("max_dyadic_exponent") {
    const Rational step(1, 64);
    CHECK(max_dyadic_exponent(CubeSet::full_grid(4), Rational(1), step) == Rational(2));
    CHECK(max_dyadic_exponent(diagonal(4), Rational(1), step) == Rational(1));
    CHECK(max_dyadic_exponent(singleton(4), Rational(1), step) == Rational(0));
    CHECK_FALSE(max_dyadic_exponent(singleton(4), Rational(1, 2), step).has_value());
  }

  TEST_CASE("certify_with_min_constant finds the least power of two") {
    const auto cert = certify_with_min_constant(diagonal(4), Rational(3, 2));
    CHECK(cert.verified);
    // Each level-m cell holds 2^{4-m} = 2^{-m} 16 members; at s = 3/2 the worst
    // level is m = 4 needing C >= 2^{4 * 1/2} = 4.
    CHECK(cert.C == Rational(4));
    CHECK_FALSE(check_dyadic_frostman(diagonal(4), Rational(3, 2), Rational(2)).verified);
  }

  TEST_CASE("branching_profile") {
    CHECK(branching_profile(CubeSet::full_grid(2)).counts == std::vector<std::uint64_t>{1, 4, 16});
    CHECK(branching_profile(diagonal(3)).counts == std::vector<std::uint64_t>{1, 2, 4, 8});
    CHECK(branching_profile(singleton(3)).counts == std::vector<std::uint64_t>{1, 1, 1, 1});
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 1 + trial % 6;
      const auto v = branching_profile(oracle::cube_set(n, oracle::random_cells(rng, n, 0.3))).log2_counts();
      CHECK(v[0] == 0.0);
      for (int m = 1; m <= n; ++m) {
        CHECK(v[m] - v[m - 1] >= 0.0);
        CHECK(v[m] - v[m - 1] <= 2.0);
      }
    }
  }

  TEST_CASE("checkers are monotone in s and C") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
      const int n = 1 + trial % 6;
      const auto s = oracle::cube_set(n, oracle::random_cells(rng, n, 0.2));
      for (std::int64_t k = 0; k <= 8; ++k) {
        const Rational e(k, 4);
        if (check_dyadic_frostman(s, e, Rational(2)).verified) {
          CHECK(check_dyadic_frostman(s, e / Rational(2), Rational(2)).verified);
          CHECK(check_dyadic_frostman(s, e, Rational(4)).verified);
        }
      }
    }
  }

  TEST_CASE("both checkers agree with exhaustive enumeration") {
    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 60; ++trial) {
      const int n = 1 + trial % 6;
      const auto cells = oracle::random_cells(rng, n, trial % 3 == 0 ? 0.05 : 0.3);
      const auto s = oracle::cube_set(n, cells);
      const Rational e(static_cast<std::int64_t>(rng() % 17), 8);
      const Rational C(1 + static_cast<std::int64_t>(rng() % 8), 1 + static_cast<std::int64_t>(rng() % 2));
      CHECK(check_dyadic_frostman(s, e, C).verified == oracle::dyadic_frostman(n, cells, e, C));
      CHECK(check_ball_frostman(s, e, C).verified == oracle::ball_frostman(n, cells, e, C));
    }
  }

  TEST_CASE("dyadic certificates transfer to the ball checker within a bounded factor") {
    std::mt19937_64 rng(25);
    double worst = 0.0;
    for (int trial = 0; trial < 40; ++trial) {
      const int n = 2 + trial % 5;
      const auto s = oracle::cube_set(n, oracle::random_cells(rng, n, 0.3));
      const Rational e(static_cast<std::int64_t>(rng() % 9), 4);
      const auto dyadic = certify_with_min_constant(s, e);
      int k = 0;
      while (!check_ball_frostman(s, e, dyadic.C * Rational(std::int64_t{1} << k)).verified) ++k;
      worst = std::max(worst, std::ldexp(1.0, k));
    }
    CHECK(worst <= 64.0);
    MESSAGE("largest ball/dyadic constant ratio observed: " << worst);
  }

  TEST_CASE("extract_uniform_subset examples") {
    const auto full = extract_uniform_subset(CubeSet::full_grid(4), Rational(1, 2));
    CHECK(full.subset == CubeSet::full_grid(4));
    CHECK(full.certificate.s == Rational(2));
    CHECK(full.certificate.verified);

    const auto one = extract_uniform_subset(singleton(5), Rational(1, 3));
    CHECK(one.subset == singleton(5));
    CHECK(one.certificate.s == Rational(0));

    const auto mixed = extract_uniform_subset(subtree_plus_stray(), Rational(1, 2));
    CHECK(mixed.subset.size() == 16);
    CHECK_FALSE(mixed.subset.contains(DyadicCube{4, 15, 0}));
    CHECK(mixed.certificate.s == Rational(2));
    CHECK(mixed.certificate.verified);
    CHECK(mixed.block == 2);

    CHECK_THROWS_AS(extract_uniform_subset(CubeSet(3, {}), Rational(1, 2)), ArgumentError);
    CHECK_THROWS_AS(extract_uniform_subset(singleton(3), Rational(0)), ArgumentError);
    CHECK_THROWS_AS(extract_uniform_subset(singleton(3), Rational(3, 2)), ArgumentError);
  }

  TEST_CASE("extract_uniform_subset contract on random inputs") {
    std::mt19937_64 rng(26);
    for (int trial = 0; trial < 30; ++trial) {
      const int n = 2 + trial % 6;
      const Rational eps = trial % 2 ? Rational(1, 4) : Rational(1, 2);
      const auto p = oracle::cube_set(n, oracle::random_cells(rng, n, 0.05 + 0.1 * (trial % 4)));
      const auto out = extract_uniform_subset(p, eps);
      const int block = std::max(1, static_cast<int>(std::floor(boost::rational_cast<double>(eps) * n)));
      CHECK(out.block == block);
      CHECK(out.certificate.verified);
      CHECK(check_dyadic_frostman(out.subset, out.certificate.s, out.certificate.C).verified);
      CHECK(out.certificate.C <= Rational(std::int64_t{1} << (2 * block + 1)));
      CHECK(static_cast<double>(out.subset.size()) >= out.size_floor);
      for (const auto& c : out.subset.cubes()) CHECK(p.contains(c));
    }
  }
}
