#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "radial_lab/errors.hpp"
#include "radial_lab/generators.hpp"
#include "radial_lab/incidence.hpp"

using namespace radial_lab;

namespace {

std::vector<oracle::Cell> cells_of(const TubeSet& ts) {
  std::vector<oracle::Cell> out;
  for (const auto& t : ts.tubes()) out.emplace_back(t.param.i, t.param.j);
  return out;
}

// Singleton cube at the origin cell with the single tube (0, 0) through it,
// certified at exponent 1 with C = 2^n.
HarnessInput singleton_input(int n) {
  HarnessInput in;
  in.cubes.set = CubeSet(n, {DyadicCube{n, 0, 0}});
  const Rational c(std::int64_t{1} << n);
  in.cubes.certificate = check_dyadic_frostman(in.cubes.set, Rational(1), c);
  CertifiedTubeFamily fam;
  fam.tubes = TubeSet(n, {Tube{DyadicCube{n, 0, 0}}});
  fam.certificate = check_dyadic_frostman(fam.tubes.parameter_set(), Rational(1), c);
  in.families.push_back(fam);
  in.family_size = 1;
  in.s = Rational(1);
  in.t = Rational(1);
  return in;
}

}  // namespace

TEST_SUITE("incidence") {
  TEST_CASE("count_tubes_through_cube examples") {
    const auto full = TubeSet::full(3);
    // Counted by dense sampling of each parameter cell: the frozen value.
    std::uint64_t sampled = 0;
    for (std::uint32_t a = 0; a < 8; ++a)
      for (std::uint32_t b = 0; b < 8; ++b) sampled += oracle::tube_meets_sampled(3, {a, b}, {0, 0});
    CHECK(sampled == 16);
    CHECK(count_tubes_through_cube(full, DyadicCube{3, 0, 0}) == 16);
    CHECK(count_tubes_through_cube(TubeSet(3, {}), DyadicCube{3, 0, 0}) == 0);
    CHECK(count_tubes_through_cube(TubeSet(3, {Tube{DyadicCube{3, 0, 0}}}), DyadicCube{3, 0, 0}) == 1);
    CHECK_THROWS_AS(count_tubes_through_cube(full, DyadicCube{2, 0, 0}), ArgumentError);
  }

  TEST_CASE("TubeSet validation") {
    CHECK_THROWS_AS(TubeSet(3, {Tube{DyadicCube{2, 0, 0}}}), ArgumentError);
    CHECK_THROWS_AS(TubeSet(3, {Tube{DyadicCube{3, 8, 0}}}), ArgumentError);
    CHECK_THROWS_AS(TubeSet(3, {Tube{DyadicCube{3, 1, 1}}, Tube{DyadicCube{3, 1, 1}}}), ArgumentError);
    const TubeSet ts(2, {Tube{DyadicCube{2, 3, 1}}, Tube{DyadicCube{2, 0, 2}}});
    CHECK(ts.tubes()[0].param == DyadicCube{2, 0, 2});
    CHECK(ts.parameter_set().size() == 2);
  }

  TEST_CASE("indexed count matches brute force and the sampled oracle") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 60; ++trial) {
      const int n = 1 + trial % 5;
      const auto pc = oracle::random_cells(rng, n, 0.3);
      const auto tc = oracle::random_cells(rng, n, 0.3);
      const auto p = oracle::cube_set(n, pc);
      const auto ts = oracle::tube_set(n, tc);
      const auto fast = count_incidences(p, ts, IncidenceOptions{true});
      const auto brute = count_incidences_brute_force(p, ts);
      REQUIRE(fast.incidences == brute.incidences);
      REQUIRE(fast.union_size == brute.union_size);
      REQUIRE(fast.per_cube == brute.per_cube);
      CHECK(fast.brute_force_checked);
      REQUIRE(fast.incidences == oracle::incidences(n, pc, tc));
    }
  }

  TEST_CASE("incidences are monotone in both sets") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 30; ++trial) {
      const int n = 3 + trial % 4;
      auto pc = oracle::random_cells(rng, n, 0.4);
      auto tc = oracle::random_cells(rng, n, 0.4);
      const auto big = count_incidences(oracle::cube_set(n, pc), oracle::tube_set(n, tc)).incidences;
      pc.resize((pc.size() + 1) / 2);
      tc.resize((tc.size() + 1) / 2);
      CHECK(count_incidences(oracle::cube_set(n, pc), oracle::tube_set(n, tc)).incidences <= big);
    }
  }

  TEST_CASE("incidence count is invariant under the dual configuration") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 30; ++trial) {
      const int n = 2 + trial % 5;
      const auto p = oracle::cube_set(n, oracle::random_cells(rng, n, 0.3));
      const auto ts = oracle::tube_set(n, oracle::random_cells(rng, n, 0.3));
      const auto primal = count_incidences(p, ts);
      const auto dual = count_incidences(dual_cubes(ts), dual_tubes(p));
      CHECK(primal.incidences == dual.incidences);
      CHECK(dual_cubes(dual_tubes(p)) == p);
    }
  }

  TEST_CASE("union size bounds") {
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 30; ++trial) {
      const int n = 2 + trial % 5;
      const auto p = oracle::cube_set(n, oracle::random_cells(rng, n, 0.2));
      const auto ts = oracle::tube_set(n, oracle::random_cells(rng, n, 0.5));
      const auto rec = count_incidences(p, ts);
      CHECK(rec.union_size <= ts.size());
      CHECK(rec.union_size <= rec.incidences);
      std::uint64_t max_per_cube = 0;
      for (auto k : rec.per_cube) max_per_cube = std::max(max_per_cube, k);
      CHECK(rec.union_size >= max_per_cube);
    }
  }

  TEST_CASE("tube families through a cube") {
    const DyadicCube q{8, 20, 200};  // upper left: every slope cell has a tube through q
    const auto fam = tube_family_through_cube(q, Rational(1, 2), 5);
    CHECK(fam.tubes.size() == nominal_family_size(8, Rational(1, 2)));
    CHECK(fam.tubes.size() == 16);
    CHECK(fam.certificate.verified);
    CHECK(fam.certificate.s == Rational(1, 2));
    for (const auto& t : fam.tubes.tubes()) CHECK(tube_meets_cube(t, q));
    CHECK(tube_family_through_cube(q, Rational(1, 2), 5).tubes == fam.tubes);
    CHECK(tube_family_through_cube(q, Rational(1), 5).tubes.size() == 256);
    // Lower right: steep slope cells would need a negative intercept and are dropped.
    const DyadicCube low{8, 100, 37};
    const auto partial = tube_family_through_cube(low, Rational(1), 5);
    CHECK(partial.tubes.size() < 256);
    for (const auto& t : partial.tubes.tubes()) CHECK(tube_meets_cube(t, low));
    CHECK_THROWS_AS(tube_family_through_cube(q, Rational(0), 5), ArgumentError);
    CHECK_THROWS_AS(tube_family_through_cube(q, Rational(3, 2), 5), ArgumentError);
  }

  TEST_CASE("harness on a singleton") {
    const auto rec = renwang_harness(singleton_input(6));
    CHECK(rec.union_size == 1);
    CHECK(rec.incidences == 1);
    CHECK(rec.exponent_hat == doctest::Approx(0.0));
  }

  TEST_CASE("harness refuses invalid inputs") {
    SUBCASE("tube missing its cube") {
      auto in = singleton_input(4);
      in.families[0].tubes = TubeSet(4, {Tube{DyadicCube{4, 0, 15}}});
      in.families[0].certificate = check_dyadic_frostman(in.families[0].tubes.parameter_set(), Rational(1), Rational(16));
      CHECK_THROWS_AS(renwang_harness(in), ValidationError);
    }
    SUBCASE("unverified cube certificate") {
      auto in = singleton_input(4);
      in.cubes.certificate.verified = false;
      CHECK_THROWS_AS(renwang_harness(in), ValidationError);
    }
    SUBCASE("certificate exponent below t") {
      auto in = singleton_input(4);
      in.t = Rational(3, 2);
      CHECK_THROWS_AS(renwang_harness(in), ValidationError);
    }
    SUBCASE("missing family") {
      auto in = singleton_input(4);
      in.families.clear();
      CHECK_THROWS_AS(renwang_harness(in), ValidationError);
    }
    SUBCASE("family size outside a factor 2 of M") {
      auto in = singleton_input(4);
      in.family_size = 3;
      CHECK_THROWS_AS(renwang_harness(in), ValidationError);
    }
    SUBCASE("empty cube set") {
      HarnessInput in;
      in.cubes.set = CubeSet(4, {});
      in.family_size = 1;
      CHECK_THROWS_AS(renwang_harness(in), ValidationError);
    }
  }

  TEST_CASE("harness counts the union of the families") {
    const int n = 8;
    const auto p = embed(random_tree_set(n - 1, Rational(1, 2), 9).set, DyadicCube{1, 0, 1});
    HarnessInput in;
    in.cubes.set = p;
    in.cubes.certificate = certify_with_min_constant(p, Rational(1, 2));
    in.s = Rational(1, 2);
    in.t = Rational(1, 2);
    for (std::size_t k = 0; k < p.size(); ++k) in.families.push_back(tube_family_through_cube(p.cubes()[k], in.s, k));
    in.family_size = static_cast<double>(nominal_family_size(n, in.s));
    const auto rec = renwang_harness(in);
    std::set<oracle::Cell> all;
    for (const auto& f : in.families)
      for (auto c : cells_of(f.tubes)) all.insert(c);
    CHECK(rec.union_size == all.size());
    CHECK(rec.incidences == p.size() * 16);
    CHECK(rec.exponent_hat > 0.0);
    CHECK(rec.exponent_floor == doctest::Approx(0.5));
  }

  TEST_CASE("csv layout") {
    CHECK(IncidenceRecord::csv_header() == "n,cubes,M,s,t,eps,union_size,incidences,exponent_hat,exponent_floor");
    const auto row = renwang_harness(singleton_input(3)).csv_row();
    CHECK(std::count(row.begin(), row.end(), ',') == 9);
    CHECK(row.rfind("3,1,", 0) == 0);
  }
}
