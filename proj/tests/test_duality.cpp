#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "radial_lab/duality.hpp"
#include "radial_lab/errors.hpp"

using namespace radial_lab;

namespace {

Dyadic d(std::int64_t num, int exp) { return Dyadic::from_ratio(num, exp); }
Point2 pt(std::int64_t xn, int xe, std::int64_t yn, int ye) { return Point2{d(xn, xe), d(yn, ye)}; }

}  // namespace

TEST_SUITE("duality") {
  TEST_CASE("dual_of_point") {
    const auto zero = dual_of_point(pt(0, 0, 0, 0));
    CHECK(zero.slope == Dyadic{});
    CHECK(zero.intercept == Dyadic{});
    const auto l = dual_of_point(pt(1, 1, 1, 2));
    CHECK(l.slope == d(1, 1));
    CHECK(l.intercept == d(1, 2));
    CHECK_THROWS_AS(dual_of_point(pt(1, 0, 0, 0)), DomainError);
  }

  TEST_CASE("line_through recovers dual parameters") {
    std::mt19937_64 rng(31);
    for (int k = 0; k < 100; ++k) {
      const auto a = d(static_cast<std::int64_t>(rng() % 64), 7);  // a, b < 1/2 so a + b < 1
      const auto b = d(static_cast<std::int64_t>(rng() % 64), 7);
      const auto line = line_through(Point2{Dyadic{}, b}, Point2{Dyadic{1}, a + b});
      const auto back = dual_of_point(Point2{line.slope, line.intercept});
      CHECK(back.slope == a);
      CHECK(back.intercept == b);
    }
    CHECK_THROWS_AS(line_through(pt(1, 2, 0, 0), pt(1, 2, 1, 1)), DomainError);  // vertical
    CHECK_THROWS_AS(line_through(pt(0, 0, 0, 0), pt(3, 2, 1, 0)), DomainError);   // slope 2/3
    CHECK_THROWS_AS(line_through(pt(0, 0, 1, 0), pt(1, 0, 0, 0)), DomainError);   // slope -1
  }

  TEST_CASE("tube_of_param_cube") {
    const auto t = tube_of_param_cube(DyadicCube{3, 0, 0});
    CHECK(t.param == DyadicCube{3, 0, 0});
    const auto l = line_through(pt(0, 0, 1, 4), pt(1, 0, 1, 3));
    CHECK(l.slope == d(1, 4));
    CHECK(l.intercept == d(1, 4));
    CHECK(cube_of_point(Point2{l.slope, l.intercept}, 3) == t.param);
    const auto wide = tube_of_param_cube(DyadicCube{1, 1, 0});
    CHECK(wide.param.x0() == d(1, 1));
    CHECK(wide.param.y1() == d(1, 1));
  }

  TEST_CASE("tube_meets_cube examples") {
    const Tube t{DyadicCube{3, 0, 0}};
    CHECK(tube_meets_cube(t, DyadicCube{3, 0, 0}));
    CHECK_FALSE(tube_meets_cube(t, DyadicCube{3, 4, 7}));
    // a in [1/2, 5/8], b in [0, 1/8] against [1/2, 5/8] x [1/4, 3/8].
    CHECK(tube_meets_cube(Tube{DyadicCube{3, 4, 0}}, DyadicCube{3, 4, 2}));
    // Mixed levels: coarse tube, fine cube.
    CHECK(tube_meets_cube(Tube{DyadicCube{1, 0, 0}}, DyadicCube{4, 15, 7}));
    CHECK_FALSE(tube_meets_cube(Tube{DyadicCube{1, 0, 0}}, DyadicCube{4, 0, 15}));
  }

  TEST_CASE("tube_meets_cube matches dense sampling for n <= 4") {
    for (int n = 1; n <= 4; ++n) {
      const std::uint32_t side = 1u << n;
      for (std::uint32_t a = 0; a < side; ++a)
        for (std::uint32_t b = 0; b < side; ++b)
          for (std::uint32_t i = 0; i < side; ++i)
            for (std::uint32_t j = 0; j < side; ++j) {
              const bool exact = tube_meets_cube(Tube{DyadicCube{n, a, b}}, DyadicCube{n, i, j});
              REQUIRE(exact == oracle::tube_meets_sampled(n, {a, b}, {i, j}));
            }
    }
  }

  TEST_CASE("tube_meets_cube is monotone under taking ancestors") {
    std::mt19937_64 rng(32);
    for (int k = 0; k < 2000; ++k) {
      const int n = 1 + static_cast<int>(rng() % 8);
      const auto side = std::uint32_t{1} << n;
      const Tube t{DyadicCube{n, static_cast<std::uint32_t>(rng() % side), static_cast<std::uint32_t>(rng() % side)}};
      const DyadicCube q{n, static_cast<std::uint32_t>(rng() % side), static_cast<std::uint32_t>(rng() % side)};
      if (!tube_meets_cube(t, q)) continue;
      for (int m = 0; m <= n; ++m) CHECK(tube_meets_cube(t, ancestor(q, m)));
    }
  }

  TEST_CASE("point-line incidence is preserved by duality") {
    std::mt19937_64 rng(33);
    int on = 0;
    for (int k = 0; k < 1000; ++k) {
      const auto a = d(static_cast<std::int64_t>(rng() % 16), 4);
      const auto b = d(static_cast<std::int64_t>(rng() % 16), 4);
      const auto px = d(static_cast<std::int64_t>(rng() % 16), 4);
      // Half the time put p on the line.
      const auto py = (k % 2) ? a * px + b : d(static_cast<std::int64_t>(rng() % 16), 4);
      const Point2 p{px, py};
      const bool primal = point_on_line(p, Line::make(a, b));
      const bool dual = dual_line_of_point(p).contains(Point2{a, b});
      CHECK(primal == dual);
      on += primal;
    }
    CHECK(on >= 500);
  }

  TEST_CASE("direction_between") {
    const auto e0 = direction_between(pt(0, 0, 0, 0), pt(1, 0, 0, 0));
    CHECK(e0.angle == doctest::Approx(0.0));
    CHECK(e0.dx == doctest::Approx(1.0));
    const auto diag = direction_between(pt(0, 0, 0, 0), pt(1, 0, 1, 0));
    CHECK(diag.angle == doctest::Approx(std::numbers::pi / 4));
    CHECK(diag.dx == doctest::Approx(std::sqrt(0.5)));
    CHECK(diag.dy == doctest::Approx(std::sqrt(0.5)));
    const auto up = direction_between(pt(1, 2, 1, 2), pt(1, 2, 3, 2));
    CHECK(up.angle == doctest::Approx(std::numbers::pi / 2));
    CHECK(up.dx == doctest::Approx(0.0));
    CHECK(up.dy == doctest::Approx(1.0));
    CHECK_THROWS_AS(direction_between(pt(1, 2, 1, 2), pt(1, 2, 1, 2)), DegeneratePairError);

    std::mt19937_64 rng(34);
    for (int k = 0; k < 200; ++k) {
      const auto x = pt(static_cast<std::int64_t>(rng() % 256), 8, static_cast<std::int64_t>(rng() % 256), 8);
      const auto y = pt(static_cast<std::int64_t>(rng() % 256), 8, static_cast<std::int64_t>(rng() % 256), 8);
      if (x == y) continue;
      const auto f = direction_between(x, y), b = direction_between(y, x);
      CHECK(f.dx == doctest::Approx(-b.dx).epsilon(1e-12));
      CHECK(f.dy == doctest::Approx(-b.dy).epsilon(1e-12));
      CHECK(std::remainder(f.angle - b.angle - std::numbers::pi, 2 * std::numbers::pi) == doctest::Approx(0.0).epsilon(1e-12));
      CHECK(f.undirected() == doctest::Approx(b.undirected()).epsilon(1e-12));
      CHECK(f.dx * f.dx + f.dy * f.dy == doctest::Approx(1.0).epsilon(1e-15));
    }
  }

  TEST_CASE("reflected duality swaps cube and tube roles") {
    for (int n = 1; n <= 4; ++n) {
      const std::uint32_t side = 1u << n;
      for (std::uint32_t a = 0; a < side; ++a)
        for (std::uint32_t b = 0; b < side; ++b)
          for (std::uint32_t i = 0; i < side; ++i)
            for (std::uint32_t j = 0; j < side; ++j) {
              const Tube t{DyadicCube{n, a, b}};
              const DyadicCube q{n, i, j};
              REQUIRE(tube_meets_cube(t, q) == tube_meets_cube(dual_tube_of_cube(q), dual_cube_of_tube(t)));
            }
      CHECK(dual_cube_of_tube(dual_tube_of_cube(DyadicCube{n, 1, 0})) == DyadicCube{n, 1, 0});
    }
  }
}
