#include "radial_lab/duality.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "radial_lab/errors.hpp"

namespace radial_lab {
namespace {

bool in_unit_interval(const Dyadic& v) { return v >= Dyadic{} && v <= Dyadic{1}; }

}  // namespace

Line Line::make(const Dyadic& slope, const Dyadic& intercept) {
  if (!in_unit_interval(slope) || !in_unit_interval(intercept)) {
    throw DomainError("line parameters (" + slope.to_string() + ", " + intercept.to_string() +
                      ") outside [0,1]^2");
  }
  return Line{slope, intercept};
}

double Direction::undirected() const {
  const double a = std::fmod(angle, std::numbers::pi);
  return a < 0 ? a + std::numbers::pi : a;
}

Line dual_of_point(const Point2& p) {
  if (p.x < Dyadic{} || p.x >= Dyadic{1} || p.y < Dyadic{} || p.y >= Dyadic{1}) {
    throw DomainError("dual point (" + p.x.to_string() + ", " + p.y.to_string() + ") outside [0,1)^2");
  }
  return Line{p.x, p.y};
}

ParamLine dual_line_of_point(const Point2& p) { return ParamLine{-p.x, p.y}; }

bool point_on_line(const Point2& p, const Line& line) { return p.y == line.slope * p.x + line.intercept; }

Line line_through(const Point2& p, const Point2& q) {
  if (p.x == q.x) throw DomainError("vertical line has no (slope, intercept) dual");
  const Dyadic slope = (q.y - p.y) / (q.x - p.x);
  return Line::make(slope, p.y - slope * p.x);
}

Tube tube_of_param_cube(const DyadicCube& q) { return Tube{q}; }

bool tube_meets_cube(const Tube& t, const DyadicCube& q) {
  // Everything over 2^{lt + lq}.
  const int lt = t.param.level;
  const int lq = q.level;
  const __int128 ia = t.param.i;
  const __int128 ib = t.param.j;
  const __int128 ix = q.i;
  const __int128 iy = q.j;
  const __int128 unit_t = static_cast<__int128>(1) << lt;
  const __int128 unit_q = static_cast<__int128>(1) << lq;
  const bool lowest_below_top = ia * ix + ib * unit_q <= (iy + 1) * unit_t;
  const bool highest_above_bottom = (ia + 1) * (ix + 1) + (ib + 1) * unit_q >= iy * unit_t;
  return lowest_below_top && highest_above_bottom;
}

bool line_meets_cube(const Line& line, const DyadicCube& q) {
  return line.slope * q.x0() + line.intercept <= q.y1() && line.slope * q.x1() + line.intercept >= q.y0();
}

Direction direction_between(const Point2& x, const Point2& y) {
  if (x == y) throw DegeneratePairError("radial projection undefined at y = x");
  const Dyadic ddx = y.x - x.x;
  const Dyadic ddy = y.y - x.y;
  const long double fx = ddx.to_long_double();
  const long double fy = ddy.to_long_double();
  const long double norm = std::hypot(fx, fy);
  Direction d;
  d.dx = static_cast<double>(fx / norm);
  d.dy = static_cast<double>(fy / norm);
  double angle = static_cast<double>(std::atan2(fy, fx));
  if (angle < 0) angle += 2 * std::numbers::pi;
  if (angle >= 2 * std::numbers::pi) angle = 0.0;
  d.angle = angle;
  d.precision = 4 * std::numeric_limits<double>::epsilon();
  return d;
}

Tube dual_tube_of_cube(const DyadicCube& q) {
  return Tube{DyadicCube{q.level, q.i, q.side_cells() - 1 - q.j}};
}

DyadicCube dual_cube_of_tube(const Tube& t) {
  return DyadicCube{t.param.level, t.param.i, t.param.side_cells() - 1 - t.param.j};
}

}  // namespace radial_lab
