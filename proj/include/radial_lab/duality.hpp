#pragma once

#include "radial_lab/dyadic_core.hpp"

namespace radial_lab {

/// y = slope * x + intercept with (slope, intercept) in [0,1]^2.
struct Line {
  Dyadic slope;
  Dyadic intercept;

  static Line make(const Dyadic& slope, const Dyadic& intercept);
  friend bool operator==(const Line&, const Line&) = default;
};

/// Affine line b = slope * a + intercept in the (a, b) parameter plane,
/// without the [0,1]^2 window (slopes here are typically negative).
struct ParamLine {
  Dyadic slope;
  Dyadic intercept;

  bool contains(const Point2& param) const { return param.y == slope * param.x + intercept; }
};

/// The set of lines y = ax + b with (a, b) in `param`.
struct Tube {
  DyadicCube param;

  friend auto operator<=>(const Tube&, const Tube&) = default;
};

struct Direction {
  double angle = 0.0;  // directed, in [0, 2 pi)
  double dx = 1.0;
  double dy = 0.0;
  double precision = 0.0;  // bound on |(dx, dy) - true unit vector| per coordinate

  /// Projective angle in [0, pi).
  double undirected() const;
};

/// (a, b) -> y = ax + b. Requires p in [0,1)^2.
Line dual_of_point(const Point2& p);

/// Parameters of all lines through p: b = -p.x * a + p.y.
ParamLine dual_line_of_point(const Point2& p);

bool point_on_line(const Point2& p, const Line& line);

/// Non-vertical line through p and q; DomainError when the slope is not a
/// dyadic rational or (slope, intercept) leaves [0,1]^2.
Line line_through(const Point2& p, const Point2& q);

Tube tube_of_param_cube(const DyadicCube& q);

/// Whether some line of the tube meets the cube, closed boxes on both sides.
/// With slopes and abscissae nonnegative, ax + b ranges over
/// [a0 x0 + b0, a1 x1 + b1] on the closed boxes, so the test is two exact
/// integer inequalities at the common scale.
bool tube_meets_cube(const Tube& t, const DyadicCube& q);

/// Whether the line meets the closed cube.
bool line_meets_cube(const Line& line, const DyadicCube& q);

/// Direction of y - x. Throws DegeneratePairError when x == y.
Direction direction_between(const Point2& x, const Point2& y);

/// Reflected duality between spatial cubes and tubes at the same level:
/// cube (i, j) <-> tube over (i, 2^n - 1 - j). Tube T meets cube Q iff
/// dual_tube(Q) meets dual_cube(T).
Tube dual_tube_of_cube(const DyadicCube& q);
DyadicCube dual_cube_of_tube(const Tube& t);

}  // namespace radial_lab
