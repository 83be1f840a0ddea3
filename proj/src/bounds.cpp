#include "radial_lab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "radial_lab/errors.hpp"

namespace radial_lab {
namespace {

constexpr double kStrictGap = 1e-12;

void require_range(double v, double lo, double hi, const char* name) {
  if (!(v >= lo && v <= hi)) {
    throw ArgumentError(std::string(name) + " = " + std::to_string(v) + " outside [" + std::to_string(lo) +
                        ", " + std::to_string(hi) + "]");
  }
}

}  // namespace

double bound_osw1(double dim_x, double dim_y) {
  require_range(dim_x, 0, 2, "dim_x");
  require_range(dim_y, 0, 2, "dim_y");
  return std::min({dim_x, dim_y, 1.0});
}

std::optional<double> bound_osw2(double dim_x, double dim_y) {
  require_range(dim_x, 0, 2, "dim_x");
  require_range(dim_y, 0, 2, "dim_y");
  if (dim_y <= 1.0) return std::nullopt;
  return std::min(dim_x + dim_y - 1.0, 1.0);
}

MainBound bound_main(double dim_x, double dim_y) {
  require_range(dim_x, 0, 2, "dim_x");
  require_range(dim_y, 0, 2, "dim_y");
  return MainBound{std::min({(dim_x + dim_y) / 2.0, dim_y, 1.0}), !(dim_x > 0.0)};
}

double bound_orthogonal_exceptional(double dim_y, double u) {
  require_range(dim_y, 0, 2, "dim_y");
  require_range(u, 0, std::min(dim_y, 1.0), "u");
  return std::max(2.0 * u - dim_y, 0.0);
}

double incidence_exponent(double s, double t) {
  if (!(s > 0.0 && s <= 1.0)) throw ArgumentError("s = " + std::to_string(s) + " outside (0, 1]");
  if (!(t > 0.0 && t <= 2.0)) throw ArgumentError("t = " + std::to_string(t) + " outside (0, 2]");
  return std::min({t, (s + t) / 2.0, 1.0});
}

CoupledSolution coupled_fixed_point(double t_x, double t_y, double tol) {
  if (!(t_x > 0.0 && t_x <= 1.0)) throw ArgumentError("t_x outside (0, 1]");
  if (!(t_y > 0.0 && t_y <= 1.0)) throw ArgumentError("t_y outside (0, 1]");
  if (!(tol > 0.0)) throw ArgumentError("tol must be positive");

  // One round trip contracts by 1/4, so stopping when a step moves less than
  // tol leaves an error of at most tol / 3.
  constexpr int kMaxIterations = 10000;
  CoupledSolution sol;
  for (int it = 1; it <= kMaxIterations; ++it) {
    const double s_y = std::min({t_x, (sol.s_x + t_x) / 2.0, 1.0});
    const double s_x = std::min({t_y, (s_y + t_y) / 2.0, 1.0});
    const double step = std::max(std::fabs(s_x - sol.s_x), std::fabs(s_y - sol.s_y));
    sol = {s_x, s_y, it};
    if (step < tol) {
      const double closed = std::min({t_y, (t_x + t_y) / 2.0, 1.0});
      if (std::fabs(sol.s_x - closed) > tol) {
        throw std::logic_error("fixed point " + std::to_string(sol.s_x) + " disagrees with closed form " +
                               std::to_string(closed));
      }
      return sol;
    }
  }
  throw std::logic_error("coupled iteration did not converge");
}

DominanceReport dominance_report(double dim_x, double dim_y) {
  DominanceReport r;
  r.main = bound_main(dim_x, dim_y).value;
  r.osw1 = bound_osw1(dim_x, dim_y);
  r.osw2 = bound_osw2(dim_x, dim_y);
  r.main_ge_osw1 = r.main >= r.osw1 - kStrictGap;
  r.main_gt_osw1 = r.main > r.osw1 + kStrictGap;
  r.predicted_gt_osw1 = dim_x < std::min(dim_y, 1.0) - kStrictGap;
  if (r.osw2) {
    r.main_ge_osw2 = r.main >= *r.osw2 - kStrictGap;
    r.main_gt_osw2 = r.main > *r.osw2 + kStrictGap;
    r.predicted_gt_osw2 = dim_x + dim_y - 1.0 < 1.0 - kStrictGap;
  }
  return r;
}

}  // namespace radial_lab
