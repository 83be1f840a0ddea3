#pragma once

#include <optional>

namespace radial_lab {

/// min{dX, dY, 1}: sup_x dim pi_x(Y) lower bound for X not on a line.
double bound_osw1(double dim_x, double dim_y);

/// min{dX + dY - 1, 1}, defined only when dY > 1.
std::optional<double> bound_osw2(double dim_x, double dim_y);

struct MainBound {
  double value = 0.0;
  bool hypothesis_violated = false;  // the bound assumes dX > 0
};

/// min{(dX + dY) / 2, dY, 1}.
MainBound bound_main(double dim_x, double dim_y);

/// max{2u - dY, 0} for 0 <= u <= min{dY, 1}.
double bound_orthogonal_exceptional(double dim_y, double u);

/// min{t, (s + t) / 2, 1} for s in (0, 1], t in (0, 2].
double incidence_exponent(double s, double t);

struct CoupledSolution {
  double s_x = 0.0;
  double s_y = 0.0;
  int iterations = 0;
};

/// Least solution of
///   s_y >= min{t_x, (s_x + t_x) / 2, 1},  s_x >= min{t_y, (s_y + t_y) / 2, 1}
/// by monotone iteration from (0, 0). Throws std::logic_error if the result
/// disagrees with min{t_y, (t_x + t_y) / 2, 1} by more than tol.
CoupledSolution coupled_fixed_point(double t_x, double t_y, double tol);

struct DominanceReport {
  double main = 0.0;
  double osw1 = 0.0;
  std::optional<double> osw2;
  bool main_ge_osw1 = false;
  bool main_gt_osw1 = false;
  bool predicted_gt_osw1 = false;  // dX < min{dY, 1}
  bool main_ge_osw2 = true;        // vacuous when osw2 does not apply
  bool main_gt_osw2 = false;
  bool predicted_gt_osw2 = false;  // dX + dY - 1 < 1 (osw2 applicable)
};

DominanceReport dominance_report(double dim_x, double dim_y);

}  // namespace radial_lab
