#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "radial_lab/dyadic_core.hpp"
#include "radial_lab/frostman.hpp"

namespace radial_lab {

/// Deepest angular / axis precision accepted by the projections.
inline constexpr int kMaxProjectionPrecision = 24;

/// Closed angular interval [lo, hi] with lo in [0, 2 pi) and hi - lo < pi.
struct Arc {
  double lo = 0.0;
  double hi = 0.0;
};

/// Occupied arcs of the 2^precision equal bins of [0, 2 pi).
struct DirectionSet {
  int precision = 0;
  std::vector<std::uint32_t> bins;  // sorted
  std::size_t excluded = 0;         // member cubes within rho of the base point

  bool empty_projection() const { return bins.empty(); }
};

/// Arcs subtended at x by the closed member cubes at distance > rho from x.
/// Requires rho >= 2 * 2^-level. `excluded` receives the number skipped.
std::vector<Arc> subtended_arcs(const Point2& x, const CubeSet& y, const Dyadic& rho, std::size_t* excluded = nullptr);

/// Bins meeting some arc in positive length. Arcs are widened outward by
/// 1e-12 rad first, which dominates the error of the corner atan2 values.
std::vector<std::uint32_t> bin_arcs(std::span<const Arc> arcs, int precision);

/// Discretized pi_x(Y minus the rho-ball around x) at precision m.
DirectionSet radial_project(const Point2& x, const CubeSet& y, int precision, const Dyadic& rho);

/// Occupied bins [k 2^-m, (k+1) 2^-m] of the axis through the origin with
/// direction theta. Each closed member cube projects to [lo, hi]; a bin is
/// occupied when it meets some [lo, hi] in positive length. Axis directions
/// (theta a multiple of pi/2 up to 1e-15) are evaluated exactly; all others
/// widen each interval outward by 1e-12.
std::vector<std::int64_t> orthogonal_project(double theta, const CubeSet& s, int precision);

struct DimensionEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  int m_lo = 0;
  int m_hi = 0;
  double residual = 0.0;  // max |log2 count - fit| over the window
  std::vector<std::uint64_t> counts;  // counts[k] at scale m_lo + k
};

/// Least-squares slope of log2(count) against m over [m_lo, m_hi].
/// counts_by_scale[m] is the count at scale m. Refuses (ArgumentError) fewer
/// than 3 scales, windows outside the data, or nonpositive counts.
DimensionEstimate estimate_dimension(std::span<const std::uint64_t> counts_by_scale, int m_lo, int m_hi);
DimensionEstimate estimate_dimension(const BranchingProfile& profile, int m_lo, int m_hi);

struct RadialEstimate {
  Point2 x;
  std::optional<DimensionEstimate> estimate;  // nullopt: empty projection
};

struct RadialSweep {
  std::vector<RadialEstimate> per_x;
  std::optional<std::size_t> best;  // index into per_x of the largest slope
  double max_slope = 0.0;
  std::size_t empty = 0;
};

/// For each x: bin counts of radial_project at m = m_lo..m_hi, then the
/// fitted slope; returns all estimates and the maximizing x. Points whose
/// projection is empty are recorded and skipped.
RadialSweep sup_radial_dimension(std::span<const Point2> xs, const CubeSet& y, int m_lo, int m_hi, const Dyadic& rho);

}  // namespace radial_lab
