#include "radial_lab/projection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "radial_lab/errors.hpp"
#include "radial_lab/parallel.hpp"

namespace radial_lab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kArcSlack = 1e-12;
constexpr double kAxisSnap = 1e-15;

void check_precision(int precision) {
  if (precision < 0 || precision > kMaxProjectionPrecision) {
    throw ArgumentError("projection precision out of range");
  }
}

bool in_unit_square(const Point2& p) {
  const Dyadic zero{}, one{1};
  return p.x >= zero && p.x <= one && p.y >= zero && p.y <= one;
}

// Squared distance from x to the closed cube exceeds rho^2, exactly.
// All quantities are scaled to a common exponent; x in [0,1]^2 keeps the
// squares below 2^125.
bool farther_than(const Point2& x, const DyadicCube& c, const Dyadic& rho) {
  const int scale = std::max({x.x.exponent(), x.y.exponent(), rho.exponent(), c.level});
  const __int128 px = x.x.scaled(scale), py = x.y.scaled(scale);
  const __int128 side = __int128{1} << (scale - c.level);
  const __int128 x0 = __int128{c.i} * side, y0 = __int128{c.j} * side;
  const __int128 dx = std::max<__int128>({0, x0 - px, px - (x0 + side)});
  const __int128 dy = std::max<__int128>({0, y0 - py, py - (y0 + side)});
  const __int128 r = rho.scaled(scale);
  return dx * dx + dy * dy > r * r;
}

Arc arc_of_cube(const Point2& x, const DyadicCube& c) {
  const long double px = x.x.to_long_double(), py = x.y.to_long_double();
  const long double h = std::ldexp(1.0L, -c.level);
  const long double x0 = static_cast<long double>(c.i) * h, y0 = static_cast<long double>(c.j) * h;
  const long double ref = std::atan2(y0 + h / 2 - py, x0 + h / 2 - px);
  long double lo = 0, hi = 0;
  const long double pi = std::numbers::pi_v<long double>;
  for (int k = 0; k < 4; ++k) {
    const long double cx = x0 + ((k & 1) ? h : 0), cy = y0 + ((k & 2) ? h : 0);
    long double d = std::atan2(cy - py, cx - px) - ref;
    if (d > pi) d -= 2 * pi;
    if (d <= -pi) d += 2 * pi;
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  long double start = std::fmod(ref + lo, 2 * pi);
  if (start < 0) start += 2 * pi;
  return Arc{static_cast<double>(start), static_cast<double>(start + (hi - lo))};
}

void mark_range(std::vector<char>& marks, std::int64_t first, std::int64_t last) {
  const auto bins = static_cast<std::int64_t>(marks.size());
  if (last - first + 1 >= bins) {
    std::fill(marks.begin(), marks.end(), 1);
    return;
  }
  for (std::int64_t k = first; k <= last; ++k) {
    marks[static_cast<std::size_t>(((k % bins) + bins) % bins)] = 1;
  }
}

// Bins meeting the open interval (lo, hi) of width-w bins starting at 0.
std::pair<std::int64_t, std::int64_t> overlapped_bins(long double lo, long double hi, long double scale) {
  const auto first = static_cast<std::int64_t>(std::floor(lo * scale));
  const auto last = static_cast<std::int64_t>(std::ceil(hi * scale)) - 1;
  return {first, last};
}

}  // namespace

std::vector<Arc> subtended_arcs(const Point2& x, const CubeSet& y, const Dyadic& rho, std::size_t* excluded) {
  if (!in_unit_square(x)) throw DomainError("base point outside [0,1]^2");
  if (rho < Dyadic::from_ratio(2, y.level())) throw ArgumentError("rho must be at least 2 * 2^-n");
  // Every distance inside the square is at most sqrt(2) < 2.
  const Dyadic r = std::min(rho, Dyadic{2});
  std::vector<Arc> arcs;
  arcs.reserve(y.size());
  std::size_t skipped = 0;
  for (const auto& c : y.cubes()) {
    if (farther_than(x, c, r)) {
      arcs.push_back(arc_of_cube(x, c));
    } else {
      ++skipped;
    }
  }
  if (excluded) *excluded = skipped;
  return arcs;
}

std::vector<std::uint32_t> bin_arcs(std::span<const Arc> arcs, int precision) {
  check_precision(precision);
  std::vector<char> marks(std::size_t{1} << precision, 0);
  const long double scale = std::ldexp(1.0L, precision) / static_cast<long double>(kTwoPi);
  for (const auto& a : arcs) {
    const auto [first, last] = overlapped_bins(static_cast<long double>(a.lo) - kArcSlack,
                                               static_cast<long double>(a.hi) + kArcSlack, scale);
    mark_range(marks, first, last);
  }
  std::vector<std::uint32_t> bins;
  for (std::size_t k = 0; k < marks.size(); ++k) {
    if (marks[k]) bins.push_back(static_cast<std::uint32_t>(k));
  }
  return bins;
}

DirectionSet radial_project(const Point2& x, const CubeSet& y, int precision, const Dyadic& rho) {
  check_precision(precision);
  DirectionSet out;
  out.precision = precision;
  const auto arcs = subtended_arcs(x, y, rho, &out.excluded);
  out.bins = bin_arcs(arcs, precision);
  return out;
}

std::vector<std::int64_t> orthogonal_project(double theta, const CubeSet& s, int precision) {
  check_precision(precision);
  if (!std::isfinite(theta)) throw ArgumentError("theta must be finite");
  double c = std::cos(theta), sn = std::sin(theta);
  if (std::abs(c) < kAxisSnap) c = 0.0;
  if (std::abs(sn) < kAxisSnap) sn = 0.0;
  const bool axis = c == 0.0 || sn == 0.0;
  if (axis) {
    c = c == 0.0 ? 0.0 : std::copysign(1.0, c);
    sn = sn == 0.0 ? 0.0 : std::copysign(1.0, sn);
  }
  const long double slack = axis ? 0.0L : kArcSlack;
  const long double scale = std::ldexp(1.0L, precision);
  std::vector<std::int64_t> bins;
  for (const auto& q : s.cubes()) {
    const long double h = std::ldexp(1.0L, -q.level);
    const long double x0 = q.i * h, y0 = q.j * h;
    long double lo = x0 * c + y0 * sn, hi = lo;
    for (int k = 1; k < 4; ++k) {
      const long double v = (x0 + ((k & 1) ? h : 0)) * c + (y0 + ((k & 2) ? h : 0)) * sn;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const auto [first, last] = overlapped_bins(lo - slack, hi + slack, scale);
    for (std::int64_t k = first; k <= last; ++k) bins.push_back(k);
  }
  std::sort(bins.begin(), bins.end());
  bins.erase(std::unique(bins.begin(), bins.end()), bins.end());
  return bins;
}

DimensionEstimate estimate_dimension(std::span<const std::uint64_t> counts_by_scale, int m_lo, int m_hi) {
  if (m_lo < 0 || m_hi < m_lo || static_cast<std::size_t>(m_hi) >= counts_by_scale.size()) {
    throw ArgumentError("scale window outside the available counts");
  }
  if (m_hi - m_lo + 1 < 3) throw ArgumentError("refusing a slope fit over fewer than 3 scales");
  DimensionEstimate est;
  est.m_lo = m_lo;
  est.m_hi = m_hi;
  const int k = m_hi - m_lo + 1;
  double sx = 0, sy = 0;
  std::vector<double> ys;
  for (int m = m_lo; m <= m_hi; ++m) {
    const auto count = counts_by_scale[static_cast<std::size_t>(m)];
    if (count == 0) throw ArgumentError("zero count at scale " + std::to_string(m));
    est.counts.push_back(count);
    ys.push_back(std::log2(static_cast<double>(count)));
    sx += m;
    sy += ys.back();
  }
  const double mx = sx / k, my = sy / k;
  double sxy = 0, sxx = 0;
  for (int m = m_lo; m <= m_hi; ++m) {
    const double dx = m - mx;
    sxy += dx * (ys[static_cast<std::size_t>(m - m_lo)] - my);
    sxx += dx * dx;
  }
  est.slope = sxy / sxx;
  est.intercept = my - est.slope * mx;
  for (int m = m_lo; m <= m_hi; ++m) {
    const double fit = est.intercept + est.slope * m;
    est.residual = std::max(est.residual, std::abs(ys[static_cast<std::size_t>(m - m_lo)] - fit));
  }
  return est;
}

DimensionEstimate estimate_dimension(const BranchingProfile& profile, int m_lo, int m_hi) {
  return estimate_dimension(profile.counts, m_lo, m_hi);
}

RadialSweep sup_radial_dimension(std::span<const Point2> xs, const CubeSet& y, int m_lo, int m_hi,
                                 const Dyadic& rho) {
  check_precision(m_hi);
  if (m_lo < 0 || m_hi - m_lo + 1 < 3) throw ArgumentError("refusing a slope fit over fewer than 3 scales");
  RadialSweep sweep;
  sweep.per_x.resize(xs.size());
  const std::size_t chunks = std::max<std::size_t>(1, std::min(xs.size(), worker_count() * 4));
  parallel_chunks(xs.size(), chunks, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t k = begin; k < end; ++k) {
      RadialEstimate& entry = sweep.per_x[k];
      entry.x = xs[k];
      const auto arcs = subtended_arcs(xs[k], y, rho);
      if (arcs.empty()) continue;
      // A coarse bin meets an arc in positive length iff one of its two
      // halves does, so coarser counts follow from the finest bins.
      std::vector<std::uint64_t> counts(static_cast<std::size_t>(m_hi) + 1, 0);
      auto bins = bin_arcs(arcs, m_hi);
      for (int m = m_hi; m >= m_lo; --m) {
        counts[static_cast<std::size_t>(m)] = bins.size();
        for (auto& b : bins) b >>= 1;
        bins.erase(std::unique(bins.begin(), bins.end()), bins.end());
      }
      entry.estimate = estimate_dimension(counts, m_lo, m_hi);
    }
  });
  for (std::size_t k = 0; k < sweep.per_x.size(); ++k) {
    const auto& e = sweep.per_x[k].estimate;
    if (!e) {
      ++sweep.empty;
      continue;
    }
    if (!sweep.best || e->slope > sweep.max_slope) {
      sweep.best = k;
      sweep.max_slope = e->slope;
    }
  }
  return sweep;
}

}  // namespace radial_lab
