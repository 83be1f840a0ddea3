#include "radial_lab/dyadic_core.hpp"

#include <algorithm>
#include <cmath>

#include "radial_lab/errors.hpp"

namespace radial_lab {
namespace {

void check_level(int level) {
  if (level < 0 || level > kMaxLevel) {
    throw ArgumentError("level " + std::to_string(level) + " outside [0, " +
                        std::to_string(kMaxLevel) + "]");
  }
}

std::uint64_t spread_bits(std::uint32_t v) {
  std::uint64_t x = v;
  x = (x | (x << 16)) & 0x0000FFFF0000FFFFull;
  x = (x | (x << 8)) & 0x00FF00FF00FF00FFull;
  x = (x | (x << 4)) & 0x0F0F0F0F0F0F0F0Full;
  x = (x | (x << 2)) & 0x3333333333333333ull;
  x = (x | (x << 1)) & 0x5555555555555555ull;
  return x;
}

std::uint32_t compact_bits(std::uint64_t x) {
  x &= 0x5555555555555555ull;
  x = (x | (x >> 1)) & 0x3333333333333333ull;
  x = (x | (x >> 2)) & 0x0F0F0F0F0F0F0F0Full;
  x = (x | (x >> 4)) & 0x00FF00FF00FF00FFull;
  x = (x | (x >> 8)) & 0x0000FFFF0000FFFFull;
  x = (x | (x >> 16)) & 0x00000000FFFFFFFFull;
  return static_cast<std::uint32_t>(x);
}

__int128 floor_div(__int128 a, __int128 b) {
  __int128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

__int128 ceil_div(__int128 a, __int128 b) { return -floor_div(-a, b); }

__int128 isqrt(__int128 v) {
  if (v <= 0) return 0;
  auto r = static_cast<__int128>(std::sqrt(static_cast<long double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

}  // namespace

DyadicCube DyadicCube::make(int level, std::int64_t i, std::int64_t j) {
  check_level(level);
  const std::int64_t side = std::int64_t{1} << level;
  if (i < 0 || j < 0 || i >= side || j >= side) {
    throw ArgumentError("cube index (" + std::to_string(i) + ", " + std::to_string(j) +
                        ") out of range at level " + std::to_string(level));
  }
  return DyadicCube{level, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)};
}

Point2 DyadicCube::center() const {
  return Point2{Dyadic::from_ratio(2 * std::int64_t{i} + 1, level + 1),
                Dyadic::from_ratio(2 * std::int64_t{j} + 1, level + 1)};
}

std::string to_string(const DyadicCube& c) {
  return "(" + std::to_string(c.level) + ", " + std::to_string(c.i) + ", " + std::to_string(c.j) + ")";
}

std::uint64_t morton_encode(std::uint32_t i, std::uint32_t j) {
  return (spread_bits(i) << 1) | spread_bits(j);
}

void morton_decode(std::uint64_t code, std::uint32_t& i, std::uint32_t& j) {
  i = compact_bits(code >> 1);
  j = compact_bits(code);
}

// ---------------------------------------------------------------------------

CubeSet::CubeSet(int level, std::vector<DyadicCube> cubes) : level_(level), cubes_(std::move(cubes)) {
  check_level(level);
  const std::uint64_t side = std::uint64_t{1} << level;
  for (const auto& c : cubes_) {
    if (c.level != level) {
      throw ArgumentError("cube " + to_string(c) + " is not at level " + std::to_string(level));
    }
    if (c.i >= side || c.j >= side) throw ArgumentError("cube " + to_string(c) + " out of range");
  }
  std::sort(cubes_.begin(), cubes_.end());
  if (auto dup = std::adjacent_find(cubes_.begin(), cubes_.end()); dup != cubes_.end()) {
    throw ArgumentError("duplicate cube " + to_string(*dup));
  }

  std::vector<std::uint64_t> codes;
  codes.reserve(cubes_.size());
  for (const auto& c : cubes_) codes.push_back(morton_encode(c.i, c.j));
  std::sort(codes.begin(), codes.end());

  occupancy_.resize(static_cast<std::size_t>(level) + 1);
  for (int m = 0; m <= level; ++m) {
    const int shift = 2 * (level - m);
    auto& cells = occupancy_[static_cast<std::size_t>(m)];
    for (std::uint64_t code : codes) {
      const std::uint64_t key = code >> shift;
      if (!cells.empty() && cells.back().key == key) {
        ++cells.back().count;
      } else {
        cells.push_back({key, 1});
      }
    }
  }
}

CubeSet CubeSet::from_indices(int level, std::span<const std::pair<std::uint32_t, std::uint32_t>> ij) {
  check_level(level);
  std::vector<DyadicCube> cubes;
  cubes.reserve(ij.size());
  for (auto [i, j] : ij) cubes.push_back(DyadicCube{level, i, j});
  return CubeSet(level, std::move(cubes));
}

CubeSet CubeSet::full_grid(int level) {
  check_level(level);
  const std::uint32_t side = std::uint32_t{1} << level;
  std::vector<DyadicCube> cubes;
  cubes.reserve(std::size_t{side} * side);
  for (std::uint32_t i = 0; i < side; ++i) {
    for (std::uint32_t j = 0; j < side; ++j) cubes.push_back(DyadicCube{level, i, j});
  }
  return CubeSet(level, std::move(cubes));
}

bool CubeSet::contains(const DyadicCube& c) const {
  return std::binary_search(cubes_.begin(), cubes_.end(), c);
}

std::span<const CellCount> CubeSet::occupancy(int m) const {
  if (m < 0 || m > level_) {
    throw ArgumentError("level " + std::to_string(m) + " exceeds set level " + std::to_string(level_));
  }
  if (occupancy_.empty()) return {};
  return occupancy_[static_cast<std::size_t>(m)];
}

std::size_t CubeSet::count_in_column(std::uint32_t i, std::int64_t j_lo, std::int64_t j_hi) const {
  const std::int64_t side = std::int64_t{1} << level_;
  j_lo = std::max<std::int64_t>(j_lo, 0);
  j_hi = std::min<std::int64_t>(j_hi, side - 1);
  if (j_lo > j_hi) return 0;
  const DyadicCube lo{level_, i, static_cast<std::uint32_t>(j_lo)};
  const DyadicCube hi{level_, i, static_cast<std::uint32_t>(j_hi)};
  auto first = std::lower_bound(cubes_.begin(), cubes_.end(), lo);
  auto last = std::upper_bound(first, cubes_.end(), hi);
  return static_cast<std::size_t>(last - first);
}

// ---------------------------------------------------------------------------

DyadicCube cube_of_point(const Point2& p, int n) {
  check_level(n);
  const Dyadic zero{};
  const Dyadic one{1};
  if (p.x < zero || p.x >= one || p.y < zero || p.y >= one) {
    throw DomainError("point (" + p.x.to_string() + ", " + p.y.to_string() + ") outside [0,1)^2");
  }
  return DyadicCube{n, static_cast<std::uint32_t>(p.x.floor_scaled(n)),
                    static_cast<std::uint32_t>(p.y.floor_scaled(n))};
}

DyadicCube ancestor(const DyadicCube& c, int m) {
  if (m < 0 || m > c.level) {
    throw ArgumentError("ancestor level " + std::to_string(m) + " not in [0, " +
                        std::to_string(c.level) + "]");
  }
  const int shift = c.level - m;
  return DyadicCube{m, c.i >> shift, c.j >> shift};
}

std::size_t box_count(const CubeSet& s, int m) { return s.occupancy(m).size(); }

std::size_t count_in_closed_ball(const CubeSet& s, const Point2& center, const Dyadic& r) {
  if (s.empty()) return 0;
  if (r < Dyadic{}) throw ArgumentError("negative radius");
  const int n = s.level();
  const int scale = std::max({n, center.x.exponent(), center.y.exponent(), r.exponent()});
  if (scale > 60) throw DomainError("ball parameters exceed exact precision");

  const __int128 cell = static_cast<__int128>(1) << (scale - n);
  const __int128 cx = center.x.scaled(scale);
  const __int128 cy = center.y.scaled(scale);
  const __int128 rad = r.scaled(scale);
  const __int128 rad_sq = rad * rad;
  const __int128 side = static_cast<__int128>(1) << n;

  const __int128 i_lo = std::max<__int128>(0, ceil_div(cx - rad, cell) - 1);
  const __int128 i_hi = std::min<__int128>(side - 1, floor_div(cx + rad, cell));
  std::size_t total = 0;
  for (__int128 i = i_lo; i <= i_hi; ++i) {
    const __int128 x0 = i * cell;
    const __int128 x1 = x0 + cell;
    const __int128 dx = std::max<__int128>({0, x0 - cx, cx - x1});
    const __int128 rem = rad_sq - dx * dx;
    if (rem < 0) continue;
    const __int128 h = isqrt(rem);
    const __int128 j_lo = ceil_div(cy - h, cell) - 1;
    const __int128 j_hi = floor_div(cy + h, cell);
    const auto clamp = [&](__int128 v) {
      return static_cast<std::int64_t>(std::clamp<__int128>(v, -1, side));
    };
    total += s.count_in_column(static_cast<std::uint32_t>(i), clamp(j_lo), clamp(j_hi));
  }
  return total;
}

std::size_t cubes_in_ball(const CubeSet& s, const Point2& center, const Dyadic& r) {
  const Dyadic min_r = Dyadic::from_ratio(1, s.level());
  if (r < min_r || r > Dyadic{1}) {
    throw ArgumentError("radius " + r.to_string() + " outside [2^-" + std::to_string(s.level()) + ", 1]");
  }
  return count_in_closed_ball(s, center, r);
}

}  // namespace radial_lab
