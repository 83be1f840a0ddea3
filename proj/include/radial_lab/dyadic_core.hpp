#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "radial_lab/numeric.hpp"

namespace radial_lab {

/// Deepest level a CubeSet can index (Morton codes are 64-bit).
inline constexpr int kMaxLevel = 30;

struct Point2 {
  Dyadic x;
  Dyadic y;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Half-open cell [i 2^-n, (i+1) 2^-n) x [j 2^-n, (j+1) 2^-n).
struct DyadicCube {
  int level = 0;
  std::uint32_t i = 0;
  std::uint32_t j = 0;

  /// Validated constructor; throws ArgumentError when i or j >= 2^level.
  static DyadicCube make(int level, std::int64_t i, std::int64_t j);

  std::uint32_t side_cells() const { return std::uint32_t{1} << level; }
  Dyadic x0() const { return Dyadic::from_ratio(i, level); }
  Dyadic x1() const { return Dyadic::from_ratio(std::int64_t{i} + 1, level); }
  Dyadic y0() const { return Dyadic::from_ratio(j, level); }
  Dyadic y1() const { return Dyadic::from_ratio(std::int64_t{j} + 1, level); }
  Point2 center() const;

  friend auto operator<=>(const DyadicCube&, const DyadicCube&) = default;
};

std::string to_string(const DyadicCube& c);

std::uint64_t morton_encode(std::uint32_t i, std::uint32_t j);
void morton_decode(std::uint64_t code, std::uint32_t& i, std::uint32_t& j);

/// Number of level-n members below one level-m cell.
struct CellCount {
  std::uint64_t key;  // Morton code of the level-m cell
  std::uint64_t count;
};

/// A finite family of distinct same-level dyadic cubes.
///
/// Members are held in canonical (i, j) order. The multiscale occupancy
/// index is built at construction: for every m <= level it lists the
/// occupied level-m cells in Morton order together with the number of
/// members below each, so box counts are O(1) and per-ancestor counts are a
/// span lookup. Immutable after construction.
class CubeSet {
 public:
  CubeSet() = default;
  /// Throws ArgumentError on level out of range, mixed levels, indices out
  /// of range, or duplicates.
  CubeSet(int level, std::vector<DyadicCube> cubes);
  static CubeSet from_indices(int level, std::span<const std::pair<std::uint32_t, std::uint32_t>> ij);
  /// Every cube at `level`.
  static CubeSet full_grid(int level);

  int level() const noexcept { return level_; }
  std::size_t size() const noexcept { return cubes_.size(); }
  bool empty() const noexcept { return cubes_.empty(); }
  std::span<const DyadicCube> cubes() const noexcept { return cubes_; }
  bool contains(const DyadicCube& c) const;

  /// Occupied level-m cells with member counts, Morton order.
  std::span<const CellCount> occupancy(int m) const;

  /// Members with first index `i` and second index in [j_lo, j_hi].
  std::size_t count_in_column(std::uint32_t i, std::int64_t j_lo, std::int64_t j_hi) const;

  friend bool operator==(const CubeSet& a, const CubeSet& b) {
    return a.level_ == b.level_ && a.cubes_ == b.cubes_;
  }

 private:
  int level_ = 0;
  std::vector<DyadicCube> cubes_;
  std::vector<std::vector<CellCount>> occupancy_;
};

/// The level-n cube containing p under the half-open convention.
/// Throws DomainError unless p is in [0,1)^2; ArgumentError on bad n.
DyadicCube cube_of_point(const Point2& p, int n);

/// The unique level-m cube containing c. Throws ArgumentError if m > c.level.
DyadicCube ancestor(const DyadicCube& c, int m);

/// Number of level-m cubes holding at least one member of s.
std::size_t box_count(const CubeSet& s, int m);

/// Members of s whose closed cube meets the closed ball B(center, r).
/// Requires 2^-level <= r <= 1 (ArgumentError otherwise).
std::size_t cubes_in_ball(const CubeSet& s, const Point2& center, const Dyadic& r);

/// Same count without the radius precondition; used by the Frostman checker
/// whose doubled radii can exceed 1.
std::size_t count_in_closed_ball(const CubeSet& s, const Point2& center, const Dyadic& r);

}  // namespace radial_lab
