#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "radial_lab/duality.hpp"
#include "radial_lab/frostman.hpp"

namespace radial_lab {

/// Distinct same-level tubes, sorted by (slope cell, intercept cell), with a
/// per-slope-cell index for candidate retrieval.
class TubeSet {
 public:
  TubeSet() = default;
  /// Throws ArgumentError on mixed levels, out-of-range cells or duplicates.
  TubeSet(int level, std::vector<Tube> tubes);
  static TubeSet full(int level);

  int level() const noexcept { return level_; }
  std::size_t size() const noexcept { return tubes_.size(); }
  bool empty() const noexcept { return tubes_.empty(); }
  std::span<const Tube> tubes() const noexcept { return tubes_; }

  /// The parameter cubes as a CubeSet (for Frostman certification).
  CubeSet parameter_set() const;

  /// Calls visit(index) for every tube meeting q, in index order. The slope
  /// index narrows each column to the exact intercept window q induces;
  /// every candidate is then confirmed by tube_meets_cube.
  void for_each_meeting(const DyadicCube& q, const std::function<void(std::size_t)>& visit) const;

  friend bool operator==(const TubeSet& a, const TubeSet& b) {
    return a.level_ == b.level_ && a.tubes_ == b.tubes_;
  }

 private:
  int level_ = 0;
  std::vector<Tube> tubes_;
  std::vector<std::uint32_t> columns_;        // distinct slope cells
  std::vector<std::size_t> column_offsets_;   // columns_.size() + 1 entries
};

struct IncidenceRecord {
  int level = 0;
  std::uint64_t cube_count = 0;
  std::uint64_t incidences = 0;
  std::vector<std::uint64_t> per_cube;  // n_Q, aligned with P.cubes()
  std::uint64_t union_size = 0;
  double family_size = 0.0;  // M
  double s = 0.0;
  double t = 0.0;
  double eps = 0.0;
  double exponent_hat = 0.0;    // log_{1/delta}(|T| / M)
  double exponent_floor = 0.0;  // min{t, (s+t)/2, 1} - eps
  double eta_cubes = 0.0;       // log2(C) / n of the cube certificate
  double eta_tubes = 0.0;       // max over families
  bool brute_force_checked = false;

  static std::string csv_header();
  std::string csv_row() const;
};

/// Number of tubes of ts meeting q. ArgumentError on level mismatch.
std::uint64_t count_tubes_through_cube(const TubeSet& ts, const DyadicCube& q);

struct IncidenceOptions {
  /// Re-count by the exhaustive double loop when level <= 6 and throw
  /// std::logic_error on any disagreement.
  bool cross_check = false;
};

/// I = sum_Q n_Q over P, plus the number of tubes meeting at least one cube.
IncidenceRecord count_incidences(const CubeSet& p, const TubeSet& ts, IncidenceOptions options = {});

/// Exhaustive double loop over all (cube, tube) pairs.
IncidenceRecord count_incidences_brute_force(const CubeSet& p, const TubeSet& ts);

/// The dual configuration: cubes become tubes and tubes become cubes.
CubeSet dual_cubes(const TubeSet& ts);
TubeSet dual_tubes(const CubeSet& p);

struct CertifiedCubeSet {
  CubeSet set;
  FrostmanCertificate certificate;
};

struct CertifiedTubeFamily {
  TubeSet tubes;
  FrostmanCertificate certificate;
};

struct HarnessInput {
  CertifiedCubeSet cubes;
  std::vector<CertifiedTubeFamily> families;  // aligned with cubes.set.cubes()
  double family_size = 0.0;                   // M
  Rational s{1};
  Rational t{1};
  double eps = 0.0;
};

/// Validates the configuration (certificates present, re-verified, with
/// exponents at least s and t; every tube meets its cube; |T(Q)| within a
/// factor 2 of M) and measures |union T(Q)| against M.
/// Throws ValidationError when any check fails.
IncidenceRecord renwang_harness(const HarnessInput& input);

/// round(2^{s n}).
std::uint64_t nominal_family_size(int level, const Rational& s);

/// Tubes through q whose slope cells form a random binary tree with exactly
/// round(2^{s m}) nodes at depth m; each chosen slope cell contributes one
/// tube meeting q. Certified dyadic at exponent s with the least power-of-two
/// constant.
CertifiedTubeFamily tube_family_through_cube(const DyadicCube& q, const Rational& s, std::uint64_t seed);

}  // namespace radial_lab
