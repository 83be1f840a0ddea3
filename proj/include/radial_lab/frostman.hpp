#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "radial_lab/dyadic_core.hpp"
#include "radial_lab/numeric.hpp"

namespace radial_lab {

enum class CertificateKind { ball, dyadic };

std::string to_string(CertificateKind kind);

/// The (scale, cell, count) attaining the worst count / (2^{-s scale} |S|).
struct FrostmanWitness {
  int scale = 0;       // ball: radius 2^-scale; dyadic: ancestor level
  DyadicCube cube;     // ball: cube whose center is the ball center; dyadic: the ancestor
  std::uint64_t count = 0;
  double bound = 0.0;  // C 2^{-s scale} |S|
};

struct FrostmanCertificate {
  CertificateKind kind = CertificateKind::dyadic;
  Rational s{0};
  Rational C{1};
  bool verified = false;
  std::optional<FrostmanWitness> witness;
  int level = 0;
  std::uint64_t set_size = 0;

  /// count / (C 2^{-s scale} |S|) of the witness; <= 1 iff verified.
  double witness_ratio() const;
};

nlohmann::json to_json(const FrostmanCertificate& cert);

/// Decides count <= C * 2^{-s m} * total exactly (s, C rational).
bool within_frostman_bound(std::uint64_t count, int m, const Rational& s, const Rational& C,
                           std::uint64_t total);

/// Ball condition |S cap B(x, r)|_delta <= C r^s |S|_delta, tested at every
/// member-cube center x and every dyadic radius r = 2^-k, 0 <= k <= level.
/// Counting uses the closed ball of radius 2r so that the doubled ball
/// around a member center contains any radius-r ball meeting that member.
FrostmanCertificate check_ball_frostman(const CubeSet& s, const Rational& exponent, const Rational& C);

/// Per-ancestor condition: every level-m cube holds at most C 2^{-sm} |S|
/// members, for all m <= level.
FrostmanCertificate check_dyadic_frostman(const CubeSet& s, const Rational& exponent, const Rational& C);

/// Largest s on {0, step, 2 step, ..., 2} for which the dyadic check
/// verifies; nullopt if even s = 0 fails (only possible for C < 1).
std::optional<Rational> max_dyadic_exponent(const CubeSet& s, const Rational& C, const Rational& step);

/// Smallest C = 2^c (c >= 0) making the dyadic (2^-n, exponent, C) check pass.
FrostmanCertificate certify_with_min_constant(const CubeSet& s, const Rational& exponent);

struct BranchingProfile {
  int level = 0;
  std::vector<std::uint64_t> counts;  // counts[m] = box_count(S, m)

  std::vector<double> log2_counts() const;
};

BranchingProfile branching_profile(const CubeSet& s);

struct UniformExtraction {
  CubeSet subset;
  FrostmanCertificate certificate;
  double size_floor = 0.0;  // |P| (4 block + 2)^{-ceil(n / block)}
  int block = 1;
  std::vector<int> block_classes;  // selected class per block, coarse to fine
};

/// Pigeonhole uniformization over scale blocks of length
/// max(1, floor(eps * n)). Blocks are pruned finest first: in each block the
/// surviving block-ancestors are grouped by the dyadic class of their
/// surviving block-children count, and the class holding the most leaves is
/// kept (ties to the larger class). The result is re-certified before
/// return.
UniformExtraction extract_uniform_subset(const CubeSet& p, const Rational& eps);

}  // namespace radial_lab
