#include "radial_lab/frostman.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include "radial_lab/errors.hpp"

namespace radial_lab {
namespace {

using boost::multiprecision::cpp_int;

void check_exponent_and_constant(const Rational& s, const Rational& C) {
  if (s < 0 || s > 2) throw ArgumentError("exponent " + to_string(s) + " outside [0, 2]");
  if (C <= 0) throw ArgumentError("constant " + to_string(C) + " must be positive");
}

// Sign of (q log2 a + p m_a) - (q log2 b + p m_b) for s = p/q, decided in
// long double when the gap is clear and by big-integer powers otherwise.
int compare_log_mass(const cpp_int& a, int m_a, const cpp_int& b, int m_b, const Rational& s) {
  const auto p = s.numerator();
  const auto q = s.denominator();
  const long double la = std::log2(static_cast<long double>(a));
  const long double lb = std::log2(static_cast<long double>(b));
  const long double diff = static_cast<long double>(q) * (la - lb) +
                           static_cast<long double>(p) * static_cast<long double>(m_a - m_b);
  const long double magnitude = static_cast<long double>(q) * (std::fabs(la) + std::fabs(lb)) +
                                std::fabs(static_cast<long double>(p)) * (std::abs(m_a) + std::abs(m_b)) + 1.0L;
  if (diff > 1e-12L * magnitude) return 1;
  if (diff < -1e-12L * magnitude) return -1;

  // a^q 2^{p m_a} vs b^q 2^{p m_b}
  cpp_int lhs = boost::multiprecision::pow(a, static_cast<unsigned>(q));
  cpp_int rhs = boost::multiprecision::pow(b, static_cast<unsigned>(q));
  const long long shift = static_cast<long long>(p) * (m_a - m_b);
  if (shift > 0) lhs <<= static_cast<unsigned>(shift);
  if (shift < 0) rhs <<= static_cast<unsigned>(-shift);
  if (lhs > rhs) return 1;
  if (lhs < rhs) return -1;
  return 0;
}

int compare_mass(std::uint64_t count_a, int m_a, std::uint64_t count_b, int m_b, const Rational& s) {
  return compare_log_mass(cpp_int(count_a), m_a, cpp_int(count_b), m_b, s);
}

double frostman_bound(int m, const Rational& s, const Rational& C, std::uint64_t total) {
  return to_double(C) * std::exp2(-to_double(s) * m) * static_cast<double>(total);
}

struct LevelMax {
  std::uint64_t count = 0;
  std::uint64_t key = 0;
};

// Largest per-ancestor count at each level (first in Morton order on ties).
std::vector<LevelMax> level_maxima(const CubeSet& s) {
  std::vector<LevelMax> out;
  for (int m = 0; m <= s.level(); ++m) {
    LevelMax best;
    for (const auto& cell : s.occupancy(m)) {
      if (cell.count > best.count) best = {cell.count, cell.key};
    }
    out.push_back(best);
  }
  return out;
}

DyadicCube cube_from_key(int level, std::uint64_t key) {
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  morton_decode(key, i, j);
  return DyadicCube{level, i, j};
}

bool maxima_within(const std::vector<LevelMax>& maxima, const Rational& s, const Rational& C,
                   std::uint64_t total) {
  for (std::size_t m = 0; m < maxima.size(); ++m) {
    if (!within_frostman_bound(maxima[m].count, static_cast<int>(m), s, C, total)) return false;
  }
  return true;
}

FrostmanCertificate dyadic_from_maxima(const CubeSet& set, const std::vector<LevelMax>& maxima,
                                       const Rational& s, const Rational& C) {
  FrostmanCertificate cert;
  cert.kind = CertificateKind::dyadic;
  cert.s = s;
  cert.C = C;
  cert.level = set.level();
  cert.set_size = set.size();
  cert.verified = maxima_within(maxima, s, C, set.size());

  std::size_t worst = 0;
  for (std::size_t m = 1; m < maxima.size(); ++m) {
    if (compare_mass(maxima[m].count, static_cast<int>(m), maxima[worst].count, static_cast<int>(worst), s) > 0) {
      worst = m;
    }
  }
  const int scale = static_cast<int>(worst);
  cert.witness = FrostmanWitness{scale, cube_from_key(scale, maxima[worst].key), maxima[worst].count,
                                 frostman_bound(scale, s, C, set.size())};
  return cert;
}

Rational pow2(int e) { return Rational(std::int64_t{1} << e); }

}  // namespace

std::string to_string(CertificateKind kind) { return kind == CertificateKind::ball ? "ball" : "dyadic"; }

double FrostmanCertificate::witness_ratio() const {
  if (!witness) return 0.0;
  return static_cast<double>(witness->count) / witness->bound;
}

nlohmann::json to_json(const FrostmanCertificate& cert) {
  nlohmann::json j;
  j["kind"] = to_string(cert.kind);
  j["s"] = to_double(cert.s);
  j["C"] = to_double(cert.C);
  j["s_exact"] = to_string(cert.s);
  j["C_exact"] = to_string(cert.C);
  j["verified"] = cert.verified;
  j["level"] = cert.level;
  j["set_size"] = cert.set_size;
  j["convention"] = cert.kind == CertificateKind::ball
                        ? "centers at member-cube centers, radii 2^-k, counted in the closed ball of radius 2^(1-k)"
                        : "per-ancestor counts at every level m <= n";
  if (cert.witness) {
    const auto& w = *cert.witness;
    j["witness"] = {{"scale", w.scale},
                    {"index", {w.cube.i, w.cube.j}},
                    {"count", w.count},
                    {"bound", w.bound}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

bool within_frostman_bound(std::uint64_t count, int m, const Rational& s, const Rational& C,
                           std::uint64_t total) {
  // count * C.den vs C.num * total * 2^{-s m}
  const cpp_int lhs = cpp_int(count) * C.denominator();
  const cpp_int rhs = cpp_int(C.numerator()) * total;
  if (lhs == 0) return true;
  if (rhs == 0) return false;
  return compare_log_mass(lhs, m, rhs, 0, s) <= 0;
}

FrostmanCertificate check_dyadic_frostman(const CubeSet& s, const Rational& exponent, const Rational& C) {
  if (s.empty()) throw ArgumentError("Frostman check on an empty set");
  check_exponent_and_constant(exponent, C);
  return dyadic_from_maxima(s, level_maxima(s), exponent, C);
}

FrostmanCertificate check_ball_frostman(const CubeSet& s, const Rational& exponent, const Rational& C) {
  if (s.empty()) throw ArgumentError("Frostman check on an empty set");
  check_exponent_and_constant(exponent, C);

  FrostmanCertificate cert;
  cert.kind = CertificateKind::ball;
  cert.s = exponent;
  cert.C = C;
  cert.level = s.level();
  cert.set_size = s.size();
  cert.verified = true;

  std::optional<FrostmanWitness> worst;
  for (int k = 0; k <= s.level(); ++k) {
    const Dyadic doubled = Dyadic::from_ratio(2, k);
    std::uint64_t best = 0;
    DyadicCube best_cube;
    for (const auto& c : s.cubes()) {
      const auto count = count_in_closed_ball(s, c.center(), doubled);
      if (count > best) {
        best = count;
        best_cube = c;
      }
    }
    if (!within_frostman_bound(best, k, exponent, C, s.size())) cert.verified = false;
    if (!worst || compare_mass(best, k, worst->count, worst->scale, exponent) > 0) {
      worst = FrostmanWitness{k, best_cube, best, frostman_bound(k, exponent, C, s.size())};
    }
  }
  cert.witness = worst;
  return cert;
}

std::optional<Rational> max_dyadic_exponent(const CubeSet& s, const Rational& C, const Rational& step) {
  if (s.empty()) throw ArgumentError("exponent search on an empty set");
  if (C <= 0) throw ArgumentError("constant must be positive");
  if (step <= 0) throw ArgumentError("grid step must be positive");
  const auto maxima = level_maxima(s);
  const auto grid_points = boost::rational_cast<std::int64_t>(Rational(2) / step);  // floor
  const auto passes = [&](std::int64_t k) { return maxima_within(maxima, step * k, C, s.size()); };
  if (!passes(0)) return std::nullopt;
  std::int64_t lo = 0;
  std::int64_t hi = grid_points;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo + 1) / 2;
    if (passes(mid)) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return step * lo;
}

FrostmanCertificate certify_with_min_constant(const CubeSet& s, const Rational& exponent) {
  if (s.empty()) throw ArgumentError("Frostman check on an empty set");
  check_exponent_and_constant(exponent, Rational(1));
  const auto maxima = level_maxima(s);
  // count <= |S| <= 2^{2n} 2^{-sm} |S| always holds, so c = 2n is feasible.
  int lo = 0;
  int hi = 2 * s.level();
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (maxima_within(maxima, exponent, pow2(mid), s.size())) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return dyadic_from_maxima(s, maxima, exponent, pow2(lo));
}

std::vector<double> BranchingProfile::log2_counts() const {
  std::vector<double> out;
  out.reserve(counts.size());
  for (auto c : counts) out.push_back(std::log2(static_cast<double>(c)));
  return out;
}

BranchingProfile branching_profile(const CubeSet& s) {
  if (s.empty()) throw ArgumentError("branching profile of an empty set");
  BranchingProfile profile;
  profile.level = s.level();
  for (int m = 0; m <= s.level(); ++m) profile.counts.push_back(box_count(s, m));
  return profile;
}

UniformExtraction extract_uniform_subset(const CubeSet& p, const Rational& eps) {
  if (p.empty()) throw ArgumentError("extraction from an empty set");
  if (eps <= 0 || eps > 1) throw ArgumentError("eps " + to_string(eps) + " outside (0, 1]");

  const int n = p.level();
  const auto scaled = eps * n;
  const int block = std::max<int>(1, static_cast<int>(scaled.numerator() / scaled.denominator()));
  std::vector<int> bounds{0};
  while (bounds.back() < n) bounds.push_back(std::min(bounds.back() + block, n));
  const int blocks = static_cast<int>(bounds.size()) - 1;

  std::vector<std::uint64_t> leaves;
  leaves.reserve(p.size());
  for (const auto& c : p.cubes()) leaves.push_back(morton_encode(c.i, c.j));
  std::sort(leaves.begin(), leaves.end());

  std::vector<int> classes(static_cast<std::size_t>(blocks), 0);
  for (int b = blocks; b >= 1; --b) {
    const int parent_shift = 2 * (n - bounds[static_cast<std::size_t>(b - 1)]);
    const int child_shift = 2 * (n - bounds[static_cast<std::size_t>(b)]);
    const int max_class = 2 * (bounds[static_cast<std::size_t>(b)] - bounds[static_cast<std::size_t>(b - 1)]);

    // Leaves are Morton-sorted, so each parent's leaves are contiguous.
    struct Group {
      std::size_t begin, end;
      int cls;
    };
    std::vector<Group> groups;
    std::vector<std::uint64_t> leaves_in_class(static_cast<std::size_t>(max_class) + 1, 0);
    for (std::size_t k = 0; k < leaves.size();) {
      const std::uint64_t parent = leaves[k] >> parent_shift;
      std::size_t e = k;
      std::uint64_t children = 0;
      std::uint64_t last_child = ~std::uint64_t{0};
      while (e < leaves.size() && (leaves[e] >> parent_shift) == parent) {
        const std::uint64_t child = leaves[e] >> child_shift;
        if (child != last_child) {
          ++children;
          last_child = child;
        }
        ++e;
      }
      const int cls = static_cast<int>(std::bit_width(children)) - 1;
      groups.push_back({k, e, cls});
      leaves_in_class[static_cast<std::size_t>(cls)] += e - k;
      k = e;
    }
    int chosen = 0;
    for (int c = 0; c <= max_class; ++c) {
      if (leaves_in_class[static_cast<std::size_t>(c)] >= leaves_in_class[static_cast<std::size_t>(chosen)]) {
        chosen = c;
      }
    }
    std::vector<std::uint64_t> kept;
    kept.reserve(leaves_in_class[static_cast<std::size_t>(chosen)]);
    for (const auto& g : groups) {
      if (g.cls == chosen) kept.insert(kept.end(), leaves.begin() + static_cast<std::ptrdiff_t>(g.begin),
                                       leaves.begin() + static_cast<std::ptrdiff_t>(g.end));
    }
    leaves = std::move(kept);
    classes[static_cast<std::size_t>(b - 1)] = chosen;
  }

  std::vector<DyadicCube> cubes;
  cubes.reserve(leaves.size());
  for (auto code : leaves) cubes.push_back(cube_from_key(n, code));
  CubeSet subset(n, std::move(cubes));

  // Exponent: branching rate below the deepest single-cell level, capped by
  // the largest exponent the constant 2^{2 block + 1} certifies.
  const Rational C_out = pow2(2 * block + 1);
  const Rational grid(1, 1024);
  int split = 0;
  for (int m = 0; m <= n; ++m) {
    if (box_count(subset, m) == 1) split = m;
  }
  Rational t_out(0);
  if (split < n) {
    const double rate = std::log2(static_cast<double>(subset.size())) / (n - split);
    t_out = Rational(static_cast<std::int64_t>(std::floor(rate * 1024.0 + 1e-9)), 1024);
  }
  t_out = std::min({t_out, *max_dyadic_exponent(subset, C_out, grid), Rational(2)});

  UniformExtraction out{std::move(subset), {}, 0.0, block, std::move(classes)};
  out.certificate = check_dyadic_frostman(out.subset, t_out, C_out);
  if (!out.certificate.verified) throw std::logic_error("uniform subset failed re-certification");
  out.size_floor = static_cast<double>(p.size()) * std::pow(4.0 * block + 2.0, -blocks);
  const cpp_int lhs = cpp_int(out.subset.size()) * boost::multiprecision::pow(cpp_int(4 * block + 2), static_cast<unsigned>(blocks));
  if (lhs < cpp_int(p.size())) throw std::logic_error("uniform subset below its size floor");
  return out;
}

}  // namespace radial_lab
