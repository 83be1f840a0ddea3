#include "radial_lab/generators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "radial_lab/errors.hpp"
#include "radial_lab/parallel.hpp"

namespace radial_lab {
namespace {

void check_digits(const std::vector<int>& digits, const char* axis) {
  if (digits.empty()) throw ArgumentError(std::string("empty digit set for ") + axis);
  for (int d : digits) {
    if (d < 0 || d > 3) throw ArgumentError(std::string("digit out of {0..3} for ") + axis);
  }
  if (std::set<int>(digits.begin(), digits.end()).size() != digits.size()) {
    throw ArgumentError(std::string("repeated digit for ") + axis);
  }
}

// All n/2-digit base-4 numbers over the allowed digits.
std::vector<std::uint32_t> digit_expansions(int digits_count, const std::vector<int>& allowed) {
  std::vector<std::uint32_t> out{0};
  for (int k = 0; k < digits_count; ++k) {
    std::vector<std::uint32_t> next;
    next.reserve(out.size() * allowed.size());
    for (auto v : out) {
      for (int d : allowed) next.push_back(v * 4 + static_cast<std::uint32_t>(d));
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::cantor_product: return "cantor_product";
    case GeneratorKind::line_set: return "line_set";
    case GeneratorKind::random_tree: return "random_tree";
    case GeneratorKind::full_grid: return "full_grid";
    case GeneratorKind::graph_set: return "graph_set";
  }
  return "unknown";
}

GeneratorKind parse_generator_kind(const std::string& name) {
  for (auto k : {GeneratorKind::cantor_product, GeneratorKind::line_set, GeneratorKind::random_tree,
                 GeneratorKind::full_grid, GeneratorKind::graph_set}) {
    if (to_string(k) == name) return k;
  }
  throw ArgumentError("unknown generator '" + name + "'");
}

nlohmann::json to_json(const GeneratorSpec& spec) {
  nlohmann::json j{{"kind", to_string(spec.kind)}, {"level", spec.level}};
  switch (spec.kind) {
    case GeneratorKind::cantor_product:
      j["digits_x"] = spec.digits_x;
      j["digits_y"] = spec.digits_y;
      break;
    case GeneratorKind::line_set:
      j["slope"] = spec.slope.to_string();
      j["intercept"] = spec.intercept.to_string();
      break;
    case GeneratorKind::graph_set:
      j["slope"] = spec.slope.to_string();
      j["intercept"] = spec.intercept.to_string();
      j["seed"] = spec.seed;
      break;
    case GeneratorKind::random_tree:
      j["target"] = to_string(spec.target);
      j["seed"] = spec.seed;
      break;
    case GeneratorKind::full_grid:
      break;
  }
  return j;
}

CubeSet cantor_product(int level, const std::vector<int>& digits_x, const std::vector<int>& digits_y) {
  if (level < 0 || level % 2 != 0) throw ArgumentError("cantor_product needs an even level");
  check_digits(digits_x, "x");
  check_digits(digits_y, "y");
  const auto xs = digit_expansions(level / 2, digits_x);
  const auto ys = digit_expansions(level / 2, digits_y);
  std::vector<DyadicCube> cubes;
  cubes.reserve(xs.size() * ys.size());
  for (auto i : xs) {
    for (auto j : ys) cubes.push_back(DyadicCube{level, i, j});
  }
  return CubeSet(level, std::move(cubes));
}

double cantor_dimension(const std::vector<int>& digits_x, const std::vector<int>& digits_y) {
  return (std::log2(static_cast<double>(digits_x.size())) + std::log2(static_cast<double>(digits_y.size()))) / 2.0;
}

CubeSet line_set(int level, const Dyadic& slope, const Dyadic& intercept) {
  const Line line = Line::make(slope, intercept);
  if (line.intercept >= Dyadic{1}) throw DomainError("line misses [0,1)^2");
  const std::int64_t side = std::int64_t{1} << level;
  std::vector<DyadicCube> cubes;
  const bool flat = line.slope == Dyadic{};
  for (std::int64_t i = 0; i < side; ++i) {
    const DyadicCube column{level, static_cast<std::uint32_t>(i), 0};
    // ax + b over x in [x0, x1) covers [a x0 + b, a x1 + b), or {b} if a = 0;
    // row j is hit iff lo < (j + 1) 2^-n and hi > j 2^-n.
    const Dyadic lo = line.slope * column.x0() + line.intercept;
    const Dyadic hi = line.slope * column.x1() + line.intercept;
    std::int64_t j_lo = lo.floor_scaled(level);
    std::int64_t j_hi = flat ? j_lo : -(-hi).floor_scaled(level) - 1;
    j_lo = std::max<std::int64_t>(j_lo, 0);
    j_hi = std::min<std::int64_t>(j_hi, side - 1);
    for (std::int64_t j = j_lo; j <= j_hi; ++j) {
      cubes.push_back(DyadicCube{level, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
    }
  }
  if (cubes.empty()) throw DomainError("line misses [0,1)^2");
  return CubeSet(level, std::move(cubes));
}

CertifiedCubeSet random_tree_set(int level, const Rational& target, std::uint64_t seed) {
  if (target < 0 || target > 2) throw ArgumentError("target exponent outside [0, 2]");
  if (level < 0 || level > kMaxLevel) throw ArgumentError("level out of range");
  const double branching = std::exp2(to_double(target));
  const auto whole = static_cast<int>(std::floor(branching));
  const double frac = branching - whole;
  const Rational floor_exponent = target - Rational(1, 10);

  constexpr int kAttempts = 8;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(attempt)));
    std::vector<std::pair<std::uint32_t, std::uint32_t>> nodes{{0, 0}};
    for (int m = 1; m <= level; ++m) {
      std::vector<std::pair<std::uint32_t, std::uint32_t>> next;
      for (auto [i, j] : nodes) {
        int keep = whole + (uniform_unit(rng) < frac ? 1 : 0);
        keep = std::clamp(keep, 1, 4);
        std::array<std::uint32_t, 4> quads{0, 1, 2, 3};
        for (std::size_t k = 4; k > 1; --k) std::swap(quads[k - 1], quads[uniform_below(rng, k)]);
        for (int k = 0; k < keep; ++k) {
          const std::uint32_t qd = quads[static_cast<std::size_t>(k)];
          next.emplace_back(2 * i + (qd >> 1), 2 * j + (qd & 1));
        }
      }
      nodes = std::move(next);
    }
    CubeSet set = CubeSet::from_indices(level, nodes);
    const Rational C(kTreeCertificateConstant);
    const auto t_out = max_dyadic_exponent(set, C, Rational(1, 64));
    if (t_out && *t_out >= floor_exponent) {
      auto cert = check_dyadic_frostman(set, *t_out, C);
      return CertifiedCubeSet{std::move(set), std::move(cert)};
    }
  }
  throw GenerationError("random_tree_set: certification below t - 0.1 after 8 attempts");
}

CubeSet graph_set(int level, const Dyadic& slope, const Dyadic& intercept, std::uint64_t seed) {
  const Line line = Line::make(slope, intercept);
  const std::int64_t side = std::int64_t{1} << level;
  std::mt19937_64 rng(mix_seed(seed, 0x67726170ull));
  std::vector<DyadicCube> cubes;
  for (std::int64_t i = 0; i < side; ++i) {
    const DyadicCube column{level, static_cast<std::uint32_t>(i), 0};
    const Dyadic y = line.slope * column.center().x + line.intercept;
    std::int64_t j = std::min<std::int64_t>(y.floor_scaled(level), side - 1);
    j += static_cast<std::int64_t>(uniform_below(rng, 3)) - 1;
    j = std::clamp<std::int64_t>(j, 0, side - 1);
    cubes.push_back(DyadicCube{level, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
  }
  return CubeSet(level, std::move(cubes));
}

CubeSet embed(const CubeSet& s, const DyadicCube& host) {
  const int level = host.level + s.level();
  if (level > kMaxLevel) throw ArgumentError("embedded level exceeds the maximum");
  std::vector<DyadicCube> cubes;
  cubes.reserve(s.size());
  for (const auto& c : s.cubes()) {
    cubes.push_back(DyadicCube{level, (host.i << s.level()) + c.i, (host.j << s.level()) + c.j});
  }
  return CubeSet(level, std::move(cubes));
}

CubeSet generate(const GeneratorSpec& spec) {
  switch (spec.kind) {
    case GeneratorKind::cantor_product: return cantor_product(spec.level, spec.digits_x, spec.digits_y);
    case GeneratorKind::line_set: return line_set(spec.level, spec.slope, spec.intercept);
    case GeneratorKind::full_grid: return CubeSet::full_grid(spec.level);
    case GeneratorKind::random_tree:
      if (!spec.has_seed) throw ArgumentError("random_tree requires a seed");
      return random_tree_set(spec.level, spec.target, spec.seed).set;
    case GeneratorKind::graph_set:
      if (!spec.has_seed) throw ArgumentError("graph_set requires a seed");
      return graph_set(spec.level, spec.slope, spec.intercept, spec.seed);
  }
  throw ArgumentError("unknown generator kind");
}

}  // namespace radial_lab
