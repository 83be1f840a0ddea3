#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "radial_lab/duality.hpp"
#include "radial_lab/frostman.hpp"
#include "radial_lab/incidence.hpp"

namespace radial_lab {

enum class GeneratorKind { cantor_product, line_set, random_tree, full_grid, graph_set };

std::string to_string(GeneratorKind kind);
GeneratorKind parse_generator_kind(const std::string& name);

/// Declarative description of a generated set. Only the fields relevant to
/// `kind` are read.
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::full_grid;
  int level = 0;
  std::vector<int> digits_x;  // cantor_product: base-4 digits allowed per axis
  std::vector<int> digits_y;
  Dyadic slope;               // line_set, graph_set
  Dyadic intercept;
  Rational target{1};         // random_tree
  std::uint64_t seed = 0;     // random_tree, graph_set
  bool has_seed = false;
};

nlohmann::json to_json(const GeneratorSpec& spec);

/// Cubes whose base-4 expansions use only the given digits on each axis.
/// Requires an even level and nonempty digit sets in {0..3}.
CubeSet cantor_product(int level, const std::vector<int>& digits_x, const std::vector<int>& digits_y);

/// (log2 |digits_x| + log2 |digits_y|) / 2.
double cantor_dimension(const std::vector<int>& digits_x, const std::vector<int>& digits_y);

/// Level-n cubes (half-open) containing a point of {y = ax + b : 0 <= x < 1}.
/// DomainError if the line misses [0,1)^2.
CubeSet line_set(int level, const Dyadic& slope, const Dyadic& intercept);

/// Random subtree keeping, per surviving cube and level, 2^t children after
/// stochastic rounding. Certified as dyadic (2^-n, t_out, 4) with t_out the
/// largest multiple of 1/64 that verifies; regenerated (up to 8 attempts)
/// until t_out >= t - 1/10, else GenerationError.
CertifiedCubeSet random_tree_set(int level, const Rational& target, std::uint64_t seed);

/// The constant random_tree_set certifies with.
inline constexpr std::int64_t kTreeCertificateConstant = 4;

/// For every level-n column, the cube holding (x_c, slope x_c + intercept)
/// at the column center x_c perturbed by one random cell; a 1-dimensional
/// set that is not contained in a line.
CubeSet graph_set(int level, const Dyadic& slope, const Dyadic& intercept, std::uint64_t seed);

/// Copy of s scaled into the sub-square `host`: member (i, j) at level n maps
/// to (host.i 2^n + i, host.j 2^n + j) at level host.level + n.
CubeSet embed(const CubeSet& s, const DyadicCube& host);

/// Dispatch on spec.kind.
CubeSet generate(const GeneratorSpec& spec);

}  // namespace radial_lab
