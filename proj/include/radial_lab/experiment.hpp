#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "radial_lab/errors.hpp"
#include "radial_lab/generators.hpp"
#include "radial_lab/incidence.hpp"

namespace radial_lab {

/// Levels above this are refused by the runner.
inline constexpr int kMaxExperimentLevel = 14;

/// Invalid configuration; field() is the dotted path, e.g. "x.digits_x".
class ConfigError : public ArgumentError {
 public:
  ConfigError(std::string field, const std::string& what)
      : ArgumentError(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// An input set whose certificate did not verify; the run stops.
class CertificationError : public std::runtime_error {
 public:
  CertificationError(const std::string& what, FrostmanCertificate cert)
      : std::runtime_error(what), certificate_(std::move(cert)) {}
  const FrostmanCertificate& certificate() const noexcept { return certificate_; }

 private:
  FrostmanCertificate certificate_;
};

enum class ExperimentKind { bounds_table, projection_sweep, incidence_sweep, frostman_audit };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

/// Where a set comes from: a generator (its level is taken from the run's
/// level list) or a DSET1 file.
struct SetSource {
  std::optional<GeneratorSpec> generator;
  std::optional<std::filesystem::path> file;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::bounds_table;
  std::vector<int> levels;
  std::optional<std::uint64_t> seed;
  std::filesystem::path output_dir;

  double grid_step = 0.05;  // bounds-table

  int precision_lo = 4;             // projection-sweep
  std::optional<int> precision_hi;  // defaults to the level
  std::size_t samples = 64;
  Rational rho{1, 16};

  std::vector<std::pair<Rational, Rational>> pairs;  // incidence-sweep (s, t)
  Rational eps{0};

  std::optional<SetSource> x;
  std::optional<SetSource> y;

  /// Normalized "section.key=value" lines; hashed into the manifest.
  std::string canonical;
};

/// Parses the INI-style configuration. Relative file paths resolve against
/// base_dir. Throws ConfigError naming the offending field.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Rechecks the cross-field rules (level cap, seed present when needed,
/// sources present for the kind); run() calls this first.
void validate_config(const ExperimentConfig& config);

struct PartResult {
  std::string name;
  bool ok = true;
  std::string error;
  double wall_seconds = 0.0;
  std::vector<std::string> outputs;
};

struct RunReport {
  std::vector<PartResult> parts;
  bool aborted = false;
  bool ok() const;
};

/// Executes the experiment, writing CSV/JSON outputs and manifest.json into
/// config.output_dir. CSV bodies depend only on the configuration.
RunReport run(const ExperimentConfig& config);

/// The harness configuration used by incidence-sweep at one level: the
/// diagonal when s = t = 1, otherwise a random tree of exponent t scaled into
/// the upper-left quadrant; every cube carries a seeded family of exponent s.
HarnessInput make_harness_input(const Rational& s, const Rational& t, int level, std::uint64_t seed,
                                const Rational& eps = Rational{0});

struct ExponentFit {
  double through_origin = 0.0;  // sum n L_n / sum n^2
  double free_slope = 0.0;      // ordinary least squares slope
  double intercept = 0.0;
};

/// Fits L_n = log2(union / M) against n for a run of harness records.
ExponentFit fit_incidence_exponent(const std::vector<IncidenceRecord>& records);

/// FNV-1a 64-bit digest, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace radial_lab
