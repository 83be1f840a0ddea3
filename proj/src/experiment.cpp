#include "radial_lab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <boost/version.hpp>
#include <nlohmann/json.hpp>

#include "radial_lab/bounds.hpp"
#include "radial_lab/parallel.hpp"
#include "radial_lab/projection.hpp"
#include "radial_lab/set_io.hpp"

#ifndef RADIAL_LAB_VERSION
#define RADIAL_LAB_VERSION "0.0.0"
#endif

namespace radial_lab {
namespace {

namespace pt = boost::property_tree;
using json = nlohmann::json;

// ---------------------------------------------------------------- config

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"experiment", {"kind", "levels", "seed", "output"}},
      {"bounds", {"step"}},
      {"projection", {"precision_lo", "precision_hi", "samples", "rho"}},
      {"incidence", {"pairs", "eps"}},
      {"audit", {"eps"}},
      {"x", {"generator", "file", "digits_x", "digits_y", "slope", "intercept", "target"}},
      {"y", {"generator", "file", "digits_x", "digits_y", "slope", "intercept", "target"}},
  };
  return keys;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
  }
  return out;
}

template <class T, class F>
T field(const std::string& path, const std::string& text, F&& parse) {
  try {
    return parse(text);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path, "invalid value '" + text + "' (" + e.what() + ")");
  }
}

std::int64_t parse_int(const std::string& text) {
  std::size_t used = 0;
  const long long v = std::stoll(text, &used);
  if (used != text.size()) throw std::invalid_argument("trailing characters");
  return v;
}

std::uint64_t parse_u64(const std::string& text) {
  if (text.empty() || text[0] == '-') throw std::invalid_argument("expected an unsigned integer");
  std::size_t used = 0;
  const unsigned long long v = std::stoull(text, &used);
  if (used != text.size()) throw std::invalid_argument("trailing characters");
  return v;
}

std::vector<int> parse_digits(const std::string& text) {
  std::vector<int> out;
  for (const auto& d : split(text, ',')) out.push_back(static_cast<int>(parse_int(d)));
  return out;
}

SetSource parse_source(const pt::ptree& sec, const std::string& name, const std::filesystem::path& base) {
  SetSource src;
  const auto file = sec.get_optional<std::string>("file");
  const auto gen = sec.get_optional<std::string>("generator");
  if (file && gen) throw ConfigError(name, "give either 'file' or 'generator', not both");
  if (!file && !gen) throw ConfigError(name, "needs 'file' or 'generator'");
  if (file) {
    auto p = std::filesystem::path(*file);
    if (p.is_relative() && !base.empty()) p = base / p;
    if (!std::filesystem::exists(p)) throw ConfigError(name + ".file", "no such file '" + p.string() + "'");
    src.file = p;
    return src;
  }
  GeneratorSpec spec;
  spec.kind = field<GeneratorKind>(name + ".generator", *gen, parse_generator_kind);
  const auto need = [&](const char* key) {
    const auto v = sec.get_optional<std::string>(key);
    if (!v) throw ConfigError(name + "." + key, "required by generator " + *gen);
    return *v;
  };
  switch (spec.kind) {
    case GeneratorKind::cantor_product:
      spec.digits_x = field<std::vector<int>>(name + ".digits_x", need("digits_x"), parse_digits);
      spec.digits_y = field<std::vector<int>>(name + ".digits_y", need("digits_y"), parse_digits);
      break;
    case GeneratorKind::line_set:
    case GeneratorKind::graph_set:
      spec.slope = field<Dyadic>(name + ".slope", need("slope"), [](const std::string& s) { return Dyadic::parse(s); });
      spec.intercept =
          field<Dyadic>(name + ".intercept", need("intercept"), [](const std::string& s) { return Dyadic::parse(s); });
      break;
    case GeneratorKind::random_tree:
      spec.target = field<Rational>(name + ".target", need("target"), [](const std::string& s) { return parse_rational(s); });
      if (spec.target < 0 || spec.target > 2) throw ConfigError(name + ".target", "must lie in [0, 2]");
      break;
    case GeneratorKind::full_grid:
      break;
  }
  src.generator = spec;
  return src;
}

bool stochastic(const std::optional<SetSource>& src) {
  return src && src->generator &&
         (src->generator->kind == GeneratorKind::random_tree || src->generator->kind == GeneratorKind::graph_set);
}

// ---------------------------------------------------------------- output

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string dyadic_decimal(const Dyadic& d) {
  // Every dyadic has a terminating decimal expansion; print all of it.
  char buf[80];
  std::snprintf(buf, sizeof buf, "%.*f", std::max(1, d.exponent()), d.to_double());
  return buf;
}

std::string point_label(const Point2& p) { return dyadic_decimal(p.x) + " " + dyadic_decimal(p.y); }

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

  void write(const std::string& name, const std::string& body, PartResult& part) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    out << body;
    part.outputs.push_back(name);
    digests_[name] = fnv1a_hex(body);
  }

  const std::map<std::string, std::string>& digests() const { return digests_; }
  const std::filesystem::path& path() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::string> digests_;
};

// ---------------------------------------------------------------- inputs

CubeSet materialize(const SetSource& src, int level) {
  if (src.file) {
    CubeSet s = load_cube_set(*src.file);
    if (s.level() != level) {
      throw ArgumentError(src.file->string() + " has level " + std::to_string(s.level()) + ", run level is " +
                          std::to_string(level));
    }
    return s;
  }
  GeneratorSpec spec = *src.generator;
  spec.level = level;
  return generate(spec);
}

CubeSet materialize(const SetSource& src, int level, std::uint64_t seed) {
  if (src.generator) {
    GeneratorSpec spec = *src.generator;
    spec.level = level;
    spec.seed = seed;
    spec.has_seed = true;
    return generate(spec);
  }
  return materialize(src, level);
}

double box_dimension(const CubeSet& s, int m_lo) {
  const auto profile = branching_profile(s);
  const int lo = std::min(m_lo, std::max(0, s.level() - 2));
  return estimate_dimension(profile, lo, s.level()).slope;
}

// Dyadic certificate at the box-counting slope (floored to a multiple of
// 1/64) with the least power-of-two constant.
FrostmanCertificate certify_input(const CubeSet& s, int m_lo, const std::string& what) {
  const double slope = s.level() >= 2 ? box_dimension(s, m_lo) : 0.0;
  const auto exponent = Rational(static_cast<std::int64_t>(std::floor(std::clamp(slope, 0.0, 2.0) * 64)), 64);
  auto cert = certify_with_min_constant(s, exponent);
  if (!cert.verified) throw CertificationError(what + ": certificate did not verify", cert);
  return cert;
}

// The ball checker at the least power-of-two multiple of C that verifies.
FrostmanCertificate ball_certificate(const CubeSet& s, const Rational& exponent, Rational C) {
  auto cert = check_ball_frostman(s, exponent, C);
  for (int k = 0; !cert.verified && k <= 2 * s.level() + 8; ++k) {
    C *= 2;
    cert = check_ball_frostman(s, exponent, C);
  }
  return cert;
}

std::uint64_t level_seed(const ExperimentConfig& c, std::uint64_t salt, int level) {
  return mix_seed(mix_seed(c.seed.value_or(0), salt), static_cast<std::uint64_t>(level));
}

// ---------------------------------------------------------------- parts

void run_bounds_table(const ExperimentConfig& c, OutputDir& out, PartResult& part) {
  const auto steps = static_cast<int>(std::llround(1.0 / c.grid_step));
  std::ostringstream csv;
  csv << "dim_x,dim_y,osw1,osw2,main,main_hypothesis_violated,orthogonal_exceptional,incidence_exponent,"
         "main_ge_osw1,main_gt_osw1,predicted_gt_osw1,main_ge_osw2,main_gt_osw2,predicted_gt_osw2\n";
  for (int a = 0; a <= steps; ++a) {
    const double dx = static_cast<double>(a) / steps;
    for (int b = 1; b <= 2 * steps; ++b) {
      const double dy = static_cast<double>(b) / steps;
      const auto r = dominance_report(dx, dy);
      const auto main = bound_main(dx, dy);
      csv << num(dx) << ',' << num(dy) << ',' << num(r.osw1) << ',' << (r.osw2 ? num(*r.osw2) : "") << ','
          << num(main.value) << ',' << main.hypothesis_violated << ',';
      if (dx <= std::min(dy, 1.0)) csv << num(bound_orthogonal_exceptional(dy, dx));
      csv << ',';
      if (dx > 0) csv << num(incidence_exponent(dx, dy));
      csv << ',' << r.main_ge_osw1 << ',' << r.main_gt_osw1 << ',' << r.predicted_gt_osw1 << ',';
      if (r.osw2) csv << r.main_ge_osw2 << ',' << r.main_gt_osw2 << ',' << r.predicted_gt_osw2;
      else csv << ",,";
      csv << '\n';
    }
  }
  out.write("bounds.csv", csv.str(), part);
}

struct ProjectionSummary {
  std::ostringstream csv;
  json certificates = json::array();
};

void run_projection_level(const ExperimentConfig& c, int n, OutputDir& out, PartResult& part,
                          ProjectionSummary& summary) {
  const CubeSet x = materialize(*c.x, n, level_seed(c, 1, n));
  const CubeSet y = materialize(*c.y, n, level_seed(c, 2, n));
  const auto cert_x = certify_input(x, c.precision_lo, "X at level " + std::to_string(n));
  const auto cert_y = certify_input(y, c.precision_lo, "Y at level " + std::to_string(n));
  summary.certificates.push_back({{"level", n}, {"x", to_json(cert_x)}, {"y", to_json(cert_y)}});

  const int m_hi = c.precision_hi.value_or(n);
  std::vector<Point2> points;
  for (const auto& q : x.cubes()) points.push_back(q.center());
  if (c.samples < points.size()) {
    std::mt19937_64 rng(level_seed(c, 3, n));
    for (std::size_t k = 0; k < c.samples; ++k) {
      std::swap(points[k], points[k + uniform_below(rng, points.size() - k)]);
    }
    points.resize(c.samples);
    std::sort(points.begin(), points.end(), [](const Point2& a, const Point2& b) {
      return std::tie(a.x, a.y) < std::tie(b.x, b.y);
    });
  }
  const auto sweep = sup_radial_dimension(points, y, c.precision_lo, m_hi, Dyadic::from_rational(c.rho));

  std::ostringstream csv;
  csv << "x,scale,bin_count,slope,residual\n";
  for (const auto& e : sweep.per_x) {
    if (!e.estimate) continue;
    for (std::size_t k = 0; k < e.estimate->counts.size(); ++k) {
      csv << point_label(e.x) << ',' << e.estimate->m_lo + static_cast<int>(k) << ',' << e.estimate->counts[k] << ','
          << num(e.estimate->slope) << ',' << num(e.estimate->residual) << '\n';
    }
  }
  out.write("projection_n" + std::to_string(n) + ".csv", csv.str(), part);

  const double dim_x = box_dimension(x, c.precision_lo);
  const double dim_y = box_dimension(y, c.precision_lo);
  const auto osw2 = bound_osw2(dim_x, dim_y);
  summary.csv << n << ',' << points.size() << ',' << sweep.empty << ',' << num(dim_x) << ',' << num(dim_y) << ','
              << num(to_double(cert_x.s)) << ',' << num(to_double(cert_y.s)) << ',' << num(sweep.max_slope) << ','
              << (sweep.best ? point_label(sweep.per_x[*sweep.best].x) : "") << ','
              << num(bound_main(dim_x, dim_y).value) << ',' << num(bound_osw1(dim_x, dim_y)) << ','
              << (osw2 ? num(*osw2) : "") << '\n';
}

void run_incidence_pair(const ExperimentConfig& c, std::size_t index, OutputDir& out, PartResult& part,
                        std::ostringstream& fits, json& certificates) {
  const auto& [s, t] = c.pairs[index];
  std::vector<IncidenceRecord> records;
  std::ostringstream csv;
  csv << IncidenceRecord::csv_header() << '\n';
  for (int n : c.levels) {
    const auto input = make_harness_input(s, t, n, level_seed(c, 10 + index, n), c.eps);
    if (!input.cubes.certificate.verified) {
      throw CertificationError("cube set at level " + std::to_string(n), input.cubes.certificate);
    }
    records.push_back(renwang_harness(input));
    csv << records.back().csv_row() << '\n';
    certificates.push_back({{"s", to_string(s)},
                            {"t", to_string(t)},
                            {"level", n},
                            {"cubes", to_json(input.cubes.certificate)},
                            {"tube_families", input.families.size()},
                            {"tube_families_verified", true}});
  }
  const std::string tag = to_string(s) + "_" + to_string(t);
  std::string file = "incidence_s" + tag + ".csv";
  std::replace(file.begin(), file.end(), '/', '-');
  out.write(file, csv.str(), part);
  const auto fit = fit_incidence_exponent(records);
  fits << to_string(s) << ',' << to_string(t) << ',' << c.levels.front() << ',' << c.levels.back() << ','
       << num(fit.through_origin) << ',' << num(fit.free_slope) << ',' << num(incidence_exponent(to_double(s), to_double(t)))
       << '\n';
}

void run_audit_level(const ExperimentConfig& c, int n, OutputDir& out, PartResult& part, std::ostringstream& csv,
                     json& certificates) {
  for (const auto& [name, src] : {std::pair{"x", &c.x}, std::pair{"y", &c.y}}) {
    if (!*src) continue;
    const CubeSet s = materialize(**src, n, level_seed(c, name[0] == 'x' ? 1 : 2, n));
    const auto dyadic = certify_input(s, c.precision_lo, std::string(name) + " at level " + std::to_string(n));
    const auto ball = ball_certificate(s, dyadic.s, dyadic.C);
    const auto extraction = extract_uniform_subset(s, c.eps);
    for (const auto* cert : {&dyadic, &ball, &extraction.certificate}) {
      const std::string checker = cert == &extraction.certificate ? "uniform_subset" : to_string(cert->kind);
      csv << name << ',' << n << ',' << cert->set_size << ',' << checker << ',' << to_string(cert->s) << ','
          << to_string(cert->C) << ',' << cert->verified << ',';
      if (cert->witness) {
        csv << cert->witness->scale << ',' << cert->witness->count << ',' << num(cert->witness->bound);
      } else {
        csv << ",,";
      }
      csv << '\n';
    }
    certificates.push_back({{"set", name},
                            {"level", n},
                            {"dyadic", to_json(dyadic)},
                            {"ball", to_json(ball)},
                            {"uniform_subset", to_json(extraction.certificate)},
                            {"uniform_subset_size_floor", extraction.size_floor}});
    save_set(out.path() / (std::string(name) + "_n" + std::to_string(n) + ".dset"), s);
    part.outputs.push_back(std::string(name) + "_n" + std::to_string(n) + ".dset");
  }
}

}  // namespace

// ---------------------------------------------------------------- public

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::bounds_table: return "bounds-table";
    case ExperimentKind::projection_sweep: return "projection-sweep";
    case ExperimentKind::incidence_sweep: return "incidence-sweep";
    case ExperimentKind::frostman_audit: return "frostman-audit";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (auto k : {ExperimentKind::bounds_table, ExperimentKind::projection_sweep, ExperimentKind::incidence_sweep,
                 ExperimentKind::frostman_audit}) {
    if (to_string(k) == name) return k;
  }
  throw ArgumentError("unknown experiment kind '" + name + "'");
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()), e.message());
  }
  std::ostringstream canonical;
  std::map<std::string, std::map<std::string, std::string>> sorted;
  for (const auto& [section, body] : tree) {
    const auto known = known_keys().find(section);
    if (known == known_keys().end()) throw ConfigError(section, "unknown section");
    if (!body.data().empty()) throw ConfigError(section, "expected a [section]");
    for (const auto& [key, value] : body) {
      if (!known->second.count(key)) throw ConfigError(section + "." + key, "unknown key");
      sorted[section][key] = value.data();
    }
  }
  for (const auto& [section, body] : sorted) {
    for (const auto& [key, value] : body) canonical << section << '.' << key << '=' << value << '\n';
  }

  ExperimentConfig c;
  c.canonical = canonical.str();
  const auto get = [&](const std::string& path) { return tree.get_optional<std::string>(path); };

  const auto kind = get("experiment.kind");
  if (!kind) throw ConfigError("experiment.kind", "required");
  c.kind = field<ExperimentKind>("experiment.kind", *kind, parse_experiment_kind);
  if (auto v = get("experiment.levels")) {
    for (const auto& l : split(*v, ',')) {
      c.levels.push_back(field<int>("experiment.levels", l, [](const std::string& s) { return static_cast<int>(parse_int(s)); }));
    }
  }
  if (auto v = get("experiment.seed")) c.seed = field<std::uint64_t>("experiment.seed", *v, parse_u64);
  if (auto v = get("experiment.output")) {
    c.output_dir = *v;
    if (c.output_dir.is_relative() && !base_dir.empty()) c.output_dir = base_dir / c.output_dir;
  }
  if (auto v = get("bounds.step")) {
    c.grid_step = field<double>("bounds.step", *v, [](const std::string& s) { return to_double(parse_rational(s)); });
  }
  if (auto v = get("projection.precision_lo")) {
    c.precision_lo = field<int>("projection.precision_lo", *v, [](const std::string& s) { return static_cast<int>(parse_int(s)); });
  }
  if (auto v = get("projection.precision_hi")) {
    c.precision_hi = field<int>("projection.precision_hi", *v, [](const std::string& s) { return static_cast<int>(parse_int(s)); });
  }
  if (auto v = get("projection.samples")) {
    c.samples = field<std::size_t>("projection.samples", *v, [](const std::string& s) { return static_cast<std::size_t>(parse_u64(s)); });
  }
  if (auto v = get("projection.rho")) {
    c.rho = field<Rational>("projection.rho", *v, [](const std::string& s) { return parse_rational(s); });
  }
  if (auto v = get("incidence.pairs")) {
    for (const auto& item : split(*v, ',')) {
      const auto st = split(item, ':');
      if (st.size() != 2) throw ConfigError("incidence.pairs", "expected 's:t' items, got '" + item + "'");
      const auto parse = [](const std::string& s) { return parse_rational(s); };
      c.pairs.emplace_back(field<Rational>("incidence.pairs", st[0], parse), field<Rational>("incidence.pairs", st[1], parse));
    }
  }
  const std::string eps_key = c.kind == ExperimentKind::frostman_audit ? "audit.eps" : "incidence.eps";
  if (c.kind == ExperimentKind::frostman_audit) c.eps = Rational(1, 4);
  if (auto v = get(eps_key)) c.eps = field<Rational>(eps_key, *v, [](const std::string& s) { return parse_rational(s); });
  if (tree.get_child_optional("x")) c.x = parse_source(tree.get_child("x"), "x", base_dir);
  if (tree.get_child_optional("y")) c.y = parse_source(tree.get_child("y"), "y", base_dir);
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path.string() + "'");
  return parse_config(in, path.parent_path());
}

void validate_config(const ExperimentConfig& c) {
  for (int n : c.levels) {
    if (n < 1 || n > kMaxExperimentLevel) {
      throw ConfigError("experiment.levels", "level " + std::to_string(n) + " outside [1, " +
                                                 std::to_string(kMaxExperimentLevel) + "]");
    }
  }
  const bool needs_levels = c.kind != ExperimentKind::bounds_table;
  if (needs_levels && c.levels.empty()) throw ConfigError("experiment.levels", "required for " + to_string(c.kind));
  switch (c.kind) {
    case ExperimentKind::bounds_table: {
      const double inv = 1.0 / c.grid_step;
      if (!(c.grid_step > 0) || c.grid_step > 1 || std::abs(inv - std::round(inv)) > 1e-9) {
        throw ConfigError("bounds.step", "must be 1/k for a positive integer k");
      }
      break;
    }
    case ExperimentKind::projection_sweep:
      if (!c.x) throw ConfigError("x", "projection-sweep needs an X set");
      if (!c.y) throw ConfigError("y", "projection-sweep needs a Y set");
      if (c.samples == 0) throw ConfigError("projection.samples", "must be positive");
      if (c.precision_lo < 0) throw ConfigError("projection.precision_lo", "must be nonnegative");
      for (int n : c.levels) {
        const int hi = c.precision_hi.value_or(n);
        if (hi - c.precision_lo + 1 < 3) throw ConfigError("projection.precision_hi", "window needs at least 3 scales");
        if (hi > kMaxProjectionPrecision) throw ConfigError("projection.precision_hi", "too fine");
        if (c.rho < Rational(2, std::int64_t{1} << n)) {
          throw ConfigError("projection.rho", "must be at least 2 * 2^-n for level " + std::to_string(n));
        }
      }
      if (c.rho.denominator() & (c.rho.denominator() - 1)) throw ConfigError("projection.rho", "must be dyadic");
      if (!c.seed && (stochastic(c.x) || stochastic(c.y))) throw ConfigError("experiment.seed", "required by a random generator");
      break;
    case ExperimentKind::incidence_sweep:
      if (c.pairs.empty()) throw ConfigError("incidence.pairs", "required for incidence-sweep");
      for (const auto& [s, t] : c.pairs) {
        if (s <= 0 || s > 1 || t <= 0 || t > 2) throw ConfigError("incidence.pairs", "need s in (0,1], t in (0,2]");
      }
      if (c.levels.size() < 2) throw ConfigError("experiment.levels", "incidence-sweep fits across at least 2 levels");
      if (!c.seed) throw ConfigError("experiment.seed", "required: tube families are random");
      break;
    case ExperimentKind::frostman_audit:
      if (!c.x && !c.y) throw ConfigError("x", "frostman-audit needs at least one input set");
      if (c.eps <= 0 || c.eps > 1) throw ConfigError("audit.eps", "must lie in (0, 1]");
      if (!c.seed && (stochastic(c.x) || stochastic(c.y))) throw ConfigError("experiment.seed", "required by a random generator");
      break;
  }
}

bool RunReport::ok() const {
  return !aborted && std::all_of(parts.begin(), parts.end(), [](const PartResult& p) { return p.ok; });
}

HarnessInput make_harness_input(const Rational& s, const Rational& t, int level, std::uint64_t seed,
                                const Rational& eps) {
  if (level < 2) throw ArgumentError("harness level must be at least 2");
  HarnessInput in;
  in.s = s;
  in.t = t;
  in.eps = to_double(eps);
  in.family_size = static_cast<double>(nominal_family_size(level, s));
  CubeSet p = (s == Rational(1) && t == Rational(1))
                  ? line_set(level, Dyadic{1}, Dyadic{})
                  : embed(random_tree_set(level - 1, t, mix_seed(seed, 0x7472)).set, DyadicCube{1, 0, 1});
  auto cert = certify_with_min_constant(p, t);
  in.cubes = CertifiedCubeSet{std::move(p), std::move(cert)};
  const auto cubes = in.cubes.set.cubes();
  in.families.resize(cubes.size());
  parallel_chunks(cubes.size(), worker_count(), [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t k = begin; k < end; ++k) in.families[k] = tube_family_through_cube(cubes[k], s, seed);
  });
  return in;
}

ExponentFit fit_incidence_exponent(const std::vector<IncidenceRecord>& records) {
  if (records.size() < 2) throw ArgumentError("exponent fit needs at least 2 levels");
  double snl = 0, snn = 0, sn = 0, sl = 0;
  for (const auto& r : records) {
    const double l = std::log2(static_cast<double>(r.union_size) / r.family_size);
    snl += r.level * l;
    snn += static_cast<double>(r.level) * r.level;
    sn += r.level;
    sl += l;
  }
  const double k = static_cast<double>(records.size());
  ExponentFit fit;
  fit.through_origin = snl / snn;
  fit.free_slope = (snl - sn * sl / k) / (snn - sn * sn / k);
  fit.intercept = (sl - fit.free_slope * sn) / k;
  return fit;
}

RunReport run(const ExperimentConfig& c) {
  validate_config(c);
  if (c.output_dir.empty()) throw ConfigError("experiment.output", "no output directory given");
  OutputDir out(c.output_dir);
  RunReport report;
  const auto started = utc_now();
  const auto t_run = std::chrono::steady_clock::now();
  json certificates = json::array();
  json failure;

  const auto attempt = [&](const std::string& name, auto&& body) {
    if (report.aborted) return;
    PartResult part;
    part.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body(part);
    } catch (const CertificationError& e) {
      part.ok = false;
      part.error = e.what();
      report.aborted = true;
      failure = {{"part", name}, {"error", e.what()}, {"certificate", to_json(e.certificate())}};
    } catch (const std::exception& e) {
      part.ok = false;
      part.error = e.what();
    }
    part.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.parts.push_back(std::move(part));
  };

  switch (c.kind) {
    case ExperimentKind::bounds_table:
      attempt("bounds-table", [&](PartResult& part) { run_bounds_table(c, out, part); });
      break;
    case ExperimentKind::projection_sweep: {
      ProjectionSummary summary;
      summary.csv << "level,x_count,empty,dim_x,dim_y,cert_s_x,cert_s_y,max_slope,argmax_x,bound_main,bound_osw1,"
                     "bound_osw2\n";
      for (int n : c.levels) {
        attempt("projection-n" + std::to_string(n),
                [&](PartResult& part) { run_projection_level(c, n, out, part, summary); });
      }
      attempt("projection-summary", [&](PartResult& part) { out.write("projection_summary.csv", summary.csv.str(), part); });
      certificates = std::move(summary.certificates);
      break;
    }
    case ExperimentKind::incidence_sweep: {
      std::ostringstream fits;
      fits << "s,t,level_lo,level_hi,exponent_fit,exponent_fit_free,exponent_target\n";
      for (std::size_t k = 0; k < c.pairs.size(); ++k) {
        attempt("incidence-" + to_string(c.pairs[k].first) + ":" + to_string(c.pairs[k].second),
                [&](PartResult& part) { run_incidence_pair(c, k, out, part, fits, certificates); });
      }
      attempt("incidence-fit", [&](PartResult& part) { out.write("incidence_fit.csv", fits.str(), part); });
      break;
    }
    case ExperimentKind::frostman_audit: {
      std::ostringstream csv;
      csv << "set,level,size,checker,s,C,verified,witness_scale,witness_count,witness_bound\n";
      for (int n : c.levels) {
        attempt("audit-n" + std::to_string(n), [&](PartResult& part) { run_audit_level(c, n, out, part, csv, certificates); });
      }
      attempt("audit-table", [&](PartResult& part) { out.write("audit.csv", csv.str(), part); });
      break;
    }
  }

  json manifest{
      {"tool", "radial-lab"},
      {"kind", to_string(c.kind)},
      {"config_hash", "fnv1a64:" + fnv1a_hex(c.canonical)},
      {"config", c.canonical},
      {"levels", c.levels},
      {"started_at", started},
      {"threads", worker_count()},
      {"versions",
       {{"radial_lab", RADIAL_LAB_VERSION},
        {"boost", BOOST_LIB_VERSION},
        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                              "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
        {"compiler", __VERSION__}}},
      {"certificates", certificates},
      {"status", report.aborted ? "aborted" : (report.ok() ? "ok" : "failed")},
  };
  if (c.seed) manifest["seed"] = *c.seed;
  if (!failure.is_null()) {
    manifest["failure"] = failure;
    std::ofstream(out.path() / "failed_certificate.json") << failure.dump(2) << '\n';
  }
  json parts = json::array();
  for (const auto& p : report.parts) {
    json outputs = json::array();
    for (const auto& f : p.outputs) {
      const auto d = out.digests().find(f);
      outputs.push_back(d == out.digests().end() ? json{{"file", f}} : json{{"file", f}, {"fnv1a64", d->second}});
    }
    parts.push_back({{"name", p.name}, {"ok", p.ok}, {"wall_seconds", p.wall_seconds}, {"outputs", outputs}});
    if (!p.ok) parts.back()["error"] = p.error;
  }
  manifest["parts"] = parts;
  manifest["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_run).count();
  std::ofstream(out.path() / "manifest.json") << manifest.dump(2) << '\n';
  return report;
}

}  // namespace radial_lab
