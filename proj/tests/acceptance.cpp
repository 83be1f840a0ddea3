// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Usage: radial_lab_acceptance [--work-dir DIR]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "radial_lab/bounds.hpp"
#include "radial_lab/experiment.hpp"
#include "radial_lab/frostman.hpp"
#include "radial_lab/generators.hpp"
#include "radial_lab/incidence.hpp"
#include "radial_lab/projection.hpp"

namespace fs = std::filesystem;
using namespace radial_lab;

namespace {

// Pinned tolerances and budgets.
constexpr double kBoundTol = 1e-12;
constexpr double kFixedPointTol = 1e-6;
constexpr double kBruteForceTol = 2e-3;
constexpr double kExponentSlack = 0.2;
constexpr double kFullGridSlopeTol = 0.05;
constexpr double kCollinearSlopeMax = 0.1;
constexpr double kCantorSlopeMin = 0.55;
constexpr double kOsw1SlopeMin = 0.5;
constexpr double kLargeIncidenceSeconds = 30.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

fs::path g_work = fs::temp_directory_path() / "radial_lab_acceptance";

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream cl(line);
    for (std::string c; std::getline(cl, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::runtime_error("missing column " + name);
  return static_cast<std::size_t>(it - header.begin());
}

ExperimentConfig config_from(const std::string& ini, const fs::path& out) {
  std::istringstream in(ini);
  auto c = parse_config(in);
  c.output_dir = out;
  return c;
}

// ------------------------------------------------------------------ 1

Outcome bound_algebra() {
  std::size_t checked = 0, bad = 0;
  const auto expect = [&](double got, double want) {
    ++checked;
    if (!(std::fabs(got - want) <= kBoundTol)) ++bad;
  };
  for (int i = 0; i <= 200; ++i) {
    const double dx = i / 100.0;
    for (int j = 0; j <= 200; ++j) {
      const double dy = j / 100.0;
      expect(bound_osw1(dx, dy), std::min({dx, dy, 1.0}));
      const auto o2 = bound_osw2(dx, dy);
      ++checked;
      if (o2.has_value() != (dy > 1.0)) ++bad;
      if (o2) expect(*o2, std::min(dx + dy - 1.0, 1.0));
      const auto m = bound_main(dx, dy);
      expect(m.value, std::min({(dx + dy) / 2.0, dy, 1.0}));
      if (m.hypothesis_violated != (i == 0)) ++bad;
      if (i >= 1 && i <= 100 && j >= 1) expect(incidence_exponent(dx, dy), std::min({dy, (dx + dy) / 2.0, 1.0}));
      if (i <= 100 && dx <= std::min(dy, 1.0)) expect(bound_orthogonal_exceptional(dy, dx), std::max(2.0 * dx - dy, 0.0));
      // Dominance flags on {0, ..., 1} x (0, 2].
      if (i <= 100 && j >= 1) {
        const auto r = dominance_report(dx, dy);
        ++checked;
        const bool strict1 = dx < std::min(dy, 1.0);
        const bool strict2 = dx + dy - 1.0 < 1.0;
        if (!r.main_ge_osw1 || r.main_gt_osw1 != strict1 || r.predicted_gt_osw1 != strict1) ++bad;
        if (r.osw2 && (!r.main_ge_osw2 || r.main_gt_osw2 != strict2)) ++bad;
      }
    }
  }
  return {bad == 0, std::to_string(checked) + " values, " + std::to_string(bad) + " mismatches, tol 1e-12"};
}

// ------------------------------------------------------------------ 2

// Least s_x on the 1e-3 grid for which some grid s_y satisfies both
// inequalities. Plain search, no use of monotonicity.
double brute_force_min_sx(double tx, double ty) {
  for (int a = 0; a <= 1000; ++a) {
    const double sx = a / 1000.0;
    for (int b = 0; b <= 1000; ++b) {
      const double sy = b / 1000.0;
      if (sy >= std::min({tx, (sx + tx) / 2.0, 1.0}) && sx >= std::min({ty, (sy + ty) / 2.0, 1.0})) return sx;
    }
  }
  return NAN;
}

Outcome coupled_system() {
  double worst_closed = 0.0, worst_brute = 0.0;
  for (int i = 1; i <= 50; ++i) {
    for (int j = 1; j <= 50; ++j) {
      const double tx = i / 50.0, ty = j / 50.0;
      const auto sol = coupled_fixed_point(tx, ty, kFixedPointTol / 10);
      worst_closed = std::max(worst_closed, std::fabs(sol.s_x - std::min({ty, (tx + ty) / 2.0, 1.0})));
      const double brute = brute_force_min_sx(tx, ty);
      worst_brute = std::isnan(brute) ? INFINITY : std::max(worst_brute, std::fabs(sol.s_x - brute));
    }
  }
  return {worst_closed <= kFixedPointTol && worst_brute <= kBruteForceTol,
          "2500 points, max |s_x - closed form| = " + fmt("%.2e", worst_closed) + ", max |s_x - grid search| = " +
              fmt("%.2e", worst_brute)};
}

// ------------------------------------------------------------------ 3

Outcome frostman_equivalence() {
  std::mt19937_64 rng(0xf7057);
  const std::vector<Rational> constants{Rational(1, 2), Rational(1), Rational(2), Rational(4), Rational(8), Rational(32)};
  int disagreements = 0, dyadic_pass = 0, ball_pass = 0;
  for (int k = 0; k < 200; ++k) {
    const int n = 1 + k % 6;
    const auto cells = oracle::random_cells(rng, n, 0.05 + 0.09 * (k % 10));
    const auto set = oracle::cube_set(n, cells);
    const Rational s(static_cast<std::int64_t>(rng() % 17), 8);
    const Rational C = constants[rng() % constants.size()];
    const bool dy = check_dyadic_frostman(set, s, C).verified;
    const bool ba = check_ball_frostman(set, s, C).verified;
    disagreements += dy != oracle::dyadic_frostman(n, cells, s, C);
    disagreements += ba != oracle::ball_frostman(n, cells, s, C);
    dyadic_pass += dy;
    ball_pass += ba;
  }
  return {disagreements == 0, "200 sets, " + std::to_string(disagreements) + " disagreements (verified: dyadic " +
                                  std::to_string(dyadic_pass) + ", ball " + std::to_string(ball_pass) + ")"};
}

// ------------------------------------------------------------------ 4

Outcome extraction_contract() {
  std::mt19937_64 rng(0xe8);
  int failures = 0;
  double min_t = 2.0;
  for (int k = 0; k < 50; ++k) {
    const int n = 8 + k % 5;
    const Rational eps = (k / 5) % 2 ? Rational(1, 2) : Rational(1, 4);
    CubeSet p;
    switch (k % 3) {
      case 0: p = random_tree_set(n, Rational(static_cast<std::int64_t>(1 + rng() % 7), 4), rng()).set; break;
      case 1: p = oracle::cube_set(n, oracle::random_cells(rng, n, 0.02)); break;
      default: p = embed(random_tree_set(n - 2, Rational(1), rng()).set, DyadicCube{2, 1, 2}); break;
    }
    const auto out = extract_uniform_subset(p, eps);
    const int delta = out.block;
    const int blocks = (n + delta - 1) / delta;
    const double floor = static_cast<double>(p.size()) * std::pow(4.0 * delta + 2.0, -blocks);
    const bool ok = out.certificate.verified && !out.subset.empty() &&
                    check_dyadic_frostman(out.subset, out.certificate.s, out.certificate.C).verified &&
                    out.certificate.C <= Rational(std::int64_t{1} << (2 * delta + 1)) &&
                    static_cast<double>(out.subset.size()) >= floor &&
                    std::all_of(out.subset.cubes().begin(), out.subset.cubes().end(),
                                [&](const DyadicCube& c) { return p.contains(c); });
    failures += !ok;
    min_t = std::min(min_t, to_double(out.certificate.s));
  }
  return {failures == 0, "50 inputs, " + std::to_string(failures) + " failures, min t_out " + fmt("%.3f", min_t)};
}

// ------------------------------------------------------------------ 5

Outcome incidence_equivalence() {
  std::mt19937_64 rng(0x1c);
  int mismatches = 0;
  for (int k = 0; k < 100; ++k) {
    const int n = 1 + k % 6;
    const auto p = oracle::cube_set(n, oracle::random_cells(rng, n, 0.1 + 0.05 * (k % 8)));
    const auto ts = oracle::tube_set(n, oracle::random_cells(rng, n, 0.1 + 0.05 * (k % 7)));
    const auto fast = count_incidences(p, ts);
    const auto slow = count_incidences_brute_force(p, ts);
    mismatches += fast.incidences != slow.incidences || fast.union_size != slow.union_size || fast.per_cube != slow.per_cube;
  }
  // n = 12 with 4096 random cubes and 4096 random tubes.
  const int n = 12;
  const std::uint32_t side = 1u << n;
  const auto draw = [&] {
    std::set<oracle::Cell> cells;
    while (cells.size() < 4096) cells.emplace(static_cast<std::uint32_t>(rng() % side), static_cast<std::uint32_t>(rng() % side));
    return std::vector<oracle::Cell>(cells.begin(), cells.end());
  };
  const auto p = oracle::cube_set(n, draw());
  const auto ts = oracle::tube_set(n, draw());
  const auto t0 = std::chrono::steady_clock::now();
  const auto rec = count_incidences(p, ts);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {mismatches == 0 && secs < kLargeIncidenceSeconds,
          "100 instances, " + std::to_string(mismatches) + " mismatches; n=12 |P|=|T|=4096: I=" +
              std::to_string(rec.incidences) + " in " + fmt("%.2f", secs) + " s (budget 30 s)"};
}

// ------------------------------------------------------------------ 6

Outcome incidence_exponent_fit() {
  const std::vector<std::pair<Rational, Rational>> pairs{
      {Rational(1), Rational(1)}, {Rational(1, 2), Rational(1, 2)}, {Rational(1, 2), Rational(1)}};
  bool pass = true;
  std::string detail;
  for (const auto& [s, t] : pairs) {
    std::vector<IncidenceRecord> records;
    for (int n = 8; n <= 12; ++n) records.push_back(renwang_harness(make_harness_input(s, t, n, 11)));
    const auto fit = fit_incidence_exponent(records);
    const double target = incidence_exponent(to_double(s), to_double(t));
    const bool ok = fit.through_origin >= target - kExponentSlack;
    pass = pass && ok;
    detail += "(" + to_string(s) + "," + to_string(t) + "): e=" + fmt("%.3f", fit.through_origin) + " (free " +
              fmt("%.3f", fit.free_slope) + ") vs " + fmt("%.3f", target - kExponentSlack) + "; ";
  }
  detail.resize(detail.size() - 2);
  return {pass, detail};
}

// ------------------------------------------------------------------ 7

Outcome projection_sanity() {
  const auto grid = CubeSet::full_grid(10);
  const std::vector<Point2> inside{Point2{Dyadic::from_ratio(3, 3), Dyadic::from_ratio(5, 4)}};
  const auto full = sup_radial_dimension(inside, grid, 4, 10, Dyadic::from_ratio(1, 4));

  const auto line = line_set(12, Dyadic{1}, Dyadic{});
  const std::vector<Point2> on_line{DyadicCube{3, 2, 2}.center()};
  const auto collinear = sup_radial_dimension(on_line, line, 4, 12, Dyadic::from_ratio(1, 2));

  if (!full.best || !collinear.best) return {false, "empty projection"};
  const bool ok = true && std::fabs(full.max_slope - 1.0) <= kFullGridSlopeTol &&
                  collinear.max_slope <= kCollinearSlopeMax;
  return {ok, "full grid (n=10) slope " + fmt("%.4f", full.max_slope) + " (1 +- 0.05), collinear (n=12) slope " +
                  fmt("%.4f", collinear.max_slope) + " (<= 0.1, bins " +
                  std::to_string(collinear.per_x[0].estimate->counts.front()) + " at m=4, " +
                  std::to_string(collinear.per_x[0].estimate->counts.back()) + " at m=12)"};
}

// ------------------------------------------------------------------ 8

const char* kCantorConfig = R"(
[experiment]
kind = projection-sweep
levels = 12
seed = 7
[projection]
precision_lo = 4
samples = 64
rho = 1/16
[x]
generator = cantor_product
digits_x = 1,2
digits_y = 1
[y]
generator = cantor_product
digits_x = 0,3
digits_y = 0,3
)";

Outcome cantor_projection() {
  const auto dir = g_work / "cantor";
  fs::remove_all(dir);
  const auto report = run(config_from(kCantorConfig, dir));
  if (!report.ok()) return {false, "run failed"};
  const auto rows = read_csv(dir / "projection_summary.csv");
  const double slope = std::stod(rows.at(1).at(column(rows[0], "max_slope")));
  const auto per_x = read_csv(dir / "projection_n12.csv");
  std::set<std::string> xs;
  for (std::size_t r = 1; r < per_x.size(); ++r) xs.insert(per_x[r].at(0));
  const auto x_count = xs.size();
  return {slope >= kCantorSlopeMin && slope >= kOsw1SlopeMin,
          "n=12, " + std::to_string(x_count) + " base points, max slope " + fmt("%.4f", slope) +
              " (>= 0.55 main bound - 0.2, >= 0.5 osw1)"};
}

// ------------------------------------------------------------------ 9

Outcome reproducibility() {
  const std::vector<std::pair<std::string, std::string>> configs{
      {"bounds", "[experiment]\nkind = bounds-table\n[bounds]\nstep = 1/20\n"},
      {"projection", kCantorConfig},
      {"incidence", "[experiment]\nkind = incidence-sweep\nlevels = 6,7,8\nseed = 11\n[incidence]\npairs = 1:1, 1/2:1/2, 1/2:1\n"},
      {"audit", "[experiment]\nkind = frostman-audit\nlevels = 8\nseed = 3\n[x]\ngenerator = random_tree\ntarget = 1\n"
                "[y]\ngenerator = cantor_product\ndigits_x = 0,3\ndigits_y = 0,3\n"},
  };
  int files = 0, differing = 0;
  for (const auto& [name, ini] : configs) {
    const auto a = g_work / ("rerun_" + name + "_a"), b = g_work / ("rerun_" + name + "_b");
    fs::remove_all(a);
    fs::remove_all(b);
    if (!run(config_from(ini, a)).ok() || !run(config_from(ini, b)).ok()) return {false, name + " run failed"};
    for (const auto& e : fs::directory_iterator(a)) {
      if (e.path().extension() != ".csv") continue;
      ++files;
      differing += slurp(e.path()) != slurp(b / e.path().filename());
    }
  }
  return {files > 0 && differing == 0,
          std::to_string(files) + " CSV files over 4 experiment kinds, " + std::to_string(differing) + " differ"};
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--work-dir") g_work = argv[i + 1];
  }
  fs::create_directories(g_work);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"bound algebra exactness", bound_algebra},
      {"coupled system fixed point", coupled_system},
      {"Frostman checkers vs enumeration", frostman_equivalence},
      {"uniform extraction contract", extraction_contract},
      {"incidence counting equivalence", incidence_equivalence},
      {"incidence exponent fit", incidence_exponent_fit},
      {"projection dimension sanity", projection_sanity},
      {"Cantor radial projection", cantor_projection},
      {"rerun reproducibility", reproducibility},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
