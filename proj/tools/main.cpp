// radial-lab: command line front end for the experiment runner.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "radial_lab/experiment.hpp"
#include "radial_lab/generators.hpp"
#include "radial_lab/set_io.hpp"

namespace rl = radial_lab;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> level;
};

void add_common(CLI::App* cmd, Common& c, bool config_required) {
  auto* opt = cmd->add_option("--config", c.config, "experiment configuration (INI)")->check(CLI::ExistingFile);
  if (config_required) opt->required();
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--seed", c.seed, "seed override");
  cmd->add_option("--level", c.level, "run a single level");
}

rl::ExperimentConfig configure(const Common& c, rl::ExperimentKind kind) {
  rl::ExperimentConfig cfg;
  if (!c.config.empty()) {
    cfg = rl::load_config(c.config);
    if (cfg.kind != kind) {
      throw rl::ConfigError("experiment.kind", "this subcommand runs " + rl::to_string(kind) + ", config says " +
                                                   rl::to_string(cfg.kind));
    }
  } else {
    cfg.kind = kind;
  }
  if (c.seed) {
    cfg.seed = c.seed;
    cfg.canonical += "cli.seed=" + std::to_string(*c.seed) + "\n";
  }
  if (c.level) {
    cfg.levels = {*c.level};
    cfg.canonical += "cli.level=" + std::to_string(*c.level) + "\n";
  }
  if (!c.out.empty()) cfg.output_dir = c.out;
  rl::validate_config(cfg);
  return cfg;
}

int execute(const rl::ExperimentConfig& cfg) {
  const auto report = rl::run(cfg);
  for (const auto& p : report.parts) {
    std::fprintf(stderr, "%-28s %s  %.2fs%s%s\n", p.name.c_str(), p.ok ? "ok  " : "FAIL", p.wall_seconds,
                 p.ok ? "" : "  ", p.error.c_str());
  }
  if (report.aborted) std::fprintf(stderr, "run aborted: see failed_certificate.json\n");
  std::fprintf(stderr, "outputs in %s\n", cfg.output_dir.string().c_str());
  return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dyadic radial projection and incidence experiments"};
  app.require_subcommand(1);

  Common bounds, project, incidence, audit;
  double step = 0.05;
  auto* bounds_cmd = app.add_subcommand("bounds-table", "grid of the projection bounds and dominance flags");
  add_common(bounds_cmd, bounds, false);
  bounds_cmd->add_option("--step", step, "grid step (1/k)");

  add_common(app.add_subcommand("project", "radial projection sweep (projection-sweep config)"), project, true);
  add_common(app.add_subcommand("incidence", "tube/cube incidence sweep (incidence-sweep config)"), incidence, true);

  std::string audit_input;
  auto* audit_cmd = app.add_subcommand("audit", "Frostman certificates of the input sets");
  add_common(audit_cmd, audit, false);
  audit_cmd->add_option("--input", audit_input, "audit one DSET1 file instead of a config")->check(CLI::ExistingFile);

  rl::GeneratorSpec spec;
  std::string gen_kind = "full_grid", digits_x, digits_y, slope = "1/2", intercept = "1/4", target = "1";
  std::string gen_out;
  std::optional<std::uint64_t> gen_seed;
  auto* gen_cmd = app.add_subcommand("gen", "generate a set and write it as DSET1");
  gen_cmd->add_option("--kind", gen_kind, "cantor_product | line_set | random_tree | full_grid | graph_set");
  gen_cmd->add_option("--level", spec.level, "level n")->required();
  gen_cmd->add_option("--seed", gen_seed, "seed (random_tree, graph_set)");
  gen_cmd->add_option("--out", gen_out, "output file (default stdout)");
  gen_cmd->add_option("--digits-x", digits_x, "comma separated base-4 digits");
  gen_cmd->add_option("--digits-y", digits_y, "comma separated base-4 digits");
  gen_cmd->add_option("--slope", slope, "dyadic slope");
  gen_cmd->add_option("--intercept", intercept, "dyadic intercept");
  gen_cmd->add_option("--target", target, "random_tree exponent");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bounds_cmd) {
      auto cfg = configure(bounds, rl::ExperimentKind::bounds_table);
      if (bounds.config.empty()) {
        cfg.grid_step = step;
        cfg.canonical = "bounds.step=" + std::to_string(step) + "\nexperiment.kind=bounds-table\n";
      }
      if (cfg.output_dir.empty()) cfg.output_dir = "bounds-out";
      return execute(cfg);
    }
    if (app.got_subcommand("project")) return execute(configure(project, rl::ExperimentKind::projection_sweep));
    if (app.got_subcommand("incidence")) return execute(configure(incidence, rl::ExperimentKind::incidence_sweep));
    if (*audit_cmd) {
      if (audit_input.empty() == audit.config.empty()) {
        std::cerr << "audit: give exactly one of --config or --input\n";
        return 2;
      }
      if (!audit_input.empty()) {
        std::istringstream ini("[experiment]\nkind = frostman-audit\nlevels = " +
                               std::to_string(rl::load_cube_set(audit_input).level()) + "\n[x]\nfile = " + audit_input + "\n");
        auto cfg = rl::parse_config(ini);
        if (audit.seed) cfg.seed = audit.seed;
        cfg.output_dir = audit.out.empty() ? "audit-out" : audit.out;
        return execute(cfg);
      }
      return execute(configure(audit, rl::ExperimentKind::frostman_audit));
    }
    if (*gen_cmd) {
      spec.kind = rl::parse_generator_kind(gen_kind);
      const auto digits = [](const std::string& text) {
        std::vector<int> out;
        std::stringstream in(text);
        for (std::string d; std::getline(in, d, ',');) out.push_back(std::stoi(d));
        return out;
      };
      spec.digits_x = digits(digits_x);
      spec.digits_y = digits(digits_y);
      spec.slope = rl::Dyadic::parse(slope);
      spec.intercept = rl::Dyadic::parse(intercept);
      spec.target = rl::parse_rational(target);
      if (gen_seed) {
        spec.seed = *gen_seed;
        spec.has_seed = true;
      }
      const auto set = rl::generate(spec);
      if (gen_out.empty()) {
        rl::write_cube_set(std::cout, set);
      } else {
        rl::save_set(gen_out, set);
      }
      return 0;
    }
  } catch (const rl::ConfigError& e) {
    std::cerr << "config error at " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
