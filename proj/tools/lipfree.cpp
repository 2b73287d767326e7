// Command-line front end: run, probe, validate, norm.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lipfree/free_norm.hpp"
#include "lipfree/io.hpp"
#include "lipfree/pipeline.hpp"

namespace {

using namespace lipfree;

struct Common {
  std::string config_path;
  std::string format = "text";
  std::string out;
  std::optional<double> eps;
  std::optional<int> level;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> ambient;
  std::optional<std::size_t> n;
  std::optional<std::string> space_path;
  std::vector<std::size_t> k_mask;
  bool skip_interior = false;
  bool skip_operator_norm = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--eps", c.eps, "approximation parameter, inside (0, 1/13)");
  cmd->add_option("--level", c.level, "Cantor level");
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--ambient", c.ambient, "grid | random | composite | file");
  cmd->add_option("-n,--points", c.n, "ambient size");
  cmd->add_option("--space", c.space_path, "ambient space file (implies --ambient file)")->check(CLI::ExistingFile);
  cmd->add_option("--k", c.k_mask, "indices of K in the ambient space");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--format", c.format, "output format")->check(CLI::IsMember({"text", "structured"}));
  cmd->add_flag("--skip-interior", c.skip_interior, "skip the interior-bound certificates");
  cmd->add_flag("--skip-operator-norm", c.skip_operator_norm, "skip the operator-norm estimate");
}

PipelineConfig make_config(const Common& c) {
  PipelineConfig cfg = c.config_path.empty() ? PipelineConfig{} : PipelineConfig::from_json(read_json_file(c.config_path));
  if (c.eps) cfg.eps = *c.eps;
  if (c.level) cfg.level = *c.level;
  if (c.seed) cfg.random_seed = *c.seed;
  if (c.ambient) cfg.ambient.kind = ambient_kind_from_string(*c.ambient);
  if (c.n) cfg.ambient.n = *c.n;
  if (c.space_path) {
    cfg.ambient.kind = AmbientKind::kFile;
    cfg.ambient.path = *c.space_path;
  }
  if (!c.k_mask.empty()) cfg.ambient.k_mask = c.k_mask;
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (c.skip_interior) cfg.check_interior_bounds = false;
  if (c.skip_operator_norm) cfg.check_operator_norm = false;
  cfg.apply_environment();
  return cfg;
}

int cmd_run(const Common& c) {
  const PipelineConfig cfg = make_config(c);
  const PipelineOutcome outcome = run_pipeline(cfg);
  if (c.format == "structured") {
    Json j = to_json(outcome.report);
    j["failed_stage"] = outcome.failed_stage;
    j["error"] = outcome.error;
    j["verdict"] = outcome.verdict() ? "pass" : "fail";
    if (auto rho = outcome.final_rho()) j["rho"] = *rho;
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << outcome.report.to_table();
    if (!outcome.failed_stage.empty()) {
      std::cout << "stopped at stage '" << outcome.failed_stage << "': " << outcome.error << '\n';
    }
    if (auto rho = outcome.final_rho()) {
      std::printf("rho_T(d~, d) = %.9g  (13 eps = %.9g)\n", *rho, 13.0 * cfg.eps);
    }
  }
  return outcome.verdict() ? 0 : 1;
}

int cmd_probe(const Common& c, std::size_t trials, std::vector<double> eps_grid) {
  PipelineConfig cfg = make_config(c);
  if (eps_grid.empty()) eps_grid = c.eps ? std::vector<double>{*c.eps} : kDefaultProbeEps;
  for (double e : eps_grid) {
    PipelineConfig check = cfg;
    check.eps = e;
    check.validate();
  }
  const ProbeSummary summary = density_probe(cfg, trials, eps_grid);
  if (c.format == "structured") {
    std::cout << summary.to_json().dump(2) << '\n';
  } else {
    std::cout << summary.to_table();
  }
  if (!cfg.output_dir.empty()) {
    save_text_atomic(std::filesystem::path(cfg.output_dir) / "probe.json", summary.to_json().dump(2) + "\n");
  }
  return summary.all_pass ? 0 : 1;
}

int cmd_validate(const std::string& path, const std::string& format) {
  const LoadedSpace loaded = load_space(path);
  const ValidationReport& v = loaded.validation;
  if (format == "structured") {
    Json tri = Json::array();
    for (const auto& t : v.triangle_violations) {
      tri.push_back({{"from", loaded.space.label(t.from)},
                     {"to", loaded.space.label(t.to)},
                     {"via", loaded.space.label(t.via)},
                     {"excess", t.excess}});
    }
    std::cout << Json{{"points", loaded.space.size()},
                      {"metric", v.is_metric()},
                      {"pseudometric", v.is_pseudometric()},
                      {"nonpositive_pairs", v.nonpositive_pairs.size()},
                      {"triangle_violations", std::move(tri)}}
                     .dump(2)
              << '\n';
  } else {
    std::printf("%zu points: %s\n", loaded.space.size(),
                v.is_metric() ? "metric" : (v.is_pseudometric() ? "pseudometric" : "not a metric"));
    if (!v.nonpositive_pairs.empty()) std::printf("  %zu distinct pairs at distance 0\n", v.nonpositive_pairs.size());
    for (const auto& t : v.triangle_violations) {
      std::printf("  d(%s,%s) exceeds the path via %s by %.3g\n", loaded.space.label(t.from).c_str(),
                  loaded.space.label(t.to).c_str(), loaded.space.label(t.via).c_str(), t.excess);
    }
  }
  return v.is_metric() ? 0 : 1;
}

int cmd_norm(const std::string& space_path, const std::string& measure_path, const std::string& format) {
  const LoadedSpace loaded = load_space(space_path);
  const SignedMeasure mu = measure_from_json(loaded.space, read_json_file(measure_path));
  const FreeNormResult r = free_space_norm(loaded.space, mu);
  const DualWitness w = dual_witness(loaded.space, mu, r.plan);
  if (format == "structured") {
    std::cout << Json{{"norm", r.value}, {"dual_pairing", w.pairing}, {"plan", plan_to_json(loaded.space, r.plan)}}
                     .dump(2)
              << '\n';
  } else {
    std::printf("norm %.17g\ndual %.17g\n", r.value, w.pairing);
    for (const Flow& f : r.plan.flows) {
      std::printf("  %s -> %s  %.17g\n", loaded.space.label(f.from).c_str(), loaded.space.label(f.to).c_str(),
                  f.mass);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified metric approximation on finite spaces"};
  app.require_subcommand(1);

  Common run_opts;
  CLI::App* run = app.add_subcommand("run", "run the full pipeline once");
  add_common(run, run_opts);

  Common probe_opts;
  std::size_t trials = 5;
  std::vector<double> eps_grid;
  CLI::App* probe = app.add_subcommand("probe", "repeat the pipeline over seeds and eps values");
  add_common(probe, probe_opts);
  probe->add_option("--trials", trials, "number of seeds");
  probe->add_option("--eps-grid", eps_grid, "eps values (default 0.01 0.03 0.05 0.07)")->delimiter(',');

  std::string validate_path;
  std::string validate_format = "text";
  CLI::App* validate = app.add_subcommand("validate", "check the metric axioms of a space file");
  validate->add_option("space", validate_path, "matrix or JSON space")->required()->check(CLI::ExistingFile);
  validate->add_option("--format", validate_format)->check(CLI::IsMember({"text", "structured"}));

  std::string norm_space;
  std::string norm_measure;
  std::string norm_format = "text";
  CLI::App* norm = app.add_subcommand("norm", "free-space norm of a zero-sum measure");
  norm->add_option("space", norm_space, "matrix or JSON space")->required()->check(CLI::ExistingFile);
  norm->add_option("measure", norm_measure, "JSON list of {point, weight}")->required()->check(CLI::ExistingFile);
  norm->add_option("--format", norm_format)->check(CLI::IsMember({"text", "structured"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*probe) return cmd_probe(probe_opts, trials, eps_grid);
    if (*validate) return cmd_validate(validate_path, validate_format);
    if (*norm) return cmd_norm(norm_space, norm_measure, norm_format);
  } catch (const lipfree::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
