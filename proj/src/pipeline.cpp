#include "lipfree/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace lipfree {

namespace {

constexpr std::size_t kMaxAmbientPoints = 5000;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::size_t axiom_failures(const ValidationReport& vr) {
  return vr.triangle_violations.size() + vr.asymmetric_pairs.size() + vr.nonzero_diagonal.size() +
         vr.nonpositive_pairs.size();
}

FiniteMetricSpace line_space(const std::vector<double>& coords, std::vector<std::string> labels) {
  const std::size_t n = coords.size();
  DistanceMatrix d(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d.set_symmetric(i, j, std::abs(coords[i] - coords[j]));
  return FiniteMetricSpace(std::move(d), std::move(labels));
}

SubsetMask default_k(const PipelineConfig& cfg, std::size_t n) {
  if (cfg.ambient.k_mask) return SubsetMask(n, *cfg.ambient.k_mask);
  if (cfg.ambient.kind == AmbientKind::kFile) {
    throw ConfigError("an ambient space read from a file needs an explicit k_mask");
  }
  const std::size_t count = std::min(n, std::size_t{1} << cfg.level);
  std::vector<std::size_t> idx(count);
  for (std::size_t i = 0; i < count; ++i) idx[i] = i;
  return SubsetMask(n, std::move(idx));
}

template <typename T>
void read_opt(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

const char* to_string(AmbientKind kind) {
  switch (kind) {
    case AmbientKind::kGrid: return "grid";
    case AmbientKind::kRandom: return "random";
    case AmbientKind::kComposite: return "composite";
    case AmbientKind::kFile: return "file";
  }
  return "?";
}

AmbientKind ambient_kind_from_string(const std::string& s) {
  if (s == "grid") return AmbientKind::kGrid;
  if (s == "random") return AmbientKind::kRandom;
  if (s == "composite") return AmbientKind::kComposite;
  if (s == "file") return AmbientKind::kFile;
  throw ConfigError("unknown ambient kind '" + s + "' (grid, random, composite, file)");
}

void PipelineConfig::validate() const {
  if (!(eps > 0.0 && eps < kMaxExtensionEps)) {
    throw ConfigError("eps = " + fmt(eps) + " must lie strictly inside (0, 1/13)");
  }
  if (level < 1 || level > kMaxCantorLevel) {
    throw ConfigError("level " + std::to_string(level) + " outside [1, " + std::to_string(kMaxCantorLevel) + "]");
  }
  if (ambient.kind != AmbientKind::kFile && (ambient.n < 2 || ambient.n > kMaxAmbientPoints)) {
    throw ConfigError("ambient size " + std::to_string(ambient.n) + " outside [2, " +
                      std::to_string(kMaxAmbientPoints) + "]");
  }
  if (ambient.kind == AmbientKind::kComposite && ambient.n < (std::size_t{1} << level) + 2) {
    throw ConfigError("composite ambient needs n >= 2^level + 2 (n = " + std::to_string(ambient.n) +
                      ", level " + std::to_string(level) + ")");
  }
  if (ambient.kind == AmbientKind::kFile && ambient.path.empty()) throw ConfigError("file ambient needs a path");
  if (ambient.kind == AmbientKind::kFile && !ambient.k_mask) {
    throw ConfigError("file ambient needs a k_mask");
  }
  if (!(ambient.length > 0.0)) throw ConfigError("grid length must be positive");
  if (!(ambient.cantor_scale > 0.0)) throw ConfigError("cantor_scale must be positive");
  if (!(ambient.weight_min > 0.0 && ambient.weight_min <= ambient.weight_max)) {
    throw ConfigError("random weights need 0 < weight_min <= weight_max");
  }
  if (seed.kind != "cantor" && seed.kind != "file") throw ConfigError("seed kind must be 'cantor' or 'file'");
  if (seed.kind == "file" && seed.path.empty()) throw ConfigError("file seed needs a path");
  if (seed.kind == "cantor" && (seed.level < 0 || seed.level > kMaxCantorLevel)) {
    throw ConfigError("seed level out of range");
  }
}

void PipelineConfig::apply_environment() {
  if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) output_dir = dir;
}

PipelineConfig PipelineConfig::from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  PipelineConfig cfg;
  if (j.contains("ambient")) {
    const Json& a = j.at("ambient");
    if (!a.is_object()) throw ConfigError("config field 'ambient' must be an object");
    std::string kind = to_string(cfg.ambient.kind);
    read_opt(a, "kind", kind);
    cfg.ambient.kind = ambient_kind_from_string(kind);
    read_opt(a, "n", cfg.ambient.n);
    read_opt(a, "length", cfg.ambient.length);
    read_opt(a, "cantor_offset", cfg.ambient.cantor_offset);
    read_opt(a, "cantor_scale", cfg.ambient.cantor_scale);
    read_opt(a, "weight_min", cfg.ambient.weight_min);
    read_opt(a, "weight_max", cfg.ambient.weight_max);
    read_opt(a, "path", cfg.ambient.path);
    if (a.contains("k_mask")) {
      std::vector<std::size_t> mask;
      read_opt(a, "k_mask", mask);
      cfg.ambient.k_mask = std::move(mask);
    }
  }
  read_opt(j, "level", cfg.level);
  read_opt(j, "eps", cfg.eps);
  if (j.contains("seed_metric")) {
    const Json& s = j.at("seed_metric");
    read_opt(s, "kind", cfg.seed.kind);
    read_opt(s, "level", cfg.seed.level);
    read_opt(s, "path", cfg.seed.path);
  }
  read_opt(j, "output_dir", cfg.output_dir);
  if (j.contains("checks")) {
    const Json& c = j.at("checks");
    read_opt(c, "interior_bounds", cfg.check_interior_bounds);
    read_opt(c, "operator_norm", cfg.check_operator_norm);
  }
  read_opt(j, "interior_samples", cfg.interior_samples);
  read_opt(j, "operator_norm_samples", cfg.operator_norm_samples);
  read_opt(j, "random_seed", cfg.random_seed);
  return cfg;
}

Json PipelineConfig::to_json() const {
  Json a{{"kind", lipfree::to_string(ambient.kind)},
         {"n", ambient.n},
         {"length", ambient.length},
         {"cantor_offset", ambient.cantor_offset},
         {"cantor_scale", ambient.cantor_scale},
         {"weight_min", ambient.weight_min},
         {"weight_max", ambient.weight_max}};
  if (!ambient.path.empty()) a["path"] = ambient.path;
  if (ambient.k_mask) a["k_mask"] = *ambient.k_mask;
  Json s{{"kind", seed.kind}, {"level", seed.level}};
  if (!seed.path.empty()) s["path"] = seed.path;
  return Json{{"ambient", std::move(a)},
              {"level", level},
              {"eps", eps},
              {"seed_metric", std::move(s)},
              {"output_dir", output_dir},
              {"checks", {{"interior_bounds", check_interior_bounds}, {"operator_norm", check_operator_norm}}},
              {"interior_samples", interior_samples},
              {"operator_norm_samples", operator_norm_samples},
              {"random_seed", random_seed}};
}

FiniteMetricSpace grid_space(std::size_t n, double length) {
  if (n < 2) throw StructuralError("a grid needs at least two points");
  std::vector<double> coords(n);
  std::vector<std::string> labels(n);
  for (std::size_t k = 0; k < n; ++k) {
    coords[k] = length * static_cast<double>(k) / static_cast<double>(n - 1);
    labels[k] = "g" + std::to_string(k);
  }
  return line_space(coords, std::move(labels));
}

FiniteMetricSpace random_shortest_path_space(std::size_t n, double weight_min, double weight_max,
                                             std::mt19937_64& rng) {
  if (n == 0) throw StructuralError("random space needs at least one point");
  std::uniform_real_distribution<double> weight(weight_min, weight_max);
  DistanceMatrix d(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d.set_symmetric(i, j, weight(rng));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = "r" + std::to_string(i);
  return FiniteMetricSpace(std::move(d), std::move(labels));
}

AmbientInstance composite_space(std::size_t n, int level, double length, double offset, double scale) {
  CantorModel model = build_cantor_model(level);
  const std::size_t nk = model.size();
  if (n < nk + 2) throw StructuralError("composite space needs n >= 2^level + 2");
  const std::size_t ng = n - nk;
  std::vector<double> coords;
  std::vector<std::string> labels;
  coords.reserve(n);
  labels.reserve(n);
  for (std::size_t k = 0; k < ng; ++k) {
    coords.push_back(length * static_cast<double>(k) / static_cast<double>(ng - 1));
    labels.push_back("g" + std::to_string(k));
  }
  std::vector<std::size_t> k_idx;
  for (std::size_t i = 0; i < nk; ++i) {
    k_idx.push_back(coords.size());
    coords.push_back(offset + scale * model.coordinates[i]);
    labels.push_back("k" + model.address_string(i));
  }
  FiniteMetricSpace space = line_space(coords, std::move(labels));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!(space(i, j) > kMetricTolerance)) {
        throw ConstructionError("composite points " + space.label(i) + " and " + space.label(j) + " coincide");
      }
  return AmbientInstance{std::move(space), SubsetMask(n, std::move(k_idx)), std::move(model)};
}

AmbientInstance make_ambient(const PipelineConfig& cfg) {
  const AmbientSpec& a = cfg.ambient;
  switch (a.kind) {
    case AmbientKind::kComposite:
      return composite_space(a.n, cfg.level, a.length, a.cantor_offset, a.cantor_scale);
    case AmbientKind::kGrid: {
      FiniteMetricSpace s = grid_space(a.n, a.length);
      SubsetMask k = default_k(cfg, s.size());
      return AmbientInstance{std::move(s), std::move(k), std::nullopt};
    }
    case AmbientKind::kRandom: {
      std::mt19937_64 rng(cfg.random_seed);
      FiniteMetricSpace s = random_shortest_path_space(a.n, a.weight_min, a.weight_max, rng);
      SubsetMask k = default_k(cfg, s.size());
      return AmbientInstance{std::move(s), std::move(k), std::nullopt};
    }
    case AmbientKind::kFile: {
      LoadedSpace loaded = load_space(a.path);
      SubsetMask k = default_k(cfg, loaded.space.size());
      return AmbientInstance{std::move(loaded.space), std::move(k), std::nullopt};
    }
  }
  throw ConfigError("unknown ambient kind");
}

std::optional<double> PipelineOutcome::final_rho() const {
  if (!artifacts.extension || !artifacts.ambient) return std::nullopt;
  return rho_distance(artifacts.extension->tilde_d.dist(), artifacts.ambient->space.dist()).value;
}

PipelineOutcome run_pipeline(const PipelineConfig& cfg) {
  PipelineOutcome out;
  CertificateReport& report = out.report;
  PipelineArtifacts& art = out.artifacts;
  std::string stage;

  try {
    stage = "config";
    cfg.validate();
    const double eps = cfg.eps;

    stage = "ambient";
    art.ambient = make_ambient(cfg);
    const FiniteMetricSpace& ambient = art.ambient->space;
    const SubsetMask& k = art.ambient->k;
    const ValidationReport av = validate_metric(ambient);
    report.add("ambient_metric_validity", stage, static_cast<double>(axiom_failures(av)), 0.0, Relation::kEqual,
               std::to_string(ambient.size()) + " points, |K| = " + std::to_string(k.size()));
    if (!av.is_metric()) throw PreconditionError("ambient matrix is not a metric");

    stage = "partition";
    const FiniteMetricSpace k_space = restrict(ambient, k);
    const Partition partition = art.ambient->k_model ? partition_by_diameter(k_space, eps, *art.ambient->k_model)
                                                     : partition_by_diameter(k_space, eps);

    stage = "build_dK";
    const FiniteMetricSpace seed = [&] {
      if (cfg.seed.kind == "file") return load_space(cfg.seed.path).space;
      return build_cantor_model(cfg.seed.level > 0 ? cfg.seed.level : cfg.level).space();
    }();
    art.dk = build_dK(k_space, partition, seed, eps);

    stage = "certify_dK";
    const CertificateReport dk_report = certify_partition_metric(*art.dk, k_space, eps);
    report.append(dk_report);
    if (!dk_report.verdict()) throw PreconditionError("d_K certificates failed");

    stage = "build_dC";
    art.dc = build_dC(ambient, k, *art.dk, eps);
    const GluedMetric& g = *art.dc;
    {
      SubsetMask k_in_c(g.c.size(), [&] {
        std::vector<std::size_t> pos;
        for (std::size_t x : k.members()) pos.push_back(g.c.position_of(x));
        return pos;
      }());
      const MetricDistance gap = sup_norm_difference(restrict(g.space.dist(), k_in_c), art.dk->space.dist());
      report.add("dC_extends_dK", stage, gap.value, 0.0, Relation::kEqual, "d_C on K^2 against d_K, bit-exact");
    }

    stage = "certify_dC";
    const CertificateReport dc_report = certify_dC(g, ambient);
    report.append(dc_report);
    if (!dc_report.verdict()) throw PreconditionError("d_C certificates failed");

    stage = "dugundji";
    double reach = 0.0;
    for (std::size_t x = 0; x < ambient.size(); ++x) reach = std::max(reach, point_set_distance(ambient, x, g.c));
    report.add("distance_to_C", stage, reach, eps, Relation::kLessEqual, "max_x d(x, C)");
    art.system = build_dugundji_system(ambient, g.c, eps);

    stage = "extension";
    try {
      art.extension = build_tilde_d(*art.system, g.space);
    } catch (const CertificateFailure& f) {
      report.append(f.report());
      throw;
    }
    report.append(art.extension->certificates);
    {
      const MetricDistance gap = sup_norm_difference(restrict(art.extension->tilde_d.dist(), k), art.dk->space.dist());
      report.add("tilde_extends_dK", stage, gap.value, 0.0, Relation::kEqual, "d~ on K^2 against d_K, bit-exact");
    }

    if (cfg.check_interior_bounds) {
      stage = "interior_bounds";
      report.append(certify_interior_bounds(*art.system, g.space, cfg.interior_samples, cfg.random_seed + 1));
    }

    if (cfg.check_operator_norm) {
      stage = "operator_norm";
      art.operator_norm =
          extension_operator_norm(*art.extension, *art.system, g.space, cfg.operator_norm_samples, cfg.random_seed + 2);
      const std::string detail = std::to_string(art.operator_norm->functions) + " functions";
      report.add("operator_norm_upper", stage, art.operator_norm->value, 1.0, Relation::kLessEqual, detail);
      if (g.c.size() >= 2) {
        report.add("operator_norm_lower", stage, art.operator_norm->value, 1.0, Relation::kGreaterEqual, detail);
      } else {
        report.add_vacuous("operator_norm_lower", stage, 1.0, Relation::kGreaterEqual, "|C| = 1");
      }
    }

    stage = "final";
    const MetricDistance rho = rho_distance(art.extension->tilde_d.dist(), ambient.dist());
    report.add("final_rho_bound", stage, rho.value, 13.0 * eps, Relation::kLessEqual,
               "rho_T(d~, d) at " + describe_pair(ambient, rho.witness.i, rho.witness.j));
    const double glue_rho = rho_distance(g.space.dist(), restrict(ambient.dist(), g.c)).value;
    report.add("budget_glue_share", stage, glue_rho / eps, 1.0, Relation::kLessEqual, "rho_C(d_C, d) / eps");
    report.add("budget_total_share", stage, rho.value / eps, 13.0, Relation::kLessEqual, "rho_T(d~, d) / eps");
  } catch (const std::exception& e) {
    out.failed_stage = stage;
    out.error = e.what();
    report.add("stage_completed", stage, 0.0, 1.0, Relation::kEqual, e.what());
  }

  if (!cfg.output_dir.empty()) {
    try {
      persist_outcome(out, cfg.output_dir);
    } catch (const std::exception& e) {
      if (out.failed_stage.empty()) {
        out.failed_stage = "persist";
        out.error = e.what();
        report.add("stage_completed", "persist", 0.0, 1.0, Relation::kEqual, e.what());
      }
    }
  }
  return out;
}

void persist_outcome(const PipelineOutcome& outcome, const std::filesystem::path& dir) {
  const PipelineArtifacts& art = outcome.artifacts;
  if (art.ambient) {
    Json a = to_json(art.ambient->space);
    a["K"] = to_json(art.ambient->k);
    if (art.ambient->k_model) a["cantor"] = to_json(*art.ambient->k_model);
    save_text_atomic(dir / "ambient.json", a.dump(2) + "\n");
  }
  if (art.dk) save_text_atomic(dir / "dK.json", to_json(*art.dk).dump(2) + "\n");
  if (art.dc) save_text_atomic(dir / "dC.json", to_json(*art.dc).dump(2) + "\n");
  if (art.system) save_text_atomic(dir / "dugundji.json", to_json(*art.system).dump(2) + "\n");
  if (art.extension) save_text_atomic(dir / "extension.json", to_json(*art.extension).dump(2) + "\n");
  Json r = to_json(outcome.report);
  r["failed_stage"] = outcome.failed_stage;
  r["error"] = outcome.error;
  r["verdict"] = outcome.verdict() ? "pass" : "fail";
  save_text_atomic(dir / "report.json", r.dump(2) + "\n");
  save_text_atomic(dir / "report.txt", outcome.report.to_table());
}

std::string ProbeSummary::to_table() const {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%5s %20s %8s %14s %10s %6s\n", "trial", "seed", "eps", "rho", "rho/eps", "ok");
  os << line;
  for (const ProbeRow& r : rows) {
    std::snprintf(line, sizeof line, "%5zu %20llu %8.4g %14.9g %10.6g %6s", r.trial,
                  static_cast<unsigned long long>(r.seed), r.eps, r.rho.value_or(std::nan("")),
                  r.ratio.value_or(std::nan("")), r.verdict ? "PASS" : "FAIL");
    os << line;
    if (!r.error.empty()) os << "  " << r.error;
    os << '\n';
  }
  os << "max rho/eps: " << fmt(max_ratio) << " (bound 13)  verdict: " << (all_pass ? "PASS" : "FAIL") << '\n';
  return os.str();
}

Json ProbeSummary::to_json() const {
  Json rs = Json::array();
  for (const ProbeRow& r : rows) {
    Json row{{"trial", r.trial}, {"seed", r.seed}, {"eps", r.eps}, {"verdict", r.verdict}, {"error", r.error}};
    row["rho"] = r.rho ? Json(*r.rho) : Json(nullptr);
    row["ratio"] = r.ratio ? Json(*r.ratio) : Json(nullptr);
    rs.push_back(std::move(row));
  }
  return Json{{"rows", std::move(rs)}, {"max_ratio", max_ratio}, {"all_pass", all_pass}};
}

ProbeSummary density_probe(const PipelineConfig& cfg, std::size_t trials, const std::vector<double>& eps_grid) {
  if (trials == 0) throw ConfigError("density probe needs at least one trial");
  if (eps_grid.empty()) throw ConfigError("density probe needs at least one eps value");
  ProbeSummary summary;
  for (std::size_t t = 0; t < trials; ++t) {
    for (double eps : eps_grid) {
      PipelineConfig run = cfg;
      run.random_seed = cfg.random_seed + t;
      run.eps = eps;
      run.output_dir.clear();
      ProbeRow row;
      row.trial = t;
      row.seed = run.random_seed;
      row.eps = eps;
      const PipelineOutcome outcome = run_pipeline(run);
      row.verdict = outcome.verdict();
      row.error = outcome.failed_stage.empty() ? "" : outcome.failed_stage + ": " + outcome.error;
      row.rho = outcome.final_rho();
      if (row.rho) {
        row.ratio = *row.rho / eps;
        summary.max_ratio = std::max(summary.max_ratio, *row.ratio);
      }
      if (!row.verdict || !row.ratio || *row.ratio > 13.0 + kMetricTolerance / eps) summary.all_pass = false;
      summary.rows.push_back(std::move(row));
    }
  }
  return summary;
}

}  // namespace lipfree
