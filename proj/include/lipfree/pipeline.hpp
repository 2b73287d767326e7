#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lipfree/cantor.hpp"
#include "lipfree/certificate.hpp"
#include "lipfree/dugundji.hpp"
#include "lipfree/glue.hpp"
#include "lipfree/io.hpp"
#include "lipfree/metric_space.hpp"

namespace lipfree {

/// Environment variable that overrides PipelineConfig::output_dir.
inline constexpr const char* kOutputDirEnv = "LIPFREE_OUTPUT_DIR";

enum class AmbientKind { kGrid, kRandom, kComposite, kFile };

const char* to_string(AmbientKind kind);
AmbientKind ambient_kind_from_string(const std::string& s);

struct AmbientSpec {
  AmbientKind kind = AmbientKind::kComposite;
  std::size_t n = 100;
  /// Grid spans [0, length].
  double length = 1.0;
  /// Composite: the Cantor copy occupies [offset, offset + scale].
  double cantor_offset = 0.31415926535;
  double cantor_scale = 0.4;
  /// Random: edge weights drawn uniformly from [weight_min, weight_max]
  /// before shortest-path closure.
  double weight_min = 0.005;
  double weight_max = 0.3;
  /// File: matrix or JSON space.
  std::string path;
  /// K for non-composite sources. Defaults to the first min(2^level, n)
  /// points for grid and random; required for files.
  std::optional<std::vector<std::size_t>> k_mask;
};

struct SeedSpec {
  /// "cantor" (middle-thirds model) or "file".
  std::string kind = "cantor";
  /// Cantor seed level; 0 means the pipeline level.
  int level = 0;
  std::string path;
};

struct PipelineConfig {
  AmbientSpec ambient;
  int level = 4;
  double eps = 0.05;
  SeedSpec seed;
  std::string output_dir;
  bool check_interior_bounds = true;
  bool check_operator_norm = true;
  std::size_t interior_samples = 500;
  std::size_t operator_norm_samples = 1000;
  std::uint64_t random_seed = 1;

  /// Throws ConfigError; eps must lie strictly inside (0, 1/13).
  void validate() const;
  /// Replaces output_dir with $LIPFREE_OUTPUT_DIR when set.
  void apply_environment();

  static PipelineConfig from_json(const Json& j);
  Json to_json() const;
};

/// The ambient space with K marked. `k_model` is set when K carries Cantor
/// addresses (composite source), in K's member order.
struct AmbientInstance {
  FiniteMetricSpace space;
  SubsetMask k;
  std::optional<CantorModel> k_model;
};

/// n points k * length / (n - 1) on the line.
FiniteMetricSpace grid_space(std::size_t n, double length);
/// Complete graph with uniform random weights, closed under shortest paths.
FiniteMetricSpace random_shortest_path_space(std::size_t n, double weight_min, double weight_max,
                                             std::mt19937_64& rng);
/// A grid of n - 2^level points on [0, length] plus a copy of the level-`level`
/// Cantor model scaled by `scale` and shifted to `offset`, all on the line.
AmbientInstance composite_space(std::size_t n, int level, double length, double offset, double scale);

AmbientInstance make_ambient(const PipelineConfig& cfg);

struct PipelineArtifacts {
  std::optional<AmbientInstance> ambient;
  std::optional<PartitionedCantorMetric> dk;
  std::optional<GluedMetric> dc;
  std::optional<DugundjiSystem> system;
  std::optional<ExtensionResult> extension;
  std::optional<OperatorNormEstimate> operator_norm;
};

struct PipelineOutcome {
  CertificateReport report;
  /// Empty when every stage ran.
  std::string failed_stage;
  std::string error;
  PipelineArtifacts artifacts;

  bool verdict() const { return failed_stage.empty() && report.verdict(); }
  /// rho_T(d~, d), when the extension stage completed.
  std::optional<double> final_rho() const;
};

/// K -> partition -> d_K -> certify -> C -> d_C -> certify -> cover ->
/// d~ -> interior bounds -> operator norm -> rho_T(d~, d) <= 13 eps.
///
/// Never throws for stage failures: the failing stage and message are
/// recorded and the report carries a failing "stage_completed" entry.
/// When output_dir is set the report and finished artifacts are written
/// there, also after a failure.
PipelineOutcome run_pipeline(const PipelineConfig& cfg);

void persist_outcome(const PipelineOutcome& outcome, const std::filesystem::path& dir);

struct ProbeRow {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double eps = 0.0;
  std::optional<double> rho;
  std::optional<double> ratio;
  bool verdict = false;
  std::string error;
};

struct ProbeSummary {
  std::vector<ProbeRow> rows;
  double max_ratio = 0.0;
  /// Every row completed with ratio <= 13 and a passing verdict.
  bool all_pass = true;

  std::string to_table() const;
  Json to_json() const;
};

inline const std::vector<double> kDefaultProbeEps{0.01, 0.03, 0.05, 0.07};

/// Runs the pipeline for `trials` seeds (random_seed, random_seed + 1, ...)
/// and every eps in `eps_grid`. Throws ConfigError when trials == 0.
ProbeSummary density_probe(const PipelineConfig& cfg, std::size_t trials,
                           const std::vector<double>& eps_grid = kDefaultProbeEps);

}  // namespace lipfree
