#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"
#include "lipfree/cantor.hpp"
#include "lipfree/certificate.hpp"
#include "lipfree/dugundji.hpp"
#include "lipfree/free_norm.hpp"
#include "lipfree/glue.hpp"
#include "lipfree/metric_space.hpp"

namespace lipfree {

using Json = nlohmann::json;

enum class SpaceFormat { kMatrixText, kJson };

// Plain text: first line n, then n rows of n whitespace-separated numbers.
// Numbers are written with 17 significant digits so reading back is exact.
void write_matrix_text(std::ostream& os, const FiniteMetricSpace& m);
FiniteMetricSpace read_matrix_text(std::istream& is);

// {"points": [...], "dist": [[...], ...], "base_point": k}. The reader also
// accepts "dist" as a flat row-major array of n*n numbers.
Json to_json(const FiniteMetricSpace& m);
FiniteMetricSpace space_from_json(const Json& j);

Json to_json(const DistanceMatrix& d);
DistanceMatrix matrix_from_json(const Json& j);

Json to_json(const SubsetMask& mask);
SubsetMask mask_from_json(const Json& j, std::size_t parent_size);

Json to_json(const CertificateEntry& e);
Json to_json(const CertificateReport& r);
CertificateReport report_from_json(const Json& j);

Json to_json(const CantorModel& model);
Json to_json(const Partition& p);
Partition partition_from_json(const Json& j, std::size_t point_count);
Json to_json(const PartitionedCantorMetric& pm);
PartitionedCantorMetric partitioned_metric_from_json(const Json& j);
Json to_json(const GluedMetric& g);
Json to_json(const DugundjiSystem& sys);
Json to_json(const ExtensionResult& r);

/// Sparse [{"point": label, "weight": w}, ...].
Json measure_to_json(const FiniteMetricSpace& m, const SignedMeasure& mu);
SignedMeasure measure_from_json(const FiniteMetricSpace& m, const Json& j);
/// [{"from": label, "to": label, "mass": w}, ...].
Json plan_to_json(const FiniteMetricSpace& m, const TransportPlan& plan);

struct LoadedSpace {
  FiniteMetricSpace space;
  ValidationReport validation;
};

/// Reads either format (JSON when the first non-blank character is '{').
/// Rejects ragged, non-finite or asymmetric (beyond kMetricTolerance)
/// matrices with ParseError; triangle failures are reported, not rejected.
LoadedSpace load_space(const std::filesystem::path& path);
LoadedSpace parse_space(const std::string& text);

void save_space(const FiniteMetricSpace& m, const std::filesystem::path& path, SpaceFormat format);
void save_report(const CertificateReport& report, const std::filesystem::path& path);
/// Writes to a temporary sibling and renames it into place.
void save_text_atomic(const std::filesystem::path& path, const std::string& text);

Json read_json_file(const std::filesystem::path& path);

}  // namespace lipfree
