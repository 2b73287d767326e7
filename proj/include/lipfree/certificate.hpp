#pragma once

#include <string>
#include <vector>

#include "lipfree/errors.hpp"
#include "lipfree/metric_space.hpp"

namespace lipfree {

/// How a measured value is compared against its bound.
enum class Relation {
  kLess,          ///< measured < bound (strict, no tolerance)
  kLessEqual,     ///< measured <= bound + tolerance
  kGreaterEqual,  ///< measured >= bound - tolerance
  kEqual,         ///< measured == bound, bit-exact
};

const char* relation_symbol(Relation r);

struct CertificateEntry {
  std::string check;
  std::string stage;
  double measured = 0.0;
  double bound = 0.0;
  Relation relation = Relation::kLessEqual;
  /// Positive when the bound holds with room to spare.
  double slack = 0.0;
  double tolerance = kMetricTolerance;
  bool pass = false;
  /// Witness or context, e.g. the pair attaining the measured value.
  std::string detail;

  bool operator==(const CertificateEntry&) const = default;
};

/// Ordered list of named quantitative checks. The verdict passes iff every
/// entry passes; an empty report passes.
class CertificateReport {
 public:
  const CertificateEntry& add(std::string check, std::string stage, double measured, double bound,
                              Relation relation, std::string detail = {});
  /// An entry that holds vacuously (nothing to measure).
  const CertificateEntry& add_vacuous(std::string check, std::string stage, double bound,
                                      Relation relation, std::string detail);
  void append(const CertificateReport& other);

  const std::vector<CertificateEntry>& entries() const { return entries_; }
  bool verdict() const;
  /// First entry with this check id, or nullptr.
  const CertificateEntry* find(const std::string& check) const;
  /// Entries that failed.
  std::vector<CertificateEntry> failures() const;

  /// Human-readable table, one line per entry.
  std::string to_table() const;

  bool operator==(const CertificateReport&) const = default;

 private:
  std::vector<CertificateEntry> entries_;
};

/// Thrown when a construction's own certificates fail. Carries the report.
class CertificateFailure : public Error {
 public:
  CertificateFailure(const std::string& what, CertificateReport report)
      : Error(what), report_(std::move(report)) {}
  const CertificateReport& report() const { return report_; }

 private:
  CertificateReport report_;
};

/// "(i,j)" with labels when available.
std::string describe_pair(const FiniteMetricSpace& m, std::size_t i, std::size_t j);

}  // namespace lipfree
