#include "lipfree/certificate.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace lipfree {

const char* relation_symbol(Relation r) {
  switch (r) {
    case Relation::kLess: return "<";
    case Relation::kLessEqual: return "<=";
    case Relation::kGreaterEqual: return ">=";
    case Relation::kEqual: return "==";
  }
  return "?";
}

const CertificateEntry& CertificateReport::add(std::string check, std::string stage,
                                               double measured, double bound, Relation relation,
                                               std::string detail) {
  CertificateEntry e;
  e.check = std::move(check);
  e.stage = std::move(stage);
  e.measured = measured;
  e.bound = bound;
  e.relation = relation;
  e.detail = std::move(detail);
  switch (relation) {
    case Relation::kLess:
      e.tolerance = 0.0;
      e.slack = bound - measured;
      e.pass = measured < bound;
      break;
    case Relation::kLessEqual:
      e.slack = bound - measured;
      e.pass = measured <= bound + e.tolerance;
      break;
    case Relation::kGreaterEqual:
      e.slack = measured - bound;
      e.pass = measured >= bound - e.tolerance;
      break;
    case Relation::kEqual:
      e.tolerance = 0.0;
      e.slack = -std::abs(measured - bound);
      e.pass = measured == bound;
      break;
  }
  if (!std::isfinite(measured)) e.pass = false;
  entries_.push_back(std::move(e));
  return entries_.back();
}

const CertificateEntry& CertificateReport::add_vacuous(std::string check, std::string stage,
                                                       double bound, Relation relation,
                                                       std::string detail) {
  CertificateEntry e;
  e.check = std::move(check);
  e.stage = std::move(stage);
  e.measured = bound;
  e.bound = bound;
  e.relation = relation;
  e.slack = 0.0;
  e.pass = true;
  e.detail = "vacuous: " + detail;
  entries_.push_back(std::move(e));
  return entries_.back();
}

void CertificateReport::append(const CertificateReport& other) {
  entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
}

bool CertificateReport::verdict() const {
  for (const auto& e : entries_)
    if (!e.pass) return false;
  return true;
}

const CertificateEntry* CertificateReport::find(const std::string& check) const {
  for (const auto& e : entries_)
    if (e.check == check) return &e;
  return nullptr;
}

std::vector<CertificateEntry> CertificateReport::failures() const {
  std::vector<CertificateEntry> out;
  for (const auto& e : entries_)
    if (!e.pass) out.push_back(e);
  return out;
}

std::string CertificateReport::to_table() const {
  std::ostringstream os;
  char line[512];
  std::snprintf(line, sizeof line, "%-4s  %-18s %-34s %14s %3s %14s %12s\n", "ok", "stage", "check",
                "measured", "", "bound", "slack");
  os << line;
  for (const auto& e : entries_) {
    std::snprintf(line, sizeof line, "%-4s  %-18s %-34s %14.9g %3s %14.9g %12.4g", e.pass ? "PASS" : "FAIL",
                  e.stage.c_str(), e.check.c_str(), e.measured, relation_symbol(e.relation), e.bound,
                  e.slack);
    os << line;
    if (!e.detail.empty()) os << "  " << e.detail;
    os << '\n';
  }
  os << "verdict: " << (verdict() ? "PASS" : "FAIL") << '\n';
  return os.str();
}

std::string describe_pair(const FiniteMetricSpace& m, std::size_t i, std::size_t j) {
  return "(" + m.label(i) + "," + m.label(j) + ")";
}

}  // namespace lipfree
