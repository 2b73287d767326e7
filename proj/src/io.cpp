#include "lipfree/io.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace lipfree {

namespace {

std::string number17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_symmetric(const DistanceMatrix& d) {
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = i + 1; j < d.size(); ++j) {
      if (std::abs(d(i, j) - d(j, i)) > kMetricTolerance) {
        throw ParseError("asymmetric entries at (" + std::to_string(i) + "," + std::to_string(j) +
                         "): " + number17(d(i, j)) + " vs " + number17(d(j, i)));
      }
    }
  }
}

Relation relation_from_string(const std::string& s) {
  if (s == "<") return Relation::kLess;
  if (s == "<=") return Relation::kLessEqual;
  if (s == ">=") return Relation::kGreaterEqual;
  if (s == "==") return Relation::kEqual;
  throw ParseError("unknown relation '" + s + "'");
}

double number_or_nan(const Json& j) {
  return j.is_number() ? j.get<double>() : std::numeric_limits<double>::quiet_NaN();
}

template <typename F>
auto with_field(const char* field, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw ParseError(std::string("field '") + field + "': " + e.what());
  }
}

}  // namespace

void write_matrix_text(std::ostream& os, const FiniteMetricSpace& m) {
  os << m.size() << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j) os << ' ';
      os << number17(m(i, j));
    }
    os << '\n';
  }
}

FiniteMetricSpace read_matrix_text(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t n = 0;
  bool have_n = false;
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tok;
    std::vector<std::string> tokens;
    while (ls >> tok) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (!have_n) {
      if (tokens.size() != 1) throw ParseError("line " + std::to_string(line_no) + ": expected the point count");
      try {
        std::size_t used = 0;
        const long long v = std::stoll(tokens[0], &used);
        if (used != tokens[0].size() || v <= 0) throw std::invalid_argument("bad");
        n = static_cast<std::size_t>(v);
      } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": '" + tokens[0] +
                         "' is not a positive point count");
      }
      have_n = true;
      continue;
    }
    if (rows.size() == n) throw ParseError("line " + std::to_string(line_no) + ": extra row after " + std::to_string(n));
    if (tokens.size() != n) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(n) +
                       " numbers, found " + std::to_string(tokens.size()));
    }
    std::vector<double> row(n);
    for (std::size_t k = 0; k < n; ++k) {
      try {
        std::size_t used = 0;
        row[k] = std::stod(tokens[k], &used);
        if (used != tokens[k].size()) throw std::invalid_argument("bad");
      } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ", column " + std::to_string(k + 1) + ": '" +
                         tokens[k] + "' is not a number");
      }
      if (!std::isfinite(row[k])) {
        throw ParseError("line " + std::to_string(line_no) + ", column " + std::to_string(k + 1) +
                         ": non-finite value");
      }
    }
    rows.push_back(std::move(row));
  }
  if (!have_n) throw ParseError("empty matrix file");
  if (rows.size() != n) {
    throw ParseError("expected " + std::to_string(n) + " rows, found " + std::to_string(rows.size()));
  }
  DistanceMatrix d = DistanceMatrix::from_rows(rows);
  check_symmetric(d);
  return FiniteMetricSpace(std::move(d));
}

Json to_json(const DistanceMatrix& d) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < d.size(); ++i) {
    Json row = Json::array();
    for (double v : d.row(i)) row.push_back(v);
    rows.push_back(std::move(row));
  }
  return rows;
}

DistanceMatrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("matrix must be an array");
  if (!j.empty() && j.front().is_array()) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_array()) throw ParseError("matrix row " + std::to_string(i) + " is not an array");
      std::vector<double> row;
      for (std::size_t k = 0; k < j[i].size(); ++k) {
        if (!j[i][k].is_number()) {
          throw ParseError("matrix entry (" + std::to_string(i) + "," + std::to_string(k) + ") is not a number");
        }
        row.push_back(j[i][k].get<double>());
      }
      rows.push_back(std::move(row));
    }
    try {
      return DistanceMatrix::from_rows(rows);
    } catch (const StructuralError& e) {
      throw ParseError(e.what());
    }
  }
  const std::size_t total = j.size();
  const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(total))));
  if (n * n != total) throw ParseError("flat matrix length " + std::to_string(total) + " is not a square");
  std::vector<double> flat;
  flat.reserve(total);
  for (std::size_t k = 0; k < total; ++k) {
    if (!j[k].is_number()) throw ParseError("matrix entry " + std::to_string(k) + " is not a number");
    flat.push_back(j[k].get<double>());
  }
  try {
    return DistanceMatrix::from_flat(n, std::move(flat));
  } catch (const StructuralError& e) {
    throw ParseError(e.what());
  }
}

Json to_json(const FiniteMetricSpace& m) {
  return Json{{"points", m.labels()}, {"dist", to_json(m.dist())}, {"base_point", m.base_point()}};
}

FiniteMetricSpace space_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("metric space must be a JSON object");
  if (!j.contains("dist")) throw ParseError("field 'dist' is missing");
  DistanceMatrix d = matrix_from_json(j.at("dist"));
  check_symmetric(d);
  std::vector<std::string> labels;
  if (j.contains("points")) {
    labels = with_field("points", [&] {
      std::vector<std::string> out;
      for (const auto& p : j.at("points")) out.push_back(p.is_string() ? p.get<std::string>() : p.dump());
      return out;
    });
  }
  const std::size_t base = j.contains("base_point") ? with_field("base_point", [&] {
    return j.at("base_point").get<std::size_t>();
  })
                                                    : 0;
  try {
    return FiniteMetricSpace(std::move(d), std::move(labels), base);
  } catch (const StructuralError& e) {
    throw ParseError(e.what());
  }
}

Json to_json(const SubsetMask& mask) { return mask.members(); }

SubsetMask mask_from_json(const Json& j, std::size_t parent_size) {
  const auto members = with_field("mask", [&] { return j.get<std::vector<std::size_t>>(); });
  try {
    return SubsetMask(parent_size, members);
  } catch (const StructuralError& e) {
    throw ParseError(e.what());
  }
}

Json to_json(const CertificateEntry& e) {
  return Json{{"check", e.check},         {"stage", e.stage},   {"measured", e.measured},
              {"bound", e.bound},         {"relation", relation_symbol(e.relation)},
              {"slack", e.slack},         {"tolerance", e.tolerance},
              {"pass", e.pass},           {"detail", e.detail}};
}

Json to_json(const CertificateReport& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries()) entries.push_back(to_json(e));
  return Json{{"verdict", r.verdict() ? "pass" : "fail"}, {"entries", std::move(entries)}};
}

CertificateReport report_from_json(const Json& j) {
  CertificateReport r;
  for (const auto& e : with_field("entries", [&] { return j.at("entries"); })) {
    const Relation rel = relation_from_string(e.at("relation").get<std::string>());
    r.add(e.at("check").get<std::string>(), e.at("stage").get<std::string>(), number_or_nan(e.at("measured")),
          number_or_nan(e.at("bound")), rel, e.value("detail", std::string()));
  }
  return r;
}

Json to_json(const CantorModel& model) {
  Json addresses = Json::array();
  for (std::size_t i = 0; i < model.size(); ++i) addresses.push_back(model.address_string(i));
  return Json{{"level", model.level}, {"addresses", std::move(addresses)}};
}

Json to_json(const Partition& p) { return p.blocks; }

Partition partition_from_json(const Json& j, std::size_t point_count) {
  Partition p;
  p.point_count = point_count;
  p.blocks = with_field("partition", [&] { return j.get<std::vector<std::vector<std::size_t>>>(); });
  try {
    p.check();
  } catch (const StructuralError& e) {
    throw ParseError(e.what());
  }
  return p;
}

Json to_json(const PartitionedCantorMetric& pm) {
  return Json{{"space", to_json(pm.space)},
              {"partition", to_json(pm.partition)},
              {"scales", pm.block_scales},
              {"seed", to_json(pm.seed)},
              {"seed_assignment", pm.seed_assignment}};
}

PartitionedCantorMetric partitioned_metric_from_json(const Json& j) {
  FiniteMetricSpace space = space_from_json(with_field("space", [&] { return j.at("space"); }));
  Partition part = partition_from_json(with_field("partition", [&] { return j.at("partition"); }), space.size());
  auto scales = with_field("scales", [&] { return j.at("scales").get<std::vector<double>>(); });
  FiniteMetricSpace seed = space_from_json(with_field("seed", [&] { return j.at("seed"); }));
  auto assignment = with_field("seed_assignment", [&] {
    return j.at("seed_assignment").get<std::vector<std::vector<std::size_t>>>();
  });
  return PartitionedCantorMetric{std::move(space), std::move(part), std::move(scales), std::move(seed),
                                 std::move(assignment)};
}

Json to_json(const GluedMetric& g) {
  return Json{{"space", to_json(g.space)},
              {"C", to_json(g.c)},
              {"K", to_json(g.k)},
              {"partition", to_json(g.partition)},
              {"eps", g.eps}};
}

Json to_json(const DugundjiSystem& sys) {
  const std::vector<std::size_t> outside = sys.a.complement();
  Json lambda = Json::array();
  for (std::size_t x : outside) {
    std::vector<double> row(sys.centers.size(), 0.0);
    for (const CoverWeight& w : sys.weights[x]) row[w.center] = w.lambda;
    lambda.push_back(row);
  }
  return Json{{"eps", sys.eps},         {"A", to_json(sys.a)},         {"centers", sys.centers},
              {"radii", sys.radii},     {"anchors", sys.anchors},      {"weight_rows", outside},
              {"weights", std::move(lambda)}};
}

Json to_json(const ExtensionResult& r) {
  return Json{{"hat_d", to_json(r.hat_d)},
              {"quotient_e", to_json(r.quotient_e)},
              {"tilde_d", to_json(r.tilde_d)},
              {"certificates", to_json(r.certificates)}};
}

Json measure_to_json(const FiniteMetricSpace& m, const SignedMeasure& mu) {
  if (mu.weights.size() != m.size()) throw StructuralError("measure does not match the space");
  Json out = Json::array();
  for (std::size_t i = 0; i < m.size(); ++i)
    if (mu.weights[i] != 0.0) out.push_back(Json{{"point", m.label(i)}, {"weight", mu.weights[i]}});
  return out;
}

SignedMeasure measure_from_json(const FiniteMetricSpace& m, const Json& j) {
  if (!j.is_array()) throw ParseError("measure must be an array of {point, weight}");
  SignedMeasure mu = SignedMeasure::zero(m.size());
  for (std::size_t k = 0; k < j.size(); ++k) {
    const Json& e = j[k];
    if (!e.is_object() || !e.contains("point") || !e.contains("weight") || !e.at("weight").is_number()) {
      throw ParseError("measure entry " + std::to_string(k) + " needs 'point' and numeric 'weight'");
    }
    const std::string label = e.at("point").is_string() ? e.at("point").get<std::string>() : e.at("point").dump();
    std::size_t idx = m.size();
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m.label(i) == label) idx = i;
    if (idx == m.size()) throw ParseError("measure entry " + std::to_string(k) + ": unknown point '" + label + "'");
    mu.weights[idx] += e.at("weight").get<double>();
  }
  return mu;
}

Json plan_to_json(const FiniteMetricSpace& m, const TransportPlan& plan) {
  Json out = Json::array();
  for (const Flow& f : plan.flows)
    out.push_back(Json{{"from", m.label(f.from)}, {"to", m.label(f.to)}, {"mass", f.mass}});
  return out;
}

LoadedSpace parse_space(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  FiniteMetricSpace space = [&] {
    if (first != std::string::npos && text[first] == '{') {
      Json j;
      try {
        j = Json::parse(text);
      } catch (const Json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
      }
      return space_from_json(j);
    }
    std::istringstream is(text);
    return read_matrix_text(is);
  }();
  ValidationReport report = validate_metric(space);
  return LoadedSpace{std::move(space), std::move(report)};
}

LoadedSpace load_space(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_space(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_text_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void save_space(const FiniteMetricSpace& m, const std::filesystem::path& path, SpaceFormat format) {
  if (format == SpaceFormat::kJson) {
    save_text_atomic(path, to_json(m).dump(2) + "\n");
    return;
  }
  std::ostringstream os;
  write_matrix_text(os, m);
  save_text_atomic(path, os.str());
}

void save_report(const CertificateReport& report, const std::filesystem::path& path) {
  save_text_atomic(path, to_json(report).dump(2) + "\n");
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string() + ": invalid JSON: " + e.what());
  }
}

}  // namespace lipfree
