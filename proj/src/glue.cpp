#include "lipfree/glue.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lipfree {

SubsetMask carve_C(const FiniteMetricSpace& ambient, const SubsetMask& k, double eps) {
  if (k.parent_size() != ambient.size()) throw StructuralError("K mask does not match the ambient space");
  std::vector<std::size_t> members = k.members();
  for (std::size_t x = 0; x < ambient.size(); ++x) {
    if (!k.contains(x) && point_set_distance(ambient, x, k) >= eps) members.push_back(x);
  }
  SubsetMask c(ambient.size(), std::move(members));
  for (std::size_t x = 0; x < ambient.size(); ++x) {
    if (point_set_distance(ambient, x, c) > eps) {
      throw std::logic_error("carve_C: point " + ambient.label(x) + " is farther than eps from C");
    }
  }
  return c;
}

GluedMetric build_dC(const FiniteMetricSpace& ambient, const SubsetMask& k,
                     const PartitionedCantorMetric& dk, double eps) {
  if (!(eps > 0.0)) throw StructuralError("eps must be positive");
  if (k.parent_size() != ambient.size()) throw StructuralError("K mask does not match the ambient space");
  if (dk.space.size() != k.size()) {
    throw StructuralError("d_K has " + std::to_string(dk.space.size()) + " points, K has " +
                          std::to_string(k.size()));
  }
  const CertificateReport cert = certify_partition_metric(dk, restrict(ambient, k), eps);
  if (!cert.verdict()) {
    const CertificateEntry first = cert.failures().front();
    throw PreconditionError("d_K is not certified: " + first.check + " measured " +
                            std::to_string(first.measured) + " against bound " +
                            std::to_string(first.bound));
  }

  SubsetMask c = carve_C(ambient, k, eps);
  const auto& cm = c.members();
  const auto& km = k.members();
  const std::vector<std::size_t> owner = dk.partition.block_index();
  const std::size_t nb = dk.partition.size();

  // D(x, K_i) for every x in C \ K, computed exhaustively.
  std::vector<std::vector<double>> far(cm.size());
  for (std::size_t p = 0; p < cm.size(); ++p) {
    if (k.contains(cm[p])) continue;
    far[p].assign(nb, 0.0);
    for (std::size_t b = 0; b < nb; ++b)
      for (std::size_t slot : dk.partition.blocks[b])
        far[p][b] = std::max(far[p][b], ambient(cm[p], km[slot]));
  }

  DistanceMatrix dc(cm.size());
  for (std::size_t p = 0; p < cm.size(); ++p) {
    for (std::size_t q = p + 1; q < cm.size(); ++q) {
      const std::size_t x = cm[p], y = cm[q];
      const bool xk = k.contains(x), yk = k.contains(y);
      double v;
      if (xk && yk) {
        v = dk.space(k.position_of(x), k.position_of(y));
      } else if (!xk && yk) {
        v = far[p][owner[k.position_of(y)]] + eps / 2.0;
      } else if (xk && !yk) {
        v = far[q][owner[k.position_of(x)]] + eps / 2.0;
      } else {
        v = ambient(x, y);
      }
      dc.set_symmetric(p, q, v);
    }
  }

  std::vector<std::string> labels;
  labels.reserve(cm.size());
  for (std::size_t x : cm) labels.push_back(ambient.label(x));
  const std::size_t base = c.contains(ambient.base_point()) ? c.position_of(ambient.base_point()) : 0;
  FiniteMetricSpace space(std::move(dc), std::move(labels), base);
  return GluedMetric{std::move(c), k, std::move(space), dk.partition, eps};
}

GlueCase glue_case(const GluedMetric& g, std::size_t i, std::size_t j) {
  const bool ik = g.k.contains(g.c.members().at(i));
  const bool jk = g.k.contains(g.c.members().at(j));
  if (ik && jk) return GlueCase::kBothInK;
  if (!ik && jk) return GlueCase::kFirstOutside;
  if (ik && !jk) return GlueCase::kSecondOutside;
  return GlueCase::kBothOutside;
}

CertificateReport certify_dC(const GluedMetric& g, const FiniteMetricSpace& ambient) {
  const std::string stage = "glued_metric";
  CertificateReport report;
  const auto& cm = g.c.members();
  const auto& km = g.k.members();
  if (g.space.size() != cm.size() || g.c.parent_size() != ambient.size()) {
    throw StructuralError("glued metric does not match the ambient space");
  }
  const double eps = g.eps;

  const ValidationReport vr = validate_metric(g.space);
  const double failures = static_cast<double>(vr.triangle_violations.size() + vr.asymmetric_pairs.size() +
                                              vr.nonzero_diagonal.size() + vr.nonpositive_pairs.size());
  std::string validity_detail = "axiom failures";
  if (!vr.triangle_violations.empty()) {
    const auto& t = vr.triangle_violations.front();
    validity_detail += "; first triangle violation " + describe_pair(g.space, t.from, t.to) + " via " +
                       g.space.label(t.via);
  }
  report.add("dC_metric_validity", stage, failures, 0.0, Relation::kEqual, validity_detail);

  const FiniteMetricSpace reference = restrict(ambient, g.c);
  const MetricDistance rho = rho_distance(g.space.dist(), reference.dist());
  report.add("rho_dC_d", stage, rho.value, eps, Relation::kLessEqual,
             "pair " + describe_pair(g.space, rho.witness.i, rho.witness.j));

  const std::vector<std::size_t> owner = g.partition.block_index();
  std::vector<double> block_diam(g.partition.size(), 0.0);
  for (std::size_t b = 0; b < g.partition.size(); ++b) {
    const auto& blk = g.partition.blocks[b];
    for (std::size_t p = 0; p < blk.size(); ++p)
      for (std::size_t q = p + 1; q < blk.size(); ++q)
        block_diam[b] = std::max(block_diam[b], ambient(km[blk[p]], km[blk[q]]));
  }

  double separation = std::numeric_limits<double>::infinity();
  double estimate = -std::numeric_limits<double>::infinity();
  double outer_gap = 0.0;
  IndexPair sep_pair{0, 0}, est_pair{0, 0}, outer_pair{0, 0};
  bool any_mixed = false, any_outer = false;
  for (std::size_t p = 0; p < cm.size(); ++p) {
    for (std::size_t q = 0; q < cm.size(); ++q) {
      if (p == q) continue;
      const bool pk = g.k.contains(cm[p]), qk = g.k.contains(cm[q]);
      if (!pk && !qk) {
        any_outer = true;
        const double gap = std::abs(g.space(p, q) - ambient(cm[p], cm[q]));
        if (gap > outer_gap) {
          outer_gap = gap;
          outer_pair = {p, q};
        }
      } else if (pk != qk) {
        any_mixed = true;
        const std::size_t kp = pk ? p : q;
        const double dcv = g.space(p, q);
        if (dcv < separation) {
          separation = dcv;
          sep_pair = {p, q};
        }
        const double e = std::abs(dcv - ambient(cm[p], cm[q])) -
                         block_diam[owner[g.k.position_of(cm[kp])]];
        if (e > estimate) {
          estimate = e;
          est_pair = {p, q};
        }
      }
    }
  }

  if (any_outer) {
    report.add("outside_K_exact", stage, outer_gap, 0.0, Relation::kEqual,
               outer_gap == 0.0 ? std::string("d_C = d on (C\\K)^2")
                                : "mismatch at " + describe_pair(g.space, outer_pair.i, outer_pair.j));
  } else {
    report.add_vacuous("outside_K_exact", stage, 0.0, Relation::kEqual, "C\\K is empty");
  }
  if (any_mixed) {
    report.add("separation_K_rest", stage, separation, eps / 2.0, Relation::kGreaterEqual,
               "closest pair " + describe_pair(g.space, sep_pair.i, sep_pair.j));
    report.add("mixed_pair_estimate", stage, estimate, eps / 2.0, Relation::kLessEqual,
               "|d_C - d| - D(K_i), worst at " + describe_pair(g.space, est_pair.i, est_pair.j));
  } else {
    report.add_vacuous("separation_K_rest", stage, eps / 2.0, Relation::kGreaterEqual, "C\\K is empty");
    report.add_vacuous("mixed_pair_estimate", stage, eps / 2.0, Relation::kLessEqual, "C\\K is empty");
  }
  const double widest = *std::max_element(block_diam.begin(), block_diam.end());
  report.add("block_margin", stage, widest + eps / 2.0, eps, Relation::kLess, "max D(K_i) + eps/2");
  return report;
}

}  // namespace lipfree
