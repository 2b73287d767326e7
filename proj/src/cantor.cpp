#include "lipfree/cantor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

namespace lipfree {

namespace {

std::int64_t pow3(int k) {
  std::int64_t p = 1;
  for (int i = 0; i < k; ++i) p *= 3;
  return p;
}

// Ternary numerator of sum_k 2 a_k / 3^k over the common denominator 3^level.
std::int64_t ternary_numerator(std::uint32_t address, int level) {
  std::int64_t num = 0;
  for (int k = 1; k <= level; ++k) {
    const int bit = static_cast<int>((address >> (level - k)) & 1u);
    num += 2 * bit * pow3(level - k);
  }
  return num;
}

double index_diameter(const FiniteMetricSpace& m, const std::vector<std::size_t>& idx) {
  double best = 0.0;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b) best = std::max(best, m(idx[a], idx[b]));
  return best;
}

double index_sup_distance(const FiniteMetricSpace& m, const std::vector<std::size_t>& a,
                          const std::vector<std::size_t>& b) {
  double best = 0.0;
  for (std::size_t x : a)
    for (std::size_t y : b) best = std::max(best, m(x, y));
  return best;
}

void refine(const FiniteMetricSpace& m, const CantorModel& model, double eps,
            std::vector<std::size_t> cls, int depth, std::vector<std::vector<std::size_t>>& out) {
  if (depth >= model.level || index_diameter(m, cls) < eps / 2.0) {
    out.push_back(std::move(cls));
    return;
  }
  std::vector<std::size_t> zero, one;
  for (std::size_t i : cls) (model.letter(i, depth) == 0 ? zero : one).push_back(i);
  if (!zero.empty()) refine(m, model, eps, std::move(zero), depth + 1, out);
  if (!one.empty()) refine(m, model, eps, std::move(one), depth + 1, out);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::string CantorModel::address_string(std::size_t i) const {
  std::string s(static_cast<std::size_t>(level), '0');
  for (int k = 0; k < level; ++k) s[static_cast<std::size_t>(k)] = letter(i, k) ? '1' : '0';
  return s;
}

FiniteMetricSpace CantorModel::space(double scale, const std::string& label_prefix) const {
  const std::size_t n = size();
  const double denom = static_cast<double>(pow3(level));
  std::vector<std::int64_t> num(n);
  for (std::size_t i = 0; i < n; ++i) num[i] = ternary_numerator(addresses[i], level);
  DistanceMatrix d(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double gap = static_cast<double>(std::llabs(num[i] - num[j])) / denom;
      d.set_symmetric(i, j, scale * gap);
    }
  }
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(label_prefix + address_string(i));
  return FiniteMetricSpace(std::move(d), std::move(labels));
}

CantorModel build_cantor_model(int level) {
  if (level < 1 || level > kMaxCantorLevel) {
    throw StructuralError("Cantor level " + std::to_string(level) + " outside [1, " +
                          std::to_string(kMaxCantorLevel) + "]");
  }
  CantorModel model;
  model.level = level;
  const std::size_t n = std::size_t{1} << level;
  const double denom = static_cast<double>(pow3(level));
  model.addresses.resize(n);
  model.coordinates.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    model.addresses[i] = static_cast<std::uint32_t>(i);
    model.coordinates[i] = static_cast<double>(ternary_numerator(model.addresses[i], level)) / denom;
  }
  return model;
}

std::vector<std::size_t> Partition::block_index() const {
  std::vector<std::size_t> out(point_count, std::numeric_limits<std::size_t>::max());
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (std::size_t i : blocks[b]) out.at(i) = b;
  return out;
}

void Partition::check() const {
  if (blocks.empty()) throw StructuralError("partition has no blocks");
  std::vector<char> seen(point_count, 0);
  std::size_t covered = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].empty()) throw StructuralError("partition block " + std::to_string(b) + " is empty");
    for (std::size_t i : blocks[b]) {
      if (i >= point_count) throw StructuralError("partition index out of range");
      if (seen[i]) throw StructuralError("point " + std::to_string(i) + " is in two blocks");
      seen[i] = 1;
      ++covered;
    }
  }
  if (covered != point_count) throw StructuralError("partition does not cover every point");
}

Partition partition_by_diameter(const FiniteMetricSpace& m, double eps) {
  if (!(eps > 0.0)) throw StructuralError("eps must be positive");
  Partition p;
  p.point_count = m.size();
  const SubsetMask whole = SubsetMask::all(m.size());
  if (diameter(m, whole) < eps / 2.0) {
    p.blocks.push_back(whole.members());
    return p;
  }
  std::vector<char> taken(m.size(), 0);
  for (std::size_t c = 0; c < m.size(); ++c) {
    if (taken[c]) continue;
    std::vector<std::size_t> block;
    for (std::size_t y = c; y < m.size(); ++y) {
      if (!taken[y] && m(c, y) < eps / 4.0) {
        block.push_back(y);
        taken[y] = 1;
      }
    }
    p.blocks.push_back(std::move(block));
  }
  return p;
}

Partition partition_by_diameter(const FiniteMetricSpace& m, double eps, const CantorModel& model) {
  if (!(eps > 0.0)) throw StructuralError("eps must be positive");
  if (model.size() != m.size()) {
    throw StructuralError("Cantor model has " + std::to_string(model.size()) +
                          " addresses for a space of " + std::to_string(m.size()) + " points");
  }
  Partition p;
  p.point_count = m.size();
  std::vector<std::size_t> all(m.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  std::sort(all.begin(), all.end(),
            [&](std::size_t a, std::size_t b) { return model.addresses[a] < model.addresses[b]; });
  refine(m, model, eps, std::move(all), 0, p.blocks);
  for (auto& b : p.blocks) std::sort(b.begin(), b.end());
  return p;
}

PartitionedCantorMetric build_dK(const FiniteMetricSpace& reference, const Partition& partition,
                                 const FiniteMetricSpace& seed, double eps) {
  if (!(eps > 0.0)) throw StructuralError("eps must be positive");
  if (partition.point_count != reference.size()) {
    throw StructuralError("partition covers " + std::to_string(partition.point_count) +
                          " points, reference has " + std::to_string(reference.size()));
  }
  partition.check();
  const std::size_t nb = partition.size();

  std::vector<double> block_diam(nb);
  std::size_t largest_block = 0;
  for (std::size_t b = 0; b < nb; ++b) {
    block_diam[b] = index_diameter(reference, partition.blocks[b]);
    largest_block = std::max(largest_block, partition.blocks[b].size());
    if (!(block_diam[b] < eps / 2.0)) {
      throw ConstructionError("block " + std::to_string(b) + " has diameter " + fmt(block_diam[b]) +
                              " >= eps/2 = " + fmt(eps / 2.0));
    }
  }
  if (seed.size() < largest_block) {
    throw ConstructionError("seed metric has " + std::to_string(seed.size()) +
                            " points but the largest block has " + std::to_string(largest_block));
  }

  DistanceMatrix cross(nb);
  for (std::size_t a = 0; a < nb; ++a)
    for (std::size_t b = a + 1; b < nb; ++b)
      cross.set_symmetric(a, b, index_sup_distance(reference, partition.blocks[a], partition.blocks[b]));

  PartitionedCantorMetric pm{reference, partition, {}, seed, {}};
  pm.block_scales.resize(nb);
  pm.seed_assignment.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const auto& block = partition.blocks[b];
    auto& assigned = pm.seed_assignment[b];
    assigned.resize(block.size());
    for (std::size_t k = 0; k < block.size(); ++k) assigned[k] = k * seed.size() / block.size();

    if (block.size() == 1) {
      pm.block_scales[b] = 1.0;
      continue;
    }
    double seed_diam = 0.0;
    for (std::size_t p = 0; p < assigned.size(); ++p)
      for (std::size_t q = p + 1; q < assigned.size(); ++q)
        seed_diam = std::max(seed_diam, seed(assigned[p], assigned[q]));
    if (!(seed_diam > 0.0)) {
      throw ConstructionError("seed points assigned to block " + std::to_string(b) +
                              " have zero diameter");
    }
    double scale = (eps - block_diam[b]) / seed_diam;
    if (nb > 1) {
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t o = 0; o < nb; ++o)
        if (o != b) nearest = std::min(nearest, cross(b, o));
      scale = std::min(scale, 2.0 * nearest / seed_diam);
    }
    scale *= 0.99;
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      throw ConstructionError("infeasible scaling for block " + std::to_string(b) + ": c = " +
                              fmt(scale));
    }
    pm.block_scales[b] = scale;
  }

  const std::vector<std::size_t> owner = partition.block_index();
  std::vector<std::size_t> slot(reference.size());
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t k = 0; k < partition.blocks[b].size(); ++k) slot[partition.blocks[b][k]] = k;

  DistanceMatrix dk(reference.size());
  for (std::size_t x = 0; x < reference.size(); ++x) {
    for (std::size_t y = x + 1; y < reference.size(); ++y) {
      const std::size_t bx = owner[x], by = owner[y];
      double v;
      if (bx == by) {
        const auto& assigned = pm.seed_assignment[bx];
        v = pm.block_scales[bx] * seed(assigned[slot[x]], assigned[slot[y]]);
      } else {
        v = cross(bx, by);
      }
      dk.set_symmetric(x, y, v);
    }
  }
  pm.space = FiniteMetricSpace(std::move(dk), reference.labels(), reference.base_point());

  const ValidationReport vr = validate_metric(pm.space);
  if (!vr.is_metric()) {
    throw ConstructionError("d_K fails the metric axioms (" +
                            std::to_string(vr.triangle_violations.size()) + " triangle violations)");
  }
  return pm;
}

CertificateReport certify_partition_metric(const PartitionedCantorMetric& pm,
                                           const FiniteMetricSpace& reference, double eps) {
  const std::string stage = "partition_metric";
  CertificateReport report;
  const FiniteMetricSpace& dk = pm.space;
  const Partition& part = pm.partition;
  if (dk.size() != reference.size() || part.point_count != reference.size()) {
    throw StructuralError("partition metric and reference have different sizes");
  }
  part.check();
  const std::size_t nb = part.size();
  const std::vector<std::size_t> owner = part.block_index();

  const MetricDistance sup = sup_norm_difference(dk.dist(), reference.dist());
  report.add("dK_sup_deviation", stage, sup.value, eps, Relation::kLess,
             "pair " + describe_pair(reference, sup.witness.i, sup.witness.j));

  std::vector<double> block_diam(nb);
  std::size_t widest = 0;
  for (std::size_t b = 0; b < nb; ++b) {
    block_diam[b] = index_diameter(reference, part.blocks[b]);
    if (block_diam[b] > block_diam[widest]) widest = b;
  }
  report.add("block_diameter", stage, block_diam[widest], eps / 2.0, Relation::kLess,
             "widest block " + std::to_string(widest) + " of " + std::to_string(nb));

  if (nb > 1) {
    DistanceMatrix cross(nb);
    for (std::size_t a = 0; a < nb; ++a)
      for (std::size_t b = a + 1; b < nb; ++b)
        cross.set_symmetric(a, b, index_sup_distance(reference, part.blocks[a], part.blocks[b]));

    double identity_gap = 0.0, deviation_excess = -std::numeric_limits<double>::infinity();
    IndexPair gap_pair{0, 0}, dev_pair{0, 0};
    for (std::size_t x = 0; x < dk.size(); ++x) {
      for (std::size_t y = 0; y < dk.size(); ++y) {
        if (owner[x] == owner[y]) continue;
        const double gap = std::abs(dk(x, y) - cross(owner[x], owner[y]));
        if (gap > identity_gap) {
          identity_gap = gap;
          gap_pair = {x, y};
        }
        const double excess =
            std::abs(dk(x, y) - reference(x, y)) - (block_diam[owner[x]] + block_diam[owner[y]]);
        if (excess > deviation_excess) {
          deviation_excess = excess;
          dev_pair = {x, y};
        }
      }
    }
    report.add("cross_block_identity", stage, identity_gap, 0.0, Relation::kEqual,
               identity_gap == 0.0 ? std::string("all cross pairs equal D(K_i,K_j)")
                                   : "mismatch at " + describe_pair(dk, gap_pair.i, gap_pair.j));
    report.add("cross_block_deviation", stage, deviation_excess, 0.0, Relation::kLessEqual,
               "|d_K - d| - D(K_i) - D(K_j), worst at " + describe_pair(dk, dev_pair.i, dev_pair.j));
  } else {
    report.add_vacuous("cross_block_identity", stage, 0.0, Relation::kEqual, "single block");
    report.add_vacuous("cross_block_deviation", stage, 0.0, Relation::kLessEqual, "single block");
  }

  double worst_prop = 0.0;
  std::string prop_detail;
  double c_min = std::numeric_limits<double>::infinity(), c_max = 0.0;
  for (std::size_t b = 0; b < nb; ++b) {
    const auto& block = part.blocks[b];
    const auto& assigned = pm.seed_assignment.at(b);
    if (assigned.size() != block.size()) throw StructuralError("seed assignment size mismatch");
    const SubsetMask bm(dk.size(), block);
    const SubsetMask sm(pm.seed.size(), assigned);
    const double c = pm.block_scales.at(b);
    c_min = std::min(c_min, c);
    c_max = std::max(c_max, c);
    // Assigned seed indices are increasing, so both masks list points in
    // matching order.
    const ProportionalityResult pr = check_proportional(restrict(dk.dist(), bm), restrict(pm.seed.dist(), sm));
    double dev = 0.0;
    for (std::size_t p = 0; p < block.size(); ++p)
      for (std::size_t q = p + 1; q < block.size(); ++q)
        dev = std::max(dev, std::abs(dk(block[p], block[q]) - c * pm.seed(assigned[p], assigned[q])));
    if (!pr.scale) dev = std::max(dev, pr.worst_deviation);
    if (dev > worst_prop) {
      worst_prop = dev;
      prop_detail = "block " + std::to_string(b);
    }
  }
  report.add("block_proportionality", stage, worst_prop, 0.0, Relation::kLessEqual,
             (prop_detail.empty() ? std::string() : "worst " + prop_detail + "; ") + "c in [" +
                 fmt(c_min) + ", " + fmt(c_max) + "]");

  const ValidationReport vr = validate_metric(dk);
  const double failures = static_cast<double>(vr.triangle_violations.size() + vr.asymmetric_pairs.size() +
                                              vr.nonzero_diagonal.size() + vr.nonpositive_pairs.size());
  report.add("dK_metric_validity", stage, failures, 0.0, Relation::kEqual, "axiom failures");
  return report;
}

}  // namespace lipfree
