#include "lipfree/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace lipfree {

DistanceMatrix::DistanceMatrix(std::size_t n, double fill) : n_(n), data_(n * n, fill) {}

DistanceMatrix DistanceMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  DistanceMatrix d(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      throw StructuralError("matrix is not square: row " + std::to_string(i) + " has " +
                            std::to_string(rows[i].size()) + " entries, expected " +
                            std::to_string(n));
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(rows[i][j])) {
        throw StructuralError("non-finite entry at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
      }
      d(i, j) = rows[i][j];
    }
  }
  return d;
}

DistanceMatrix DistanceMatrix::from_flat(std::size_t n, std::vector<double> values) {
  if (values.size() != n * n) {
    throw StructuralError("flat matrix has " + std::to_string(values.size()) +
                          " entries, expected " + std::to_string(n * n));
  }
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k])) {
      throw StructuralError("non-finite entry at (" + std::to_string(k / n) + "," +
                            std::to_string(k % n) + ")");
    }
  }
  DistanceMatrix d;
  d.n_ = n;
  d.data_ = std::move(values);
  return d;
}

FiniteMetricSpace::FiniteMetricSpace(DistanceMatrix dist, std::vector<std::string> labels,
                                     std::size_t base_point)
    : dist_(std::move(dist)), labels_(std::move(labels)), base_point_(base_point) {
  if (dist_.size() == 0) throw StructuralError("a metric space needs at least one point");
  if (labels_.empty()) {
    labels_.reserve(dist_.size());
    for (std::size_t i = 0; i < dist_.size(); ++i) labels_.push_back(std::to_string(i));
  } else if (labels_.size() != dist_.size()) {
    throw StructuralError("label count " + std::to_string(labels_.size()) +
                          " does not match matrix size " + std::to_string(dist_.size()));
  }
  if (base_point_ >= dist_.size()) {
    throw StructuralError("base point " + std::to_string(base_point_) + " out of range");
  }
}

FiniteMetricSpace FiniteMetricSpace::with_base_point(std::size_t base) const {
  return FiniteMetricSpace(dist_, labels_, base);
}

SubsetMask::SubsetMask(std::size_t parent_size, std::vector<std::size_t> members)
    : members_(std::move(members)), flags_(parent_size, false) {
  if (members_.empty()) throw StructuralError("subset mask is empty");
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  for (std::size_t i : members_) {
    if (i >= parent_size) {
      throw StructuralError("subset index " + std::to_string(i) + " out of range for " +
                            std::to_string(parent_size) + " points");
    }
    flags_[i] = true;
  }
}

SubsetMask SubsetMask::all(std::size_t parent_size) {
  std::vector<std::size_t> idx(parent_size);
  for (std::size_t i = 0; i < parent_size; ++i) idx[i] = i;
  return SubsetMask(parent_size, std::move(idx));
}

std::vector<std::size_t> SubsetMask::complement() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < flags_.size(); ++i)
    if (!flags_[i]) out.push_back(i);
  return out;
}

std::size_t SubsetMask::position_of(std::size_t i) const {
  auto it = std::lower_bound(members_.begin(), members_.end(), i);
  if (it == members_.end() || *it != i) {
    throw StructuralError("index " + std::to_string(i) + " is not a member of the mask");
  }
  return static_cast<std::size_t>(it - members_.begin());
}

ValidationReport validate_metric(const DistanceMatrix& d) {
  ValidationReport r;
  const std::size_t n = d.size();
  if (n == 0) throw StructuralError("cannot validate an empty matrix");
  const double tau = r.tolerance;

  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(d(i, i)) > tau) {
      r.diagonal_ok = false;
      r.nonzero_diagonal.push_back(i);
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(d(i, j) - d(j, i)) > tau) {
        r.symmetry_ok = false;
        r.asymmetric_pairs.push_back({i, j});
      }
      if (d(i, j) <= 0.0 || d(j, i) <= 0.0) {
        r.positivity_ok = false;
        r.nonpositive_pairs.push_back({i, j});
      }
    }
  }

  // With a symmetric matrix (from,to) and (to,from) are the same constraint.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i || (r.symmetry_ok && k < i)) continue;
      const double direct = d(i, k);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || j == k) continue;
        const double excess = direct - d(i, j) - d(j, k);
        if (excess > tau) r.triangle_violations.push_back({i, k, j, excess});
      }
    }
  }
  return r;
}

ValidationReport validate_metric(const FiniteMetricSpace& m) { return validate_metric(m.dist()); }

namespace {

void require_same_shape(const DistanceMatrix& a, const DistanceMatrix& b) {
  if (a.size() != b.size()) {
    throw StructuralError("point sets differ in size: " + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()));
  }
}

void require_same_parent(const FiniteMetricSpace& m, const SubsetMask& a) {
  if (a.parent_size() != m.size()) {
    throw StructuralError("mask built for " + std::to_string(a.parent_size()) +
                          " points applied to a space of " + std::to_string(m.size()));
  }
}

}  // namespace

MetricDistance sup_norm_difference(const DistanceMatrix& d1, const DistanceMatrix& d2) {
  require_same_shape(d1, d2);
  MetricDistance out;
  for (std::size_t i = 0; i < d1.size(); ++i) {
    for (std::size_t j = 0; j < d1.size(); ++j) {
      const double gap = std::abs(d1(i, j) - d2(i, j));
      if (gap > out.value) out = {gap, {i, j}};
    }
  }
  return out;
}

MetricDistance rho_distance(const DistanceMatrix& d1, const DistanceMatrix& d2) {
  MetricDistance out = sup_norm_difference(d1, d2);
  out.value = std::min(1.0, out.value);
  return out;
}

MetricDistance rho_distance(const FiniteMetricSpace& m1, const FiniteMetricSpace& m2) {
  if (m1.labels() != m2.labels()) {
    throw StructuralError("rho_distance needs both metrics on the same ordered point set");
  }
  return rho_distance(m1.dist(), m2.dist());
}

double set_distance(const FiniteMetricSpace& m, const SubsetMask& a, const SubsetMask& b) {
  require_same_parent(m, a);
  require_same_parent(m, b);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t x : a.members())
    for (std::size_t y : b.members()) best = std::min(best, m(x, y));
  return best;
}

double point_set_distance(const FiniteMetricSpace& m, std::size_t x, const SubsetMask& a) {
  require_same_parent(m, a);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t y : a.members()) best = std::min(best, m(x, y));
  return best;
}

double sup_distance(const FiniteMetricSpace& m, const SubsetMask& a, const SubsetMask& b) {
  require_same_parent(m, a);
  require_same_parent(m, b);
  double best = 0.0;
  for (std::size_t x : a.members())
    for (std::size_t y : b.members()) best = std::max(best, m(x, y));
  return best;
}

double point_sup_distance(const FiniteMetricSpace& m, std::size_t x, const SubsetMask& a) {
  require_same_parent(m, a);
  double best = 0.0;
  for (std::size_t y : a.members()) best = std::max(best, m(x, y));
  return best;
}

double diameter(const FiniteMetricSpace& m, const SubsetMask& a) { return sup_distance(m, a, a); }

DistanceMatrix restrict(const DistanceMatrix& d, const SubsetMask& a) {
  if (a.parent_size() != d.size()) throw StructuralError("mask does not match matrix size");
  const auto& idx = a.members();
  DistanceMatrix out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) out(i, j) = d(idx[i], idx[j]);
  return out;
}

FiniteMetricSpace restrict(const FiniteMetricSpace& m, const SubsetMask& a) {
  require_same_parent(m, a);
  std::vector<std::string> labels;
  labels.reserve(a.size());
  for (std::size_t i : a.members()) labels.push_back(m.label(i));
  const std::size_t base = a.contains(m.base_point()) ? a.position_of(m.base_point()) : 0;
  return FiniteMetricSpace(restrict(m.dist(), a), std::move(labels), base);
}

ProportionalityResult check_proportional(const DistanceMatrix& a, const DistanceMatrix& b) {
  if (a.size() != b.size()) {
    throw StructuralError("proportionality check needs equal sizes: " +
                          std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  ProportionalityResult out;
  const std::size_t n = a.size();
  if (n < 2) {
    out.scale = 1.0;
    return out;
  }

  // The median ratio is insensitive to a single corrupted entry, so the
  // corrupted pair is the one reported as worst.
  std::vector<double> ratios;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (b(i, j) > 0.0) ratios.push_back(a(i, j) / b(i, j));
  if (ratios.empty()) return out;
  std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2, ratios.end());
  const double c = ratios[ratios.size() / 2];

  out.worst = {0, 1};
  out.worst_deviation = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dev = std::max(std::abs(a(i, j) - c * b(i, j)), std::abs(a(j, i) - c * b(j, i)));
      if (dev > out.worst_deviation) {
        out.worst_deviation = dev;
        out.worst = {i, j};
      }
    }
  }
  if (c > 0.0 && out.worst_deviation <= kMetricTolerance) out.scale = c;
  return out;
}

ProportionalityResult check_proportional(const FiniteMetricSpace& a, const FiniteMetricSpace& b) {
  return check_proportional(a.dist(), b.dist());
}

}  // namespace lipfree
