#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lipfree/errors.hpp"

namespace lipfree {

/// Absolute tolerance used by every metric-axiom and certificate comparison.
inline constexpr double kMetricTolerance = 1e-9;

/// Dense square matrix of pairwise values, stored row-major.
///
/// Holds metrics, pseudometrics and arbitrary candidate matrices alike; the
/// only structural guarantees are squareness and finiteness of entries.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n, double fill = 0.0);

  /// Throws StructuralError on ragged rows or non-finite entries.
  static DistanceMatrix from_rows(const std::vector<std::vector<double>>& rows);
  /// `values` must hold n*n entries.
  static DistanceMatrix from_flat(std::size_t n, std::vector<double> values);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * n_, n_};
  }
  const std::vector<double>& flat() const { return data_; }

  /// Sets (i,j) and (j,i) together.
  void set_symmetric(std::size_t i, std::size_t j, double value) {
    (*this)(i, j) = value;
    (*this)(j, i) = value;
  }

  bool operator==(const DistanceMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// A finite pointed space: labels, a distance matrix and a base point.
///
/// Construction checks shape only. Whether the matrix satisfies the metric
/// axioms is answered by validate_metric().
class FiniteMetricSpace {
 public:
  /// Empty labels default to "0", "1", ... Throws StructuralError for a
  /// zero-point space, a label count mismatch or an out-of-range base point.
  explicit FiniteMetricSpace(DistanceMatrix dist, std::vector<std::string> labels = {},
                             std::size_t base_point = 0);

  std::size_t size() const { return dist_.size(); }
  double operator()(std::size_t i, std::size_t j) const { return dist_(i, j); }
  const DistanceMatrix& dist() const { return dist_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  std::size_t base_point() const { return base_point_; }

  FiniteMetricSpace with_base_point(std::size_t base) const;

  bool operator==(const FiniteMetricSpace&) const = default;

 private:
  DistanceMatrix dist_;
  std::vector<std::string> labels_;
  std::size_t base_point_ = 0;
};

/// A non-empty subset of the points of a parent space, kept sorted.
class SubsetMask {
 public:
  /// Throws StructuralError when `members` is empty or out of range.
  /// Duplicates are collapsed.
  SubsetMask(std::size_t parent_size, std::vector<std::size_t> members);

  static SubsetMask all(std::size_t parent_size);

  std::size_t parent_size() const { return flags_.size(); }
  std::size_t size() const { return members_.size(); }
  const std::vector<std::size_t>& members() const { return members_; }
  bool contains(std::size_t i) const { return i < flags_.size() && flags_[i]; }
  /// Parent indices not in the mask, ascending; may be empty.
  std::vector<std::size_t> complement() const;
  /// Position of parent index `i` within members(); `i` must be a member.
  std::size_t position_of(std::size_t i) const;
  bool is_whole() const { return members_.size() == flags_.size(); }

  bool operator==(const SubsetMask& other) const { return flags_ == other.flags_; }

 private:
  std::vector<std::size_t> members_;
  std::vector<bool> flags_;
};

struct TriangleViolation {
  std::size_t from;
  std::size_t to;
  std::size_t via;
  /// d(from,to) - d(from,via) - d(via,to)
  double excess;
};

struct IndexPair {
  std::size_t i;
  std::size_t j;
};

struct ValidationReport {
  bool symmetry_ok = true;
  bool diagonal_ok = true;
  bool positivity_ok = true;
  std::vector<IndexPair> asymmetric_pairs;
  std::vector<std::size_t> nonzero_diagonal;
  std::vector<IndexPair> nonpositive_pairs;
  std::vector<TriangleViolation> triangle_violations;
  double tolerance = kMetricTolerance;

  bool is_metric() const {
    return symmetry_ok && diagonal_ok && positivity_ok && triangle_violations.empty();
  }
  /// Metric axioms with positivity relaxed to non-negativity.
  bool is_pseudometric() const {
    return symmetry_ok && diagonal_ok && triangle_violations.empty();
  }
};

/// Exhaustive O(n^3) check of the metric axioms within kMetricTolerance.
ValidationReport validate_metric(const DistanceMatrix& d);
ValidationReport validate_metric(const FiniteMetricSpace& m);

/// sup over pairs of min(1, |d1 - d2|), with the pair attaining it.
struct MetricDistance {
  double value = 0.0;
  IndexPair witness{0, 0};
};

MetricDistance rho_distance(const DistanceMatrix& d1, const DistanceMatrix& d2);
/// Also requires identical label sequences.
MetricDistance rho_distance(const FiniteMetricSpace& m1, const FiniteMetricSpace& m2);

/// Uncapped sup-norm of d1 - d2.
MetricDistance sup_norm_difference(const DistanceMatrix& d1, const DistanceMatrix& d2);

/// inf over x in A, y in B of d(x,y).
double set_distance(const FiniteMetricSpace& m, const SubsetMask& a, const SubsetMask& b);
/// d(x, A).
double point_set_distance(const FiniteMetricSpace& m, std::size_t x, const SubsetMask& a);
/// sup over x in A, y in B of d(x,y).
double sup_distance(const FiniteMetricSpace& m, const SubsetMask& a, const SubsetMask& b);
/// D(x, A).
double point_sup_distance(const FiniteMetricSpace& m, std::size_t x, const SubsetMask& a);
double diameter(const FiniteMetricSpace& m, const SubsetMask& a);

/// The induced subspace on A. Entries are copied bit-for-bit; the base point
/// is kept when it lies in A, otherwise the lowest member becomes the base.
FiniteMetricSpace restrict(const FiniteMetricSpace& m, const SubsetMask& a);
DistanceMatrix restrict(const DistanceMatrix& d, const SubsetMask& a);

struct ProportionalityResult {
  /// c with dA = c * dB entrywise, when one exists.
  std::optional<double> scale;
  /// Pair with the largest |dA - c*dB| for the candidate c.
  IndexPair worst{0, 0};
  double worst_deviation = 0.0;
};

/// Points are matched by position. Throws StructuralError on size mismatch.
ProportionalityResult check_proportional(const FiniteMetricSpace& a, const FiniteMetricSpace& b);
ProportionalityResult check_proportional(const DistanceMatrix& a, const DistanceMatrix& b);

}  // namespace lipfree
