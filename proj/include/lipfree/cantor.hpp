#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lipfree/certificate.hpp"
#include "lipfree/metric_space.hpp"

namespace lipfree {

inline constexpr int kMaxCantorLevel = 16;

/// Depth-`level` truncation of the middle-thirds Cantor set.
///
/// Point i has the binary address given by the `level` bits of i, most
/// significant first, and sits at sum_k 2 a_k / 3^k. Address order and
/// coordinate order coincide.
struct CantorModel {
  int level = 0;
  std::vector<std::uint32_t> addresses;
  std::vector<double> coordinates;

  std::size_t size() const { return addresses.size(); }
  /// Address as a string of '0'/'1' characters.
  std::string address_string(std::size_t i) const;
  /// Letter k (0-based) of point i's address.
  int letter(std::size_t i, int k) const {
    return static_cast<int>((addresses[i] >> (level - 1 - k)) & 1u);
  }
  /// |x - y| on the embedded coordinates scaled by `scale`. Labels are the
  /// addresses prefixed by `label_prefix`.
  FiniteMetricSpace space(double scale = 1.0, const std::string& label_prefix = "") const;
};

/// Throws StructuralError unless 1 <= level <= kMaxCantorLevel.
CantorModel build_cantor_model(int level);

/// Disjoint non-empty blocks covering 0..point_count-1, each block sorted.
struct Partition {
  std::vector<std::vector<std::size_t>> blocks;
  std::size_t point_count = 0;

  std::size_t size() const { return blocks.size(); }
  /// Block index of every point.
  std::vector<std::size_t> block_index() const;
  SubsetMask block_mask(std::size_t i) const { return SubsetMask(point_count, blocks[i]); }
  /// Throws StructuralError when the blocks are not a partition.
  void check() const;

  bool operator==(const Partition&) const = default;
};

/// Blocks of diameter < eps/2 for an arbitrary space: greedy balls of
/// radius eps/4 around the lowest unassigned index, or one block when the
/// whole space already qualifies.
Partition partition_by_diameter(const FiniteMetricSpace& m, double eps);

/// Greedy prefix refinement for a space whose points carry the addresses of
/// `model` (same order): a prefix class is kept once its diameter in `m` is
/// below eps/2, otherwise split on the next address letter. Blocks are
/// prefix classes, emitted in address order.
Partition partition_by_diameter(const FiniteMetricSpace& m, double eps, const CantorModel& model);

/// The metric d_K on K together with how it was built.
struct PartitionedCantorMetric {
  FiniteMetricSpace space;
  Partition partition;
  /// c_i: inside block i, d_K = c_i * e on the assigned seed points.
  std::vector<double> block_scales;
  FiniteMetricSpace seed;
  /// Seed index assigned to each point of each block, parallel to
  /// partition.blocks.
  std::vector<std::vector<std::size_t>> seed_assignment;
};

/// Builds d_K from the reference metric d on K, a partition with blocks of
/// d-diameter < eps/2 and a seed metric e.
///
/// Across blocks d_K(x,y) = D(K_i,K_j) measured in d. Inside block i,
/// d_K = c_i e on seed points chosen order-preserving with an even stride,
/// where
///   c_i = 0.99 * min((eps - D(K_i)) / diam e_i, 2 min_{j != i} D(K_i,K_j) / diam e_i)
/// (the second term only when there are several blocks; c_i = 1 for
/// singleton blocks). The first term keeps ||d_K - d|| < eps and the second
/// keeps the triangle inequality across blocks.
///
/// Throws ConstructionError when a block is too wide, the seed is too small
/// or a scale comes out non-positive.
PartitionedCantorMetric build_dK(const FiniteMetricSpace& reference, const Partition& partition,
                                 const FiniteMetricSpace& seed, double eps);

/// Independent re-measurement of everything build_dK promises.
CertificateReport certify_partition_metric(const PartitionedCantorMetric& pm,
                                           const FiniteMetricSpace& reference, double eps);

}  // namespace lipfree
