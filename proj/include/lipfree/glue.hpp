#pragma once

#include "lipfree/cantor.hpp"
#include "lipfree/certificate.hpp"
#include "lipfree/metric_space.hpp"

namespace lipfree {

/// K together with every ambient point at distance >= eps from K.
/// Every ambient point ends up within eps of the result.
SubsetMask carve_C(const FiniteMetricSpace& ambient, const SubsetMask& k, double eps);

/// d_C on C, glued from d_K on K and the ambient metric on C \ K.
struct GluedMetric {
  SubsetMask c;  ///< in ambient indices
  SubsetMask k;  ///< in ambient indices, a subset of c
  /// Points are the members of c in ascending ambient order.
  FiniteMetricSpace space;
  /// Partition of K, in positions within k.members().
  Partition partition;
  double eps = 0.0;
};

/// Which of the four defining cases an entry of d_C comes from.
enum class GlueCase { kBothInK, kFirstOutside, kSecondOutside, kBothOutside };

/// Builds d_C on C = carve_C(ambient, K, eps):
///   d_K(x,y)                     x, y in K
///   D(x, K_i) + eps/2            x in C \ K, y in K_i (and symmetrically)
///   d(x,y)                       x, y in C \ K
/// with D measured in the ambient metric.
///
/// `dk` must be on K in ascending ambient order and must pass
/// certify_partition_metric against the ambient metric restricted to K;
/// otherwise PreconditionError. Any eps > 0 is accepted here.
GluedMetric build_dC(const FiniteMetricSpace& ambient, const SubsetMask& k,
                     const PartitionedCantorMetric& dk, double eps);

/// Case of the entry (i, j) of g.space, by mask membership.
GlueCase glue_case(const GluedMetric& g, std::size_t i, std::size_t j);

/// Metric axioms, rho_C(d_C, d|C) <= eps, separation d_C(K, C \ K) >= eps/2,
/// and the mixed-pair estimate |d_C - d| <= D(K_i) + eps/2 < eps.
CertificateReport certify_dC(const GluedMetric& g, const FiniteMetricSpace& ambient);

}  // namespace lipfree
