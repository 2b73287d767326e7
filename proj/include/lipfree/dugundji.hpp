#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "lipfree/certificate.hpp"
#include "lipfree/free_norm.hpp"
#include "lipfree/lipschitz.hpp"
#include "lipfree/metric_space.hpp"

namespace lipfree {

/// Upper end (exclusive) of the admissible eps range.
inline constexpr double kMaxExtensionEps = 1.0 / 13.0;

struct CoverWeight {
  std::size_t center = 0;  ///< index into DugundjiSystem::centers
  double lambda = 0.0;
};

/// Cover of T \ A by balls U_i = B(x_i, d(x_i,A)/3) with anchors a_i in A and
/// the partition of unity lambda_i(x) = d(x, U_i^c) / sum_j d(x, U_j^c).
///
/// Every point of T \ A is a center. Indices are ambient indices.
struct DugundjiSystem {
  FiniteMetricSpace ambient;
  SubsetMask a;
  double eps = 0.0;
  std::vector<std::size_t> centers;
  std::vector<double> radii;
  std::vector<std::size_t> anchors;
  /// Non-zero weights per ambient point; empty for points of A.
  std::vector<std::vector<CoverWeight>> weights;

  /// lambda_i(x) for ambient point x and center slot i.
  double lambda(std::size_t x, std::size_t i) const;
  /// x in U_i, i.e. d(x, x_i) < r_i.
  bool in_ball(std::size_t x, std::size_t i) const {
    return ambient(x, centers[i]) < radii[i];
  }
};

/// Throws PreconditionError unless eps is in (0, 1/13) and d(x, A) <= eps for
/// every x; the message names a witness point. A = T is allowed and yields
/// no centers.
DugundjiSystem build_dugundji_system(const FiniteMetricSpace& ambient, const SubsetMask& a, double eps);

/// F(f): f on A, sum_i lambda_i(x) f(a_i) elsewhere. `f` is indexed by
/// position in A and must vanish at its base (a position in A). The result
/// is indexed by ambient point and based at the ambient index of f's base;
/// its Lipschitz constant is measured in the ambient metric.
LipschitzFunction extend_function(const DugundjiSystem& sys, const LipschitzFunction& f);

/// The measure mu_x on A with <mu_x, f> = F(f)(x).
SignedMeasure extension_measure(const DugundjiSystem& sys, std::size_t x);

/// hd(x,y) = sup over the unit ball of Lip0(A, d_A) of |F(f)(x) - F(f)(y)|,
/// evaluated as the free norm of mu_x - mu_y in (A, d_A). Entries on A^2 are
/// copied from d_A. Throws PreconditionError when rho_A(d_A, d|A) > eps.
DistanceMatrix hat_metric(const DugundjiSystem& sys, const FiniteMetricSpace& d_a);

/// e(x,y) = min(d(x,y), d(x,A) + d(y,A)), the largest pseudometric below d
/// that vanishes on A.
DistanceMatrix quotient_pseudometric(const FiniteMetricSpace& ambient, const SubsetMask& a);

struct ExtensionResult {
  DistanceMatrix hat_d;
  DistanceMatrix quotient_e;
  FiniteMetricSpace tilde_d;
  CertificateReport certificates;
};

/// d~ = hd + e with its certificates: extension of d_A, metric axioms,
/// rho_T(d~, d) <= 13 eps, |hd - d| <= 11 eps, ||e|| <= 2 eps.
/// Throws CertificateFailure (carrying the report) when any of them fails.
ExtensionResult build_tilde_d(const DugundjiSystem& sys, const FiniteMetricSpace& d_a);

/// The intermediate estimates of the extension argument: partition of
/// unity, d(x,x_i) <= eps/3 and d(x,a_i) <= 4/3 eps on U_i,
/// d(a_i,a_j) <= 8/3 eps on U_i and U_j, and
/// |F(f)(x) - f(a_i)| <= 11/3 eps over `samples` random vertices of the unit
/// ball of Lip0(A, d_A) plus all distance functions.
CertificateReport certify_interior_bounds(const DugundjiSystem& sys, const FiniteMetricSpace& d_a,
                                          std::size_t samples, std::uint64_t seed);

struct OperatorNormEstimate {
  /// Largest Lip_{d~}(F g) / Lip_{d_A}(g) seen.
  double value = 0.0;
  std::size_t functions = 0;
  std::size_t skipped_zero = 0;
};

/// Lip_{d~}(F g) / Lip_{d_A}(g), or nullopt when g is constant.
std::optional<double> extension_ratio(const ExtensionResult& result, const DugundjiSystem& sys,
                                      const FiniteMetricSpace& d_a, const LipschitzFunction& g);

/// Maximum ratio over every distance function d_A(., a) and `samples` random
/// polytope vertices.
OperatorNormEstimate extension_operator_norm(const ExtensionResult& result, const DugundjiSystem& sys,
                                             const FiniteMetricSpace& d_a, std::size_t samples,
                                             std::uint64_t seed);

}  // namespace lipfree
