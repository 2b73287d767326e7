#pragma once

#include <cstddef>
#include <vector>

#include "lipfree/lipschitz.hpp"
#include "lipfree/metric_space.hpp"

namespace lipfree {

/// Gap allowed between primal transport cost and dual pairing.
inline constexpr double kDualityGapTolerance = 1e-7;

/// Finitely supported weights over the points of a space. Elements of the
/// free space are the zero-sum ones.
struct SignedMeasure {
  std::vector<double> weights;

  static SignedMeasure zero(std::size_t n) { return {std::vector<double>(n, 0.0)}; }
  /// delta_x - delta_y
  static SignedMeasure dipole(std::size_t n, std::size_t x, std::size_t y);

  double total() const;
  SignedMeasure operator+(const SignedMeasure& other) const;
  SignedMeasure operator*(double alpha) const;
};

struct Flow {
  std::size_t from = 0;
  std::size_t to = 0;
  double mass = 0.0;
};

struct TransportPlan {
  std::vector<Flow> flows;
  double cost = 0.0;
};

struct FreeNormResult {
  double value = 0.0;
  TransportPlan plan;
};

/// Kantorovich-Rubinstein norm of a zero-sum measure: the cheapest way to
/// move its positive part onto its negative part with unit cost d.
///
/// Solved by successive shortest paths on the bipartite graph between the
/// two supports. Throws StructuralError when |sum of weights| exceeds
/// kMetricTolerance or the sizes disagree.
FreeNormResult free_space_norm(const FiniteMetricSpace& m, const SignedMeasure& mu);

struct DualWitness {
  LipschitzFunction f;
  /// sum_x mu(x) f(x)
  double pairing = 0.0;
};

/// A 1-Lipschitz function attaining the norm.
///
/// Node potentials are recovered from the residual graph of `plan` by
/// Bellman-Ford, then extended to every point by the McShane envelope
/// x -> min_t (f(t) + d(x,t)) over the negative support and rebased.
/// Throws std::logic_error when the plan is not optimal.
DualWitness dual_witness(const FiniteMetricSpace& m, const SignedMeasure& mu,
                         const TransportPlan& plan);

struct ZeroExtensionNorm {
  /// sup over the based unit ball of Lip(A) of Lip_d(G f), G = extension by 0.
  double exact = 0.0;
  /// max(1, D(A) / d(A, M \ A))
  double bound = 0.0;
  /// A is a single point: only f = 0 exists, G is the zero map.
  bool degenerate = false;
};

/// Throws StructuralError when A is the whole space or does not contain the
/// base point.
ZeroExtensionNorm zero_extension_norm(const FiniteMetricSpace& m, const SubsetMask& a);

}  // namespace lipfree
