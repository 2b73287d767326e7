#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lipfree/metric_space.hpp"

namespace lipfree {

/// Largest difference quotient |f(x)-f(y)| / d(x,y) over pairs with d > 0.
/// Pairs at distance zero with differing values yield +infinity.
double lipschitz_constant(std::span<const double> values, const DistanceMatrix& d);

/// A real function on the points of a space that vanishes at its base point,
/// together with its Lipschitz constant against the metric it was measured in.
struct LipschitzFunction {
  std::vector<double> values;
  std::size_t base = 0;
  double lip_constant = 0.0;
  /// Name of the metric `lip_constant` refers to ("d", "d_A", "d~", ...).
  std::string metric_name;

  /// Throws StructuralError when sizes disagree or values[base] != 0.
  static LipschitzFunction measure(std::vector<double> values, std::size_t base,
                                   const DistanceMatrix& d, std::string metric_name = "d");
};

/// x -> d(x, source) - d(base, source); a 1-Lipschitz function vanishing at
/// the base point.
LipschitzFunction distance_function(const FiniteMetricSpace& m, std::size_t source);

/// A vertex of the polytope {f : f(base) = 0, |f(x)-f(y)| <= d(x,y)}.
///
/// Points are visited in a random order starting from the base; each new
/// point takes either the largest or the smallest value compatible with the
/// points already placed, so it is tight against one of them. The tight
/// constraints form a spanning tree, which pins down a vertex.
LipschitzFunction random_polytope_vertex(const FiniteMetricSpace& m, std::mt19937_64& rng);

}  // namespace lipfree
