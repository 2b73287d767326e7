#pragma once

// Random instance generators shared by the unit tests and the acceptance
// binary. All draws go through a caller-owned std::mt19937_64.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "lipfree/free_norm.hpp"
#include "lipfree/metric_space.hpp"
#include "oracles.hpp"

namespace gen {

using lipfree::DistanceMatrix;
using lipfree::FiniteMetricSpace;
using lipfree::SignedMeasure;
using lipfree::SubsetMask;

inline std::size_t uniform_size(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// n points in the unit cube of dimension `dim`, Euclidean distances.
inline FiniteMetricSpace euclidean_space(std::mt19937_64& rng, std::size_t n, std::size_t dim = 2) {
  std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
  for (auto& p : pts)
    for (double& c : p) c = uniform(rng, 0.0, 1.0);
  DistanceMatrix d(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) s += (pts[i][k] - pts[j][k]) * (pts[i][k] - pts[j][k]);
      d.set_symmetric(i, j, std::sqrt(s));
    }
  return FiniteMetricSpace(std::move(d));
}

/// Shortest-path metric of a complete graph with weights in [lo, hi].
inline FiniteMetricSpace graph_space(std::mt19937_64& rng, std::size_t n, double lo = 0.1, double hi = 1.0) {
  DistanceMatrix w(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) w.set_symmetric(i, j, uniform(rng, lo, hi));
  return FiniteMetricSpace(oracle::floyd_warshall(std::move(w)));
}

/// Alternates between the two families above.
inline FiniteMetricSpace any_space(std::mt19937_64& rng, std::size_t n) {
  if (std::bernoulli_distribution(0.5)(rng)) return euclidean_space(rng, n, uniform_size(rng, 1, 3));
  return graph_space(rng, n);
}

/// `k` distinct indices of 0..n-1, sorted; `forced` (if < n) is always included.
inline std::vector<std::size_t> random_subset(std::mt19937_64& rng, std::size_t n, std::size_t k,
                                              std::size_t forced = static_cast<std::size_t>(-1)) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(k);
  if (forced < n && std::find(idx.begin(), idx.end(), forced) == idx.end()) idx.back() = forced;
  std::sort(idx.begin(), idx.end());
  return idx;
}

/// Zero-sum measure supported on `support` random points.
inline SignedMeasure random_measure(std::mt19937_64& rng, std::size_t n, std::size_t support) {
  support = std::max<std::size_t>(2, std::min(support, n));
  const std::vector<std::size_t> pts = random_subset(rng, n, support);
  SignedMeasure mu = SignedMeasure::zero(n);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    mu.weights[pts[i]] = uniform(rng, -1.0, 1.0);
    sum += mu.weights[pts[i]];
  }
  mu.weights[pts.back()] = -sum;
  return mu;
}

struct Setup {
  FiniteMetricSpace t;
  SubsetMask a;
  double eps;
  FiniteMetricSpace d_a;
};

// A dense cloud with an eps-net A, so that balls overlap and anchors vary.
// d_A is d|A, d|A scaled up slightly, or d|A plus a constant, each within
// eps of d|A.
inline Setup extension_setup(std::mt19937_64& rng, std::size_t n, std::size_t max_a = 1000) {
  const double eps = uniform(rng, 0.02, 0.075);
  const std::size_t dim = uniform_size(rng, 1, 2);
  const double side = dim == 1 ? uniform(rng, 0.1, 0.5) : uniform(rng, 0.08, 0.25);
  auto base = euclidean_space(rng, n, dim);
  DistanceMatrix d = base.dist();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d(i, j) *= side;
  FiniteMetricSpace t(std::move(d));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> members{0};
  const double reach = eps * uniform(rng, 0.5, 1.0);
  for (std::size_t x : order) {
    double near = 1e9;
    for (std::size_t y : members) near = std::min(near, t(x, y));
    if (near > reach && members.size() < max_a) members.push_back(x);
  }
  SubsetMask a(n, members);
  for (std::size_t x = 0; x < n; ++x)
    if (point_set_distance(t, x, a) > eps) {
      members.push_back(x);
    }
  a = SubsetMask(n, members);

  DistanceMatrix da = restrict(t.dist(), a);
  const std::size_t kind = uniform_size(rng, 0, 2);
  const double diam = diameter(t, a);
  for (std::size_t i = 0; i < da.size(); ++i)
    for (std::size_t j = 0; j < da.size(); ++j) {
      if (i == j) continue;
      if (kind == 1 && diam > 0.0) da(i, j) *= 1.0 + 0.9 * eps / diam;
      if (kind == 2) da(i, j) += 0.9 * eps;
    }
  return {t, a, eps, FiniteMetricSpace(da)};
}

}  // namespace gen
