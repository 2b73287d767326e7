#include "lipfree/lipschitz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lipfree {

double lipschitz_constant(std::span<const double> values, const DistanceMatrix& d) {
  if (values.size() != d.size()) {
    throw StructuralError("function has " + std::to_string(values.size()) +
                          " values for a space of " + std::to_string(d.size()) + " points");
  }
  double best = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      const double diff = std::abs(values[i] - values[j]);
      if (diff == 0.0) continue;
      const double dist = std::min(d(i, j), d(j, i));
      if (dist <= 0.0) return std::numeric_limits<double>::infinity();
      best = std::max(best, diff / dist);
    }
  }
  return best;
}

LipschitzFunction LipschitzFunction::measure(std::vector<double> values, std::size_t base,
                                             const DistanceMatrix& d, std::string metric_name) {
  if (base >= values.size()) throw StructuralError("base point outside the function's domain");
  if (values[base] != 0.0) {
    throw StructuralError("function does not vanish at its base point (value " +
                          std::to_string(values[base]) + ")");
  }
  LipschitzFunction f;
  f.lip_constant = lipschitz_constant(values, d);
  f.values = std::move(values);
  f.base = base;
  f.metric_name = std::move(metric_name);
  return f;
}

LipschitzFunction distance_function(const FiniteMetricSpace& m, std::size_t source) {
  const std::size_t n = m.size();
  const double offset = m(m.base_point(), source);
  std::vector<double> values(n);
  for (std::size_t x = 0; x < n; ++x) values[x] = m(x, source) - offset;
  values[m.base_point()] = 0.0;
  return LipschitzFunction::measure(std::move(values), m.base_point(), m.dist());
}

LipschitzFunction random_polytope_vertex(const FiniteMetricSpace& m, std::mt19937_64& rng) {
  const std::size_t n = m.size();
  const std::size_t base = m.base_point();
  std::vector<std::size_t> order;
  order.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    if (i != base) order.push_back(i);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<double> values(n, 0.0);
  std::vector<std::size_t> placed{base};
  placed.reserve(n);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t p : order) {
    const bool upper = coin(rng);
    double v = upper ? std::numeric_limits<double>::infinity()
                     : -std::numeric_limits<double>::infinity();
    for (std::size_t q : placed) {
      v = upper ? std::min(v, values[q] + m(p, q)) : std::max(v, values[q] - m(p, q));
    }
    values[p] = v;
    placed.push_back(p);
  }
  return LipschitzFunction::measure(std::move(values), base, m.dist());
}

}  // namespace lipfree
