#include "lipfree/free_norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lipfree {

SignedMeasure SignedMeasure::dipole(std::size_t n, std::size_t x, std::size_t y) {
  SignedMeasure mu = zero(n);
  mu.weights.at(x) += 1.0;
  mu.weights.at(y) -= 1.0;
  return mu;
}

double SignedMeasure::total() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

SignedMeasure SignedMeasure::operator+(const SignedMeasure& other) const {
  if (other.weights.size() != weights.size()) throw StructuralError("measure sizes differ");
  SignedMeasure out = *this;
  for (std::size_t i = 0; i < weights.size(); ++i) out.weights[i] += other.weights[i];
  return out;
}

SignedMeasure SignedMeasure::operator*(double alpha) const {
  SignedMeasure out = *this;
  for (double& w : out.weights) w *= alpha;
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Supports {
  std::vector<std::size_t> sources;  // points with positive weight
  std::vector<std::size_t> sinks;    // points with negative weight
};

Supports split_support(const FiniteMetricSpace& m, const SignedMeasure& mu) {
  if (mu.weights.size() != m.size()) {
    throw StructuralError("measure has " + std::to_string(mu.weights.size()) +
                          " weights for a space of " + std::to_string(m.size()) + " points");
  }
  for (double w : mu.weights)
    if (!std::isfinite(w)) throw StructuralError("measure has a non-finite weight");
  const double total = mu.total();
  if (std::abs(total) > kMetricTolerance) {
    throw StructuralError("measure is not zero-sum (total " + std::to_string(total) +
                          "); it has no free-space representation");
  }
  Supports s;
  for (std::size_t i = 0; i < mu.weights.size(); ++i) {
    if (mu.weights[i] > 0.0) s.sources.push_back(i);
    if (mu.weights[i] < 0.0) s.sinks.push_back(i);
  }
  return s;
}

}  // namespace

FreeNormResult free_space_norm(const FiniteMetricSpace& m, const SignedMeasure& mu) {
  const Supports sup = split_support(m, mu);
  const std::size_t ns = sup.sources.size();
  const std::size_t nt = sup.sinks.size();
  FreeNormResult result;
  if (ns == 0 || nt == 0) return result;

  std::vector<double> supply(ns), demand(nt);
  double mass = 0.0;
  for (std::size_t s = 0; s < ns; ++s) mass += supply[s] = mu.weights[sup.sources[s]];
  for (std::size_t t = 0; t < nt; ++t) demand[t] = -mu.weights[sup.sinks[t]];
  const double mass_tol = 1e-12 * std::max(1.0, mass);

  auto cost = [&](std::size_t s, std::size_t t) { return m(sup.sources[s], sup.sinks[t]); };

  // Nodes 0..ns-1 are sources, ns..ns+nt-1 sinks. Forward arcs s->t are
  // uncapacitated; a backward arc t->s exists while flow(s,t) > 0.
  const std::size_t nv = ns + nt;
  std::vector<double> flow(ns * nt, 0.0);
  std::vector<double> potential(nv, 0.0);
  std::vector<double> dist(nv);
  std::vector<std::size_t> pred(nv);
  std::vector<char> done(nv);
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  for (;;) {
    bool any_supply = false, any_demand = false;
    for (double a : supply) any_supply |= a > mass_tol;
    for (double b : demand) any_demand |= b > mass_tol;
    if (!any_supply || !any_demand) break;

    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(pred.begin(), pred.end(), kNone);
    std::fill(done.begin(), done.end(), 0);
    for (std::size_t s = 0; s < ns; ++s)
      if (supply[s] > mass_tol) dist[s] = 0.0;

    std::size_t target = kNone;
    for (std::size_t iter = 0; iter < nv; ++iter) {
      std::size_t u = kNone;
      double best = kInf;
      for (std::size_t v = 0; v < nv; ++v) {
        if (!done[v] && dist[v] < best) {
          best = dist[v];
          u = v;
        }
      }
      if (u == kNone) break;
      done[u] = 1;
      if (u >= ns && demand[u - ns] > mass_tol) {
        target = u;
        break;
      }
      if (u < ns) {
        for (std::size_t t = 0; t < nt; ++t) {
          const std::size_t v = ns + t;
          if (done[v]) continue;
          const double rc = std::max(0.0, cost(u, t) + potential[u] - potential[v]);
          if (dist[u] + rc < dist[v]) {
            dist[v] = dist[u] + rc;
            pred[v] = u;
          }
        }
      } else {
        const std::size_t t = u - ns;
        for (std::size_t s = 0; s < ns; ++s) {
          if (done[s] || flow[s * nt + t] <= 0.0) continue;
          const double rc = std::max(0.0, -cost(s, t) + potential[u] - potential[s]);
          if (dist[u] + rc < dist[s]) {
            dist[s] = dist[u] + rc;
            pred[s] = u;
          }
        }
      }
    }
    if (target == kNone) throw std::logic_error("free_space_norm: no augmenting path");

    const double reach = dist[target];
    for (std::size_t v = 0; v < nv; ++v) potential[v] += std::min(dist[v], reach);

    // Bottleneck along the path; backward arcs are limited by their flow.
    double delta = demand[target - ns];
    std::size_t v = target;
    while (pred[v] != kNone) {
      const std::size_t u = pred[v];
      if (u >= ns) delta = std::min(delta, flow[v * nt + (u - ns)]);
      v = u;
    }
    const std::size_t origin = v;
    delta = std::min(delta, supply[origin]);

    v = target;
    while (pred[v] != kNone) {
      const std::size_t u = pred[v];
      if (u < ns) {
        flow[u * nt + (v - ns)] += delta;
      } else {
        double& f = flow[v * nt + (u - ns)];
        f = (f == delta) ? 0.0 : f - delta;
        if (f < 0.0) f = 0.0;
      }
      v = u;
    }
    supply[origin] = (supply[origin] == delta) ? 0.0 : supply[origin] - delta;
    double& d_left = demand[target - ns];
    d_left = (d_left == delta) ? 0.0 : d_left - delta;
  }

  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t t = 0; t < nt; ++t) {
      const double f = flow[s * nt + t];
      if (f <= 0.0) continue;
      result.plan.flows.push_back({sup.sources[s], sup.sinks[t], f});
      result.plan.cost += f * cost(s, t);
    }
  }
  result.value = result.plan.cost;
  return result;
}

DualWitness dual_witness(const FiniteMetricSpace& m, const SignedMeasure& mu,
                         const TransportPlan& plan) {
  const Supports sup = split_support(m, mu);
  const std::size_t n = m.size();
  const std::size_t ns = sup.sources.size();
  const std::size_t nt = sup.sinks.size();

  std::vector<double> values(n, 0.0);
  if (ns > 0 && nt > 0) {
    constexpr std::size_t kAbsent = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> source_slot(n, kAbsent), sink_slot(n, kAbsent);
    for (std::size_t s = 0; s < ns; ++s) source_slot[sup.sources[s]] = s;
    for (std::size_t t = 0; t < nt; ++t) sink_slot[sup.sinks[t]] = t;

    std::vector<char> carries(ns * nt, 0);
    double max_cost = 0.0;
    for (const Flow& fl : plan.flows) {
      if (fl.from >= n || fl.to >= n || source_slot[fl.from] == kAbsent ||
          sink_slot[fl.to] == kAbsent) {
        throw std::logic_error("dual_witness: plan moves mass outside the measure's support");
      }
      if (fl.mass > 0.0) carries[source_slot[fl.from] * nt + sink_slot[fl.to]] = 1;
    }
    for (std::size_t s : sup.sources)
      for (std::size_t t : sup.sinks) max_cost = std::max(max_cost, m(s, t));

    // Shortest-path potentials on the residual graph from a virtual root.
    // They exist iff the residual graph has no negative cycle, i.e. iff the
    // plan is optimal.
    const double relax_tol = 1e-12 * (1.0 + max_cost);
    std::vector<double> pot(ns + nt, 0.0);
    bool changed = true;
    for (std::size_t round = 0; changed; ++round) {
      if (round > ns + nt) throw std::logic_error("dual_witness: plan is not optimal");
      changed = false;
      for (std::size_t s = 0; s < ns; ++s) {
        for (std::size_t t = 0; t < nt; ++t) {
          const double c = m(sup.sources[s], sup.sinks[t]);
          if (pot[s] + c < pot[ns + t] - relax_tol) {
            pot[ns + t] = pot[s] + c;
            changed = true;
          }
          if (carries[s * nt + t] && pot[ns + t] - c < pot[s] - relax_tol) {
            pot[s] = pot[ns + t] - c;
            changed = true;
          }
        }
      }
    }

    for (std::size_t x = 0; x < n; ++x) {
      double v = kInf;
      for (std::size_t t = 0; t < nt; ++t) v = std::min(v, -pot[ns + t] + m(x, sup.sinks[t]));
      values[x] = v;
    }
    const double shift = values[m.base_point()];
    for (double& v : values) v -= shift;
  }

  DualWitness w;
  w.f = LipschitzFunction::measure(std::move(values), m.base_point(), m.dist());
  for (std::size_t x = 0; x < n; ++x) w.pairing += mu.weights[x] * w.f.values[x];
  return w;
}

ZeroExtensionNorm zero_extension_norm(const FiniteMetricSpace& m, const SubsetMask& a) {
  if (a.parent_size() != m.size()) throw StructuralError("mask does not match the space");
  if (a.is_whole()) throw StructuralError("zero extension needs A to be a proper subset");
  if (!a.contains(m.base_point())) throw StructuralError("base point must lie in A");

  const std::vector<std::size_t> outside = a.complement();
  const SubsetMask rest(m.size(), outside);
  ZeroExtensionNorm out;
  out.bound = std::max(1.0, diameter(m, a) / set_distance(m, a, rest));
  if (a.size() == 1) {
    out.degenerate = true;
    out.exact = 0.0;
    return out;
  }

  // f = d(., x0) maximises |f(x)| for every x in A at once while keeping
  // Lip = 1 inside A, so it realises the supremum.
  const std::size_t x0 = m.base_point();
  out.exact = 1.0;
  for (std::size_t x : a.members())
    for (std::size_t y : outside) out.exact = std::max(out.exact, m(x, x0) / m(x, y));
  return out;
}

}  // namespace lipfree
