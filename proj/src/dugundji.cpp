#include "lipfree/dugundji.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace lipfree {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::size_t axiom_failures(const ValidationReport& vr) {
  return vr.triangle_violations.size() + vr.asymmetric_pairs.size() + vr.nonzero_diagonal.size() +
         vr.nonpositive_pairs.size();
}

// F(f) as plain values; f indexed by position in A.
std::vector<double> extend_values(const DugundjiSystem& sys, std::span<const double> f) {
  const std::size_t n = sys.ambient.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    if (sys.a.contains(x)) {
      out[x] = f[sys.a.position_of(x)];
      continue;
    }
    double v = 0.0;
    for (const CoverWeight& w : sys.weights[x]) v += w.lambda * f[sys.a.position_of(sys.anchors[w.center])];
    out[x] = v;
  }
  return out;
}

std::size_t tilde_base(const FiniteMetricSpace& ambient, const SubsetMask& a) {
  return a.contains(ambient.base_point()) ? ambient.base_point() : a.members().front();
}

}  // namespace

double DugundjiSystem::lambda(std::size_t x, std::size_t i) const {
  for (const CoverWeight& w : weights.at(x))
    if (w.center == i) return w.lambda;
  return 0.0;
}

DugundjiSystem build_dugundji_system(const FiniteMetricSpace& ambient, const SubsetMask& a, double eps) {
  if (!(eps > 0.0 && eps < kMaxExtensionEps)) {
    throw PreconditionError("eps = " + fmt(eps) + " is outside (0, 1/13)");
  }
  if (a.parent_size() != ambient.size()) throw StructuralError("A mask does not match the ambient space");

  DugundjiSystem sys{ambient, a, eps, {}, {}, {}, {}};
  const std::size_t n = ambient.size();
  sys.weights.resize(n);

  for (std::size_t x : a.complement()) {
    double nearest = std::numeric_limits<double>::infinity();
    std::size_t anchor = a.members().front();
    for (std::size_t y : a.members()) {
      if (ambient(x, y) < nearest) {
        nearest = ambient(x, y);
        anchor = y;
      }
    }
    if (nearest > eps) {
      throw PreconditionError("point " + ambient.label(x) + " has d(x,A) = " + fmt(nearest) +
                              " > eps = " + fmt(eps));
    }
    sys.centers.push_back(x);
    sys.radii.push_back(nearest / 3.0);
    sys.anchors.push_back(anchor);
  }

  const std::size_t nc = sys.centers.size();
  for (std::size_t x : a.complement()) {
    std::vector<CoverWeight> row;
    double total = 0.0;
    for (std::size_t i = 0; i < nc; ++i) {
      if (!sys.in_ball(x, i)) continue;
      // d(x, U_i^c) as an exact minimum over the points outside the ball.
      double gap = std::numeric_limits<double>::infinity();
      for (std::size_t y = 0; y < n; ++y)
        if (!sys.in_ball(y, i)) gap = std::min(gap, ambient(x, y));
      row.push_back({i, gap});
      total += gap;
    }
    for (CoverWeight& w : row) w.lambda /= total;
    sys.weights[x] = std::move(row);
  }
  return sys;
}

LipschitzFunction extend_function(const DugundjiSystem& sys, const LipschitzFunction& f) {
  if (f.values.size() != sys.a.size()) {
    throw StructuralError("function has " + std::to_string(f.values.size()) + " values, A has " +
                          std::to_string(sys.a.size()) + " points");
  }
  if (f.base >= sys.a.size()) throw StructuralError("function is not based in A");
  std::vector<double> values = extend_values(sys, f.values);
  return LipschitzFunction::measure(std::move(values), sys.a.members()[f.base], sys.ambient.dist(), "d");
}

SignedMeasure extension_measure(const DugundjiSystem& sys, std::size_t x) {
  SignedMeasure mu = SignedMeasure::zero(sys.a.size());
  if (sys.a.contains(x)) {
    mu.weights[sys.a.position_of(x)] = 1.0;
    return mu;
  }
  for (const CoverWeight& w : sys.weights.at(x)) mu.weights[sys.a.position_of(sys.anchors[w.center])] += w.lambda;
  return mu;
}

DistanceMatrix hat_metric(const DugundjiSystem& sys, const FiniteMetricSpace& d_a) {
  if (d_a.size() != sys.a.size()) {
    throw StructuralError("d_A has " + std::to_string(d_a.size()) + " points, A has " +
                          std::to_string(sys.a.size()));
  }
  const MetricDistance gap = rho_distance(d_a.dist(), restrict(sys.ambient.dist(), sys.a));
  if (gap.value > sys.eps + kMetricTolerance) {
    throw PreconditionError("rho_A(d_A, d|A) = " + fmt(gap.value) + " exceeds eps = " + fmt(sys.eps));
  }

  const std::size_t n = sys.ambient.size();
  std::vector<SignedMeasure> mus;
  mus.reserve(n);
  for (std::size_t x = 0; x < n; ++x) mus.push_back(extension_measure(sys, x));

  DistanceMatrix hd(n);
  SignedMeasure diff = SignedMeasure::zero(sys.a.size());
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      double v;
      if (sys.a.contains(x) && sys.a.contains(y)) {
        v = d_a(sys.a.position_of(x), sys.a.position_of(y));
      } else {
        for (std::size_t k = 0; k < diff.weights.size(); ++k)
          diff.weights[k] = mus[x].weights[k] - mus[y].weights[k];
        v = free_space_norm(d_a, diff).value;
      }
      hd.set_symmetric(x, y, v);
    }
  }
  return hd;
}

DistanceMatrix quotient_pseudometric(const FiniteMetricSpace& ambient, const SubsetMask& a) {
  const std::size_t n = ambient.size();
  std::vector<double> to_a(n);
  for (std::size_t x = 0; x < n; ++x) to_a[x] = point_set_distance(ambient, x, a);
  DistanceMatrix e(n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) e.set_symmetric(x, y, std::min(ambient(x, y), to_a[x] + to_a[y]));
  return e;
}

ExtensionResult build_tilde_d(const DugundjiSystem& sys, const FiniteMetricSpace& d_a) {
  const std::string stage = "extension";
  const double eps = sys.eps;
  const FiniteMetricSpace& d = sys.ambient;
  const std::size_t n = d.size();

  DistanceMatrix hd = hat_metric(sys, d_a);
  DistanceMatrix e = quotient_pseudometric(d, sys.a);
  DistanceMatrix td(n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) td(x, y) = hd(x, y) + e(x, y);
  FiniteMetricSpace tilde(std::move(td), d.labels(), tilde_base(d, sys.a));

  CertificateReport report;
  const MetricDistance ext_gap = sup_norm_difference(restrict(tilde.dist(), sys.a), d_a.dist());
  report.add("extends_dA", stage, ext_gap.value, 0.0, Relation::kEqual, "d~ on A^2 against d_A, bit-exact");

  const ValidationReport vr = validate_metric(tilde);
  std::string vdetail = "axiom failures";
  if (!vr.nonpositive_pairs.empty()) {
    const auto& p = vr.nonpositive_pairs.front();
    vdetail += "; non-positive at " + describe_pair(d, p.i, p.j);
  }
  report.add("tilde_metric_validity", stage, static_cast<double>(axiom_failures(vr)), 0.0, Relation::kEqual,
             vdetail);

  const MetricDistance rho = rho_distance(tilde.dist(), d.dist());
  report.add("rho_tilde_d", stage, rho.value, 13.0 * eps, Relation::kLessEqual,
             "pair " + describe_pair(d, rho.witness.i, rho.witness.j));

  const MetricDistance hat_dev = sup_norm_difference(hd, d.dist());
  report.add("hat_deviation", stage, hat_dev.value, 11.0 * eps, Relation::kLessEqual,
             "pair " + describe_pair(d, hat_dev.witness.i, hat_dev.witness.j));

  double e_sup = 0.0, e_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      e_sup = std::max(e_sup, e(x, y));
      if (x != y) e_excess = std::max(e_excess, e(x, y) - d(x, y));
    }
  }
  report.add("quotient_sup", stage, e_sup, 2.0 * eps, Relation::kLessEqual, "||e||_inf");
  if (n > 1) {
    report.add("quotient_below_d", stage, e_excess, 0.0, Relation::kLessEqual, "max(e - d)");
  } else {
    report.add_vacuous("quotient_below_d", stage, 0.0, Relation::kLessEqual, "one point");
  }

  const ValidationReport hv = validate_metric(hd);
  report.add("hat_pseudometric", stage,
             static_cast<double>(hv.triangle_violations.size() + hv.asymmetric_pairs.size() +
                                 hv.nonzero_diagonal.size()),
             0.0, Relation::kEqual, "pseudometric axiom failures of hd");

  if (!report.verdict()) {
    const CertificateEntry first = report.failures().front();
    throw CertificateFailure("extension certificate " + first.check + " failed: measured " +
                                 fmt(first.measured) + " " + relation_symbol(first.relation) + " " +
                                 fmt(first.bound) + " (" + first.detail + ")",
                             report);
  }
  return ExtensionResult{std::move(hd), std::move(e), std::move(tilde), std::move(report)};
}

CertificateReport certify_interior_bounds(const DugundjiSystem& sys, const FiniteMetricSpace& d_a,
                                          std::size_t samples, std::uint64_t seed) {
  const std::string stage = "extension_interior";
  const double eps = sys.eps;
  const FiniteMetricSpace& d = sys.ambient;
  CertificateReport report;
  const std::vector<std::size_t> outside = sys.a.complement();
  if (outside.empty()) {
    report.add_vacuous("partition_of_unity", stage, 0.0, Relation::kLessEqual, "A = T");
    report.add_vacuous("ball_radius", stage, eps / 3.0, Relation::kLessEqual, "A = T");
    report.add_vacuous("anchor_proximity", stage, 4.0 * eps / 3.0, Relation::kLessEqual, "A = T");
    report.add_vacuous("anchor_spread", stage, 8.0 * eps / 3.0, Relation::kLessEqual, "A = T");
    report.add_vacuous("extension_deviation", stage, 11.0 * eps / 3.0, Relation::kLessEqual, "A = T");
    return report;
  }

  double pou = 0.0, radius = 0.0, proximity = 0.0, spread = 0.0;
  for (std::size_t x : outside) {
    double sum = 0.0;
    for (const CoverWeight& w : sys.weights[x]) {
      sum += w.lambda;
      if (w.lambda < 0.0 || w.lambda > 1.0) pou = std::max(pou, std::max(-w.lambda, w.lambda - 1.0));
      if (!sys.in_ball(x, w.center)) pou = std::max(pou, w.lambda);
      radius = std::max(radius, d(x, sys.centers[w.center]));
      proximity = std::max(proximity, d(x, sys.anchors[w.center]));
      for (const CoverWeight& v : sys.weights[x])
        spread = std::max(spread, d(sys.anchors[w.center], sys.anchors[v.center]));
    }
    pou = std::max(pou, std::abs(sum - 1.0));
  }
  report.add("partition_of_unity", stage, pou, 0.0, Relation::kLessEqual,
             "max |sum lambda - 1|, lambda outside [0,1] or off its ball");
  report.add("ball_radius", stage, radius, eps / 3.0, Relation::kLessEqual, "max d(x, x_i) over x in U_i");
  report.add("anchor_proximity", stage, proximity, 4.0 * eps / 3.0, Relation::kLessEqual,
             "max d(x, a_i) over x in U_i");
  report.add("anchor_spread", stage, spread, 8.0 * eps / 3.0, Relation::kLessEqual,
             "max d(a_i, a_j) over x in U_i and U_j");

  std::mt19937_64 rng(seed);
  double deviation = 0.0;
  std::size_t functions = 0;
  auto probe = [&](const LipschitzFunction& f) {
    ++functions;
    const std::vector<double> fx = extend_values(sys, f.values);
    for (std::size_t x : outside) {
      for (const CoverWeight& w : sys.weights[x]) {
        const double anchor_value = f.values[sys.a.position_of(sys.anchors[w.center])];
        deviation = std::max(deviation, std::abs(fx[x] - anchor_value));
      }
    }
  };
  for (std::size_t p = 0; p < d_a.size(); ++p) probe(distance_function(d_a, p));
  for (std::size_t s = 0; s < samples; ++s) probe(random_polytope_vertex(d_a, rng));
  report.add("extension_deviation", stage, deviation, 11.0 * eps / 3.0, Relation::kLessEqual,
             "max |F(f)(x) - f(a_i)| over x in U_i, " + std::to_string(functions) + " unit-ball functions");
  return report;
}

std::optional<double> extension_ratio(const ExtensionResult& result, const DugundjiSystem& sys,
                                      const FiniteMetricSpace& d_a, const LipschitzFunction& g) {
  const double lip_a = lipschitz_constant(g.values, d_a.dist());
  if (lip_a == 0.0) return std::nullopt;
  const std::vector<double> fx = extend_values(sys, g.values);
  return lipschitz_constant(fx, result.tilde_d.dist()) / lip_a;
}

OperatorNormEstimate extension_operator_norm(const ExtensionResult& result, const DugundjiSystem& sys,
                                             const FiniteMetricSpace& d_a, std::size_t samples,
                                             std::uint64_t seed) {
  OperatorNormEstimate est;
  auto take = [&](const LipschitzFunction& g) {
    const std::optional<double> r = extension_ratio(result, sys, d_a, g);
    if (!r) {
      ++est.skipped_zero;
      return;
    }
    ++est.functions;
    est.value = std::max(est.value, *r);
  };
  for (std::size_t p = 0; p < d_a.size(); ++p) take(distance_function(d_a, p));
  std::mt19937_64 rng(seed);
  for (std::size_t s = 0; s < samples; ++s) take(random_polytope_vertex(d_a, rng));
  return est;
}

}  // namespace lipfree
