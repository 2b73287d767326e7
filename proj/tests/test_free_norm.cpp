#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "lipfree/free_norm.hpp"
#include "oracles.hpp"

using namespace lipfree;

namespace {

FiniteMetricSpace three_point() {
  // x0, a, b with d(x0,a) = d(x0,b) = 1 and d(a,b) = 2.
  return FiniteMetricSpace(DistanceMatrix::from_rows({{0, 1, 1}, {1, 0, 2}, {1, 2, 0}}), {"x0", "a", "b"});
}

void check_plan(const FiniteMetricSpace& m, const SignedMeasure& mu, const FreeNormResult& r) {
  std::vector<double> net(m.size(), 0.0);
  double cost = 0.0;
  for (const Flow& f : r.plan.flows) {
    CHECK(f.mass >= 0.0);
    net[f.from] += f.mass;
    net[f.to] -= f.mass;
    cost += f.mass * m(f.from, f.to);
  }
  for (std::size_t x = 0; x < m.size(); ++x) CHECK(net[x] == doctest::Approx(mu.weights[x]).epsilon(1e-9));
  CHECK(cost == doctest::Approx(r.plan.cost).epsilon(1e-12));
  CHECK(r.value == r.plan.cost);
}

}  // namespace

TEST_CASE("hand-computed norms") {
  const auto m = three_point();
  CHECK(free_space_norm(m, SignedMeasure::zero(3)).value == 0.0);
  CHECK(free_space_norm(m, SignedMeasure::dipole(3, 1, 2)).value == 2.0);
  const SignedMeasure mu{{-2.0, 1.0, 1.0}};
  const FreeNormResult r = free_space_norm(m, mu);
  CHECK(r.value == doctest::Approx(2.0));
  check_plan(m, mu, r);
}

TEST_CASE("measures that do not sum to zero are refused") {
  CHECK_THROWS_AS(free_space_norm(three_point(), SignedMeasure{{1.0, 0.0, 0.0}}), StructuralError);
  CHECK_THROWS_AS(free_space_norm(three_point(), SignedMeasure{{1.0, -1.0}}), StructuralError);
}

TEST_CASE("property: dipoles embed isometrically") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 5; ++t) {
    const auto m = gen::any_space(rng, 25);
    for (std::size_t x = 0; x < 25; ++x)
      for (std::size_t y = 0; y < 25; ++y) {
        const FreeNormResult r = free_space_norm(m, SignedMeasure::dipole(25, x, y));
        CHECK(std::abs(r.value - m(x, y)) <= kMetricTolerance);
      }
  }
}

TEST_CASE("dual witness for a dipole is a distance function") {
  const auto m = three_point();
  const SignedMeasure mu = SignedMeasure::dipole(3, 1, 2);
  const DualWitness w = dual_witness(m, mu, free_space_norm(m, mu).plan);
  CHECK(w.f.values[1] - w.f.values[2] == doctest::Approx(2.0));
  CHECK(w.f.lip_constant <= 1.0 + kMetricTolerance);
  CHECK(w.f.values[m.base_point()] == 0.0);

  const DualWitness zero = dual_witness(m, SignedMeasure::zero(3), TransportPlan{});
  CHECK(zero.pairing == 0.0);
  CHECK(zero.f.lip_constant <= 1.0 + kMetricTolerance);
}

TEST_CASE("property: strong duality and plan feasibility on random instances") {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = gen::uniform_size(rng, 2, 50);
    const auto m = gen::any_space(rng, n);
    const SignedMeasure mu = gen::random_measure(rng, n, gen::uniform_size(rng, 2, n));
    const FreeNormResult r = free_space_norm(m, mu);
    check_plan(m, mu, r);
    const DualWitness w = dual_witness(m, mu, r.plan);
    const double gap = r.value - w.pairing;
    CHECK(gap >= -kDualityGapTolerance);
    CHECK(gap <= kDualityGapTolerance);
    CHECK(w.f.lip_constant <= 1.0 + kMetricTolerance);
    CHECK(w.f.values[m.base_point()] == 0.0);
  }
}

TEST_CASE("property: agreement with the brute-force transport enumeration") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = gen::uniform_size(rng, 2, 20);
    const auto m = gen::any_space(rng, n);
    const SignedMeasure mu = gen::random_measure(rng, n, gen::uniform_size(rng, 2, 8));
    CHECK(free_space_norm(m, mu).value == doctest::Approx(oracle::brute_force_norm(m.dist(), mu.weights)).epsilon(1e-9));
  }
}

TEST_CASE("property: norm axioms") {
  std::mt19937_64 rng(24);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = gen::uniform_size(rng, 2, 30);
    const auto m = gen::any_space(rng, n);
    const SignedMeasure mu = gen::random_measure(rng, n, gen::uniform_size(rng, 2, n));
    const SignedMeasure nu = gen::random_measure(rng, n, gen::uniform_size(rng, 2, n));
    const double alpha = gen::uniform(rng, -3.0, 3.0);
    const double nmu = free_space_norm(m, mu).value;
    CHECK(nmu > 0.0);
    CHECK(free_space_norm(m, mu * alpha).value == doctest::Approx(std::abs(alpha) * nmu).epsilon(1e-9));
    CHECK(free_space_norm(m, mu + nu).value <= nmu + free_space_norm(m, nu).value + kDualityGapTolerance);
  }
}

TEST_CASE("property: the norm is intrinsic to the support") {
  std::mt19937_64 rng(25);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = gen::uniform_size(rng, 4, 30);
    const auto m = gen::any_space(rng, n);
    const auto members = gen::random_subset(rng, n, gen::uniform_size(rng, 2, n - 1));
    const SubsetMask a(n, members);
    const SignedMeasure local = gen::random_measure(rng, a.size(), a.size());
    SignedMeasure global = SignedMeasure::zero(n);
    for (std::size_t i = 0; i < a.size(); ++i) global.weights[members[i]] = local.weights[i];
    const double inside = free_space_norm(restrict(m, a), local).value;
    CHECK(std::abs(inside - free_space_norm(m, global).value) <= kDualityGapTolerance);
    // Moving the base point changes nothing either.
    CHECK(free_space_norm(m.with_base_point(members[0]), global).value == free_space_norm(m, global).value);
  }
}

TEST_CASE("zero-extension norm on the three-point example attains the bound") {
  const FiniteMetricSpace m(DistanceMatrix::from_rows({{0, 2, 3}, {2, 0, 1}, {3, 1, 0}}), {"x0", "a", "y"});
  const ZeroExtensionNorm z = zero_extension_norm(m, SubsetMask(3, {0, 1}));
  CHECK(z.exact == 2.0);
  CHECK(z.bound == 2.0);
  CHECK_FALSE(z.degenerate);
}

TEST_CASE("zero-extension norm edge cases") {
  const FiniteMetricSpace m(DistanceMatrix::from_rows({{0, 2, 3}, {2, 0, 1}, {3, 1, 0}}));
  const ZeroExtensionNorm single = zero_extension_norm(m, SubsetMask(3, {0}));
  CHECK(single.degenerate);
  CHECK(single.exact == 0.0);
  CHECK(single.bound == 1.0);
  CHECK_THROWS_AS(zero_extension_norm(m, SubsetMask::all(3)), StructuralError);
  CHECK_THROWS_AS(zero_extension_norm(m, SubsetMask(3, {1, 2})), StructuralError);
}

TEST_CASE("property: zero-extension norm matches the LP, obeys the bound, and is scale-free") {
  std::mt19937_64 rng(26);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = gen::uniform_size(rng, 3, 10);
    const auto m = gen::any_space(rng, n);
    const auto members = gen::random_subset(rng, n, gen::uniform_size(rng, 2, n - 1), m.base_point());
    const SubsetMask a(n, members);
    const ZeroExtensionNorm z = zero_extension_norm(m, a);
    CHECK(z.exact <= z.bound + kMetricTolerance);
    CHECK(z.exact == doctest::Approx(oracle::zero_extension_lp(m.dist(), members, m.base_point())).epsilon(1e-9));

    DistanceMatrix scaled = m.dist();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) scaled(i, j) *= 7.5;
    const ZeroExtensionNorm zs = zero_extension_norm(FiniteMetricSpace(scaled), a);
    CHECK(zs.exact == doctest::Approx(z.exact).epsilon(1e-12));
    CHECK(zs.bound == doctest::Approx(z.bound).epsilon(1e-12));
  }
}
