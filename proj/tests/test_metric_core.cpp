#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "lipfree/metric_space.hpp"
#include "oracles.hpp"

using namespace lipfree;

namespace {

FiniteMetricSpace from_rows(const std::vector<std::vector<double>>& rows) {
  return FiniteMetricSpace(DistanceMatrix::from_rows(rows));
}

}  // namespace

TEST_CASE("two-point space is a metric") {
  const ValidationReport r = validate_metric(from_rows({{0, 1}, {1, 0}}));
  CHECK(r.is_metric());
  CHECK(r.triangle_violations.empty());
}

TEST_CASE("3 > 1 + 1 is reported with its excess") {
  const ValidationReport r = validate_metric(from_rows({{0, 1, 3}, {1, 0, 1}, {3, 1, 0}}));
  CHECK_FALSE(r.is_metric());
  REQUIRE(r.triangle_violations.size() == 1);
  const TriangleViolation& v = r.triangle_violations[0];
  CHECK(v.from == 0);
  CHECK(v.to == 2);
  CHECK(v.via == 1);
  CHECK(v.excess == 1.0);
}

TEST_CASE("structural errors are distinct from axiom failures") {
  CHECK_THROWS_AS(DistanceMatrix::from_rows({{0, 1}, {1}}), StructuralError);
  CHECK_THROWS_AS(DistanceMatrix::from_rows({{0, NAN}, {1, 0}}), StructuralError);
  CHECK_THROWS_AS(FiniteMetricSpace(DistanceMatrix(0)), StructuralError);
  CHECK_NOTHROW(FiniteMetricSpace(DistanceMatrix(1)));
}

TEST_CASE("asymmetry, diagonal and coincident points are all flagged") {
  const ValidationReport r = validate_metric(DistanceMatrix::from_rows({{0.5, 1, 0}, {2, 0, 1}, {0, 1, 0}}));
  CHECK_FALSE(r.symmetry_ok);
  CHECK_FALSE(r.diagonal_ok);
  CHECK_FALSE(r.positivity_ok);
  CHECK(r.nonzero_diagonal == std::vector<std::size_t>{0});
}

TEST_CASE("property: shortest-path closures validate, and the scan agrees with brute force") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = gen::uniform_size(rng, 2, 14);
    DistanceMatrix w(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) w.set_symmetric(i, j, gen::uniform(rng, 0.1, 1.0));
    const ValidationReport raw = validate_metric(w);
    CHECK(raw.triangle_violations.empty() == (oracle::max_triangle_excess(w) <= kMetricTolerance));
    CHECK(validate_metric(oracle::floyd_warshall(w)).is_metric());
  }
}

TEST_CASE("property: every flagged triple is a real violation and none is missed") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = gen::uniform_size(rng, 3, 9);
    DistanceMatrix w(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) w.set_symmetric(i, j, gen::uniform(rng, 0.1, 1.0));
    const ValidationReport r = validate_metric(w);
    std::size_t expected = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = i + 1; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
          if (j != i && j != k && w(i, k) - w(i, j) - w(j, k) > kMetricTolerance) ++expected;
    CHECK(r.triangle_violations.size() == expected);
    for (const auto& v : r.triangle_violations) {
      CHECK(v.excess == doctest::Approx(w(v.from, v.to) - w(v.from, v.via) - w(v.via, v.to)));
    }
  }
}

TEST_CASE("rho distance examples") {
  const FiniteMetricSpace a = from_rows({{0, 1, 2}, {1, 0, 1.5}, {2, 1.5, 0}});
  CHECK(rho_distance(a, a).value == 0.0);
  CHECK(rho_distance(a, from_rows({{0, 6, 2}, {6, 0, 1.5}, {2, 1.5, 0}})).value == 1.0);
  const MetricDistance r = rho_distance(a, from_rows({{0, 1.1, 2}, {1.1, 0, 1.2}, {2, 1.2, 0}}));
  CHECK(r.value == doctest::Approx(0.3));
  CHECK(r.witness.i == 1);
  CHECK(r.witness.j == 2);
  CHECK_THROWS_AS(rho_distance(a, from_rows({{0, 1}, {1, 0}})), StructuralError);
}

TEST_CASE("property: rho is a metric on matrices and is the capped sup-norm") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = gen::uniform_size(rng, 2, 10);
    const auto a = gen::any_space(rng, n).dist();
    auto b = gen::any_space(rng, n).dist();
    auto c = gen::any_space(rng, n).dist();
    if (t % 3 == 0) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) c(i, j) *= 4.0;
    }
    const double ab = rho_distance(a, b).value;
    CHECK(ab == rho_distance(b, a).value);
    CHECK(ab <= 1.0);
    CHECK(ab <= rho_distance(a, c).value + rho_distance(c, b).value + 1e-15);
    const double sup = oracle::max_abs_difference(a, b);
    CHECK(ab == doctest::Approx(std::min(1.0, sup)));
  }
}

TEST_CASE("set distances and diameters") {
  const FiniteMetricSpace m = from_rows({{0, 2, 1, 4}, {2, 0, 3, 2}, {1, 3, 0, 3}, {4, 2, 3, 0}});
  const SubsetMask a(4, {0});
  CHECK(set_distance(m, a, a) == 0.0);
  CHECK(set_distance(m, a, SubsetMask(4, {1})) == 2.0);
  CHECK(sup_distance(m, a, SubsetMask(4, {2, 3})) == 4.0);
  CHECK(diameter(m, a) == 0.0);
  CHECK(point_set_distance(m, 3, SubsetMask(4, {1, 2})) == 2.0);
  CHECK_THROWS_AS(SubsetMask(4, {}), StructuralError);
  CHECK_THROWS_AS(SubsetMask(4, {4}), StructuralError);
}

TEST_CASE("property: set distances match pair enumeration; diameter is monotone") {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 50; ++t) {
    const auto m = gen::any_space(rng, 20);
    const auto ia = gen::random_subset(rng, 20, gen::uniform_size(rng, 1, 8));
    const auto ib = gen::random_subset(rng, 20, gen::uniform_size(rng, 1, 8));
    double lo = 1e300;
    double hi = 0.0;
    for (std::size_t x : ia)
      for (std::size_t y : ib) {
        lo = std::min(lo, m(x, y));
        hi = std::max(hi, m(x, y));
      }
    const SubsetMask a(20, ia);
    const SubsetMask b(20, ib);
    CHECK(set_distance(m, a, b) == lo);
    CHECK(sup_distance(m, a, b) == hi);
    std::vector<std::size_t> both = ia;
    both.insert(both.end(), ib.begin(), ib.end());
    const SubsetMask u(20, both);
    CHECK(diameter(m, u) >= std::max(diameter(m, a), diameter(m, b)));
  }
}

TEST_CASE("restriction") {
  std::mt19937_64 rng(15);
  const auto m = gen::any_space(rng, 12).with_base_point(5);
  CHECK(restrict(m, SubsetMask::all(12)) == m);
  const auto one = restrict(m, SubsetMask(12, {3}));
  CHECK(one.size() == 1);
  CHECK(one.label(0) == "3");

  const SubsetMask a(12, {1, 3, 5, 7, 9, 11});
  const auto ra = restrict(m, a);
  CHECK(ra.base_point() == a.position_of(5));
  CHECK(restrict(m, SubsetMask(12, {2, 4})).base_point() == 0);
  CHECK(validate_metric(ra).is_metric());

  // Restrict twice versus once to the intersection {3, 7, 11}.
  const auto twice = restrict(ra, SubsetMask(6, {1, 3, 5}));
  const auto once = restrict(m, SubsetMask(12, {3, 7, 11}));
  CHECK(twice.dist() == once.dist());
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) CHECK(ra(i, j) == m(a.members()[i], a.members()[j]));
}

TEST_CASE("proportionality") {
  std::mt19937_64 rng(16);
  const auto a = gen::any_space(rng, 8).dist();
  CHECK(check_proportional(a, a).scale == 1.0);

  DistanceMatrix doubled = a;
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) doubled(i, j) *= 2.0;
  const auto half = check_proportional(a, doubled);
  REQUIRE(half.scale);
  CHECK(*half.scale == doctest::Approx(0.5));

  DistanceMatrix bent = doubled;
  bent.set_symmetric(2, 6, bent(2, 6) + 2 * kMetricTolerance * 2.0);
  const auto fail = check_proportional(a, bent);
  CHECK_FALSE(fail.scale);
  CHECK(fail.worst.i == 2);
  CHECK(fail.worst.j == 6);

  CHECK_THROWS_AS(check_proportional(a, DistanceMatrix(3)), StructuralError);
}
