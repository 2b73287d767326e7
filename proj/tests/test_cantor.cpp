#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "generators.hpp"
#include "lipfree/cantor.hpp"
#include "oracles.hpp"

using namespace lipfree;

namespace {

// Coordinates straight from the digit expansion, independent of the model.
std::vector<double> cantor_coordinates(int level) {
  std::vector<double> out;
  for (std::uint32_t a = 0; a < (1u << level); ++a) {
    double x = 0.0;
    for (int k = 1; k <= level; ++k) x += 2.0 * ((a >> (level - k)) & 1u) / std::pow(3.0, k);
    out.push_back(x);
  }
  return out;
}

double block_diameter(const FiniteMetricSpace& m, const std::vector<std::size_t>& block) {
  double d = 0.0;
  for (std::size_t x : block)
    for (std::size_t y : block) d = std::max(d, m(x, y));
  return d;
}

double sup_between(const FiniteMetricSpace& m, const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  double d = 0.0;
  for (std::size_t x : a)
    for (std::size_t y : b) d = std::max(d, m(x, y));
  return d;
}

}  // namespace

TEST_CASE("level 1 model") {
  const CantorModel c = build_cantor_model(1);
  REQUIRE(c.size() == 2);
  CHECK(c.address_string(0) == "0");
  CHECK(c.address_string(1) == "1");
  CHECK(c.space()(0, 1) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("level 2 minimum distance is 2/9") {
  const auto coords = cantor_coordinates(2);
  double lo = 1e9;
  for (std::size_t i = 0; i < coords.size(); ++i)
    for (std::size_t j = i + 1; j < coords.size(); ++j) lo = std::min(lo, std::abs(coords[i] - coords[j]));
  CHECK(lo == doctest::Approx(2.0 / 9.0));

  const auto m = build_cantor_model(2).space();
  double model_lo = 1e9;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) model_lo = std::min(model_lo, m(i, j));
  CHECK(model_lo == doctest::Approx(lo).epsilon(1e-15));
}

TEST_CASE("model coordinates, addresses and metric validity") {
  for (int level : {3, 5, 8}) {
    const CantorModel c = build_cantor_model(level);
    const auto coords = cantor_coordinates(level);
    REQUIRE(c.size() == coords.size());
    std::set<std::string> addresses;
    for (std::size_t i = 0; i < c.size(); ++i) {
      CHECK(c.coordinates[i] == doctest::Approx(coords[i]).epsilon(1e-15));
      addresses.insert(c.address_string(i));
    }
    CHECK(addresses.size() == c.size());
    if (level <= 5) CHECK(validate_metric(c.space()).is_metric());
  }
  CHECK_THROWS_AS(build_cantor_model(0), StructuralError);
  CHECK_THROWS_AS(build_cantor_model(17), StructuralError);
}

TEST_CASE("partition: whole space when eps exceeds twice the diameter") {
  const CantorModel c = build_cantor_model(4);
  const auto m = c.space();
  CHECK(partition_by_diameter(m, 2.5, c).size() == 1);
  CHECK(partition_by_diameter(m, 2.5).size() == 1);
}

TEST_CASE("partition of level 3 follows address prefixes") {
  const CantorModel c = build_cantor_model(3);
  const auto m = c.space();
  // A first-letter class has diameter 2/9 + 2/27 = 8/27, below 0.3 but not
  // below 0.25, so eps = 0.6 keeps two blocks and eps = 0.5 splits again.
  const Partition two = partition_by_diameter(m, 0.6, c);
  REQUIRE(two.size() == 2);
  CHECK(block_diameter(m, two.blocks[0]) == doctest::Approx(8.0 / 27.0));
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t x : two.blocks[b]) CHECK(c.letter(x, 0) == static_cast<int>(b));

  const Partition four = partition_by_diameter(m, 0.5, c);
  CHECK(four.size() == 4);
  for (const auto& block : four.blocks) CHECK(block_diameter(m, block) < 0.25);
}

TEST_CASE("property: partitions have small blocks; model partitions are prefix classes") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 40; ++t) {
    const int level = static_cast<int>(gen::uniform_size(rng, 1, 7));
    const CantorModel c = build_cantor_model(level);
    const auto m = c.space(gen::uniform(rng, 0.2, 2.0));
    const double eps = gen::uniform(rng, 0.005, 1.0);
    for (const Partition& p : {partition_by_diameter(m, eps, c), partition_by_diameter(m, eps)}) {
      p.check();
      for (const auto& block : p.blocks) CHECK(block_diameter(m, block) < eps / 2);
    }
    const Partition p = partition_by_diameter(m, eps, c);
    for (const auto& block : p.blocks) {
      // All members share a prefix, and the block is the whole prefix class.
      std::size_t common = static_cast<std::size_t>(level);
      const std::string first = c.address_string(block.front());
      for (std::size_t x : block) {
        const std::string s = c.address_string(x);
        std::size_t k = 0;
        while (k < common && s[k] == first[k]) ++k;
        common = k;
      }
      CHECK(block.size() == (std::size_t{1} << (level - common)));
    }
  }
}

TEST_CASE("greedy partition of arbitrary spaces") {
  std::mt19937_64 rng(32);
  for (int t = 0; t < 30; ++t) {
    const auto m = gen::any_space(rng, gen::uniform_size(rng, 1, 40));
    const double eps = gen::uniform(rng, 0.01, 1.0);
    const Partition p = partition_by_diameter(m, eps);
    p.check();
    for (const auto& block : p.blocks) CHECK(block_diameter(m, block) < eps / 2);
  }
}

TEST_CASE("property: d_K satisfies the block construction") {
  std::mt19937_64 rng(33);
  for (int t = 0; t < 40; ++t) {
    const int level = static_cast<int>(gen::uniform_size(rng, 2, 6));
    const CantorModel c = build_cantor_model(level);
    const auto reference = c.space(gen::uniform(rng, 0.05, 1.0));
    const double eps = gen::uniform(rng, 0.01, 0.3);
    const Partition p = partition_by_diameter(reference, eps, c);
    const auto seed = build_cantor_model(static_cast<int>(gen::uniform_size(rng, level, 7))).space();
    const PartitionedCantorMetric pm = build_dK(reference, p, seed, eps);
    const auto& dk = pm.space;

    CHECK(oracle::max_triangle_excess(dk.dist()) <= kMetricTolerance);
    CHECK(oracle::max_abs_difference(dk.dist(), reference.dist()) < eps);

    for (std::size_t i = 0; i < p.size(); ++i) {
      // Proportional to the seed on the recorded points, with the recorded c_i.
      DistanceMatrix block_dk(p.blocks[i].size());
      DistanceMatrix block_seed(p.blocks[i].size());
      for (std::size_t a = 0; a < p.blocks[i].size(); ++a)
        for (std::size_t b = 0; b < p.blocks[i].size(); ++b) {
          block_dk(a, b) = dk(p.blocks[i][a], p.blocks[i][b]);
          block_seed(a, b) = seed(pm.seed_assignment[i][a], pm.seed_assignment[i][b]);
        }
      const auto prop = check_proportional(block_dk, block_seed);
      REQUIRE(prop.scale);
      if (p.blocks[i].size() > 1) CHECK(*prop.scale == doctest::Approx(pm.block_scales[i]).epsilon(1e-12));
      CHECK(pm.block_scales[i] > 0.0);

      for (std::size_t j = 0; j < p.size(); ++j) {
        if (i == j) continue;
        const double sup = sup_between(reference, p.blocks[i], p.blocks[j]);
        const double bound = block_diameter(reference, p.blocks[i]) + block_diameter(reference, p.blocks[j]);
        for (std::size_t x : p.blocks[i])
          for (std::size_t y : p.blocks[j]) {
            CHECK(dk(x, y) == sup);
            CHECK(std::abs(dk(x, y) - reference(x, y)) <= bound + 1e-15);
          }
      }
    }
    CHECK(certify_partition_metric(pm, reference, eps).verdict());
  }
}

TEST_CASE("single block: d_K is a scaled seed") {
  const CantorModel c = build_cantor_model(3);
  const auto reference = c.space(0.05);
  const Partition p = partition_by_diameter(reference, 0.2, c);
  REQUIRE(p.size() == 1);
  const PartitionedCantorMetric pm = build_dK(reference, p, build_cantor_model(3).space(), 0.2);
  const auto prop = check_proportional(pm.space, build_cantor_model(3).space());
  REQUIRE(prop.scale);
  CHECK(oracle::max_abs_difference(pm.space.dist(), reference.dist()) < 0.2);
}

TEST_CASE("level 4 at eps 0.2") {
  const CantorModel c = build_cantor_model(4);
  const auto reference = c.space();
  const PartitionedCantorMetric pm = build_dK(reference, partition_by_diameter(reference, 0.2, c), c.space(), 0.2);
  const CertificateReport r = certify_partition_metric(pm, reference, 0.2);
  CHECK(r.verdict());
  const CertificateEntry* sup = r.find("dK_sup_deviation");
  REQUIRE(sup);
  CHECK(sup->measured < 0.2);
  CHECK(sup->slack > 0.0);
  CHECK(validate_metric(pm.space).is_metric());
}

TEST_CASE("build_dK refusals") {
  const CantorModel c = build_cantor_model(4);
  const auto reference = c.space();
  Partition whole;
  whole.point_count = 16;
  whole.blocks.push_back({});
  for (std::size_t i = 0; i < 16; ++i) whole.blocks[0].push_back(i);
  CHECK_THROWS_AS(build_dK(reference, whole, c.space(), 0.1), ConstructionError);

  const Partition p = partition_by_diameter(reference, 0.8, c);
  CHECK_THROWS_AS(build_dK(reference, p, build_cantor_model(1).space(), 0.8), ConstructionError);
}

TEST_CASE("certificates catch injected faults") {
  const CantorModel c = build_cantor_model(4);
  const auto reference = c.space();
  const double eps = 0.2;
  PartitionedCantorMetric pm = build_dK(reference, partition_by_diameter(reference, eps, c), c.space(), eps);
  REQUIRE(pm.partition.size() >= 2);

  SUBCASE("corrupted cross-block entry") {
    const std::size_t x = pm.partition.blocks[0][0];
    const std::size_t y = pm.partition.blocks[1][0];
    DistanceMatrix d = pm.space.dist();
    d.set_symmetric(x, y, d(x, y) * (1.0 - 1e-6));
    pm.space = FiniteMetricSpace(d, pm.space.labels());
    const CertificateReport r = certify_partition_metric(pm, reference, eps);
    CHECK_FALSE(r.verdict());
    const CertificateEntry* e = r.find("cross_block_identity");
    REQUIRE(e);
    CHECK_FALSE(e->pass);
    CHECK(e->detail.find(describe_pair(pm.space, x, y)) != std::string::npos);
  }

  SUBCASE("tightened eps") {
    const CertificateReport r = certify_partition_metric(pm, reference, eps / 4);
    const CertificateEntry* e = r.find("dK_sup_deviation");
    REQUIRE(e);
    CHECK(e->slack == doctest::Approx(eps / 4 - e->measured));
    CHECK_FALSE(r.verdict());
  }
}
