#include <doctest.h>

#include <random>

#include "csws/neighbors.hpp"
#include "csws/templates.hpp"
#include "oracles.hpp"

using namespace csws;

TEST_CASE("singleton grid answers every query with its only row") {
  Grid grid;
  grid.augmented = true;
  grid.points.resize(1, 2);
  grid.points << 1.0, 3.5;
  const NeighborIndex index = build_index(grid);
  Vec z(2);
  z << 1.0, -100.0;
  const auto hits = query_knn(index, z, 1);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].index == 0);
}

TEST_CASE("grid rows are their own nearest neighbour at distance zero") {
  const ModelParts parts = build_put_template(BermudanPutParams{}, 10);
  const NeighborIndex index(parts.grid);
  for (int i = 0; i < parts.grid.size(); ++i) {
    Vec z = parts.grid.points.row(i).transpose();
    const auto hits = query_knn(index, z, 1);
    CHECK(hits[0].index == i);
    CHECK(hits[0].dist2 == 0.0);
  }
}

TEST_CASE("three-row example and equidistant tie") {
  Grid grid;
  grid.augmented = true;
  grid.points.resize(3, 2);
  grid.points << 1.0, 30.0, 1.0, 40.0, 1.0, 50.0;
  const NeighborIndex index(grid);

  Vec z(2);
  z << 1.0, 38.0;
  auto hits = query_knn(index, z, 2);
  CHECK(hits[0].index == 1);
  CHECK(hits[1].index == 0);

  z << 1.0, 35.0;  // exactly between rows 0 and 1
  hits = query_knn(index, z, 1);
  CHECK(hits[0].index == 0);
}

TEST_CASE("k out of range is rejected") {
  Grid grid;
  grid.augmented = true;
  grid.points.resize(2, 2);
  grid.points << 1.0, 0.0, 1.0, 1.0;
  const NeighborIndex index(grid);
  Vec z(2);
  z << 1.0, 0.2;
  CHECK_THROWS_AS(query_knn(index, z, 0), std::invalid_argument);
  CHECK_THROWS_AS(query_knn(index, z, 3), std::invalid_argument);
}

TEST_CASE("random 64x3 grids match the brute-force sort for every k") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  Grid grid;
  grid.augmented = false;
  grid.points.resize(64, 3);
  for (int i = 0; i < 64; ++i) {
    for (int c = 0; c < 3; ++c) grid.points(i, c) = coord(rng);
  }
  const NeighborIndex index(grid);
  Vec z(3);
  for (int trial = 0; trial < 200; ++trial) {
    for (int c = 0; c < 3; ++c) z[c] = coord(rng);
    const int k = 1 + trial % 64;
    const auto hits = query_knn(index, z, k);
    const auto brute = oracles::brute_knn(grid.points, z, k);
    REQUIRE(hits.size() == brute.size());
    for (std::size_t j = 0; j < hits.size(); ++j) {
      CHECK(hits[j].index == brute[j].index);
      CHECK(hits[j].dist2 == doctest::Approx(brute[j].dist2).epsilon(1e-12));
    }
  }
}

TEST_CASE("put grid with 1000 random points and k=10 matches brute force") {
  const ModelParts parts = build_put_template(BermudanPutParams{}, 10);
  const NeighborIndex index(parts.grid);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> price(20.0, 70.0);
  Vec z(2);
  z[0] = 1.0;
  for (int trial = 0; trial < 1000; ++trial) {
    z[1] = price(rng);
    const auto hits = query_knn(index, z, 10);
    const auto brute = oracles::brute_knn(parts.grid.points, z, 10);
    for (int j = 0; j < 10; ++j) CHECK(hits[j].index == brute[j].index);
  }
}

TEST_CASE("duplicate coordinates resolve ties toward smaller indices") {
  Grid grid;
  grid.augmented = false;
  grid.points.resize(6, 2);
  grid.points << 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 2.0, 0.0, 2.0, 0.0;
  const NeighborIndex index(grid);
  Vec z(2);
  z << 1.0, 0.0;
  const auto hits = query_knn(index, z, 6);
  CHECK(hits[0].index == 2);
  CHECK(hits[1].index == 3);
  CHECK(hits[2].index == 0);
  CHECK(hits[3].index == 1);
  CHECK(hits[4].index == 4);
  CHECK(hits[5].index == 5);
}
