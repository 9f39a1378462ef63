#include <doctest.h>

#include <random>

#include "csws/envelope.hpp"
#include "csws/templates.hpp"
#include "oracles.hpp"

using namespace csws;

namespace {

Grid three_point_grid() {
  Grid grid;
  grid.augmented = true;
  grid.points.resize(3, 2);
  grid.points << 1.0, 30.0, 1.0, 40.0, 1.0, 50.0;
  return grid;
}

}  // namespace

TEST_CASE("evaluate picks the maximal row and the smallest argmax") {
  TangentMatrix tm;
  tm.rows.resize(2, 2);
  tm.rows << 40.0, -1.0, 0.0, 0.0;
  Vec z(2);
  z << 1.0, 36.0;
  auto r = evaluate(tm, z);
  CHECK(r.value == doctest::Approx(4.0));
  CHECK(r.row == 0);

  z << 1.0, 60.0;
  r = evaluate(tm, z);
  CHECK(r.value == doctest::Approx(0.0));
  CHECK(r.row == 1);

  TangentMatrix constant;
  constant.rows.resize(1, 3);
  constant.rows << 2.5, 0.0, 0.0;
  Vec z3(3);
  z3 << 1.0, -7.0, 11.0;
  r = evaluate(constant, z3);
  CHECK(r.value == doctest::Approx(2.5));
  CHECK(r.row == 0);
}

TEST_CASE("evaluate breaks exact ties toward the smallest row") {
  TangentMatrix tm;
  tm.rows.resize(3, 2);
  tm.rows << 1.0, 0.0, 1.0, 0.0, 0.5, 0.0;
  Vec z(2);
  z << 1.0, 123.0;
  CHECK(evaluate(tm, z).row == 0);
}

TEST_CASE("envelope of the put payoff reproduces the listing tangents") {
  const Grid grid = three_point_grid();
  OracleSample sample;
  sample.values.resize(3);
  sample.values << 10.0, 0.0, 0.0;
  sample.subgradients.resize(3, 2);
  sample.subgradients << 0.0, -1.0, 0.0, -1.0, 0.0, 0.0;
  const TangentMatrix env = envelope_from_oracle(grid, sample);
  CHECK(env.rows(0, 0) == doctest::Approx(40.0));
  CHECK(env.rows(0, 1) == doctest::Approx(-1.0));
  CHECK(env.rows(1, 0) == doctest::Approx(40.0));
  CHECK(env.rows(1, 1) == doctest::Approx(-1.0));
  CHECK(env.rows(2, 0) == doctest::Approx(0.0));
  CHECK(env.rows(2, 1) == doctest::Approx(0.0));
}

TEST_CASE("envelope of an affine function is the function at every anchor") {
  Grid grid;
  grid.augmented = true;
  grid.points.resize(5, 3);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  for (int i = 0; i < 5; ++i) {
    grid.points(i, 0) = 1.0;
    grid.points(i, 1) = coord(rng);
    grid.points(i, 2) = coord(rng);
  }
  Vec c(3);
  c << 0.7, -1.2, 0.4;
  OracleSample sample;
  sample.values.resize(5);
  sample.subgradients.resize(5, 3);
  for (int i = 0; i < 5; ++i) {
    sample.values[i] = c.dot(grid.points.row(i).transpose());
    sample.subgradients.row(i) = c.transpose();
  }
  const TangentMatrix env = envelope_from_oracle(grid, sample);
  for (int i = 0; i < 5; ++i) {
    CHECK(env.rows(i, 0) == doctest::Approx(c[0]).epsilon(1e-12));
    CHECK(env.rows(i, 1) == doctest::Approx(c[1]).epsilon(1e-12));
    CHECK(env.rows(i, 2) == doctest::Approx(c[2]).epsilon(1e-12));
  }
}

TEST_CASE("envelope of a parabola minorizes it and is exact on anchors") {
  Grid grid;
  grid.augmented = true;
  grid.points.resize(11, 2);
  for (int i = 0; i < 11; ++i) {
    grid.points(i, 0) = 1.0;
    grid.points(i, 1) = -1.0 + 0.2 * i;
  }
  OracleSample sample;
  sample.values.resize(11);
  sample.subgradients.resize(11, 2);
  for (int i = 0; i < 11; ++i) {
    const double x = grid.points(i, 1);
    sample.values[i] = x * x;
    sample.subgradients(i, 0) = 0.0;
    sample.subgradients(i, 1) = 2.0 * x;
  }
  const TangentMatrix env = envelope_from_oracle(grid, sample);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> xs(-1.5, 1.5);
  Vec z(2);
  z[0] = 1.0;
  for (int trial = 0; trial < 1000; ++trial) {
    z[1] = xs(rng);
    CHECK(evaluate(env, z).value <= z[1] * z[1] + 1e-9);
  }
  for (int i = 0; i < 11; ++i) {
    z[1] = grid.points(i, 1);
    CHECK(evaluate(env, z).value ==
          doctest::Approx(sample.values[i]).epsilon(1e-12));
  }
}

TEST_CASE("convexity-inconsistent samples are rejected naming the pair") {
  const Grid grid = three_point_grid();
  OracleSample sample;
  sample.values.resize(3);
  sample.values << 10.0, 0.0, 0.0;
  sample.subgradients.resize(3, 2);
  // A slope of -0.5 at the first anchor overestimates the value at the
  // second: 10 - 0.5 * 10 = 5 > 0.
  sample.subgradients << 0.0, -0.5, 0.0, -1.0, 0.0, 0.0;
  CHECK_THROWS_WITH_AS(envelope_from_oracle(grid, sample),
                       doctest::Contains("point 0"), std::invalid_argument);
}

TEST_CASE("expected_pwl with the identity disturbance is the identity") {
  const Grid grid = three_point_grid();
  const NeighborIndex index(grid);
  TangentMatrix tm;
  tm.rows.resize(3, 2);
  tm.rows << 40.0, -1.0, 40.0, -1.0, 0.0, 0.0;
  DisturbanceSet ds;
  ds.matrices = {Mat::Identity(2, 2)};
  ds.weights = Vec::Ones(1);
  const TangentMatrix out = expected_pwl(tm, grid, ds, index, grid.size());
  for (int i = 0; i < 3; ++i) {
    for (int c = 0; c < 2; ++c) {
      CHECK(out.rows(i, c) == doctest::Approx(tm.rows(i, c)).epsilon(1e-15));
    }
  }
}

TEST_CASE("expected_pwl composes linear functions with the disturbance") {
  Grid grid;
  grid.augmented = false;
  grid.points.resize(1, 2);
  grid.points << 1.0, 1.0;
  const NeighborIndex index(grid);
  TangentMatrix tm;
  tm.rows.resize(1, 2);
  tm.rows << 0.0, 1.0;  // v(z) = z_2
  DisturbanceSet ds;
  Mat w = Mat::Zero(2, 2);
  w(0, 0) = 1.0;
  w(1, 1) = 0.5;
  ds.matrices = {w};
  ds.weights = Vec::Ones(1);
  const TangentMatrix out = expected_pwl(tm, grid, ds, index, 1);
  CHECK(out.rows(0, 0) == doctest::Approx(0.0));
  CHECK(out.rows(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("random instances: exact operator equals brute force to 1e-12") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const oracles::RandomInstance inst = oracles::random_instance(rng, 32, 4, 6);
    const TangentMatrix env =
        envelope_from_oracle(inst.grid, oracles::sample_generator(inst));
    const NeighborIndex index(inst.grid);
    DisturbanceSet ds;
    ds.matrices = inst.disturb;
    ds.weights = inst.weights;
    const TangentMatrix fast =
        expected_pwl(env, inst.grid, ds, index, inst.grid.size());
    const Mat brute = oracles::brute_expected_pwl(env.rows, inst.grid.points,
                                                  inst.disturb, inst.weights);
    const double scale = scale_of(fast.rows, brute);
    for (int i = 0; i < fast.count(); ++i) {
      for (int c = 0; c < fast.dim(); ++c) {
        CHECK(std::abs(fast.rows(i, c) - brute(i, c)) <= 1e-12 * scale);
      }
    }
    // Evaluating at each anchor reproduces the weighted max directly.
    for (int i = 0; i < inst.grid.size(); ++i) {
      double direct = 0.0;
      for (int k = 0; k < ds.count(); ++k) {
        Vec y = Vec::Zero(inst.grid.dim());
        for (int r = 0; r < inst.grid.dim(); ++r) {
          for (int c = 0; c < inst.grid.dim(); ++c) {
            y[r] += ds.matrices[k](r, c) * inst.grid.points(i, c);
          }
        }
        direct += ds.weights[k] * oracles::pwl_value(env.rows, y);
      }
      Vec gi = inst.grid.points.row(i).transpose();
      CHECK(evaluate(fast, gi).value ==
            doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("k_nn sweep is monotone and hits the exact operator at k_nn=m") {
  std::mt19937 rng(23);
  const oracles::RandomInstance inst = oracles::random_instance(rng, 24, 3, 5);
  const TangentMatrix env =
      envelope_from_oracle(inst.grid, oracles::sample_generator(inst));
  const NeighborIndex index(inst.grid);
  DisturbanceSet ds;
  ds.matrices = inst.disturb;
  ds.weights = inst.weights;
  const int m = inst.grid.size();

  // Candidate sets are nested in k_nn, so each anchor's own row value can
  // only grow, and the exact operator dominates every restricted one.
  const TangentMatrix exact = expected_pwl(env, inst.grid, ds, index, m);
  std::vector<double> prev;
  for (int k_nn = 1; k_nn <= m; ++k_nn) {
    const TangentMatrix out = expected_pwl(env, inst.grid, ds, index, k_nn);
    std::vector<double> own(m);
    for (int i = 0; i < m; ++i) {
      Vec gi = inst.grid.points.row(i).transpose();
      own[i] = out.rows.row(i).dot(gi);
      CHECK(evaluate(out, gi).value <=
            evaluate(exact, gi).value + 1e-12 * scale_of(out.rows));
    }
    if (!prev.empty()) {
      for (int i = 0; i < m; ++i) CHECK(own[i] >= prev[i] - 1e-12);
    }
    prev = std::move(own);
  }
  // Anchor dominance of the exact output.
  const double tol = 1e-9 * scale_of(exact.rows, inst.grid.points);
  for (int i = 0; i < m; ++i) {
    Vec gi = inst.grid.points.row(i).transpose();
    const double own = exact.rows.row(i).dot(gi);
    CHECK(evaluate(exact, gi).value <= own + tol);
  }
}

TEST_CASE("monotonicity: dominating inputs give dominating outputs") {
  // Augmentation-preserving disturbances keep z_1 = 1, so adding a constant
  // to the augmented column dominates pointwise on the whole state space.
  std::mt19937 rng(29);
  const oracles::RandomInstance inst =
      oracles::random_instance(rng, 16, 3, 4, true);
  const TangentMatrix env_b =
      envelope_from_oracle(inst.grid, oracles::sample_generator(inst));
  TangentMatrix env_a = env_b;
  env_a.rows.col(0).array() += 0.75;  // A = B + 0.75 pointwise
  const NeighborIndex index(inst.grid);
  DisturbanceSet ds;
  ds.matrices = inst.disturb;
  ds.weights = inst.weights;
  const TangentMatrix out_a = expected_pwl(env_a, inst.grid, ds, index, inst.grid.size());
  const TangentMatrix out_b = expected_pwl(env_b, inst.grid, ds, index, inst.grid.size());
  for (int i = 0; i < inst.grid.size(); ++i) {
    Vec gi = inst.grid.points.row(i).transpose();
    CHECK(evaluate(out_a, gi).value >= evaluate(out_b, gi).value - 1e-12);
  }
}

TEST_CASE("candidate-table and index overloads agree") {
  std::mt19937 rng(31);
  const oracles::RandomInstance inst = oracles::random_instance(rng, 24, 3, 5);
  const TangentMatrix env =
      envelope_from_oracle(inst.grid, oracles::sample_generator(inst));
  const NeighborIndex index(inst.grid);
  DisturbanceSet ds;
  ds.matrices = inst.disturb;
  ds.weights = inst.weights;
  const int k_nn = std::min(4, inst.grid.size());
  const CandidateTable table = displaced_candidates(inst.grid, ds, index, k_nn);
  const TangentMatrix a = expected_pwl(env, inst.grid, ds, table);
  const TangentMatrix b = expected_pwl(env, inst.grid, ds, index, k_nn);
  CHECK((a.rows - b.rows).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dimension mismatches are rejected") {
  const Grid grid = three_point_grid();
  const NeighborIndex index(grid);
  TangentMatrix tm;
  tm.rows.resize(2, 2);  // wrong row count
  tm.rows.setZero();
  DisturbanceSet ds;
  ds.matrices = {Mat::Identity(2, 2)};
  ds.weights = Vec::Ones(1);
  CHECK_THROWS_AS(expected_pwl(tm, grid, ds, index, 3), std::invalid_argument);
}
