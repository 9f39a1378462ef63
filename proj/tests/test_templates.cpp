#include <doctest.h>

#include <cmath>

#include "csws/templates.hpp"

using namespace csws;

TEST_CASE("put grid spans the configured range with an augmented column") {
  const ModelParts parts = build_put_template(BermudanPutParams{}, 10);
  REQUIRE(parts.grid.size() == 301);
  CHECK(parts.grid.points(0, 0) == 1.0);
  CHECK(parts.grid.points(0, 1) == doctest::Approx(30.0));
  CHECK(parts.grid.points(300, 0) == 1.0);
  CHECK(parts.grid.points(300, 1) == doctest::Approx(60.0));
  for (int i = 0; i + 1 < 301; ++i) {
    CHECK(parts.grid.points(i, 1) < parts.grid.points(i + 1, 1));
  }
}

TEST_CASE("put control table reproduces the stopping structure") {
  const ModelParts parts = build_put_template(BermudanPutParams{}, 10);
  REQUIRE(parts.control.is_deterministic());
  CHECK(parts.control.target(0, 0) == 0);
  CHECK(parts.control.target(0, 1) == 0);
  CHECK(parts.control.target(1, 0) == 1);
  CHECK(parts.control.target(1, 1) == 0);
}

TEST_CASE("put reward tangents carry the discounted strike and slope") {
  const ModelParts parts = build_put_template(BermudanPutParams{}, 10);
  // First decision epoch: discount factor 1; price 30 is in the money.
  const TangentMatrix& first = parts.rewards.tangents[0][1][1];
  CHECK(first.rows(0, 0) == doctest::Approx(40.0));
  CHECK(first.rows(0, 1) == doctest::Approx(-1.0));
  // Out-of-the-money anchor: zero row.
  CHECK(first.rows(300, 0) == 0.0);
  CHECK(first.rows(300, 1) == 0.0);
  // Continue action and exercised position carry no reward.
  CHECK(parts.rewards.tangents[0][1][0].rows.cwiseAbs().maxCoeff() == 0.0);
  CHECK(parts.rewards.tangents[0][0][1].rows.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("put rewards at consecutive epochs differ by one discount factor") {
  const BermudanPutParams params{};
  const ModelParts parts = build_put_template(params, 10);
  const double factor = std::exp(-params.rate * params.step);
  for (int t = 0; t + 1 < params.n_dec - 1; ++t) {
    const Mat& now = parts.rewards.tangents[t][1][1].rows;
    const Mat& next = parts.rewards.tangents[t + 1][1][1].rows;
    CHECK((next - factor * now).cwiseAbs().maxCoeff() <= 1e-15 * 40.0);
  }
}

TEST_CASE("zero strike makes every put reward tangent vanish") {
  BermudanPutParams params{};
  params.strike = 0.0;
  const ModelParts parts = build_put_template(params, 10);
  for (const auto& per_pos : parts.rewards.tangents) {
    for (const auto& per_action : per_pos) {
      for (const TangentMatrix& tm : per_action) {
        CHECK(tm.rows.cwiseAbs().maxCoeff() == 0.0);
      }
    }
  }
}

TEST_CASE("put oracle prices the exercise transition undiscounted at t=0") {
  const ModelParts parts = build_put_template(BermudanPutParams{}, 10);
  Vec z(2);
  z << 1.0, 36.0;
  CHECK(parts.oracle.reward(0, 1, 1, z) == doctest::Approx(4.0));
  CHECK(parts.oracle.reward(0, 1, 0, z) == 0.0);
  CHECK(parts.oracle.reward(0, 0, 1, z) == 0.0);
  const double discounted = std::exp(-0.06 * 0.02) * 4.0;
  CHECK(parts.oracle.reward(1, 1, 1, z) == doctest::Approx(discounted));
  CHECK(parts.oracle.scrap(1, z) ==
        doctest::Approx(std::exp(-0.06 * 0.02 * 50) * 4.0));
  CHECK(parts.oracle.scrap(0, z) == 0.0);
}

TEST_CASE("invalid put parameters name the failing field") {
  BermudanPutParams params{};
  params.vol = 0.0;
  CHECK_THROWS_WITH_AS(build_put_template(params, 10), doctest::Contains("vol"),
                       std::invalid_argument);
  params = BermudanPutParams{};
  params.n_dec = 1;
  CHECK_THROWS_WITH_AS(build_put_template(params, 10),
                       doctest::Contains("n_dec"), std::invalid_argument);
  params = BermudanPutParams{};
  CHECK_THROWS_WITH_AS(build_put_template(params, 0),
                       doctest::Contains("n_cells"), std::invalid_argument);
}

TEST_CASE("swing control matches the rights-remaining ladder") {
  SwingParams params{};
  const ModelParts parts = build_swing_template(params, 10);
  REQUIRE(parts.control.n_pos() == 6);
  // 1-based rows (1,1),(1,2),(2,3),(3,4),(4,5),(5,6).
  CHECK(parts.control.target(0, 0) == 0);
  CHECK(parts.control.target(0, 1) == 0);
  for (int p = 1; p < 6; ++p) {
    CHECK(parts.control.target(p, 0) == p - 1);
    CHECK(parts.control.target(p, 1) == p);
  }
}

TEST_CASE("single-right swing reduces to the put's stopping structure") {
  SwingParams params{};
  params.n_rights = 1;
  const ModelParts parts = build_swing_template(params, 10);
  REQUIRE(parts.control.n_pos() == 2);
  // 1-based [[1,1],[1,2]]: exercise is action 1 here, not action 2.
  CHECK(parts.control.target(0, 0) == 0);
  CHECK(parts.control.target(0, 1) == 0);
  CHECK(parts.control.target(1, 0) == 0);
  CHECK(parts.control.target(1, 1) == 1);
}

TEST_CASE("swing reward tangent at the origin anchor") {
  const ModelParts parts = build_swing_template(SwingParams{}, 10);
  // Grid on [-2, 2] with 101 points: anchor 50 is log price 0.  K = 0, so
  // the tangent of e^z at 0 has slope 1 and intercept 1.
  const TangentMatrix& tm = parts.rewards.tangents[0][5][0];
  CHECK(parts.grid.points(50, 1) == doctest::Approx(0.0));
  CHECK(tm.rows(50, 0) == doctest::Approx(1.0));
  CHECK(tm.rows(50, 1) == doctest::Approx(1.0));
  // No rights left or waiting: zero tangents.
  CHECK(parts.rewards.tangents[0][0][0].rows.cwiseAbs().maxCoeff() == 0.0);
  CHECK(parts.rewards.tangents[0][5][1].rows.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("swing disturbance fills the mean-reversion entries") {
  SwingParams params{};
  const ModelParts parts = build_swing_template(params, 4);
  const DisturbanceSet& ds = parts.disturbances[0];
  for (int k = 0; k < ds.count(); ++k) {
    CHECK(ds.matrices[k](0, 0) == 1.0);
    CHECK(ds.matrices[k](0, 1) == 0.0);
    CHECK(ds.matrices[k](1, 1) == doctest::Approx(1.0 - params.kappa));
  }
  // kappa mu + sigma E[Z | cell] with mu = 0: symmetric atoms.
  CHECK(ds.matrices[0](1, 0) == doctest::Approx(-ds.matrices[3](1, 0)));
}

TEST_CASE("invalid swing parameters name the failing field") {
  SwingParams params{};
  params.kappa = 1.0;
  CHECK_THROWS_WITH_AS(build_swing_template(params, 10),
                       doctest::Contains("kappa"), std::invalid_argument);
  params = SwingParams{};
  params.n_rights = 0;
  CHECK_THROWS_WITH_AS(build_swing_template(params, 10),
                       doctest::Contains("n_rights"), std::invalid_argument);
}

TEST_CASE("template anchors dominate their own tangents") {
  for (const ModelParts& parts :
       {build_put_template(BermudanPutParams{}, 10),
        build_swing_template(SwingParams{}, 10)}) {
    const auto violations = validate_model(parts.grid, parts.control,
                                           parts.disturbances, parts.rewards);
    CHECK(violations.empty());
  }
}
