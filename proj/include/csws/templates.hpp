// The two built-in switching models: a Bermudan put on sampled geometric
// Brownian motion, and a unit-refraction swing option on an exponential
// mean-reverting price. Builders produce every part the solver, policy and
// bound stages need; all parts are immutable after construction.
////////////////////////////////////////////////////////////////////////////////
#pragma once

#include <string>
#include <variant>
#include <vector>

#include "csws/sampling.hpp"
#include "csws/types.hpp"

namespace csws {

struct BermudanPutParams {
  double rate = 0.06;   // interest rate per annum
  double step = 0.02;   // years between decision epochs
  double vol = 0.2;     // GBM volatility
  int n_dec = 51;       // decision epochs (T + 1)
  double strike = 40.0;
  double grid_low = 30.0;
  double grid_high = 60.0;
  int grid_count = 301;
  double start_price = 36.0;
};

struct SwingParams {
  double rate = 0.0;     // rho (prices are already discounted when 0)
  double kappa = 0.9;    // mean reversion in [0, 1)
  double mu = 0.0;       // long-run mean of the log price
  double sigma = 0.5;    // volatility of the log price
  double strike = 0.0;
  int n_dec = 101;       // decision epochs (T + 1)
  int n_rights = 5;      // exercise rights N; positions = N + 1
  double grid_low = -2.0;
  double grid_high = 2.0;
  int grid_count = 101;
  double start_log_price = 0.0;
};

using ModelTemplate = std::variant<BermudanPutParams, SwingParams>;

// Everything a solve/bound run consumes. disturbances has one entry when
// the model is i.i.d. over time (both templates are).
struct ModelParts {
  Grid grid;
  ControlSpec control;
  std::vector<DisturbanceSet> disturbances;
  RewardSubgradients rewards;
  RewardOracle oracle;
  RandomEntrySpec path_spec;  // continuous law for paths and subsims
  Vec start;                  // augmented start state
  int default_position = 0;   // 0-based reporting position
};

// Throw std::invalid_argument naming the failing field on bad parameters.
// n_cells is the partition size for the disturbance quantization.
ModelParts build_put_template(const BermudanPutParams& params, int n_cells);
ModelParts build_swing_template(const SwingParams& params, int n_cells);

ModelParts build_template(const ModelTemplate& params, int n_cells);

std::string template_name(const ModelTemplate& params);

}  // namespace csws
