#include "csws/templates.hpp"

#include <cmath>
#include <stdexcept>

namespace csws {

namespace {

void require(bool ok, const std::string& field, const std::string& why) {
  if (!ok) throw std::invalid_argument(field + ": " + why);
}

Grid make_augmented_grid(double low, double high, int count) {
  Grid grid;
  grid.augmented = true;
  grid.points.resize(count, 2);
  for (int i = 0; i < count; ++i) {
    grid.points(i, 0) = 1.0;
    grid.points(i, 1) =
        count == 1 ? low : low + (high - low) * i / (count - 1);
  }
  return grid;
}

// Deterministic-control reward factor p - alpha(p, a); 1 exactly on
// exercise transitions, 0 otherwise for both templates.
int reward_factor(const ControlSpec& control, int p, int a) {
  return p - control.target(p, a);
}

}  // namespace

ModelParts build_put_template(const BermudanPutParams& params, int n_cells) {
  require(params.vol > 0.0, "vol", "must be > 0");
  require(params.step > 0.0, "step", "must be > 0");
  require(params.n_dec >= 2, "n_dec", "must be >= 2");
  require(params.strike >= 0.0, "strike", "must be >= 0");
  require(params.grid_count >= 1, "grid_count", "must be >= 1");
  require(params.grid_low < params.grid_high || params.grid_count == 1,
          "grid_low", "must be below grid_high");
  require(std::isfinite(params.rate), "rate", "must be finite");
  require(std::isfinite(params.start_price), "start_price", "must be finite");
  require(n_cells >= 1, "n_cells", "must be >= 1");

  ModelParts parts;
  parts.grid = make_augmented_grid(params.grid_low, params.grid_high,
                                   params.grid_count);

  // Positions: 0 exercised, 1 not exercised. Actions: 0 continue, 1 exercise.
  Eigen::MatrixXi targets(2, 2);
  targets << 0, 0,
             1, 0;
  parts.control = ControlSpec::deterministic(targets);

  // One-year-fraction GBM factor epsilon ~ lognormal(u, s).
  const double u = (params.rate - 0.5 * params.vol * params.vol) * params.step;
  const double s = params.vol * std::sqrt(params.step);
  parts.path_spec.constant.setZero(2, 2);
  parts.path_spec.constant(0, 0) = 1.0;
  parts.path_spec.entries = {RandomEntry{1, 1, EntryTransform::affine, 0.0, 1.0}};
  parts.path_spec.dist = ShockDist::lognormal;
  parts.path_spec.log_mean = u;
  parts.path_spec.log_sd = s;
  parts.disturbances = {partition_sampling(parts.path_spec, n_cells)};

  // Subgradients of the payoff: in-the-money anchors carry the tangent
  // (K, -1), out-of-the-money anchors the zero function, discounted per epoch.
  const int m = parts.grid.size();
  const int n_steps = params.n_dec - 1;
  const double strike = params.strike;
  const double rate_step = params.rate * params.step;
  auto payoff_tangents = [&](double discount) {
    TangentMatrix tm;
    tm.rows.setZero(m, 2);
    for (int i = 0; i < m; ++i) {
      if (parts.grid.points(i, 1) <= strike) {
        tm.rows(i, 0) = discount * strike;
        tm.rows(i, 1) = -discount;
      }
    }
    return tm;
  };
  TangentMatrix zero;
  zero.rows.setZero(m, 2);
  parts.rewards.tangents.resize(n_steps);
  for (int t = 0; t < n_steps; ++t) {
    const double discount = std::exp(-rate_step * t);
    parts.rewards.tangents[t] = {{zero, zero}, {zero, payoff_tangents(discount)}};
  }
  parts.rewards.scrap = {zero, payoff_tangents(std::exp(-rate_step * n_steps))};

  const ControlSpec control = parts.control;
  parts.oracle.reward = [strike, rate_step, control](int t, int p, int a,
                                                     const Vec& z) {
    const int factor = reward_factor(control, p, a);
    if (factor == 0) return 0.0;
    return factor * std::exp(-rate_step * t) * std::max(strike - z[1], 0.0);
  };
  const int n_steps_c = n_steps;
  parts.oracle.scrap = [strike, rate_step, n_steps_c, control](int p,
                                                               const Vec& z) {
    const int factor = reward_factor(control, p, 1);
    if (factor == 0) return 0.0;
    return factor * std::exp(-rate_step * n_steps_c) *
           std::max(strike - z[1], 0.0);
  };

  parts.start.resize(2);
  parts.start << 1.0, params.start_price;
  parts.default_position = 1;
  return parts;
}

ModelParts build_swing_template(const SwingParams& params, int n_cells) {
  require(params.sigma > 0.0, "sigma", "must be > 0");
  require(params.kappa >= 0.0 && params.kappa < 1.0, "kappa",
          "must lie in [0, 1)");
  require(params.n_dec >= 2, "n_dec", "must be >= 2");
  require(params.n_rights >= 1, "n_rights", "must be >= 1");
  require(params.strike >= 0.0, "strike", "must be >= 0");
  require(params.grid_count >= 1, "grid_count", "must be >= 1");
  require(params.grid_low < params.grid_high || params.grid_count == 1,
          "grid_low", "must be below grid_high");
  require(std::isfinite(params.rate), "rate", "must be finite");
  require(std::isfinite(params.mu), "mu", "must be finite");
  require(std::isfinite(params.start_log_price), "start_log_price",
          "must be finite");
  require(n_cells >= 1, "n_cells", "must be >= 1");

  ModelParts parts;
  parts.grid = make_augmented_grid(params.grid_low, params.grid_high,
                                   params.grid_count);

  // Position p holds p exercise rights (0-based). Action 0 exercises one
  // right (unit refraction), action 1 waits.
  const int n_pos = params.n_rights + 1;
  Eigen::MatrixXi targets(n_pos, 2);
  for (int p = 0; p < n_pos; ++p) {
    targets(p, 0) = std::max(p - 1, 0);
    targets(p, 1) = p;
  }
  parts.control = ControlSpec::deterministic(targets);

  // Log price recursion z' = kappa mu + sigma eps + (1 - kappa) z.
  parts.path_spec.constant.setZero(2, 2);
  parts.path_spec.constant(0, 0) = 1.0;
  parts.path_spec.constant(1, 1) = 1.0 - params.kappa;
  parts.path_spec.entries = {RandomEntry{
      1, 0, EntryTransform::affine, params.kappa * params.mu, params.sigma}};
  parts.path_spec.dist = ShockDist::normal;
  parts.disturbances = {partition_sampling(parts.path_spec, n_cells)};

  // Tangents of the exponential payoff e^{z} - K e^{-rho t} at each anchor,
  // for every position with rights remaining and the exercise action.
  const int m = parts.grid.size();
  const int n_steps = params.n_dec - 1;
  const double strike = params.strike;
  const double rate = params.rate;
  auto payoff_tangents = [&](double discount) {
    TangentMatrix tm;
    tm.rows.setZero(m, 2);
    for (int i = 0; i < m; ++i) {
      const double g2 = parts.grid.points(i, 1);
      const double slope = std::exp(g2);
      tm.rows(i, 0) = (slope - strike * discount) - slope * g2;
      tm.rows(i, 1) = slope;
    }
    return tm;
  };
  TangentMatrix zero;
  zero.rows.setZero(m, 2);
  parts.rewards.tangents.resize(n_steps);
  for (int t = 0; t < n_steps; ++t) {
    const TangentMatrix payoff = payoff_tangents(std::exp(-rate * t));
    parts.rewards.tangents[t].resize(n_pos);
    parts.rewards.tangents[t][0] = {zero, zero};
    for (int p = 1; p < n_pos; ++p) {
      parts.rewards.tangents[t][p] = {payoff, zero};
    }
  }
  const TangentMatrix scrap_payoff = payoff_tangents(std::exp(-rate * n_steps));
  parts.rewards.scrap.assign(n_pos, zero);
  for (int p = 1; p < n_pos; ++p) parts.rewards.scrap[p] = scrap_payoff;

  const ControlSpec control = parts.control;
  parts.oracle.reward = [strike, rate, control](int t, int p, int a,
                                                const Vec& z) {
    const int factor = reward_factor(control, p, a);
    if (factor == 0) return 0.0;
    return factor *
           std::max(std::exp(z[1]) - strike * std::exp(-rate * t), 0.0);
  };
  const int n_steps_c = n_steps;
  parts.oracle.scrap = [strike, rate, n_steps_c, control](int p, const Vec& z) {
    const int factor = reward_factor(control, p, 0);
    if (factor == 0) return 0.0;
    return factor *
           std::max(std::exp(z[1]) - strike * std::exp(-rate * n_steps_c), 0.0);
  };

  parts.start.resize(2);
  parts.start << 1.0, params.start_log_price;
  parts.default_position = params.n_rights;
  return parts;
}

ModelParts build_template(const ModelTemplate& params, int n_cells) {
  if (const auto* put = std::get_if<BermudanPutParams>(&params)) {
    return build_put_template(*put, n_cells);
  }
  return build_swing_template(std::get<SwingParams>(params), n_cells);
}

std::string template_name(const ModelTemplate& params) {
  return std::holds_alternative<BermudanPutParams>(params) ? "bermudan_put"
                                                           : "swing";
}

}  // namespace csws
