#include "csws/config.hpp"

#include <fstream>

namespace csws {

namespace {

using nlohmann::json;

template <class T>
T field(const json& j, const std::string& where, const std::string& name) {
  if (!j.contains(name)) {
    throw ConfigError(where + "." + name + ": missing required field");
  }
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + name + ": " + e.what());
  }
}

ModelTemplate parse_model(const json& j) {
  const std::string kind = field<std::string>(j, "model", "template");
  const json grid = j.contains("grid") ? j.at("grid") : json::object();
  if (kind == "bermudan_put") {
    BermudanPutParams p;
    p.rate = field<double>(j, "model", "rate");
    p.step = field<double>(j, "model", "step");
    p.vol = field<double>(j, "model", "vol");
    p.n_dec = field<int>(j, "model", "n_dec");
    p.strike = field<double>(j, "model", "strike");
    p.grid_low = field<double>(grid, "model.grid", "low");
    p.grid_high = field<double>(grid, "model.grid", "high");
    p.grid_count = field<int>(grid, "model.grid", "count");
    p.start_price = field<double>(j, "model", "start_price");
    return p;
  }
  if (kind == "swing") {
    SwingParams p;
    p.rate = field<double>(j, "model", "rate");
    p.kappa = field<double>(j, "model", "kappa");
    p.mu = field<double>(j, "model", "mu");
    p.sigma = field<double>(j, "model", "sigma");
    p.strike = field<double>(j, "model", "strike");
    p.n_dec = field<int>(j, "model", "n_dec");
    p.n_rights = field<int>(j, "model", "n_rights");
    p.grid_low = field<double>(grid, "model.grid", "low");
    p.grid_high = field<double>(grid, "model.grid", "high");
    p.grid_count = field<int>(grid, "model.grid", "count");
    p.start_log_price = field<double>(j, "model", "start_log_price");
    return p;
  }
  throw ConfigError("model.template: unknown template '" + kind +
                    "' (expected bermudan_put or swing)");
}

}  // namespace

RunConfig parse_config(const nlohmann::json& j) {
  RunConfig config;
  if (!j.contains("model")) throw ConfigError("model: missing required field");
  config.model = parse_model(j.at("model"));

  if (!j.contains("solver")) throw ConfigError("solver: missing required field");
  const json& s = j.at("solver");
  config.solver.n_cells = field<int>(s, "solver", "n_cells");
  config.solver.k_nn = field<int>(s, "solver", "k_nn");
  if (config.solver.n_cells < 1) {
    throw ConfigError("solver.n_cells: must be >= 1");
  }
  if (config.solver.k_nn < 1) {
    throw ConfigError("solver.k_nn: must be >= 1");
  }

  if (!j.contains("bounds")) throw ConfigError("bounds: missing required field");
  const json& b = j.at("bounds");
  config.bounds.n_path = field<int>(b, "bounds", "n_path");
  config.bounds.n_subsim = field<int>(b, "bounds", "n_subsim");
  config.bounds.seed = field<std::uint64_t>(b, "bounds", "seed");
  config.bounds.alpha = field<double>(b, "bounds", "alpha");
  if (b.contains("antithetic")) {
    config.bounds.antithetic = field<bool>(b, "bounds", "antithetic");
  }
  if (b.contains("position")) {
    config.bounds.position = field<int>(b, "bounds", "position");
  }
  if (config.bounds.n_path < 2) {
    throw ConfigError("bounds.n_path: must be >= 2");
  }
  if (config.bounds.antithetic &&
      (config.bounds.n_path % 2 != 0 || config.bounds.n_subsim % 2 != 0)) {
    throw ConfigError("bounds: antithetic pairing needs even n_path and n_subsim");
  }
  if (config.bounds.n_subsim < 1) {
    throw ConfigError("bounds.n_subsim: must be >= 1");
  }
  if (!(config.bounds.alpha > 0.0 && config.bounds.alpha < 1.0)) {
    throw ConfigError("bounds.alpha: must lie in (0, 1)");
  }

  config.output = field<std::string>(j, "config", "output");
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(j);
}

nlohmann::json to_json(const RunConfig& config) {
  nlohmann::json j;
  nlohmann::json m;
  if (const auto* put = std::get_if<BermudanPutParams>(&config.model)) {
    m["template"] = "bermudan_put";
    m["rate"] = put->rate;
    m["step"] = put->step;
    m["vol"] = put->vol;
    m["n_dec"] = put->n_dec;
    m["strike"] = put->strike;
    m["grid"] = {{"low", put->grid_low},
                 {"high", put->grid_high},
                 {"count", put->grid_count}};
    m["start_price"] = put->start_price;
  } else {
    const auto& sw = std::get<SwingParams>(config.model);
    m["template"] = "swing";
    m["rate"] = sw.rate;
    m["kappa"] = sw.kappa;
    m["mu"] = sw.mu;
    m["sigma"] = sw.sigma;
    m["strike"] = sw.strike;
    m["n_dec"] = sw.n_dec;
    m["n_rights"] = sw.n_rights;
    m["grid"] = {{"low", sw.grid_low},
                 {"high", sw.grid_high},
                 {"count", sw.grid_count}};
    m["start_log_price"] = sw.start_log_price;
  }
  j["model"] = m;
  j["solver"] = {{"n_cells", config.solver.n_cells}, {"k_nn", config.solver.k_nn}};
  j["bounds"] = {{"n_path", config.bounds.n_path},
                 {"n_subsim", config.bounds.n_subsim},
                 {"seed", config.bounds.seed},
                 {"alpha", config.bounds.alpha},
                 {"antithetic", config.bounds.antithetic}};
  if (config.bounds.position) {
    j["bounds"]["position"] = *config.bounds.position;
  }
  j["output"] = config.output;
  return j;
}

}  // namespace csws
