#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "kci/errors.hpp"

namespace kci {

// Flat run configuration: every field optional, commands apply their own
// defaults and write back the fully resolved set. The output directory is
// deliberately not part of the config so a written config reproduces the run
// anywhere.
struct RunConfig {
  std::optional<double> lambda, b, b1, b2, dt, horizon, amp, sample_dt, window_start, window_end;
  std::optional<long> n, seed, j, sign, depth, sample_every, cases;
  std::optional<std::string> beta, a, lambda_grid, suite;
  std::optional<bool> plot;
};

inline RunConfig parse_config_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw validation_error(std::string("config is not valid JSON: ") + e.what());
  }
  require(doc.is_object(), "config must be a JSON object");

  RunConfig cfg;
  auto num = [](const nlohmann::json& v, const std::string& key) -> double {
    require(v.is_number(), "config key '" + key + "' must be a number");
    return v.get<double>();
  };
  auto integer = [](const nlohmann::json& v, const std::string& key) -> long {
    require(v.is_number_integer(), "config key '" + key + "' must be an integer");
    return v.get<long>();
  };
  auto str = [](const nlohmann::json& v, const std::string& key) -> std::string {
    require(v.is_string(), "config key '" + key + "' must be a string");
    return v.get<std::string>();
  };

  for (const auto& [key, value] : doc.items()) {
    if (key == "lambda") cfg.lambda = num(value, key);
    else if (key == "b") cfg.b = num(value, key);
    else if (key == "b1") cfg.b1 = num(value, key);
    else if (key == "b2") cfg.b2 = num(value, key);
    else if (key == "dt") cfg.dt = num(value, key);
    else if (key == "horizon") cfg.horizon = num(value, key);
    else if (key == "amp") cfg.amp = num(value, key);
    else if (key == "sample_dt") cfg.sample_dt = num(value, key);
    else if (key == "window_start") cfg.window_start = num(value, key);
    else if (key == "window_end") cfg.window_end = num(value, key);
    else if (key == "n") cfg.n = integer(value, key);
    else if (key == "seed") cfg.seed = integer(value, key);
    else if (key == "j") cfg.j = integer(value, key);
    else if (key == "sign") cfg.sign = integer(value, key);
    else if (key == "depth") cfg.depth = integer(value, key);
    else if (key == "sample_every") cfg.sample_every = integer(value, key);
    else if (key == "cases") cfg.cases = integer(value, key);
    else if (key == "beta") cfg.beta = str(value, key);
    else if (key == "a") cfg.a = str(value, key);
    else if (key == "lambda_grid") cfg.lambda_grid = str(value, key);
    else if (key == "suite") cfg.suite = str(value, key);
    else if (key == "plot") {
      require(value.is_boolean(), "config key 'plot' must be a boolean");
      cfg.plot = value.get<bool>();
    } else {
      throw validation_error("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

// Fields set in `over` win; everything else comes from `base`.
inline RunConfig merge_overrides(RunConfig base, const RunConfig& over) {
  auto pick = [](auto& dst, const auto& src) {
    if (src) dst = src;
  };
  pick(base.lambda, over.lambda);
  pick(base.b, over.b);
  pick(base.b1, over.b1);
  pick(base.b2, over.b2);
  pick(base.dt, over.dt);
  pick(base.horizon, over.horizon);
  pick(base.amp, over.amp);
  pick(base.sample_dt, over.sample_dt);
  pick(base.window_start, over.window_start);
  pick(base.window_end, over.window_end);
  pick(base.n, over.n);
  pick(base.seed, over.seed);
  pick(base.j, over.j);
  pick(base.sign, over.sign);
  pick(base.depth, over.depth);
  pick(base.sample_every, over.sample_every);
  pick(base.cases, over.cases);
  pick(base.beta, over.beta);
  pick(base.a, over.a);
  pick(base.lambda_grid, over.lambda_grid);
  pick(base.suite, over.suite);
  pick(base.plot, over.plot);
  return base;
}

}  // namespace kci
