#include "foliation/run_config.hpp"

#include <cstdlib>
#include <sstream>
#include <string>

#include "foliation/builtin_models.hpp"
#include "foliation/errors.hpp"
#include "foliation/task_pool.hpp"

namespace foliation {

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!current.empty()) parts.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) parts.push_back(std::move(current));
  return parts;
}

double parse_double(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size())
      throw ConfigError("trailing characters in " + std::string(what) +
                        ": '" + text + "'");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + std::string(what) + ": '" + text +
                      "'");
  }
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  for (const auto& part : split_list(text))
    values.push_back(parse_double(part, "number list"));
  return values;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> values;
  for (const auto& part : split_list(text)) {
    try {
      std::size_t used = 0;
      values.push_back(std::stoull(part, &used));
      if (used != part.size())
        throw ConfigError("trailing characters in seed list: '" + part + "'");
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("cannot parse seed: '" + part + "'");
    }
  }
  return values;
}

void validate_base(const RunConfig& config) {
  if (!(config.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(config.t_max > 0.0)) throw ConfigError("t-max must be positive");
  if (!(config.t_min < 0.0)) throw ConfigError("t-min must be negative");
  if (!(config.tol > 0.0)) throw ConfigError("tol must be positive");
  if (config.max_iterations < 1)
    throw ConfigError("max-iterations must be at least 1");
  if (config.order != 0 && config.order != 1)
    throw ConfigError("order must be 0 or 1");
  if (!(config.membership_horizon > 0.0))
    throw ConfigError("membership-horizon must be positive");
  if (config.workers < 0) throw ConfigError("workers must be nonnegative");
  if (config.seeds < 1) throw ConfigError("seeds must be at least 1");
}

ModelSpec resolve_model(const RunConfig& config) {
  if (config.model == "example1")
    return example1_model(config.cutoff.value_or(2.0));
  if (config.model == "example2") {
    if (config.modes < 2) throw ConfigError("example2 needs modes >= 2");
    return example2_model(static_cast<std::size_t>(config.modes),
                          config.cutoff.value_or(0.1));
  }
  if (config.model == "custom") {
    const auto eigenvalues = parse_double_list(config.eigenvalues);
    if (eigenvalues.empty())
      throw ConfigError("custom model needs --eigenvalues");
    if (!config.cutoff) throw ConfigError("custom model needs --cutoff");
    return polynomial_diagonal_model(eigenvalues,
                                     parse_double_list(config.poly),
                                     *config.cutoff);
  }
  if (config.model == "linear") {
    const auto eigenvalues = parse_double_list(config.eigenvalues);
    if (eigenvalues.empty())
      throw ConfigError("linear model needs --eigenvalues");
    return linear_model(eigenvalues);
  }
  throw ConfigError("unknown model '" + config.model +
                    "' (expected example1, example2, custom, or linear)");
}

Vec resolve_phi0(const RunConfig& config, const ModelSpec& model) {
  if (config.phi0.empty()) return zeros(model.dimension);
  Vec v = parse_double_list(config.phi0);
  if (v.size() != model.dimension)
    throw ConfigError("phi0 has " + std::to_string(v.size()) +
                      " entries, model needs " +
                      std::to_string(model.dimension));
  return v;
}

std::vector<Vec> resolve_xi_points(const RunConfig& config,
                                   const ModelSpec& model) {
  const auto& stable = model.split.stable_set;
  std::vector<std::string> entries;
  {
    std::string current;
    for (char c : config.xi_grid) {
      if (c == ',') {
        entries.push_back(current);
        current.clear();
      } else if (c != ' ' && c != '\t') {
        current.push_back(c);
      }
    }
    if (!current.empty() || !entries.empty()) entries.push_back(current);
  }
  if (entries.size() > stable.size())
    throw ConfigError("xi-grid has " + std::to_string(entries.size()) +
                      " entries but the model has only " +
                      std::to_string(stable.size()) +
                      " stable coordinates");

  std::vector<std::vector<double>> per_coordinate(stable.size(), {0.0});
  for (std::size_t j = 0; j < entries.size(); ++j) {
    const std::string& entry = entries[j];
    if (entry.empty())
      throw ConfigError("empty entry in xi-grid '" + config.xi_grid + "'");
    const std::size_t c1 = entry.find(':');
    if (c1 == std::string::npos) {
      per_coordinate[j] = {parse_double(entry, "xi-grid value")};
      continue;
    }
    const std::size_t c2 = entry.find(':', c1 + 1);
    if (c2 == std::string::npos || entry.find(':', c2 + 1) != std::string::npos)
      throw ConfigError("xi-grid entry '" + entry +
                        "' must be start:stop:step or a single value");
    const double start = parse_double(entry.substr(0, c1), "xi-grid start");
    const double stop =
        parse_double(entry.substr(c1 + 1, c2 - c1 - 1), "xi-grid stop");
    const double step = parse_double(entry.substr(c2 + 1), "xi-grid step");
    if (stop == start) {
      per_coordinate[j] = {start};
      continue;
    }
    if (!(step > 0.0))
      throw ConfigError("xi-grid step must be positive in '" + entry + "'");
    if (stop < start)
      throw ConfigError("xi-grid stop below start in '" + entry + "'");
    std::vector<double> values;
    const auto count =
        static_cast<std::size_t>((stop - start) / step + 1e-9) + 1;
    values.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
      values.push_back(start + static_cast<double>(i) * step);
    per_coordinate[j] = std::move(values);
  }

  std::size_t total = 1;
  for (const auto& vals : per_coordinate) {
    total *= vals.size();
    if (total > 100000) throw ConfigError("xi-grid has more than 1e5 points");
  }

  std::vector<Vec> points;
  points.reserve(total);
  std::vector<std::size_t> index(per_coordinate.size(), 0);
  for (std::size_t p = 0; p < total; ++p) {
    Vec point = zeros(model.dimension);
    for (std::size_t j = 0; j < per_coordinate.size(); ++j)
      point[stable[j]] = per_coordinate[j][index[j]];
    points.push_back(std::move(point));
    for (std::size_t j = per_coordinate.size(); j-- > 0;) {
      if (++index[j] < per_coordinate[j].size()) break;
      index[j] = 0;
    }
  }
  return points;
}

std::vector<double> resolve_epsilons(const RunConfig& config) {
  auto values = parse_double_list(config.epsilon);
  if (values.empty()) throw ConfigError("epsilon list is empty");
  for (double e : values)
    if (e < 0.0) throw ConfigError("epsilon must be nonnegative");
  return values;
}

std::vector<std::uint64_t> resolve_seeds(const RunConfig& config) {
  if (!config.seed_list.empty()) {
    auto seeds = parse_seed_list(config.seed_list);
    if (seeds.empty()) throw ConfigError("seed-list is empty");
    return seeds;
  }
  std::vector<std::uint64_t> seeds;
  seeds.reserve(static_cast<std::size_t>(config.seeds));
  for (int k = 0; k < config.seeds; ++k)
    seeds.push_back(config.seed + static_cast<std::uint64_t>(k));
  return seeds;
}

std::optional<double> resolve_eta(const RunConfig& config) {
  if (config.eta == "auto") return std::nullopt;
  return parse_double(config.eta, "eta");
}

std::string resolve_out_dir(const RunConfig& config) {
  if (!config.out.empty()) return config.out;
  if (const char* env = std::getenv("FOLIATION_OUT_DIR"); env && *env)
    return env;
  return ".";
}

unsigned resolve_workers(const RunConfig& config) {
  return config.workers > 0 ? static_cast<unsigned>(config.workers)
                            : default_worker_count();
}

}  // namespace foliation
