#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "foliation/model.hpp"
#include "foliation/vec.hpp"

namespace foliation {

/// One experiment description. String fields hold the user's raw syntax;
/// the resolve_* functions below turn them into concrete objects and throw
/// ConfigError with the offending text on bad input.
struct RunConfig {
  std::string model{"example1"};
  int modes{8};                   // example2 truncation size
  std::optional<double> cutoff;   // taper radius; per-model default when unset
  std::string eigenvalues;        // custom/linear models: comma list
  std::string poly;               // custom model: coefficients by power
  std::string phi0;               // comma list; empty = origin
  std::string xi_grid;            // per stable coordinate: start:stop:step or a
                                  // single value, entries comma separated;
                                  // missing trailing coordinates pinned to 0
  std::string epsilon{"0.05"};    // comma list; most commands take one value
  std::uint64_t seed{1};
  int seeds{1};                   // ensemble size: seed, seed+1, ...
  std::string seed_list;          // explicit comma list, wins over seed/seeds
  double dt{1e-3};
  double t_max{20.0};             // solver horizon
  double t_min{-20.0};            // noise history for the stationary functional
  std::string eta{"auto"};        // weight rate: "auto" or a number
  double tol{1e-10};
  int max_iterations{100};
  int order{1};                   // 0 drops the noise-linear leaf term
  double membership_horizon{5.0};
  double control_offset{0.5};     // unstable offset of membership controls
  int workers{0};                 // 0 = hardware concurrency
  bool dump_path{false};
  std::string out;                // empty = $FOLIATION_OUT_DIR, then "."

  // Explicit gap-condition inputs (gap command); alpha+beta switch the
  // command from model mode to tuple mode.
  std::optional<double> gap_K, gap_LF, gap_alpha, gap_beta, gap_eta;
};

/// Comma/whitespace separated doubles. Empty text gives an empty list;
/// malformed entries throw ConfigError.
std::vector<double> parse_double_list(const std::string& text);
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

/// Field-level sanity checks shared by every command.
void validate_base(const RunConfig& config);

ModelSpec resolve_model(const RunConfig& config);
Vec resolve_phi0(const RunConfig& config, const ModelSpec& model);

/// Cartesian product of the per-coordinate grids in xi_grid, in stable-index
/// order; unspecified trailing coordinates are 0. Empty spec = the origin of
/// the stable range. Unstable coordinates are always zero.
std::vector<Vec> resolve_xi_points(const RunConfig& config,
                                   const ModelSpec& model);

std::vector<double> resolve_epsilons(const RunConfig& config);
std::vector<std::uint64_t> resolve_seeds(const RunConfig& config);

/// Empty optional means "auto": pick the weight from the gap condition.
std::optional<double> resolve_eta(const RunConfig& config);

std::string resolve_out_dir(const RunConfig& config);
unsigned resolve_workers(const RunConfig& config);

}  // namespace foliation
