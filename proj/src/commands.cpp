#include "foliation/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "foliation/csv_io.hpp"
#include "foliation/dichotomy.hpp"
#include "foliation/errors.hpp"
#include "foliation/expansion.hpp"
#include "foliation/leaf_solver.hpp"
#include "foliation/noise.hpp"
#include "foliation/task_pool.hpp"
#include "foliation/version.hpp"

namespace foliation {

namespace {

using nlohmann::json;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

/// Everything the compute commands share, resolved once up front.
struct Resolved {
  ModelSpec model;
  Vec phi0;
  std::vector<Vec> xi_points;
  std::vector<double> epsilons;
  std::vector<std::uint64_t> seeds;
  double eta{};
  GapReport gap;
  std::string out_dir;
  unsigned workers{};
};

Resolved resolve_common(const RunConfig& config) {
  validate_base(config);
  Resolved r;
  r.model = resolve_model(config);
  r.phi0 = resolve_phi0(config, r.model);
  r.xi_points = resolve_xi_points(config, r.model);
  r.epsilons = resolve_epsilons(config);
  r.seeds = resolve_seeds(config);
  const auto eta = resolve_eta(config);
  r.eta = eta ? *eta : select_eta(r.model.split, r.model.lipschitz_LF);
  r.gap = check_gap_condition(r.model.split, r.model.lipschitz_LF, r.eta);
  r.out_dir = resolve_out_dir(config);
  r.workers = resolve_workers(config);
  return r;
}

double single_epsilon(const Resolved& r, const char* command) {
  if (r.epsilons.size() != 1)
    throw ConfigError(std::string(command) +
                      " takes exactly one epsilon, got " +
                      std::to_string(r.epsilons.size()));
  return r.epsilons.front();
}

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty() || dir == ".") return name;
  if (dir.back() == '/') return dir + name;
  return dir + "/" + name;
}

// Null when the value is infinite: JSON has no representation for it and a
// silent null from the serializer would be easy to misread.
json finite_or_null(double x) {
  return std::isfinite(x) ? json(x) : json();
}

json config_json(const RunConfig& c, const std::string& out_dir) {
  json j;
  j["model"] = c.model;
  j["modes"] = c.modes;
  j["cutoff"] = c.cutoff ? json(*c.cutoff) : json();
  j["eigenvalues"] = c.eigenvalues;
  j["poly"] = c.poly;
  j["phi0"] = c.phi0;
  j["xi_grid"] = c.xi_grid;
  j["epsilon"] = c.epsilon;
  j["seed"] = c.seed;
  j["seeds"] = c.seeds;
  j["seed_list"] = c.seed_list;
  j["dt"] = c.dt;
  j["t_max"] = c.t_max;
  j["t_min"] = c.t_min;
  j["eta"] = c.eta;
  j["tol"] = c.tol;
  j["max_iterations"] = c.max_iterations;
  j["order"] = c.order;
  j["membership_horizon"] = c.membership_horizon;
  j["control_offset"] = c.control_offset;
  j["workers"] = c.workers;
  j["dump_path"] = c.dump_path;
  j["out"] = out_dir;
  j["gap_k"] = c.gap_K ? json(*c.gap_K) : json();
  j["gap_lf"] = c.gap_LF ? json(*c.gap_LF) : json();
  j["gap_alpha"] = c.gap_alpha ? json(*c.gap_alpha) : json();
  j["gap_beta"] = c.gap_beta ? json(*c.gap_beta) : json();
  j["gap_eta"] = c.gap_eta ? json(*c.gap_eta) : json();
  j["library_version"] = kLibraryVersion;
  return j;
}

json derived_json(const Resolved& r) {
  json j;
  j["alpha"] = finite_or_null(r.model.split.alpha);
  j["beta"] = finite_or_null(r.model.split.beta);
  j["K"] = r.model.split.bound_K;
  j["lipschitz_LF"] = r.model.lipschitz_LF;
  j["eta"] = r.eta;
  j["gap"] = {{"value", r.gap.value},
              {"margin", r.gap.margin},
              {"satisfied", r.gap.satisfied}};
  j["dimension"] = r.model.dimension;
  j["xi_count"] = r.xi_points.size();
  j["seed_values"] = r.seeds;
  return j;
}

json info_json(const FixedPointInfo& info) {
  return json{{"iterations", info.iterations},
              {"residual", info.residual},
              {"converged", info.converged}};
}

void write_manifest(const std::string& out_dir, json manifest) {
  write_text_file(join_path(out_dir, "manifest.json"), manifest.dump(2) + "\n");
}

void append_indexed(std::vector<std::string>& header, const char* prefix,
                    std::size_t count) {
  for (std::size_t i = 1; i <= count; ++i)
    header.push_back(std::string(prefix) + "_" + std::to_string(i));
}

void append_components(std::vector<double>& row, const Vec& v,
                       const std::vector<std::size_t>& coords) {
  for (std::size_t i : coords) row.push_back(v[i]);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Unbiased sample variance; needs at least two points.
double variance_of(const std::vector<double>& v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size() - 1);
}

// Least-squares slope of y against x; caller guarantees >= 2 points.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double xm = mean_of(x), ym = mean_of(y);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - xm) * (y[i] - ym);
    den += (x[i] - xm) * (x[i] - xm);
  }
  return num / den;
}

/// Deterministic layer shared by leaf, converge, mc and membership: the base
/// trajectory and one order-0 fixed point per xi. Noise-free, so computed
/// once and reused across every seed.
struct DeterministicLayer {
  Trajectory phi_d;
  std::vector<Vec> l_d;            // full-dimension, stable entries zero
  std::vector<Trajectory> psi_d;   // kept: the order-1 solve reads it
  std::vector<FixedPointInfo> info;
  bool all_converged{true};
};

DeterministicLayer deterministic_layer(const Resolved& r, const TimeGrid& grid,
                                       const RunConfig& config) {
  DeterministicLayer layer;
  layer.phi_d = solve_phi_d(r.model, r.phi0, grid);
  const std::size_t n = r.xi_points.size();
  layer.l_d.resize(n);
  layer.psi_d.resize(n);
  layer.info.resize(n);
  parallel_for(n, r.workers, [&](std::size_t i) {
    LdResult ld =
        compute_l_d(r.model, r.xi_points[i], r.phi0, grid, config.tol,
                    static_cast<std::size_t>(config.max_iterations));
    layer.l_d[i] = std::move(ld.value);
    layer.psi_d[i] = std::move(ld.psi_d);
    layer.info[i] = std::move(ld.info);
  });
  for (const auto& info : layer.info)
    if (!info.converged) layer.all_converged = false;
  return layer;
}

/// Per-seed noise-linear layer: the OU functional, the first-order base
/// correction and one l_1 per xi. Independent of epsilon.
struct SeedLayer {
  OUProcess ou;
  std::vector<Vec> l_1;
  std::vector<FixedPointInfo> info;
  bool all_converged{true};
};

SeedLayer seed_layer(const Resolved& r, const DeterministicLayer& det,
                     const TimeGrid& grid, const RunConfig& config,
                     std::uint64_t seed, double path_horizon) {
  SeedLayer layer;
  BrownianPath path =
      generate_brownian_path(seed, config.t_min, path_horizon, config.dt);
  layer.ou = ou_stationary(path);
  const Trajectory phi_1 = solve_phi_1(r.model, det.phi_d, layer.ou, grid);
  const std::size_t n = r.xi_points.size();
  layer.l_1.resize(n);
  layer.info.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    L1Result l1 =
        compute_l_1(r.model, det.phi_d, det.psi_d[i], phi_1, layer.ou, grid,
                    config.tol, static_cast<std::size_t>(config.max_iterations));
    layer.l_1[i] = std::move(l1.value);
    layer.info[i] = std::move(l1.info);
    if (!layer.info[i].converged) layer.all_converged = false;
  }
  return layer;
}

}  // namespace

int cmd_leaf(const RunConfig& config) {
  const Resolved r = resolve_common(config);
  const double eps = single_epsilon(r, "leaf");
  const TimeGrid grid = TimeGrid::from_horizon(config.t_max, config.dt);
  const auto& split = r.model.split;

  const DeterministicLayer det = deterministic_layer(r, grid, config);

  CsvTable det_table;
  append_indexed(det_table.header, "xi", split.stable_set.size());
  append_indexed(det_table.header, "l_d", split.unstable_set.size());
  append_indexed(det_table.header, "leaf_pred", r.model.dimension);
  for (std::size_t i = 0; i < r.xi_points.size(); ++i) {
    std::vector<double> row;
    append_components(row, r.xi_points[i], split.stable_set);
    append_components(row, det.l_d[i], split.unstable_set);
    const Vec point = add(r.xi_points[i], det.l_d[i]);
    row.insert(row.end(), point.begin(), point.end());
    det_table.rows.push_back(std::move(row));
  }
  write_csv(join_path(r.out_dir, "leaf_deterministic.csv"), det_table);

  const std::size_t nseeds = r.seeds.size();
  std::vector<LeafApproximation> runs(nseeds);
  std::vector<OUProcess> paths(config.dump_path ? nseeds : 0);
  parallel_for(nseeds, r.workers, [&](std::size_t k) {
    BrownianPath path = generate_brownian_path(r.seeds[k], config.t_min,
                                               grid.horizon(), config.dt);
    OUProcess ou = ou_stationary(path);
    runs[k] = assemble_leaf(r.model, r.phi0, r.xi_points, eps, ou, grid,
                            config.tol, config.order,
                            static_cast<std::size_t>(config.max_iterations));
    if (config.dump_path) paths[k] = std::move(ou);
  });

  bool all_converged = det.all_converged;
  json run_summaries = json::array();
  for (std::size_t k = 0; k < nseeds; ++k) {
    CsvTable table;
    append_indexed(table.header, "xi", split.stable_set.size());
    append_indexed(table.header, "l_d", split.unstable_set.size());
    append_indexed(table.header, "l_1", split.unstable_set.size());
    append_indexed(table.header, "leaf_pred", r.model.dimension);
    std::size_t max_it = 0;
    double max_res = 0.0;
    bool seed_ok = true;
    for (const LeafSample& sample : runs[k].samples) {
      std::vector<double> row;
      append_components(row, sample.xi, split.stable_set);
      append_components(row, sample.l_d, split.unstable_set);
      append_components(row, sample.l_1, split.unstable_set);
      row.insert(row.end(), sample.point.begin(), sample.point.end());
      table.rows.push_back(std::move(row));
      seed_ok = seed_ok && sample.info_d.converged && sample.info_1.converged;
      max_it = std::max({max_it, sample.info_d.iterations,
                         sample.info_1.iterations});
      max_res = std::max({max_res, sample.info_d.residual,
                          sample.info_1.residual});
    }
    const std::string name = "leaf_seed" + std::to_string(r.seeds[k]) + ".csv";
    write_csv(join_path(r.out_dir, name), table);
    if (config.dump_path)
      write_path_csv(join_path(r.out_dir, "path_seed" +
                                              std::to_string(r.seeds[k]) +
                                              ".csv"),
                     paths[k]);
    all_converged = all_converged && seed_ok;
    run_summaries.push_back(json{{"seed", r.seeds[k]},
                                 {"converged", seed_ok},
                                 {"max_iterations", max_it},
                                 {"max_residual", max_res}});
  }

  json manifest = config_json(config, r.out_dir);
  manifest["command"] = "leaf";
  manifest["derived"] = derived_json(r);
  manifest["derived"]["epsilon_value"] = eps;
  json det_infos = json::array();
  for (const auto& info : det.info) det_infos.push_back(info_json(info));
  manifest["derived"]["deterministic"] = det_infos;
  manifest["derived"]["runs"] = run_summaries;
  write_manifest(r.out_dir, std::move(manifest));

  std::printf("leaf: %zu points, %zu seeds, epsilon = %s\n",
              r.xi_points.size(), nseeds, format_g17(eps).c_str());
  std::printf("gap value = %s (%s)\n", format_g17(r.gap.value).c_str(),
              r.gap.satisfied ? "satisfied" : "not satisfied");
  std::printf("wrote %s\n",
              join_path(r.out_dir, "leaf_deterministic.csv").c_str());
  for (std::uint64_t seed : r.seeds)
    std::printf("wrote %s\n",
                join_path(r.out_dir,
                          "leaf_seed" + std::to_string(seed) + ".csv")
                    .c_str());
  if (!all_converged)
    std::printf("warning: some fixed points hit the iteration cap\n");
  return all_converged ? 0 : 2;
}

int cmd_converge(const RunConfig& config) {
  const Resolved r = resolve_common(config);

  std::vector<double> eps = r.epsilons;
  std::sort(eps.begin(), eps.end());
  eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
  if (eps.size() < 3)
    throw ConfigError("converge needs at least 3 distinct epsilons");
  for (double e : eps)
    if (!(e > 0.0))
      throw ConfigError(
          "converge needs strictly positive epsilons (errors are fitted on a "
          "log scale)");
  if (r.seeds.size() < 5) throw ConfigError("converge needs at least 5 seeds");
  if (r.xi_points.empty()) throw ConfigError("converge needs xi points");

  const TimeGrid grid = TimeGrid::from_horizon(config.t_max, config.dt);
  const DeterministicLayer det = deterministic_layer(r, grid, config);
  if (!det.all_converged)
    throw ConvergenceError("deterministic leaf did not converge", 0, 0.0);

  const std::size_t nseeds = r.seeds.size();
  const std::size_t neps = eps.size();
  const std::size_t nxi = r.xi_points.size();

  struct Cell {
    double error{kNan};
    bool valid{false};
  };
  std::vector<std::vector<Cell>> cells(nseeds, std::vector<Cell>(neps));
  std::vector<std::size_t> excluded(nseeds, 0);

  LPConfig lp;
  lp.eta = r.eta;
  lp.tol = config.tol;
  lp.max_iterations = static_cast<std::size_t>(config.max_iterations);

  parallel_for(nseeds, r.workers, [&](std::size_t s) {
    const SeedLayer layer =
        seed_layer(r, det, grid, config, r.seeds[s], grid.horizon());
    for (std::size_t e = 0; e < neps; ++e) {
      double worst = 0.0;
      std::size_t used = 0;
      for (std::size_t i = 0; i < nxi; ++i) {
        if (!layer.info[i].converged) {
          ++excluded[s];
          continue;
        }
        FixedPointReport oracle = lyapunov_perron_leaf(
            r.model, r.xi_points[i], r.phi0, eps[e], layer.ou, grid, lp);
        if (!oracle.converged) {
          ++excluded[s];
          continue;
        }
        Vec predicted = add(r.xi_points[i], det.l_d[i]);
        if (config.order >= 1) axpy(predicted, eps[e], layer.l_1[i]);
        worst = std::max(worst, max_abs_diff(oracle.leaf_point, predicted));
        ++used;
      }
      if (used > 0) cells[s][e] = {worst, true};
    }
  });

  std::size_t warnings = 0;
  for (std::size_t s = 0; s < nseeds; ++s) warnings += excluded[s];

  CsvTable table;
  table.header = {"epsilon", "seed", "error", "valid"};
  for (std::size_t e = 0; e < neps; ++e)
    for (std::size_t s = 0; s < nseeds; ++s)
      table.rows.push_back({eps[e], static_cast<double>(r.seeds[s]),
                            cells[s][e].error,
                            cells[s][e].valid ? 1.0 : 0.0});
  write_csv(join_path(r.out_dir, "converge.csv"), table);

  std::vector<double> mean_errors(neps, kNan);
  for (std::size_t e = 0; e < neps; ++e) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t s = 0; s < nseeds; ++s)
      if (cells[s][e].valid) {
        sum += cells[s][e].error;
        ++count;
      }
    if (count > 0) mean_errors[e] = sum / static_cast<double>(count);
  }

  std::vector<double> seed_slopes;
  for (std::size_t s = 0; s < nseeds; ++s) {
    std::vector<double> lx, ly;
    for (std::size_t e = 0; e < neps; ++e)
      if (cells[s][e].valid && cells[s][e].error > 0.0) {
        lx.push_back(std::log(eps[e]));
        ly.push_back(std::log(cells[s][e].error));
      }
    if (lx.size() >= 2) seed_slopes.push_back(ls_slope(lx, ly));
  }
  if (seed_slopes.empty())
    throw ConvergenceError(
        "no seed produced enough convergent cells to fit a slope", 0, 0.0);

  const double slope = mean_of(seed_slopes);
  double ci_low = slope, ci_high = slope;
  if (seed_slopes.size() >= 2) {
    const double sd = std::sqrt(variance_of(seed_slopes, slope));
    const double half =
        1.96 * sd / std::sqrt(static_cast<double>(seed_slopes.size()));
    ci_low = slope - half;
    ci_high = slope + half;
  }

  json manifest = config_json(config, r.out_dir);
  manifest["command"] = "converge";
  manifest["derived"] = derived_json(r);
  manifest["derived"]["epsilons"] = eps;
  manifest["derived"]["mean_errors"] = mean_errors;
  manifest["derived"]["slope"] = slope;
  manifest["derived"]["ci_low"] = ci_low;
  manifest["derived"]["ci_high"] = ci_high;
  manifest["derived"]["seed_slopes"] = seed_slopes;
  manifest["derived"]["excluded_samples"] = warnings;
  write_manifest(r.out_dir, std::move(manifest));

  for (std::size_t e = 0; e < neps; ++e)
    std::printf("epsilon %s: mean error %s\n", format_g17(eps[e]).c_str(),
                format_g17(mean_errors[e]).c_str());
  std::printf("slope = %s\n", format_g17(slope).c_str());
  std::printf("ci = [%s, %s] over %zu seed slopes\n",
              format_g17(ci_low).c_str(), format_g17(ci_high).c_str(),
              seed_slopes.size());
  if (warnings > 0)
    std::printf("warning: %zu samples excluded for non-convergence\n",
                warnings);
  std::printf("wrote %s\n", join_path(r.out_dir, "converge.csv").c_str());
  return 0;
}

int cmd_mc(const RunConfig& config) {
  const Resolved r = resolve_common(config);
  const double eps = single_epsilon(r, "mc");
  if (r.seeds.size() < 100)
    throw ConfigError("mc needs at least 100 seeds for stable statistics");
  if (r.xi_points.empty()) throw ConfigError("mc needs xi points");

  const TimeGrid grid = TimeGrid::from_horizon(config.t_max, config.dt);
  const auto& split = r.model.split;
  const DeterministicLayer det = deterministic_layer(r, grid, config);
  if (!det.all_converged)
    throw ConvergenceError("deterministic leaf did not converge", 0, 0.0);

  const std::size_t nseeds = r.seeds.size();
  const std::size_t nxi = r.xi_points.size();

  // normalized statistic g = l1_y / (-(xi^2 - x0^2) / 3); the denominator is
  // the deterministic leaf offset, zero when xi^2 = x0^2.
  const bool with_g = (r.model.name == "example1");
  const double x0 = r.phi0[split.stable_set.front()];

  struct SeedOutcome {
    std::vector<Vec> l_1;
    bool converged{true};
  };
  std::vector<SeedOutcome> outcomes(nseeds);
  parallel_for(nseeds, r.workers, [&](std::size_t s) {
    SeedLayer layer =
        seed_layer(r, det, grid, config, r.seeds[s], grid.horizon());
    outcomes[s] = {std::move(layer.l_1), layer.all_converged};
  });

  std::size_t dropped = 0;
  for (const auto& o : outcomes)
    if (!o.converged) ++dropped;
  if (dropped == nseeds)
    throw ConvergenceError("every seed failed to converge", 0, 0.0);

  CsvTable table;
  append_indexed(table.header, "xi", split.stable_set.size());
  append_indexed(table.header, "l1_mean", split.unstable_set.size());
  append_indexed(table.header, "l1_var", split.unstable_set.size());
  if (with_g) {
    table.header.push_back("g_mean");
    table.header.push_back("g_var");
  }

  json per_xi = json::array();
  for (std::size_t i = 0; i < nxi; ++i) {
    std::vector<double> row;
    append_components(row, r.xi_points[i], split.stable_set);

    std::vector<double> means, vars;
    for (std::size_t u : split.unstable_set) {
      std::vector<double> samples;
      samples.reserve(nseeds);
      for (const auto& o : outcomes)
        if (o.converged) samples.push_back(o.l_1[i][u]);
      const double m = mean_of(samples);
      means.push_back(m);
      vars.push_back(samples.size() >= 2 ? variance_of(samples, m) : kNan);
    }
    row.insert(row.end(), means.begin(), means.end());
    row.insert(row.end(), vars.begin(), vars.end());

    double g_mean = kNan, g_var = kNan;
    if (with_g) {
      const double xi_x = r.xi_points[i][split.stable_set.front()];
      const double denom = -(xi_x * xi_x - x0 * x0) / 3.0;
      if (denom != 0.0) {
        std::vector<double> g;
        g.reserve(nseeds);
        for (const auto& o : outcomes)
          if (o.converged)
            g.push_back(o.l_1[i][split.unstable_set.front()] / denom);
        g_mean = mean_of(g);
        if (g.size() >= 2) g_var = variance_of(g, g_mean);
      }
      row.push_back(g_mean);
      row.push_back(g_var);
    }
    table.rows.push_back(std::move(row));

    json stats;
    stats["l1_mean"] = means;
    stats["l1_var"] = vars;
    if (with_g) {
      stats["g_mean"] = finite_or_null(g_mean);
      stats["g_var"] = finite_or_null(g_var);
    }
    per_xi.push_back(std::move(stats));
  }
  write_csv(join_path(r.out_dir, "mc.csv"), table);

  json manifest = config_json(config, r.out_dir);
  manifest["command"] = "mc";
  manifest["derived"] = derived_json(r);
  manifest["derived"]["epsilon_value"] = eps;
  manifest["derived"]["statistics"] = per_xi;
  manifest["derived"]["seeds_dropped"] = dropped;
  write_manifest(r.out_dir, std::move(manifest));

  std::printf("mc: %zu xi points, %zu seeds (%zu dropped)\n", nxi, nseeds,
              dropped);
  std::printf("wrote %s\n", join_path(r.out_dir, "mc.csv").c_str());
  if (dropped > 0)
    std::printf("warning: %zu seeds excluded for non-convergence\n", dropped);
  return 0;
}

int cmd_gap(const RunConfig& config) {
  double alpha = 0.0, beta = 0.0;
  double K = config.gap_K.value_or(1.0);
  double LF = 0.0;

  const bool tuple_mode = config.gap_alpha && config.gap_beta;
  if (tuple_mode) {
    alpha = *config.gap_alpha;
    beta = *config.gap_beta;
    LF = config.gap_LF.value_or(0.0);
  } else {
    validate_base(config);
    const ModelSpec model = resolve_model(config);
    alpha = model.split.alpha;
    beta = model.split.beta;
    K = config.gap_K.value_or(model.split.bound_K);
    LF = config.gap_LF.value_or(model.lipschitz_LF);
  }

  double eta;
  if (config.gap_eta) {
    eta = *config.gap_eta;
  } else if (config.eta != "auto") {
    eta = *resolve_eta(config);
  } else {
    const bool fa = std::isfinite(alpha), fb = std::isfinite(beta);
    if (fa && fb)
      eta = 0.5 * (alpha + beta);
    else if (fa)
      eta = alpha - 1.0;
    else if (fb)
      eta = beta + 1.0;
    else
      eta = 0.0;
  }

  const double value = gap_value(K, LF, alpha, beta, eta);
  const double margin = 1.0 - value;
  const bool satisfied = value < 1.0;

  std::printf("alpha = %s\n", format_g17(alpha).c_str());
  std::printf("beta = %s\n", format_g17(beta).c_str());
  std::printf("K = %s\n", format_g17(K).c_str());
  std::printf("L_F = %s\n", format_g17(LF).c_str());
  std::printf("eta = %s\n", format_g17(eta).c_str());
  std::printf("gap value = %s\n", format_g17(value).c_str());
  std::printf("margin = %s\n", format_g17(margin).c_str());
  std::printf("satisfied = %s\n", satisfied ? "yes" : "no");
  return satisfied ? 0 : 1;
}

int cmd_membership(const RunConfig& config) {
  const Resolved r = resolve_common(config);
  const double eps = single_epsilon(r, "membership");
  const auto& split = r.model.split;
  if (split.unstable_set.empty())
    throw ConfigError(
        "membership needs an unstable coordinate for control points");
  if (r.xi_points.empty()) throw ConfigError("membership needs xi points");

  const TimeGrid grid = TimeGrid::from_horizon(config.t_max, config.dt);
  const TimeGrid mgrid =
      TimeGrid::from_horizon(config.membership_horizon, config.dt);
  const double path_horizon = std::max(grid.horizon(), mgrid.horizon());

  const DeterministicLayer det = deterministic_layer(r, grid, config);

  struct CurvePoint {
    double t;
    double w;
  };
  struct Outcome {
    std::size_t point{};
    bool control{};
    MembershipReport report;       // weighted_norms cleared after sampling
    std::vector<CurvePoint> curve;
  };
  struct SeedResult {
    std::vector<Outcome> outcomes;
    bool converged{true};
  };

  const std::size_t nseeds = r.seeds.size();
  const std::size_t nxi = r.xi_points.size();
  const std::size_t stride = std::max<std::size_t>(1, mgrid.nodes / 200);
  std::vector<SeedResult> results(nseeds);

  parallel_for(nseeds, r.workers, [&](std::size_t s) {
    const SeedLayer layer =
        seed_layer(r, det, grid, config, r.seeds[s], path_horizon);
    SeedResult& res = results[s];
    res.converged = layer.all_converged && det.all_converged;
    for (std::size_t i = 0; i < nxi; ++i) {
      Vec point = add(r.xi_points[i], det.l_d[i]);
      if (config.order >= 1) axpy(point, eps, layer.l_1[i]);
      Vec control = point;
      control[split.unstable_set.front()] += config.control_offset;
      for (int variant = 0; variant < 2; ++variant) {
        const Vec& candidate = variant == 0 ? point : control;
        Outcome out;
        out.point = i;
        out.control = variant == 1;
        out.report = verify_leaf_membership(r.model, candidate, r.phi0, eps,
                                            layer.ou, mgrid, r.eta);
        for (std::size_t k = 0; k < mgrid.nodes; k += stride)
          out.curve.push_back({mgrid.time(k), out.report.weighted_norms[k]});
        if ((mgrid.nodes - 1) % stride != 0)
          out.curve.push_back({mgrid.horizon(),
                               out.report.weighted_norms[mgrid.nodes - 1]});
        out.report.weighted_norms.clear();
        res.outcomes.push_back(std::move(out));
      }
    }
  });

  CsvTable table;
  table.header = {"point_index", "seed"};
  append_indexed(table.header, "xi", split.stable_set.size());
  for (const char* name :
       {"is_control", "initial_weighted_norm", "final_weighted_norm", "ratio",
        "decaying", "stayed_in_core"})
    table.header.push_back(name);

  CsvTable curves;
  curves.header = {"point_index", "seed", "is_control", "t", "weighted_norm"};

  std::size_t leaf_total = 0, leaf_decaying = 0;
  std::size_t control_total = 0, control_decaying = 0;
  bool all_converged = true;
  for (std::size_t s = 0; s < nseeds; ++s) {
    all_converged = all_converged && results[s].converged;
    for (const Outcome& out : results[s].outcomes) {
      std::vector<double> row = {static_cast<double>(out.point),
                                 static_cast<double>(r.seeds[s])};
      append_components(row, r.xi_points[out.point], split.stable_set);
      row.push_back(out.control ? 1.0 : 0.0);
      row.push_back(out.report.initial_weighted_norm);
      row.push_back(out.report.final_weighted_norm);
      row.push_back(out.report.ratio);
      row.push_back(out.report.decaying ? 1.0 : 0.0);
      row.push_back(out.report.stayed_in_core ? 1.0 : 0.0);
      table.rows.push_back(std::move(row));

      if (out.control) {
        ++control_total;
        if (out.report.decaying) ++control_decaying;
      } else {
        ++leaf_total;
        if (out.report.decaying) ++leaf_decaying;
      }
      for (const CurvePoint& cp : out.curve)
        curves.rows.push_back({static_cast<double>(out.point),
                               static_cast<double>(r.seeds[s]),
                               out.control ? 1.0 : 0.0, cp.t, cp.w});
    }
  }
  write_csv(join_path(r.out_dir, "membership.csv"), table);
  write_csv(join_path(r.out_dir, "membership_curves.csv"), curves);

  json manifest = config_json(config, r.out_dir);
  manifest["command"] = "membership";
  manifest["derived"] = derived_json(r);
  manifest["derived"]["epsilon_value"] = eps;
  manifest["derived"]["leaf_points"] = leaf_total;
  manifest["derived"]["leaf_decaying"] = leaf_decaying;
  manifest["derived"]["control_points"] = control_total;
  manifest["derived"]["control_decaying"] = control_decaying;
  manifest["derived"]["all_converged"] = all_converged;
  write_manifest(r.out_dir, std::move(manifest));

  std::printf("leaf points decaying: %zu/%zu\n", leaf_decaying, leaf_total);
  std::printf("control points decaying: %zu/%zu\n", control_decaying,
              control_total);
  std::printf("wrote %s\n", join_path(r.out_dir, "membership.csv").c_str());
  std::printf("wrote %s\n",
              join_path(r.out_dir, "membership_curves.csv").c_str());
  if (!all_converged)
    std::printf("warning: some fixed points hit the iteration cap\n");
  return all_converged ? 0 : 2;
}

}  // namespace foliation
