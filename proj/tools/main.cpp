#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "foliation/commands.hpp"
#include "foliation/errors.hpp"
#include "foliation/run_config.hpp"
#include "foliation/version.hpp"

namespace {

// All options live on the root app and reach the subcommands through
// fallthrough, so `foliation leaf --model example1` and
// `foliation --model example1 leaf` both parse. Values that hold lists or
// ranges stay strings here; run_config.cpp owns the grammar.
void register_options(CLI::App& app, foliation::RunConfig& config) {
  app.add_option("--model", config.model,
                 "model name: example1, example2, custom, linear");
  app.add_option("--modes", config.modes,
                 "Galerkin truncation size (example2)");
  app.add_option("--cutoff", config.cutoff,
                 "taper radius; model default when omitted");
  app.add_option("--eigenvalues", config.eigenvalues,
                 "comma list of linear-part eigenvalues (custom, linear)");
  app.add_option("--poly", config.poly,
                 "comma list of polynomial coefficients by power (custom)");
  app.add_option("--phi0", config.phi0, "base point, comma list; default 0");
  app.add_option("--xi-grid", config.xi_grid,
                 "per stable coordinate: start:stop:step or a value, comma "
                 "separated");
  app.add_option("--epsilon", config.epsilon,
                 "noise amplitude; comma list for converge");
  app.add_option("--seed", config.seed, "base seed");
  app.add_option("--seeds", config.seeds,
                 "ensemble size: seed, seed+1, ...");
  app.add_option("--seed-list", config.seed_list,
                 "explicit comma list of seeds; wins over --seed/--seeds");
  app.add_option("--dt", config.dt, "time step");
  app.add_option("--t-max", config.t_max, "solver horizon");
  app.add_option("--t-min", config.t_min,
                 "noise history start (negative; stationarity truncation)");
  app.add_option("--eta", config.eta, "weight rate: auto or a number");
  app.add_option("--tol", config.tol, "fixed-point residual target");
  app.add_option("--max-iterations", config.max_iterations,
                 "fixed-point iteration cap");
  app.add_option("--order", config.order,
                 "expansion order for predicted points: 0 or 1");
  app.add_option("--membership-horizon", config.membership_horizon,
                 "decay-test horizon (membership)");
  app.add_option("--control-offset", config.control_offset,
                 "unstable offset of membership control points");
  app.add_option("--workers", config.workers,
                 "worker threads; 0 = hardware concurrency");
  app.add_flag("--dump-path", config.dump_path,
               "also write the sampled noise path per seed");
  app.add_option("--out", config.out,
                 "output directory; default $FOLIATION_OUT_DIR, then .");
  app.add_option("--gap-k", config.gap_K, "gap report: dichotomy constant K");
  app.add_option("--gap-lf", config.gap_LF,
                 "gap report: Lipschitz bound override");
  app.add_option("--gap-alpha", config.gap_alpha,
                 "gap report: unstable rate (with --gap-beta: tuple mode, no "
                 "model)");
  app.add_option("--gap-beta", config.gap_beta, "gap report: stable rate");
  app.add_option("--gap-eta", config.gap_eta, "gap report: weight override");
}

}  // namespace

int main(int argc, char** argv) {
  foliation::RunConfig config;

  CLI::App app{
      "stable-leaf toolkit: asymptotic leaf expansion, integral-equation "
      "reference solver, and experiment drivers for randomly forced "
      "semilinear systems"};
  app.set_version_flag("--version", std::string(foliation::kLibraryVersion));
  app.set_config("--config", "",
                 "flat key = value file (keys are the long option names); "
                 "command-line flags win");
  register_options(app, config);

  CLI::App* leaf =
      app.add_subcommand("leaf", "leaf data per seed plus the deterministic "
                                 "leaf");
  CLI::App* converge = app.add_subcommand(
      "converge", "reference-vs-expansion error versus epsilon, slope fit");
  CLI::App* mc = app.add_subcommand(
      "mc", "per-xi statistics of the noise-linear correction");
  CLI::App* gap =
      app.add_subcommand("gap", "dichotomy gap-condition report");
  CLI::App* membership = app.add_subcommand(
      "membership", "decay test for leaf points and control points");
  for (CLI::App* sub : {leaf, converge, mc, gap, membership})
    sub->fallthrough();
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(leaf)) return foliation::cmd_leaf(config);
    if (app.got_subcommand(converge)) return foliation::cmd_converge(config);
    if (app.got_subcommand(mc)) return foliation::cmd_mc(config);
    if (app.got_subcommand(gap)) return foliation::cmd_gap(config);
    if (app.got_subcommand(membership))
      return foliation::cmd_membership(config);
  } catch (const foliation::ConvergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const foliation::BlowUpError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const foliation::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
