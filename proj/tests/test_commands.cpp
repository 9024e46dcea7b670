#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "foliation/commands.hpp"
#include "foliation/errors.hpp"
#include "foliation/run_config.hpp"

using namespace foliation;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load_manifest(const std::string& dir) {
  std::ifstream in(dir + "/manifest.json");
  REQUIRE(in.good());
  return json::parse(in);
}

std::vector<std::vector<double>> read_csv_rows(const std::string& path,
                                               std::vector<std::string>* header
                                               = nullptr) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  REQUIRE(std::getline(in, line));
  if (header) {
    header->clear();
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header->push_back(cell);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

RunConfig small_leaf_config(const std::string& out) {
  RunConfig c;
  c.xi_grid = "-0.6:0.6:0.6";
  c.epsilon = "0.1";
  c.seeds = 2;
  c.dt = 0.01;
  c.t_max = 5.0;
  c.t_min = -14.0;
  c.out = out;
  return c;
}

}  // namespace

TEST_CASE("gap exit code tracks the tuple verdict") {
  RunConfig ok;
  ok.gap_alpha = 1.0;
  ok.gap_beta = -1.0;
  ok.gap_LF = 0.4;
  ok.gap_eta = 0.0;
  CHECK(cmd_gap(ok) == 0);

  ok.gap_LF = 0.6;
  CHECK(cmd_gap(ok) == 1);
}

TEST_CASE("gap flags the default planar model as out of range") {
  RunConfig c;
  c.gap_eta = 0.0;
  CHECK(cmd_gap(c) == 1);
}

TEST_CASE("leaf writes tables and a manifest") {
  const std::string out = "cmd_out/leaf_a";
  RunConfig c = small_leaf_config(out);
  CHECK(cmd_leaf(c) == 0);

  auto det = read_csv_rows(out + "/leaf_deterministic.csv");
  REQUIRE(det.size() == 3);
  REQUIRE(det[0].size() == 4);  // xi_1, l_d_1, leaf_pred_1, leaf_pred_2
  CHECK(det[0][0] == -0.6);
  CHECK(det[1][0] == 0.0);
  CHECK(det[2][0] == 0.6);
  // The unstable leaf coordinate approximates -x^2/3 through the origin.
  CHECK(std::abs(det[2][1] + 0.6 * 0.6 / 3.0) < 1e-4);
  CHECK(std::abs(det[1][1]) < 1e-12);
  for (const auto& row : det) {
    CHECK(row[2] == row[0]);
    CHECK(row[3] == row[1]);
  }

  auto seed1 = read_csv_rows(out + "/leaf_seed1.csv");
  REQUIRE(seed1.size() == 3);
  REQUIRE(seed1[0].size() == 5);  // xi, l_d, l_1, pred_1, pred_2
  for (const auto& row : seed1) {
    CHECK(row[3] == row[0]);
    CHECK(row[4] == row[1] + 0.1 * row[2]);
  }
  // The noise-linear correction vanishes where the quadratic source does.
  CHECK(std::abs(seed1[1][2]) < 1e-12);

  const json m = load_manifest(out);
  CHECK(m["library_version"] == "0.1.0");
  CHECK(m["command"] == "leaf");
  CHECK(m["dt"] == 0.01);
  CHECK(m["out"] == out);
  CHECK(m["derived"]["dimension"] == 2);
  CHECK(m["derived"]["xi_count"] == 3);
  CHECK(m["derived"]["runs"].size() == 2);
  CHECK(m["derived"]["gap"]["satisfied"] == false);
  for (const auto& run : m["derived"]["runs"])
    CHECK(run["converged"] == true);

  // Same config, fresh directory: bitwise identical sample table.
  const std::string out2 = "cmd_out/leaf_b";
  RunConfig c2 = small_leaf_config(out2);
  CHECK(cmd_leaf(c2) == 0);
  CHECK(slurp(out + "/leaf_seed1.csv") == slurp(out2 + "/leaf_seed1.csv"));
  CHECK(slurp(out + "/leaf_deterministic.csv") ==
        slurp(out2 + "/leaf_deterministic.csv"));
}

TEST_CASE("leaf needs exactly one epsilon") {
  RunConfig c = small_leaf_config("cmd_out/leaf_eps");
  c.epsilon = "0.1, 0.2";
  CHECK_THROWS_AS(cmd_leaf(c), ConfigError);
}

TEST_CASE("leaf surfaces the iteration cap in its exit code") {
  const std::string out = "cmd_out/leaf_cap";
  RunConfig c = small_leaf_config(out);
  c.seeds = 1;
  c.max_iterations = 1;
  CHECK(cmd_leaf(c) == 2);
  CHECK(slurp(out + "/leaf_seed1.csv").rfind("xi_1", 0) == 0);
  const json m = load_manifest(out);
  CHECK(m["derived"]["runs"][0]["converged"] == false);
}

TEST_CASE("spectral model goes through the same pipeline") {
  const std::string out = "cmd_out/leaf_spectral";
  RunConfig c;
  c.model = "example2";
  c.modes = 4;
  c.xi_grid = "0.05";
  c.epsilon = "0.05";
  c.seeds = 1;
  c.dt = 0.01;
  c.t_max = 3.0;
  c.t_min = -14.0;
  c.out = out;
  CHECK(cmd_leaf(c) == 0);

  std::vector<std::string> header;
  auto rows = read_csv_rows(out + "/leaf_seed1.csv", &header);
  REQUIRE(rows.size() == 1);
  // 3 stable params + 1 unstable l_d + 1 unstable l_1 + 4 predicted coords.
  CHECK(header.size() == 9);
  CHECK(header.front() == "xi_1");

  const json m = load_manifest(out);
  CHECK(m["derived"]["dimension"] == 4);
  CHECK(m["derived"]["gap"]["satisfied"] == true);
}

TEST_CASE("mc rejects thin ensembles") {
  RunConfig c;
  c.seeds = 50;
  c.xi_grid = "0.5";
  c.out = "cmd_out/mc_thin";
  CHECK_THROWS_AS(cmd_mc(c), ConfigError);
}

TEST_CASE("mc statistics land in the expected band") {
  const std::string out = "cmd_out/mc";
  RunConfig c;
  c.xi_grid = "0.5";
  c.epsilon = "0.05";
  c.seeds = 100;
  c.dt = 0.01;
  c.t_max = 5.0;
  c.t_min = -14.0;
  c.out = out;
  CHECK(cmd_mc(c) == 0);

  std::vector<std::string> header;
  auto rows = read_csv_rows(out + "/mc.csv", &header);
  REQUIRE(rows.size() == 1);
  REQUIRE(header.size() == 5);
  CHECK(header[3] == "g_mean");
  CHECK(header[4] == "g_var");

  // g = l1 / (-xi^2/3) estimates a zero-mean statistic with variance 2/3.
  const double g_mean = rows[0][3];
  const double g_var = rows[0][4];
  CHECK(std::abs(g_mean) < 0.3);
  CHECK(g_var > 0.3);
  CHECK(g_var < 1.1);

  const json m = load_manifest(out);
  CHECK(m["derived"]["seeds_dropped"] == 0);
  CHECK(m["derived"]["statistics"].size() == 1);
  CHECK(m["derived"]["statistics"][0]["g_var"].is_number());
}

TEST_CASE("membership separates leaf points from controls") {
  const std::string out = "cmd_out/membership";
  RunConfig c;
  c.xi_grid = "0.5";
  c.epsilon = "0.05";
  c.seeds = 2;
  c.dt = 0.01;
  c.t_max = 5.0;
  c.t_min = -14.0;
  c.membership_horizon = 3.0;
  c.out = out;
  CHECK(cmd_membership(c) == 0);

  const json m = load_manifest(out);
  CHECK(m["derived"]["leaf_points"] == 2);
  CHECK(m["derived"]["leaf_decaying"] == 2);
  CHECK(m["derived"]["control_points"] == 2);
  CHECK(m["derived"]["control_decaying"] == 0);

  std::vector<std::string> header;
  auto rows = read_csv_rows(out + "/membership.csv", &header);
  CHECK(rows.size() == 4);
  CHECK(header.back() == "stayed_in_core");

  auto curves = read_csv_rows(out + "/membership_curves.csv", &header);
  CHECK(curves.size() >= 4 * 2);  // several samples per outcome
  CHECK(header == std::vector<std::string>{"point_index", "seed", "is_control",
                                           "t", "weighted_norm"});
}

TEST_CASE("converge fits the quadratic error decay") {
  const std::string out = "cmd_out/converge";
  RunConfig c;
  c.xi_grid = "0.5";
  c.epsilon = "0.05, 0.1, 0.2";
  c.seeds = 5;
  c.dt = 0.01;
  c.t_max = 5.0;
  c.t_min = -14.0;
  c.out = out;
  CHECK(cmd_converge(c) == 0);

  const json m = load_manifest(out);
  const double slope = m["derived"]["slope"];
  CHECK(slope > 1.5);
  CHECK(slope < 2.5);
  CHECK(double(m["derived"]["ci_low"]) <= slope);
  CHECK(double(m["derived"]["ci_high"]) >= slope);
  CHECK(m["derived"]["excluded_samples"] == 0);

  const auto mean_errors = m["derived"]["mean_errors"];
  REQUIRE(mean_errors.size() == 3);
  CHECK(double(mean_errors[0]) < double(mean_errors[2]));
  CHECK(double(mean_errors[0]) > 0.0);

  auto rows = read_csv_rows(out + "/converge.csv");
  REQUIRE(rows.size() == 15);  // 3 epsilons x 5 seeds
  for (const auto& row : rows) CHECK(row[3] == 1.0);
}

TEST_CASE("converge validates its inputs") {
  RunConfig c;
  c.xi_grid = "0.5";
  c.out = "cmd_out/converge_bad";
  c.epsilon = "0.1, 0.2";
  CHECK_THROWS_AS(cmd_converge(c), ConfigError);
  c.epsilon = "0, 0.1, 0.2";
  CHECK_THROWS_AS(cmd_converge(c), ConfigError);
  c.epsilon = "0.05, 0.1, 0.2";
  c.seeds = 3;
  CHECK_THROWS_AS(cmd_converge(c), ConfigError);
}
