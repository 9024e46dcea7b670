// Acceptance gate: one line per criterion, exit code = number of failures.
// Tolerances and budgets are pinned here on purpose; loosening them is a
// library regression, not a test tweak.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "foliation/builtin_models.hpp"
#include "foliation/dichotomy.hpp"
#include "foliation/expansion.hpp"
#include "foliation/grid.hpp"
#include "foliation/leaf_solver.hpp"
#include "foliation/model.hpp"
#include "foliation/noise.hpp"
#include "foliation/vec.hpp"

using namespace foliation;

namespace {

int failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(const char* id, bool pass, const std::string& detail,
            double seconds, double budget) {
  const bool in_budget = budget <= 0.0 || seconds < budget;
  const bool ok = pass && in_budget;
  if (!ok) ++failures;
  std::string timing;
  char buf[96];
  if (budget > 0.0)
    std::snprintf(buf, sizeof(buf), "%.1f s of %.0f s", seconds, budget);
  else
    std::snprintf(buf, sizeof(buf), "%.1f s", seconds);
  std::printf("[%s] %s - %s (%s)%s\n", ok ? "PASS" : "FAIL", id,
              detail.c_str(), buf,
              pass || in_budget ? "" : " [over budget]");
  std::fflush(stdout);
}

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b);
  return std::string(buf);
}

double sample_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
  const double m = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double xm = sample_mean(x), ym = sample_mean(y);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - xm) * (y[i] - ym);
    den += (x[i] - xm) * (x[i] - xm);
  }
  return num / den;
}

// --- A1: deterministic leaf of the planar model against -x^2/3 ------------

void criterion_a1() {
  Timer timer;
  ModelSpec m = example1_model();
  TimeGrid grid = TimeGrid::from_horizon(20.0, 1e-3);
  double worst = 0.0;
  bool converged = true;
  for (double x : {-1.0, -0.5, 0.25, 0.7, 1.0}) {
    LdResult r = compute_l_d(m, Vec{x, 0.0}, zeros(2), grid);
    converged = converged && r.info.converged;
    worst = std::max(worst, std::abs(r.value[1] + x * x / 3.0));
  }
  report("A1", converged && worst <= 1e-6,
         fmt("deterministic planar leaf matches -x^2/3, max err %.2e", worst),
         timer.seconds(), 10.0);
}

// --- A2: noise-linear correction against the closed form ------------------

void criterion_a2() {
  Timer timer;
  ModelSpec m = example1_model();
  const double dt = 1e-3;
  const double horizon = 20.0;
  TimeGrid grid = TimeGrid::from_horizon(horizon, dt);
  const double x = 0.7;
  const double q = x * x / 3.0;

  Trajectory phi_d = solve_phi_d(m, zeros(2), grid);
  LdResult ld = compute_l_d(m, Vec{x, 0.0}, zeros(2), grid);

  double worst = 0.0;
  bool converged = ld.info.converged;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    BrownianPath path = generate_brownian_path(seed, -20.0, horizon, dt);
    OUProcess ou = ou_stationary(path);
    Trajectory phi_1 = solve_phi_1(m, phi_d, ou, grid);
    L1Result l1 = compute_l_1(m, phi_d, ld.psi_d, phi_1, ou, grid);
    converged = converged && l1.info.converged;

    const double g =
        ou.z0 + ito_integral(
                    path, [](double t) { return std::exp(-3.0 * t); }, 0.0,
                    horizon);
    worst = std::max(worst, std::abs(l1.value[1] + q * g));
  }
  report("A2", converged && worst <= 0.01,
         fmt("noise-linear leaf term matches -x^2/3 (Z + I3) over 20 paths, "
             "max err %.2e",
             worst),
         timer.seconds(), 60.0);
}

// --- A3: order of accuracy against the integral-operator reference --------

void criterion_a3() {
  Timer timer;
  ModelSpec m = example1_model();
  const double dt = 5e-3;
  TimeGrid grid = TimeGrid::from_horizon(15.0, dt);
  const std::vector<Vec> xis{Vec{0.4, 0.0}, Vec{0.8, 0.0}};
  const std::vector<double> epsilons{0.02, 0.04, 0.08, 0.16};

  Trajectory phi_d = solve_phi_d(m, zeros(2), grid);
  std::vector<LdResult> ld;
  bool converged = true;
  for (const Vec& xi : xis) {
    ld.push_back(compute_l_d(m, xi, zeros(2), grid));
    converged = converged && ld.back().info.converged;
  }

  std::vector<double> slopes1, slopes0;
  for (std::uint64_t seed = 101; seed <= 110; ++seed) {
    BrownianPath path = generate_brownian_path(seed, -14.0, 15.0, dt);
    OUProcess ou = ou_stationary(path);
    Trajectory phi_1 = solve_phi_1(m, phi_d, ou, grid);

    std::vector<Vec> l1;
    for (std::size_t i = 0; i < xis.size(); ++i) {
      L1Result r = compute_l_1(m, phi_d, ld[i].psi_d, phi_1, ou, grid);
      converged = converged && r.info.converged;
      l1.push_back(r.value);
    }

    std::vector<double> le, e1, e0;
    for (double eps : epsilons) {
      double worst1 = 0.0, worst0 = 0.0;
      for (std::size_t i = 0; i < xis.size(); ++i) {
        FixedPointReport oracle =
            lyapunov_perron_leaf(m, xis[i], zeros(2), eps, ou, grid);
        converged = converged && oracle.converged;
        Vec pred0 = add(xis[i], ld[i].value);
        Vec pred1 = pred0;
        axpy(pred1, eps, l1[i]);
        worst0 = std::max(worst0, max_abs_diff(oracle.leaf_point, pred0));
        worst1 = std::max(worst1, max_abs_diff(oracle.leaf_point, pred1));
      }
      le.push_back(std::log(eps));
      e1.push_back(std::log(worst1));
      e0.push_back(std::log(worst0));
    }
    slopes1.push_back(fit_slope(le, e1));
    slopes0.push_back(fit_slope(le, e0));
  }

  const double slope1 = sample_mean(slopes1);
  const double slope0 = sample_mean(slopes0);
  const bool pass = converged && slope1 >= 1.8 && slope1 <= 2.2 &&
                    slope0 >= 0.8 && slope0 <= 1.2;
  report("A3", pass,
         fmt("residual orders vs integral-operator reference: first order "
             "%.3f in [1.8,2.2], zeroth %.3f in [0.8,1.2]",
             slope1, slope0),
         timer.seconds(), 300.0);
}

// --- A4: stationary noise functionals hit their exact moments -------------

void criterion_a4() {
  Timer timer;
  const std::size_t n = 10000;

  // (a) Var Z = 1/2, sampled from the stationary functional alone.
  std::vector<double> z_samples;
  z_samples.reserve(n);
  {
    const double dt = 1e-3;
    for (std::size_t k = 0; k < n; ++k) {
      BrownianPath path =
          generate_brownian_path(1000 + k, -14.0, dt, dt);
      z_samples.push_back(ou_stationary(path).z0);
    }
  }
  const double z_mean = sample_mean(z_samples);
  const double z_var = sample_variance(z_samples);
  const bool a_ok = std::abs(z_mean) <= 0.022 && std::abs(z_var - 0.5) <= 0.022;

  // (b) Var of the decaying forward integral: 1/6.
  std::vector<double> i_samples;
  i_samples.reserve(n);
  {
    const double dt = 1e-3;
    for (std::size_t k = 0; k < n; ++k) {
      BrownianPath path =
          generate_brownian_path(50000 + k, -dt, 6.0, dt);
      i_samples.push_back(ito_integral(
          path, [](double t) { return std::exp(-3.0 * t); }, 0.0, 6.0));
    }
  }
  const double i_mean = sample_mean(i_samples);
  const double i_var = sample_variance(i_samples);
  const bool b_ok =
      std::abs(i_mean) <= 0.013 && std::abs(i_var - 1.0 / 6.0) <= 0.008;

  // (c) Var of the normalized first-order leaf coefficient through the full
  // pipeline: g = l1 / (-x^2/3) sums the two functionals, so Var g = 2/3.
  std::vector<double> g_samples;
  g_samples.reserve(n);
  bool c_converged = true;
  {
    ModelSpec m = example1_model();
    const double dt = 1e-2;
    TimeGrid grid = TimeGrid::from_horizon(5.0, dt);
    const double x = 0.7;
    const double denom = -x * x / 3.0;
    Trajectory phi_d = solve_phi_d(m, zeros(2), grid);
    LdResult ld = compute_l_d(m, Vec{x, 0.0}, zeros(2), grid);
    c_converged = ld.info.converged;
    for (std::size_t k = 0; k < n; ++k) {
      BrownianPath path =
          generate_brownian_path(200000 + k, -14.0, 5.0, dt);
      OUProcess ou = ou_stationary(path);
      Trajectory phi_1 = solve_phi_1(m, phi_d, ou, grid);
      L1Result l1 = compute_l_1(m, phi_d, ld.psi_d, phi_1, ou, grid);
      c_converged = c_converged && l1.info.converged;
      g_samples.push_back(l1.value[1] / denom);
    }
  }
  const double g_mean = sample_mean(g_samples);
  const double g_var = sample_variance(g_samples);
  const bool c_ok = c_converged && std::abs(g_mean) <= 0.026 &&
                    std::abs(g_var - 2.0 / 3.0) <= 0.031;

  report("A4", a_ok && b_ok && c_ok,
         fmt("noise moments: Var Z %.4f (target 0.5), Var I3 %.4f (1/6)",
             z_var, i_var) +
             fmt(", pipeline Var g %.4f (2/3)", g_var),
         timer.seconds(), 60.0);
}

// --- A5: predicted points pass the flow test, displaced points fail -------

void criterion_a5() {
  Timer timer;
  ModelSpec m = example1_model();
  const double dt = 5e-3;
  TimeGrid solve_grid = TimeGrid::from_horizon(10.0, dt);
  TimeGrid flow_grid = TimeGrid::from_horizon(5.0, dt);
  const double eps = 0.05;
  const std::vector<double> xs{0.2, 0.4, 0.6, 0.8, 1.0};

  Trajectory phi_d = solve_phi_d(m, zeros(2), solve_grid);
  std::vector<LdResult> ld;
  bool converged = true;
  for (double x : xs) {
    ld.push_back(compute_l_d(m, Vec{x, 0.0}, zeros(2), solve_grid));
    converged = converged && ld.back().info.converged;
  }

  std::size_t leaf_total = 0, leaf_decaying = 0;
  std::size_t control_total = 0, control_growing = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    BrownianPath path = generate_brownian_path(seed, -14.0, 10.0, dt);
    OUProcess ou = ou_stationary(path);
    Trajectory phi_1 = solve_phi_1(m, phi_d, ou, solve_grid);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      L1Result l1 =
          compute_l_1(m, phi_d, ld[i].psi_d, phi_1, ou, solve_grid);
      converged = converged && l1.info.converged;

      Vec point = add(Vec{xs[i], 0.0}, ld[i].value);
      axpy(point, eps, l1.value);
      MembershipReport on =
          verify_leaf_membership(m, point, zeros(2), eps, ou, flow_grid);
      ++leaf_total;
      if (on.decaying) ++leaf_decaying;

      Vec off = point;
      off[1] += 0.5;
      MembershipReport ctrl =
          verify_leaf_membership(m, off, zeros(2), eps, ou, flow_grid);
      ++control_total;
      if (!ctrl.decaying) ++control_growing;
    }
  }

  const bool pass = converged &&
                    leaf_decaying * 100 >= leaf_total * 95 &&
                    control_growing == control_total;
  report("A5", pass,
         fmt("flow test: %.0f/100 predicted points decay, ",
             static_cast<double>(leaf_decaying)) +
             fmt("%.0f/100 displaced controls grow",
                 static_cast<double>(control_growing)),
         timer.seconds(), 120.0);
}

// --- A6: gap arithmetic against an independent extended-precision route ----

void criterion_a6() {
  Timer timer;
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> uk(1.0, 3.0), ul(0.0, 2.0),
      ub(-5.0, -0.1), ua(0.1, 5.0), uu(0.1, 0.9);
  double worst = 0.0;
  bool ok = true;
  for (int trial = 0; trial < 20; ++trial) {
    const double K = uk(rng);
    const double LF = ul(rng);
    const double beta = ub(rng);
    const double alpha = ua(rng);
    const double eta = beta + uu(rng) * (alpha - beta);

    const double got = gap_value(K, LF, alpha, beta, eta);
    const long double ref = static_cast<long double>(K) *
                            static_cast<long double>(LF) *
                            (1.0L / (static_cast<long double>(eta) - beta) +
                             1.0L / (static_cast<long double>(alpha) - eta));
    const double rel = std::abs(static_cast<double>(
                           (static_cast<long double>(got) - ref))) /
                       std::max(1e-300, static_cast<double>(ref));
    worst = std::max(worst, rel);
    ok = ok && rel <= 1e-14;
  }
  report("A6", ok,
         fmt("contraction bound matches extended-precision arithmetic, worst "
             "rel err %.2e",
             worst),
         timer.seconds(), 0.0);
}

// --- A7: spectral truncation is stable under refinement --------------------

void criterion_a7() {
  Timer timer;
  const double dt = 1e-3;
  const double horizon = 10.0;
  TimeGrid grid = TimeGrid::from_horizon(horizon, dt);
  BrownianPath path = generate_brownian_path(11, -14.0, horizon, dt);
  OUProcess ou = ou_stationary(path);

  struct Slot {
    double l_d{};
    double l_1{};
  };
  // Two leaf parameters, embedded identically in both truncations.
  std::vector<std::vector<std::pair<std::size_t, double>>> xi_specs{
      {{1, 0.05}},
      {{1, 0.04}, {2, 0.03}}};

  bool converged = true;
  std::vector<std::vector<Slot>> values;  // [model][xi]
  for (std::size_t modes : {std::size_t{8}, std::size_t{16}}) {
    ModelSpec m = example2_model(modes, 0.1);
    Trajectory phi_d = solve_phi_d(m, zeros(m.dimension), grid);
    Trajectory phi_1 = solve_phi_1(m, phi_d, ou, grid);
    std::vector<Slot> row;
    for (const auto& spec : xi_specs) {
      Vec xi = zeros(m.dimension);
      for (const auto& [idx, v] : spec) xi[idx] = v;
      LdResult ld = compute_l_d(m, xi, zeros(m.dimension), grid, 1e-8);
      L1Result l1 =
          compute_l_1(m, phi_d, ld.psi_d, phi_1, ou, grid, 1e-8);
      converged = converged && ld.info.converged && l1.info.converged;
      row.push_back({ld.value[0], l1.value[0]});
    }
    values.push_back(std::move(row));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < xi_specs.size(); ++i) {
    worst = std::max(worst, std::abs(values[0][i].l_d - values[1][i].l_d));
    worst = std::max(worst, std::abs(values[0][i].l_1 - values[1][i].l_1));
  }
  const bool refine_ok = converged && worst < 1e-4;

  // Leading eigenvalues are exact, and doubling the truncation preserves the
  // shared spectrum bitwise.
  ModelSpec m8 = example2_model(8, 0.1);
  ModelSpec m16 = example2_model(16, 0.1);
  const double pi = std::numbers::pi;
  const double k1 = pi, k2 = 2.0 * pi;
  bool eig_ok = m8.split.eigenvalues[0] == 10.0 - k1 * k1 &&
                m8.split.eigenvalues[1] == 10.0 - k2 * k2;
  for (std::size_t i = 0; i < 8; ++i)
    eig_ok = eig_ok && (m8.split.eigenvalues[i] == m16.split.eigenvalues[i]);

  // Quadrature resolves the cubic of a pure mode exactly.
  const double a = 0.05;
  Vec u = zeros(8);
  u[0] = a;
  const double coeff = m8.F(u)[0];
  const bool cubic_ok = std::abs(coeff + 1.5 * a * a * a) <= 1e-10;

  report("A7", refine_ok && eig_ok && cubic_ok,
         fmt("spectral refinement: leaf values stable to %.2e, ", worst) +
             fmt("cubic mode-1 coefficient err %.2e",
                 std::abs(coeff + 1.5 * a * a * a)),
         timer.seconds(), 300.0);
}

// --- A8: structural invariants sampled at random ---------------------------

void criterion_a8() {
  Timer timer;
  std::mt19937_64 rng(4242);
  std::normal_distribution<double> gauss(0.0, 1.0);
  bool ok = true;
  std::string why;

  auto random_vec = [&](std::size_t d, double radius) {
    Vec v(d);
    for (double& x : v) x = gauss(rng);
    const double r = norm(v);
    std::uniform_real_distribution<double> u(0.0, radius);
    const double target = u(rng);
    if (r > 0.0)
      for (double& x : v) x *= target / r;
    return v;
  };

  // Projection algebra and semigroup composition.
  DichotomySplit split =
      DichotomySplit::from_eigenvalues({-3.0, 1.5, -0.2, 7.0, -1.0});
  for (int t = 0; t < 50 && ok; ++t) {
    Vec v = random_vec(5, 2.0);
    Vec ps = project_stable(split, v);
    Vec pu = project_unstable(split, v);
    if (add(ps, pu) != v || project_stable(split, ps) != ps ||
        norm(project_unstable(split, ps)) != 0.0) {
      ok = false;
      why = "projection algebra";
    }
    Vec one = semigroup_apply(split, 0.4, semigroup_apply(split, 0.8, v));
    Vec two = semigroup_apply(split, 1.2, v);
    if (max_abs_diff(one, two) > 1e-12 * (1.0 + norm(v))) {
      ok = false;
      why = "semigroup composition";
    }
  }

  // Reported derivatives are the derivatives of the reported fields.
  for (ModelSpec m : {example1_model(), example2_model(8, 0.1)}) {
    const double radius = m.name == "example1" ? 5.0 : 0.25;
    const double h = 1e-5;
    for (int t = 0; t < 50 && ok; ++t) {
      Vec u = random_vec(m.dimension, radius);
      Vec dir = random_vec(m.dimension, 1.0);
      Vec up(u), um(u);
      axpy(up, h, dir);
      axpy(um, -h, dir);
      Vec fd = scale(sub(m.F(up), m.F(um)), 1.0 / (2.0 * h));
      Vec exact = m.derivative(u, dir);
      if (max_abs_diff(exact, fd) > 1e-6 * (1.0 + norm(exact))) {
        ok = false;
        why = "derivative consistency for " + m.name;
      }
    }
    // The stored global bound really bounds sampled difference quotients.
    const double reach = m.cutoff_radius ? 3.0 * *m.cutoff_radius : 1.0;
    for (int t = 0; t < 2000 && ok; ++t) {
      Vec u = random_vec(m.dimension, reach);
      Vec v = random_vec(m.dimension, reach);
      const double lhs = norm(sub(m.F(u), m.F(v)));
      const double rhs = m.lipschitz_LF * norm(sub(u, v)) * (1.0 + 1e-9);
      if (lhs > rhs + 1e-300) {
        ok = false;
        why = "Lipschitz bound for " + m.name;
      }
    }
  }

  // One-sided spectra drop the matching term of the contraction bound.
  const double inf = std::numeric_limits<double>::infinity();
  if (gap_value(1.0, 0.5, inf, -1.0, 0.0) != 0.5 ||
      gap_value(1.0, 0.5, 1.0, -inf, 0.0) != 0.5) {
    ok = false;
    why = "one-sided contraction bound";
  }

  report("A8", ok,
         ok ? std::string("structural invariants hold on sampled states")
            : "violated: " + why,
         timer.seconds(), 0.0);
}

}  // namespace

int main() {
  criterion_a1();
  criterion_a2();
  criterion_a3();
  criterion_a4();
  criterion_a5();
  criterion_a6();
  criterion_a7();
  criterion_a8();
  if (failures == 0)
    std::printf("all acceptance criteria hold\n");
  else
    std::printf("%d acceptance criteria failed\n", failures);
  return failures;
}
