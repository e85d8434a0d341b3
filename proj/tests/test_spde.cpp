#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rough/spde.hpp"

using namespace rough;

namespace {

const CorrelationModel& the_model() {
  static CorrelationModel model{AlphaParam(1.5)};
  return model;
}

double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / v.size();
}

}  // namespace

TEST_CASE("sigma kinds evaluate and report their bounds") {
  SigmaSpec c = SigmaSpec::constant(0.7);
  CHECK(c(123.0) == 0.7);
  CHECK(c.bound() == doctest::Approx(0.7));
  CHECK(c.lipschitz() == 0.0);

  SigmaSpec clip = SigmaSpec::clipped_identity(2.0);
  CHECK(clip(0.5) == 0.5);
  CHECK(clip(5.0) == 2.0);
  CHECK(clip(-5.0) == -2.0);
  CHECK(clip.bound() == 2.0);

  SigmaSpec th = SigmaSpec::scaled_tanh(1.5);
  CHECK(th(0.0) == 0.0);
  CHECK(std::abs(th(100.0) - 1.5) < 1e-12);
  CHECK(th(0.01) == doctest::Approx(0.01).epsilon(1e-4));
  CHECK(th.bound() == 1.5);

  SigmaSpec id = SigmaSpec::identity();
  CHECK(id(-3.25) == -3.25);
  CHECK_FALSE(id.bounded());
  CHECK_THROWS_AS(id.bound(), std::domain_error);

  CHECK_THROWS_AS(SigmaSpec::clipped_identity(0.0), std::invalid_argument);
}

TEST_CASE("sigma parsing round-trips the CLI forms") {
  CHECK(SigmaSpec::parse("const:1.5").kind == SigmaKind::kConstant);
  CHECK(SigmaSpec::parse("const:1.5").param == doctest::Approx(1.5));
  CHECK(SigmaSpec::parse("clip:2").kind == SigmaKind::kClippedIdentity);
  CHECK(SigmaSpec::parse("tanh:0.5").kind == SigmaKind::kScaledTanh);
  CHECK(SigmaSpec::parse("id").kind == SigmaKind::kIdentity);
  CHECK_THROWS_AS(SigmaSpec::parse("bogus:1"), std::invalid_argument);
  CHECK_THROWS_AS(SigmaSpec::parse("clip:zebra"), std::invalid_argument);
  CHECK_THROWS_AS(SigmaSpec::parse(""), std::invalid_argument);
}

TEST_CASE("solver config validation and stability advisory") {
  SolverConfig cfg;
  cfg.lattice = LatticeSpec(16);
  cfg.dt = 1e-3;
  cfg.t_end = 0.1;
  cfg.validate();
  CHECK(cfg.dt_within_stability_guard());
  cfg.dt = 1e-2;
  CHECK_FALSE(cfg.dt_within_stability_guard());
  cfg.dt = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.dt = 1e-3;
  cfg.snapshot_times = {0.2};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.snapshot_times = {0.0, 0.05, 0.1};
  cfg.validate();
  CHECK(cfg.steps() == 100);
}

TEST_CASE("noise increments are deterministic, centered, and independent") {
  SolverConfig cfg;
  cfg.lattice = LatticeSpec(8);
  cfg.dt = 1e-3;
  cfg.t_end = 0.01;
  SpdeSolver solver(the_model(), cfg);

  FieldSample a = solver.noise_increment(3, 0);
  FieldSample b = solver.noise_increment(3, 0);
  FieldSample c = solver.noise_increment(3, 1);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);

  const int reps = 4000;
  double sum = 0.0, sum_sq = 0.0, cross = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    FieldSample x = solver.noise_increment(11, 2 * rep);
    FieldSample y = solver.noise_increment(11, 2 * rep + 1);
    sum += x.values[0];
    sum_sq += x.values[0] * x.values[0];
    cross += x.values[0] * y.values[0];
  }
  double var = solver.noise_site_variance();
  CHECK(std::abs(sum / reps) <= 3.0 * std::sqrt(var / reps));
  // Var of a squared Gaussian is 2 var^2
  CHECK(std::abs(sum_sq / reps - var) <= 3.0 * var * std::sqrt(2.0 / reps));
  // independence across step indices
  CHECK(std::abs(cross / reps) <= 3.0 * var / std::sqrt(reps));
}

TEST_CASE("noise covariance matches its discrete spectral target") {
  SolverConfig cfg;
  cfg.lattice = LatticeSpec(8);
  cfg.dt = 1e-3;
  cfg.t_end = 0.01;
  SpdeSolver solver(the_model(), cfg);
  CHECK(solver.noise_covariance_lag(0, 0, 0) ==
        doctest::Approx(solver.noise_site_variance()).epsilon(1e-10));

  const int n = 8;
  const int reps = 3000;
  const std::array<std::array<int, 3>, 2> lags = {{{1, 0, 0}, {2, 1, 0}}};
  std::array<double, 2> acc{}, acc_sq{};
  for (int rep = 0; rep < reps; ++rep) {
    FieldSample f = solver.noise_increment(7, static_cast<std::uint64_t>(rep));
    for (std::size_t q = 0; q < lags.size(); ++q) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) {
            s += f.at(i, j, k) * f.at((i + lags[q][0]) % n,
                                      (j + lags[q][1]) % n,
                                      (k + lags[q][2]) % n);
          }
        }
      }
      s /= n * n * n;
      acc[q] += s;
      acc_sq[q] += s * s;
    }
  }
  for (std::size_t q = 0; q < lags.size(); ++q) {
    double mean = acc[q] / reps;
    double sd = std::sqrt(std::max(acc_sq[q] / reps - mean * mean, 0.0));
    double exact = solver.noise_covariance_lag(lags[q][0], lags[q][1], lags[q][2]);
    CHECK(std::abs(mean - exact) <= 3.0 * sd / std::sqrt(reps) + 1e-12);
  }
  CHECK(solver.truncation_fraction() > 0.0);
  CHECK(solver.truncation_fraction() < 1.0);
}

TEST_CASE("zero sigma keeps the flat initial state exactly") {
  SolverConfig cfg;
  cfg.lattice = LatticeSpec(16);
  cfg.dt = 1e-3;
  cfg.t_end = 0.05;
  cfg.sigma = SigmaSpec::constant(0.0);
  cfg.seed = 5;
  SpdeSolver solver(the_model(), cfg);
  Trajectory traj = solver.run(0);
  REQUIRE(traj.snapshots.size() == 1);
  for (double v : traj.snapshots.back().u) CHECK(v == 1.0);
}

TEST_CASE("unit sigma coupled run reproduces the linearized field bitwise") {
  SolverConfig cfg;
  cfg.lattice = LatticeSpec(16);
  cfg.dt = 1e-3;
  cfg.t_end = 0.05;
  cfg.sigma = SigmaSpec::constant(1.0);
  cfg.coupled = true;
  cfg.seed = 5;
  cfg.snapshot_times = {0.0, 0.025, 0.05};
  SpdeSolver solver(the_model(), cfg);
  Trajectory traj = solver.run(3);
  REQUIRE(traj.snapshots.size() == 3);
  for (const auto& snap : traj.snapshots) {
    CHECK(snap.u == snap.z);
  }
}

TEST_CASE("trajectories are reproducible and replicas differ") {
  SolverConfig cfg;
  cfg.lattice = LatticeSpec(8);
  cfg.dt = 1e-3;
  cfg.t_end = 0.02;
  cfg.sigma = SigmaSpec::clipped_identity(2.0);
  cfg.seed = 21;
  SpdeSolver solver(the_model(), cfg);
  Trajectory t1 = solver.run(0);
  Trajectory t2 = solver.run(0);
  Trajectory t3 = solver.run(1);
  CHECK(t1.snapshots.back().u == t2.snapshots.back().u);
  CHECK(t1.snapshots.back().u != t3.snapshots.back().u);
  CHECK(t1.noise_key == t2.noise_key);
  CHECK(t1.noise_key != t3.noise_key);
}

TEST_CASE("zero-step run returns the initial condition") {
  SolverConfig cfg;
  cfg.lattice = LatticeSpec(8);
  cfg.dt = 1e-3;
  cfg.t_end = 0.0;
  SpdeSolver solver(the_model(), cfg);
  Trajectory traj = solver.run(0);
  REQUIRE(traj.snapshots.size() == 1);
  CHECK(traj.snapshots.back().step == 0);
  for (double v : traj.snapshots.back().u) CHECK(v == 1.0);
}

TEST_CASE("solution mean stays at one for every sigma kind") {
  for (const char* text : {"clip:2", "tanh:1", "const:0.5"}) {
    SolverConfig cfg;
    cfg.lattice = LatticeSpec(16);
    cfg.dt = 1e-3;
    cfg.t_end = 0.05;
    cfg.sigma = SigmaSpec::parse(text);
    cfg.seed = 77;
    SpdeSolver solver(the_model(), cfg);
    const int reps = 120;
    double acc = 0.0, acc_sq = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
      Trajectory traj = solver.run(static_cast<std::uint64_t>(rep));
      double m = mean_of(traj.snapshots.back().u);
      acc += m;
      acc_sq += m * m;
    }
    double mean = acc / reps;
    double sd = std::sqrt(std::max(acc_sq / reps - mean * mean, 0.0));
    INFO("sigma = ", text);
    CHECK(std::abs(mean - 1.0) <= 3.0 * sd / std::sqrt(reps) + 1e-9);
  }
}

TEST_CASE("bounded sigma keeps the second moment near linear growth") {
  SolverConfig cfg;
  cfg.lattice = LatticeSpec(16);
  cfg.dt = 1e-3;
  cfg.sigma = SigmaSpec::clipped_identity(2.0);
  cfg.seed = 31;
  cfg.t_end = 0.2;
  cfg.snapshot_times = {0.05, 0.1, 0.2};
  SpdeSolver solver(the_model(), cfg);
  const int reps = 100;
  std::vector<double> second(3, 0.0);
  for (int rep = 0; rep < reps; ++rep) {
    Trajectory traj = solver.run(static_cast<std::uint64_t>(rep));
    for (std::size_t q = 0; q < 3; ++q) {
      double acc = 0.0;
      for (double v : traj.snapshots[q].u) acc += v * v;
      second[q] += acc / traj.snapshots[q].u.size();
    }
  }
  for (auto& v : second) v /= reps;
  CHECK(second[0] < second[1]);
  CHECK(second[1] < second[2]);
  // excess second moment roughly proportional to t: ratios within a loose
  // band (exact linearity is only an upper bound)
  double rate1 = (second[1] - 1.0) / 0.1;
  double rate0 = (second[0] - 1.0) / 0.05;
  CHECK(rate1 / rate0 < 4.0);
  CHECK(rate0 / rate1 < 4.0);
}

TEST_CASE("linearization residual vanishes exactly for unit sigma") {
  SolverConfig cfg;
  cfg.lattice = LatticeSpec(16);
  cfg.dt = 1e-3;
  cfg.t_end = 0.02;
  cfg.sigma = SigmaSpec::constant(1.0);
  cfg.seed = 13;
  ResidualTable table = linearization_residual(
      the_model(), cfg, {{1, 0, 0}, {4, 0, 0}}, 5);
  REQUIRE(table.rows.size() == 2);
  for (const auto& row : table.rows) {
    CHECK(row.residual_sq == 0.0);
    CHECK(row.grad_u_sq > 0.0);
    CHECK(row.ratio == 0.0);
  }
  CHECK_THROWS_AS(
      linearization_residual(the_model(), cfg, {{0, 0, 0}}, 5),
      std::invalid_argument);
}

TEST_CASE("residuals are subdominant for a bounded nonlinearity") {
  SolverConfig cfg;
  cfg.lattice = LatticeSpec(16);
  // keep kappa_max^2 * dt below one: the exponential factor otherwise starves
  // the near-Nyquist modes of variance and the small-shift increments with it
  cfg.dt = 2.5e-4;
  cfg.t_end = 0.02;
  cfg.sigma = SigmaSpec::scaled_tanh(1.0);
  cfg.seed = 4;
  ResidualTable table = linearization_residual(
      the_model(), cfg, {{1, 0, 0}, {2, 0, 0}, {4, 0, 0}, {8, 0, 0}}, 60);
  REQUIRE(table.rows.size() == 4);
  const double alpha = the_model().alpha();
  std::vector<double> laws;
  for (const auto& row : table.rows) {
    CHECK(row.ratio < 1.0);  // residual below the raw increment
    CHECK(row.residual_sq >= 0.0);
    laws.push_back(row.grad_u_sq *
                   std::pow(std::log(1.0 / row.eps_norm), alpha - 1.0));
  }
  // increment law band across the tested shifts
  double lo = *std::min_element(laws.begin(), laws.end());
  double hi = *std::max_element(laws.begin(), laws.end());
  CHECK(hi / lo < 4.0);
}
