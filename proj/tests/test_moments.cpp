#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rough/gaussian_field.hpp"
#include "rough/moments.hpp"
#include "rough/rng.hpp"

using namespace rough;

namespace {

const CorrelationModel& the_model() {
  static CorrelationModel model{AlphaParam(1.5)};
  return model;
}

}  // namespace

TEST_CASE("moment estimator on constant samples is exact") {
  std::vector<double> samples(50, 2.5);
  MomentEstimate est = estimate_moment(samples, 3);
  CHECK(est.log_mean == doctest::Approx(3.0 * std::log(2.5)).epsilon(1e-12));
  CHECK(est.ci_low <= est.log_mean);
  CHECK(est.ci_high >= est.log_mean);
  CHECK(est.replicas == 50);
  CHECK(est.max_weight_share == doctest::Approx(1.0 / 50.0));
  CHECK_FALSE(est.unreliable);
  CHECK_FALSE(est.all_zero);
}

TEST_CASE("moment estimator input validation") {
  CHECK_THROWS_AS(estimate_moment({}, 2), std::invalid_argument);
  CHECK_THROWS_AS(estimate_moment({1.0}, 0), std::invalid_argument);
  CHECK_THROWS_AS(estimate_moment_log({}, 2), std::invalid_argument);
}

TEST_CASE("moment estimator is permutation invariant") {
  CounterRng rng(derive_key(3, "perm-samples"));
  std::vector<double> samples(200);
  for (auto& s : samples) s = std::exp(rng.normal());
  MomentEstimate a = estimate_moment(samples, 2, 11);
  std::reverse(samples.begin(), samples.end());
  MomentEstimate b = estimate_moment(samples, 2, 11);
  CHECK(a.log_mean == doctest::Approx(b.log_mean).epsilon(1e-12));
  CHECK(a.max_weight_share == doctest::Approx(b.max_weight_share));
}

TEST_CASE("fourth moment of a standard normal is three") {
  CounterRng rng(derive_key(17, "gauss-samples"));
  std::vector<double> samples(20000);
  for (auto& s : samples) s = rng.normal();
  MomentEstimate est = estimate_moment(samples, 4, 17);
  CHECK(est.ci_low <= std::log(3.0));
  CHECK(est.ci_high >= std::log(3.0));
  // E|X|^4 has relative sd sqrt(96)/sqrt(n); the point estimate should be
  // within a few of those
  CHECK(std::abs(std::exp(est.log_mean) - 3.0) < 3.0 * 4.0 * std::sqrt(96.0 / 20000.0));
}

TEST_CASE("all-zero samples produce the sentinel, heavy tails get flagged") {
  MomentEstimate zero = estimate_moment(std::vector<double>(10, 0.0), 2);
  CHECK(zero.all_zero);
  CHECK(zero.unreliable);
  CHECK(zero.log_mean == -std::numeric_limits<double>::infinity());

  std::vector<double> heavy(100, 1.0);
  heavy[42] = 1e6;
  MomentEstimate est = estimate_moment(heavy, 2);
  CHECK(est.max_weight_share > 0.99);
  CHECK(est.unreliable);
}

TEST_CASE("feynman-kac first moment is exactly one") {
  FeynmanKacConfig cfg;
  cfg.k = 1;
  cfg.t = 0.05;
  cfg.replicas = 20;
  FeynmanKacResult res = feynman_kac_moment(the_model(), cfg);
  CHECK(res.estimate.log_mean == 0.0);
  CHECK(res.estimate.ci_low == 0.0);
  CHECK(res.estimate.ci_high == 0.0);
  CHECK(res.early_mean_offset == 0.0);
}

TEST_CASE("feynman-kac config validation") {
  FeynmanKacConfig cfg;
  cfg.k = 0;
  CHECK_THROWS_AS(feynman_kac_moment(the_model(), cfg), std::invalid_argument);
  cfg.k = 2;
  cfg.t = -1.0;
  CHECK_THROWS_AS(feynman_kac_moment(the_model(), cfg), std::invalid_argument);
  cfg.t = 0.1;
  cfg.replicas = 0;
  CHECK_THROWS_AS(feynman_kac_moment(the_model(), cfg), std::invalid_argument);
  cfg.replicas = 10;
  cfg.early_cutoff = 1.0;  // above bm_dt
  CHECK_THROWS_AS(feynman_kac_moment(the_model(), cfg), std::invalid_argument);
}

TEST_CASE("feynman-kac second moment matches the variance oracle") {
  // for the multiplicative equation E u(t)^2 = E exp(pair energy); the mean
  // pair energy is the time integral of the heat convolution of the kernel,
  // i.e. Var Z(t); at these horizons the exponential adds only a small
  // convexity excess, so the estimate must sit slightly above 1 + Var Z(t)
  FeynmanKacConfig cfg;
  cfg.k = 2;
  cfg.t = 0.05;
  cfg.bm_dt = 1e-3;
  cfg.replicas = 1200;
  cfg.seed = 21;
  FeynmanKacResult res = feynman_kac_moment(the_model(), cfg);
  const double var = CanonicalMetric(the_model(), cfg.t).variance();
  const double excess = std::expm1(res.estimate.log_mean);
  CHECK(excess > 0.9 * var);
  CHECK(excess < 1.5 * var);
  CHECK(res.early_mean_offset > 0.0);
  CHECK(res.early_mean_offset < var);
  CHECK(res.estimate.max_weight_share < 0.2);

  // determinism
  FeynmanKacResult res2 = feynman_kac_moment(the_model(), cfg);
  CHECK(res.estimate.log_mean == res2.estimate.log_mean);

  // growth in the horizon
  FeynmanKacConfig longer = cfg;
  longer.t = 0.1;
  FeynmanKacResult far = feynman_kac_moment(the_model(), longer);
  CHECK(far.estimate.log_mean > res.estimate.log_mean);
}

TEST_CASE("feynman-kac cap reporting") {
  FeynmanKacConfig cfg;
  cfg.k = 2;
  cfg.t = 0.02;
  cfg.replicas = 50;
  cfg.seed = 5;
  cfg.cap_radius = 0.05;  // absurdly wide cap: early pair separations hit it
  FeynmanKacResult res = feynman_kac_moment(the_model(), cfg);
  CHECK(res.cap_radius == 0.05);
  CHECK(res.cap_hit_fraction > 0.0);

  FeynmanKacConfig tight = cfg;
  tight.cap_radius = 0.0;  // default trusted radius
  FeynmanKacResult res2 = feynman_kac_moment(the_model(), tight);
  CHECK(res2.cap_radius == the_model().trusted_radius());
  CHECK(res2.cap_hit_fraction <= res.cap_hit_fraction);
}

TEST_CASE("lyapunov fit recovers a synthetic slope exactly") {
  std::vector<double> times{0.1, 0.2, 0.3, 0.4};
  std::vector<MomentEstimate> ests(4);
  for (std::size_t i = 0; i < 4; ++i) {
    ests[i].k = 2;
    ests[i].log_mean = 1.7 * times[i] - 0.3;
  }
  LyapunovFit fit = lyapunov_fit(times, ests);
  CHECK(fit.slope == doctest::Approx(1.7).epsilon(1e-10));
  CHECK(fit.intercept == doctest::Approx(-0.3).epsilon(1e-9));
  CHECK(fit.slope_stderr == doctest::Approx(0.0).epsilon(1e-8));
  CHECK_FALSE(fit.nonmonotone);

  std::swap(ests[1].log_mean, ests[2].log_mean);
  LyapunovFit wiggly = lyapunov_fit(times, ests);
  CHECK(wiggly.nonmonotone);

  CHECK_THROWS_AS(lyapunov_fit({0.1, 0.2}, {ests[0], ests[1]}),
                  std::invalid_argument);
  CHECK_THROWS_AS(lyapunov_fit({0.1, 0.2, 0.3}, {ests[0]}),
                  std::invalid_argument);
}

TEST_CASE("higher particle counts grow faster") {
  std::vector<double> times{0.04, 0.08, 0.12};
  std::vector<MomentEstimate> e2, e3;
  for (double t : times) {
    FeynmanKacConfig cfg;
    cfg.t = t;
    cfg.bm_dt = 1e-3;
    cfg.replicas = 500;
    cfg.seed = 9;
    cfg.k = 2;
    e2.push_back(feynman_kac_moment(the_model(), cfg).estimate);
    cfg.k = 3;
    e3.push_back(feynman_kac_moment(the_model(), cfg).estimate);
  }
  LyapunovFit f2 = lyapunov_fit(times, e2);
  LyapunovFit f3 = lyapunov_fit(times, e3);
  CHECK(f2.slope > 0.0);
  // three pairs versus one
  CHECK(f3.slope > f2.slope);
}

TEST_CASE("spatial increment scan: zero lag exact, band bounded") {
  SolverConfig cfg;
  cfg.lattice = LatticeSpec(16);
  cfg.dt = 2.5e-4;
  cfg.t_end = 0.02;
  cfg.sigma = SigmaSpec::scaled_tanh(1.0);
  cfg.seed = 31;
  IncrementTable table = increment_scan(
      the_model(), cfg, IncrementMode::kSpatial,
      {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {4, 0, 0}, {8, 0, 0}}, 40);
  REQUIRE(table.rows.size() == 5);
  CHECK(table.rows[0].lag == 0.0);
  CHECK(table.rows[0].m2 == 0.0);
  CHECK(table.rows[0].m4 == 0.0);
  for (std::size_t i = 2; i < table.rows.size(); ++i)
    CHECK(table.rows[i].m2 > table.rows[i - 1].m2);
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    CHECK(row.law2 > 0.0);
    CHECK(row.law4 > 0.0);
    CHECK(row.m2_se > 0.0);
    // fourth moment dominates the squared second moment pointwise
    CHECK(row.m4 >= row.m2 * row.m2);
  }
  CHECK(table.band2 < 4.0);
  CHECK(table.band2 >= 1.0);

  CHECK_THROWS_AS(
      increment_scan(the_model(), cfg, IncrementMode::kSpatial, {}, 10),
      std::invalid_argument);
  CHECK_THROWS_AS(increment_scan(the_model(), cfg, IncrementMode::kTemporal,
                                 {{1, 0, 0}}, 10),
                  std::invalid_argument);
}

TEST_CASE("temporal increment scan on the mean-removed field") {
  SolverConfig cfg;
  cfg.lattice = LatticeSpec(16);
  cfg.dt = 2.5e-4;
  cfg.t_end = 0.3;
  cfg.sigma = SigmaSpec::scaled_tanh(1.0);
  cfg.seed = 37;
  IncrementTable table =
      increment_scan_temporal(the_model(), cfg, {0, 8, 32, 128, 512}, 25);
  REQUIRE(table.rows.size() == 5);
  CHECK(table.rows[0].m2 == 0.0);
  for (std::size_t i = 2; i < table.rows.size(); ++i)
    CHECK(table.rows[i].m2 > table.rows[i - 1].m2);
  CHECK(table.band2 < 4.0);

  CHECK_THROWS_AS(increment_scan_temporal(the_model(), cfg, {1200}, 5),
                  std::invalid_argument);
  CHECK_THROWS_AS(increment_scan_temporal(the_model(), cfg, {-1}, 5),
                  std::invalid_argument);
}

TEST_CASE("oscillation lattice cardinality") {
  // (2 floor(1/sqrt(delta)) + 1)^3
  CHECK(oscillation_full_count(1.0) == 27);
  CHECK(oscillation_full_count(0.25) == 125);
  CHECK(oscillation_full_count(0.04) == 1331);
  CHECK(oscillation_full_count(1.0 / 64.0) == 4913);
  CHECK_THROWS_AS(oscillation_full_count(0.0), std::invalid_argument);
  CHECK_THROWS_AS(oscillation_full_count(2.0), std::invalid_argument);
}

TEST_CASE("oscillation growth statistics") {
  SolverConfig base;
  base.lattice = LatticeSpec(16);
  base.dt = 2.5e-4;
  base.t_end = 0.05;
  base.sigma = SigmaSpec::scaled_tanh(1.0);
  OscillationScan scan = oscillation_growth(
      the_model(), base, {0.25, 1.0 / 16.0}, 30, 41);
  REQUIRE(scan.rows.size() == 2);
  const double alpha = the_model().alpha();
  for (const auto& row : scan.rows) {
    CHECK(row.rho ==
          doctest::Approx(std::pow(std::abs(std::log(row.delta)),
                                   1.0 - alpha / 2.0)));
    CHECK(row.u_max_mean > 0.0);
    CHECK(row.z_max_mean > 0.0);
    CHECK(row.d_max_mean > 0.0);
    CHECK(row.u_max_se > 0.0);
    CHECK(row.used_count > 0);
    CHECK_FALSE(row.truncated);
  }
  CHECK(scan.rows[0].full_count == 125);
  CHECK(scan.rows[1].full_count == 729);
  CHECK(scan.rows[1].used_count > scan.rows[0].used_count);
  // the residual side sits below the raw increment side: the linearization
  // removes the dominant Gaussian part
  for (const auto& row : scan.rows)
    CHECK(row.d_max_mean < row.u_max_mean);
}

TEST_CASE("oscillation maxima are pathwise monotone in the point budget") {
  SolverConfig base;
  base.lattice = LatticeSpec(16);
  base.dt = 5e-4;
  base.t_end = 0.02;
  base.sigma = SigmaSpec::scaled_tanh(1.0);
  OscillationScan small = oscillation_growth(
      the_model(), base, {1.0 / 16.0}, 12, 43, /*budget=*/10);
  OscillationScan large = oscillation_growth(
      the_model(), base, {1.0 / 16.0}, 12, 43, /*budget=*/4096);
  REQUIRE(small.rows.size() == 1);
  REQUIRE(large.rows.size() == 1);
  CHECK(small.rows[0].truncated);
  CHECK_FALSE(large.rows[0].truncated);
  CHECK(small.rows[0].used_count < large.rows[0].used_count);
  // same seed, same trajectories: the max over a superset dominates
  CHECK(large.rows[0].u_max_mean >= small.rows[0].u_max_mean);
  CHECK(large.rows[0].z_max_mean >= small.rows[0].z_max_mean);

  CHECK_THROWS_AS(
      oscillation_growth(the_model(), base, {1e-4}, 2, 1),  // below spacing
      std::invalid_argument);
  CHECK_THROWS_AS(oscillation_growth(the_model(), base, {}, 2, 1),
                  std::invalid_argument);
}
