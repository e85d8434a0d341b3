#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rough/gaussian_field.hpp"
#include "rough/levy_kernel.hpp"
#include "rough/rng.hpp"

using namespace rough;

namespace {

const CorrelationModel& the_model() {
  static CorrelationModel model{AlphaParam(1.5)};
  return model;
}

// Comparison quantity for the metric sandwich: the spectral integral with
// the heat damping replaced by the resolvent weight 1/(1 + r^2),
//
//   T(h) = (1/pi^2) int_0^inf fhat(r) r^2/(1+r^2) (1 - sinc(r h)) dr,
//
// which brackets d^2 via (1 - e^{-t/2}) T <= d^2 <= e^{t/2} T.  Computed
// here by fixed-step Simpson sums, independent of the adaptive machinery
// in the library.
double sandwich_integral(const CorrelationModel& m, double h) {
  auto sinc = [](double x) {
    return std::abs(x) < 1e-8 ? 1.0 : std::sin(x) / x;
  };
  const double r1 = std::max(40.0, 8.0 * 3.14159265358979323846 / h);
  auto head_f = [&](double w) {
    double r = std::exp(w);
    return r * std::exp(m.log_fhat(w)) * (r * r / (1.0 + r * r)) *
           (1.0 - sinc(r * h));
  };
  int n = 40000;
  double wlo = std::log(1e-8), whi = std::log(r1), step = (whi - wlo) / n;
  double head = head_f(wlo) + head_f(whi);
  for (int i = 1; i < n; ++i) head += (i % 2 ? 4.0 : 2.0) * head_f(wlo + i * step);
  head *= step / 3.0;
  // Monotone part of the tail in y = log log r; the oscillatory remainder
  // is a sub-percent effect absorbed by the sandwich slack.
  auto tail_f = [&](double y) {
    double w = std::exp(y);
    return std::exp(y + w + m.log_fhat(w));
  };
  int n2 = 4000;
  double ylo = std::log(whi), yhi = 31.0, step2 = (yhi - ylo) / n2;
  double tail = tail_f(ylo) + tail_f(yhi);
  for (int i = 1; i < n2; ++i) tail += (i % 2 ? 4.0 : 2.0) * tail_f(ylo + i * step2);
  tail = tail * step2 / 3.0 + tail_f(yhi) / (m.alpha() - 1.0);
  const double pi2 = 9.869604401089358;
  return (head + tail) / pi2;
}

struct Welford {
  double mean = 0.0, m2 = 0.0;
  std::size_t n = 0;
  void add(double x) {
    ++n;
    double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  double var() const { return m2 / (n - 1); }
  double se() const { return std::sqrt(var() / n); }
};

}  // namespace

TEST_CASE("lattice spec validates its geometry") {
  CHECK_THROWS_AS(LatticeSpec(3), std::invalid_argument);
  CHECK_THROWS_AS(LatticeSpec(0), std::invalid_argument);
  CHECK_THROWS_AS(LatticeSpec(8, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(LatticeSpec(8, 1.0, 4), std::invalid_argument);
  LatticeSpec spec(16, 2.0);
  CHECK(spec.spacing() == doctest::Approx(0.125));
  CHECK(spec.sites() == 4096);
}

TEST_CASE("spectral density fills the removable singularity and decays") {
  const auto& m = the_model();
  double t = 0.7;
  ZSpectralDensity g(m, t);
  const double expected0 = t / 248.05021344239856;
  CHECK(g(0.0) == doctest::Approx(expected0).epsilon(1e-9));
  CHECK(g(1e-9) == doctest::Approx(expected0).epsilon(1e-6));
  double prev = g(1e-3);
  for (double r : {1e-2, 1e-1, 1.0, 1e1, 1e2, 1e4}) {
    double cur = g(r);
    CHECK(cur > 0.0);
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK_THROWS_AS(ZSpectralDensity(m, 0.0), std::invalid_argument);
}

TEST_CASE("field variance equals the time-integrated heat convolution") {
  const auto& m = the_model();
  const double t = 1.0;
  CanonicalMetric metric(m, t);
  // Oracle: Var = int_0^t (p_{2s} * f)(0) ds.  The integrand carries an
  // integrable 1/(s log^alpha(1/s)) singularity at s = 0; integrate in
  // log s and close the sliver below s0 with the power-of-log primitive.
  const double s0 = 1e-18;
  auto f = [&](double x) { return std::exp(x) * m.heat_convolution_at_zero(std::exp(x)); };
  int n = 20000;
  double xlo = std::log(s0), xhi = std::log(t), step = (xhi - xlo) / n;
  double acc = f(xlo) + f(xhi);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(xlo + i * step);
  acc *= step / 3.0;
  double sliver =
      m.heat_convolution_at_zero(s0) * s0 * std::log(1.0 / s0) / (m.alpha() - 1.0);
  double oracle = acc + sliver;
  CHECK(metric.variance() == doctest::Approx(oracle).epsilon(0.02));
}

TEST_CASE("variance grows with time inside a desk-scale band") {
  const auto& m = the_model();
  double v_quarter = CanonicalMetric(m, 0.25).variance();
  double v_one = CanonicalMetric(m, 1.0).variance();
  double v_four = CanonicalMetric(m, 4.0).variance();
  CHECK(v_quarter < v_one);
  CHECK(v_one < v_four);
  double ratio = v_one / 2.0;  // against 1 + t at t = 1
  CHECK(ratio > 1e-3);
  CHECK(ratio < 1.0);
}

TEST_CASE("squared distance follows the inverse log power law") {
  const auto& m = the_model();
  CanonicalMetric metric(m, 1.0);
  CHECK(metric.squared_distance(0.0) == 0.0);
  std::vector<double> laws;
  for (double h : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2}) {
    double d2 = metric.squared_distance(h);
    CHECK(d2 > 0.0);
    laws.push_back(d2 * std::pow(std::log(1.0 / h), m.alpha() - 1.0));
  }
  double gm = 1.0;
  for (double v : laws) gm *= v;
  gm = std::pow(gm, 1.0 / laws.size());
  for (double v : laws) {
    CHECK(v / gm > 0.25);
    CHECK(v / gm < 4.0);
  }
  // monotone growth in the separation
  CHECK(metric.squared_distance(1e-2) > metric.squared_distance(1e-4));
  CHECK(metric.squared_distance(1.0) > metric.squared_distance(1e-2));
}

TEST_CASE("squared distance sits between the comparison-integral bounds") {
  const auto& m = the_model();
  const double t = 1.0;
  CanonicalMetric metric(m, t);
  for (double h : {1e-5, 1e-3, 1e-1}) {
    double d2 = metric.squared_distance(h);
    double comp = sandwich_integral(m, h);
    CHECK(d2 >= (1.0 - std::exp(-t / 2.0)) * comp / 1.05);
    CHECK(d2 <= std::exp(t / 2.0) * comp * 1.05);
  }
}

TEST_CASE("canonical metric behaves like a metric on sampled triples") {
  const auto& m = the_model();
  CanonicalMetric metric(m, 1.0);
  Vec3 a{0.0, 0.0, 0.0};
  Vec3 b{0.01, -0.02, 0.005};
  Vec3 c{-0.3, 0.1, 0.2};
  Vec3 shift{1.3, -0.7, 2.1};
  CHECK(metric.distance(a, a) == 0.0);
  CHECK(metric.distance(a, b) == doctest::Approx(metric.distance(b, a)));
  Vec3 as{a[0] + shift[0], a[1] + shift[1], a[2] + shift[2]};
  Vec3 bs{b[0] + shift[0], b[1] + shift[1], b[2] + shift[2]};
  CHECK(metric.distance(a, b) == doctest::Approx(metric.distance(as, bs)));
  double ab = metric.distance(a, b);
  double bc = metric.distance(b, c);
  double ac = metric.distance(a, c);
  CHECK(ac <= (ab + bc) * (1.0 + 1e-9));
  CHECK(ab <= (ac + bc) * (1.0 + 1e-9));
}

TEST_CASE("covariance pair is symmetric and shrinks with separation") {
  const auto& m = the_model();
  const double t = 1.0;
  CanonicalMetric metric(m, t);
  Vec3 o{0.0, 0.0, 0.0};
  Vec3 x{0.01, 0.0, 0.0};
  Vec3 y{0.3, 0.0, 0.0};
  CHECK(covariance_pair(m, t, o, o) == doctest::Approx(metric.variance()));
  CHECK(covariance_pair(m, t, o, x) == doctest::Approx(covariance_pair(m, t, x, o)));
  double near = covariance_pair(m, t, o, x);
  double far = covariance_pair(m, t, o, y);
  CHECK(near < metric.variance());
  CHECK(far < near);
  CHECK(canonical_distance(m, t, o, x) ==
        doctest::Approx(metric.distance(o, x)));
}

TEST_CASE("sampler output is deterministic per seed and replica") {
  SpectralSampler sampler(the_model(), LatticeSpec(16), 1.0);
  FieldSample a = sampler.draw(42, 0);
  FieldSample b = sampler.draw(42, 0);
  FieldSample c = sampler.draw(42, 1);
  FieldSample d = sampler.draw(43, 0);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
  CHECK(a.values != d.values);
  CHECK(a.gen == FieldGen::kSpectral);
}

TEST_CASE("sampler reproduces its discrete covariance target") {
  SpectralSampler sampler(the_model(), LatticeSpec(8), 1.0);
  const int n = 8;
  const int reps = 3000;
  const std::array<std::array<int, 3>, 4> lags = {
      {{0, 0, 0}, {1, 0, 0}, {2, 1, 0}, {4, 4, 4}}};
  std::array<Welford, 4> stats;
  Welford site0_sq;
  std::vector<double> site0;
  site0.reserve(reps);
  for (int rep = 0; rep < reps; ++rep) {
    FieldSample f = sampler.draw(7, static_cast<std::uint64_t>(rep));
    site0.push_back(f.at(0, 0, 0));
    site0_sq.add(f.at(0, 0, 0) * f.at(0, 0, 0));
    for (std::size_t q = 0; q < lags.size(); ++q) {
      // spatial average of Z(x) Z(x + lag): one statistic per replica
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) {
            acc += f.at(i, j, k) * f.at((i + lags[q][0]) % n,
                                        (j + lags[q][1]) % n,
                                        (k + lags[q][2]) % n);
          }
        }
      }
      stats[q].add(acc / (n * n * n));
    }
  }
  for (std::size_t q = 0; q < lags.size(); ++q) {
    double exact = sampler.covariance_lag(lags[q][0], lags[q][1], lags[q][2]);
    CHECK(std::abs(stats[q].mean - exact) <= 3.0 * stats[q].se() + 1e-12);
  }
  // single-site variance agrees too (no spatial averaging involved)
  CHECK(std::abs(site0_sq.mean - sampler.lattice_variance()) <=
        3.0 * site0_sq.se());

  // marginal Gaussianity: kurtosis of the site-0 series
  Welford m1;
  for (double v : site0) m1.add(v);
  double m2 = 0.0, m4 = 0.0;
  for (double v : site0) {
    double d = v - m1.mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= site0.size();
  m4 /= site0.size();
  double kurtosis = m4 / (m2 * m2);
  CHECK(std::abs(kurtosis - 3.0) < 4.0 * std::sqrt(24.0 / reps));
}

TEST_CASE("empirical covariance is stationary across base points") {
  SpectralSampler sampler(the_model(), LatticeSpec(8), 1.0);
  const int reps = 4000;
  Welford at_origin, at_offset;
  for (int rep = 0; rep < reps; ++rep) {
    FieldSample f = sampler.draw(11, static_cast<std::uint64_t>(rep));
    at_origin.add(f.at(0, 0, 0) * f.at(1, 0, 0));
    at_offset.add(f.at(3, 2, 5) * f.at(4, 2, 5));
  }
  double se = std::sqrt(at_origin.se() * at_origin.se() +
                        at_offset.se() * at_offset.se());
  CHECK(std::abs(at_origin.mean - at_offset.mean) <= 4.0 * se);
}

TEST_CASE("spectral synthesis matches a dense square-root oracle") {
  const auto& m = the_model();
  const int n = 4;
  const int sites = n * n * n;
  const double t = 1.0;
  SpectralSampler sampler(m, LatticeSpec(n), t);

  Eigen::MatrixXd cov(sites, sites);
  auto site = [n](int idx) {
    return std::array<int, 3>{idx / (n * n), (idx / n) % n, idx % n};
  };
  for (int a = 0; a < sites; ++a) {
    for (int b = 0; b < sites; ++b) {
      auto pa = site(a), pb = site(b);
      cov(a, b) =
          sampler.covariance_lag(pa[0] - pb[0], pa[1] - pb[1], pa[2] - pb[2]);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  CHECK(eig.eigenvalues().minCoeff() > -1e-10 * cov.trace());
  Eigen::MatrixXd root =
      eig.eigenvectors() *
      eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
      eig.eigenvectors().transpose();

  const int reps = 3000;
  Eigen::MatrixXd acc_spec = Eigen::MatrixXd::Zero(sites, sites);
  Eigen::MatrixXd acc_dense = Eigen::MatrixXd::Zero(sites, sites);
  Eigen::VectorXd xi(sites), sample(sites);
  for (int rep = 0; rep < reps; ++rep) {
    FieldSample f = sampler.draw(5, static_cast<std::uint64_t>(rep));
    Eigen::Map<const Eigen::VectorXd> zf(f.values.data(), sites);
    acc_spec.noalias() += zf * zf.transpose();
    CounterRng rng(derive_key(5, "dense-oracle", static_cast<std::uint64_t>(rep)));
    for (int q = 0; q < sites; ++q) xi(q) = rng.normal();
    sample.noalias() = root * xi;
    acc_dense.noalias() += sample * sample.transpose();
  }
  acc_spec /= reps;
  acc_dense /= reps;

  int bad_spec = 0, bad_dense = 0, total = 0;
  for (int a = 0; a < sites; ++a) {
    for (int b = a; b < sites; ++b) {
      double se = std::sqrt(
          (cov(a, a) * cov(b, b) + cov(a, b) * cov(a, b)) / reps);
      ++total;
      if (std::abs(acc_spec(a, b) - cov(a, b)) > 3.0 * se) ++bad_spec;
      if (std::abs(acc_dense(a, b) - cov(a, b)) > 3.0 * se) ++bad_dense;
    }
  }
  // ~0.27% of entries fall outside 3 standard errors by chance
  CHECK(bad_spec <= total * 2 / 100);
  CHECK(bad_dense <= total * 2 / 100);
}

TEST_CASE("lattice max scan grows with resolution") {
  const auto& m = the_model();
  MaxScanResult scan =
      lattice_max_scan(m, 1.0, {1, 2, 4, 8, 16}, 200, 99, 3.0);
  REQUIRE(scan.rows.size() == 5);
  for (std::size_t q = 0; q + 1 < scan.rows.size(); ++q) {
    // nested sublattices: larger n dominates replica by replica
    CHECK(scan.rows[q + 1].mean_max >= scan.rows[q].mean_max);
  }
  // n = 1 is a single Gaussian site: half-normal mean from the discrete
  // lattice variance
  const MaxScanRow& single = scan.rows.front();
  double target = std::sqrt(2.0 * scan.lattice_variance / 3.14159265358979);
  double se = (single.ci_high - single.mean_max) / 1.96;
  CHECK(std::abs(single.mean_max - target) <= 3.0 * se);
  for (const auto& row : scan.rows) {
    CHECK(row.tail_frequency >= 0.0);
    CHECK(row.tail_frequency <= 1.0);
  }
  // the small-max event becomes rarer at finer resolution
  CHECK(scan.rows.back().tail_frequency <= scan.rows[1].tail_frequency + 0.1);
  CHECK(std::isfinite(scan.fitted_exponent));
  CHECK_FALSE(scan.underpowered);
  CHECK_THROWS_AS(lattice_max_scan(m, 1.0, {4, 3}, 10, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(lattice_max_scan(m, 1.0, {8, 4}, 10, 1),
                  std::invalid_argument);
}

TEST_CASE("maxima concentrate around their mean") {
  // Gaussian concentration: P{|max - E max| > z} <= 2 exp(-z^2 / (2 V))
  // with V the common site variance; checked as a one-sided frequency
  // bound with binomial slack.
  const auto& m = the_model();
  SpectralSampler sampler(m, LatticeSpec(16), 1.0);
  const int reps = 400;
  std::vector<double> maxima;
  maxima.reserve(reps);
  for (int rep = 0; rep < reps; ++rep) {
    FieldSample f = sampler.draw(17, static_cast<std::uint64_t>(rep));
    double best = 0.0;
    for (double v : f.values) best = std::max(best, std::abs(v));
    maxima.push_back(best);
  }
  double mean = 0.0;
  for (double v : maxima) mean += v;
  mean /= maxima.size();
  double var = sampler.lattice_variance();
  for (double z : {0.1, 0.2, 0.4}) {
    std::size_t hits = 0;
    for (double v : maxima) {
      if (std::abs(v - mean) > z) ++hits;
    }
    double freq = static_cast<double>(hits) / maxima.size();
    double bound = 2.0 * std::exp(-z * z / (2.0 * var));
    double slack = 3.0 * std::sqrt(std::max(bound, 1.0 / reps) / reps);
    CHECK(freq <= std::min(1.0, bound + slack));
  }
}

TEST_CASE("entropy integral estimate tracks the expected maximum") {
  const auto& m = the_model();
  const double t = 1.0;
  std::vector<Vec3> empty_or_single = {{0.1, 0.2, 0.3}};
  CHECK(dudley_bound_estimate(m, t, {}).entropy_integral == 0.0);
  CHECK(dudley_bound_estimate(m, t, empty_or_single).entropy_integral == 0.0);

  auto cube_points = [](int n) {
    std::vector<Vec3> pts;
    pts.reserve(static_cast<std::size_t>(n) * n * n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          pts.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n,
                         static_cast<double>(k) / n});
        }
      }
    }
    return pts;
  };

  auto base = cube_points(4);
  DudleyEstimate d4 = dudley_bound_estimate(m, t, base);
  CHECK(d4.entropy_integral > 0.0);
  CHECK(d4.diameter > 0.0);
  auto doubled = base;
  for (const auto& p : base) doubled.push_back({p[0] + 2.0, p[1], p[2]});
  DudleyEstimate d4x2 = dudley_bound_estimate(m, t, doubled);
  CHECK(d4x2.entropy_integral > d4.entropy_integral);

  // two-sided expected-maximum bound: the ratio E max / entropy integral
  // stays in a fixed band as the grid refines
  MaxScanResult scan = lattice_max_scan(m, t, {8, 16}, 200, 123);
  std::vector<double> ratios;
  for (int n : {8, 16}) {
    DudleyEstimate est = dudley_bound_estimate(m, t, cube_points(n));
    double emax = (n == 8 ? scan.rows[0] : scan.rows[1]).mean_max;
    ratios.push_back(emax / est.entropy_integral);
  }
  CHECK(ratios[0] / ratios[1] < 4.0);
  CHECK(ratios[1] / ratios[0] < 4.0);
}

TEST_CASE("aliasing fraction reports the truncated spectral mass") {
  const auto& m = the_model();
  SpectralSampler coarse(m, LatticeSpec(8), 1.0);
  SpectralSampler fine(m, LatticeSpec(64), 1.0);
  CHECK(coarse.aliasing_fraction() > 0.0);
  CHECK(coarse.aliasing_fraction() < 1.0);
  CHECK(fine.aliasing_fraction() < coarse.aliasing_fraction());
  bool spurious_flag = fine.aliasing_flagged() && fine.aliasing_fraction() < 0.5;
  CHECK_FALSE(spurious_flag);
  SpectralSampler strict(m, LatticeSpec(8), 1.0, 1e-9);
  CHECK(strict.aliasing_flagged());
  // finer lattices keep more of the target variance
  CHECK(fine.lattice_variance() > coarse.lattice_variance());
}

TEST_CASE("circulant sampler is deterministic and pair-buffered") {
  CirculantSampler sampler(the_model(), 8, 1.0);
  FieldSample a = sampler.draw(42, 0);
  FieldSample b = sampler.draw(42, 0);
  FieldSample sibling = sampler.draw(42, 1);
  FieldSample other = sampler.draw(43, 0);
  CHECK(a.values == b.values);
  CHECK(a.values != sibling.values);
  CHECK(a.values != other.values);
  CHECK(a.gen == FieldGen::kCirculant);
  CHECK(a.lattice.n == 8);
  // the pair buffer must survive eviction and refill
  FieldSample evict = sampler.draw(42, 9);
  FieldSample again = sampler.draw(42, 0);
  CHECK(evict.values != a.values);
  CHECK(again.values == a.values);
}

TEST_CASE("circulant sampler rejects bad lattice sizes") {
  CHECK_THROWS_AS(CirculantSampler(the_model(), 0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(CirculantSampler(the_model(), 12, 1.0),
                  std::invalid_argument);
}

TEST_CASE("circulant sampler hits the continuum covariance") {
  const int n = 8;
  CirculantSampler sampler(the_model(), n, 1.0);
  CanonicalMetric metric(the_model(), 1.0);
  const double var = metric.variance();
  CHECK(sampler.variance() == doctest::Approx(var));
  const double cf = sampler.clipped_fraction();
  CHECK(cf >= 0.0);
  CHECK(cf < 0.05);

  // clipping moves every realized entry by at most the clipped mass
  const double clip_slack = 3.0 * cf * var + 1e-9;
  CHECK(std::abs(sampler.covariance_lag(0, 0, 0) - var) <= clip_slack);
  const double h = 1.0 / n;
  const std::array<std::array<int, 3>, 3> lags = {
      {{1, 0, 0}, {2, 1, 0}, {4, 4, 4}}};
  for (const auto& lag : lags) {
    const double want = metric.covariance(
        {0.0, 0.0, 0.0}, {h * lag[0], h * lag[1], h * lag[2]});
    const double got = sampler.covariance_lag(lag[0], lag[1], lag[2]);
    CHECK(std::abs(got - want) <= clip_slack + 2e-4);
  }

  // Monte Carlo covariance against the realized target.  The sampled cube
  // is not periodic with period n, so only non-wrapping pairs average.
  const int reps = 2500;
  std::array<Welford, 3> stats;
  for (int rep = 0; rep < reps; ++rep) {
    FieldSample f = sampler.draw(11, static_cast<std::uint64_t>(rep));
    for (std::size_t q = 0; q < lags.size(); ++q) {
      double acc = 0.0;
      int count = 0;
      for (int i = 0; i + lags[q][0] < n; ++i) {
        for (int j = 0; j + lags[q][1] < n; ++j) {
          for (int k = 0; k + lags[q][2] < n; ++k) {
            acc += f.at(i, j, k) *
                   f.at(i + lags[q][0], j + lags[q][1], k + lags[q][2]);
            ++count;
          }
        }
      }
      stats[q].add(acc / count);
    }
  }
  for (std::size_t q = 0; q < lags.size(); ++q) {
    const double exact =
        sampler.covariance_lag(lags[q][0], lags[q][1], lags[q][2]);
    CHECK(std::abs(stats[q].mean - exact) <= 3.0 * stats[q].se() + 1e-12);
  }
}

TEST_CASE("covariance table is gated by lattice size") {
  CirculantSampler big(the_model(), 64, 1.0);
  CHECK_THROWS_AS(big.covariance_lag(1, 0, 0), std::logic_error);
}

TEST_CASE("continuum max scan grows with resolution") {
  MaxScanResult scan = continuum_max_scan(the_model(), 1.0, {4, 8, 16}, 120, 5);
  REQUIRE(scan.rows.size() == 3);
  CHECK(scan.replicas == 120);
  CHECK(!scan.underpowered);
  CHECK(scan.lattice_variance ==
        doctest::Approx(CanonicalMetric(the_model(), 1.0).variance()));
  for (std::size_t q = 1; q < scan.rows.size(); ++q) {
    // monotone within the replica CIs
    CHECK(scan.rows[q].ci_high >= scan.rows[q - 1].ci_low);
    CHECK(scan.rows[q].mean_max > 0.0);
  }
  CHECK(std::isfinite(scan.fitted_exponent));
  CHECK(scan.fitted_exponent > 0.0);

  CHECK_THROWS_AS(continuum_max_scan(the_model(), 1.0, {}, 10, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(continuum_max_scan(the_model(), 1.0, {1, 2}, 10, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(continuum_max_scan(the_model(), 1.0, {8, 4}, 10, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(continuum_max_scan(the_model(), 1.0, {4, 8}, 1, 1),
                  std::invalid_argument);
}
