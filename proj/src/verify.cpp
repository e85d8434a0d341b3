#include "rough/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include <Eigen/Dense>

#include "rough/gaussian_field.hpp"
#include "rough/levy_kernel.hpp"
#include "rough/moments.hpp"
#include "rough/rng.hpp"
#include "rough/spde.hpp"

namespace rough {

namespace {

// ---- pinned tolerances ----------------------------------------------------
constexpr double kPhiRatioLo = 0.7, kPhiRatioHi = 1.3;
constexpr double kBandFactor = 4.0;
constexpr double kBackendSigmas = 3.0;
constexpr double kBackendAbsSlack = 2e-4;  // inversion discretization floor
constexpr double kDalangCauchyTol = 0.01;
constexpr double kOutlierFractionMax = 0.004;  // 3-sigma rate plus slack
constexpr double kMaxGrowthAlpha = 1.2;  // see check_max_growth
constexpr double kExponentRelTol = 0.5;
constexpr double kCrossMethodTol = 0.15;
constexpr double kShareLimit = 0.2;

struct Harness {
  const VerifyOptions& opts;
  std::vector<CheckResult> results;

  void run(const std::string& id, bool monte_carlo,
           const std::function<void(CheckResult&)>& body) {
    if (!opts.only.empty() && id.rfind(opts.only, 0) != 0) return;
    CheckResult r;
    r.id = id;
    const auto start = std::chrono::steady_clock::now();
    if (monte_carlo && opts.replica_scale <= 0.0) {
      r.status = CheckStatus::kSkip;
      r.detail = "replica budget is zero";
    } else {
      try {
        r.status = CheckStatus::kPass;
        body(r);
      } catch (const std::exception& e) {
        r.status = CheckStatus::kFail;
        r.detail = std::string("exception: ") + e.what();
      }
    }
    r.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
    results.push_back(std::move(r));
  }

  std::size_t scaled(std::size_t base) const {
    const double v = std::ceil(static_cast<double>(base) * opts.replica_scale);
    return v < 1.0 ? 1 : static_cast<std::size_t>(v);
  }
};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

void require(CheckResult& r, bool ok, const std::string& what) {
  if (!ok) {
    r.status = CheckStatus::kFail;
    if (!r.detail.empty()) r.detail += "; ";
    r.detail += what;
  }
}

double band_ratio(const std::vector<double>& values) {
  double lo = values.front(), hi = values.front();
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

const CorrelationModel& shared_model() {
  static CorrelationModel model{AlphaParam(1.5)};
  return model;
}

// ---- criterion bodies -----------------------------------------------------

void check_phi(CheckResult& r) {
  for (double alpha : {1.1, 1.5, 1.9}) {
    LaplaceExponent phi{AlphaParam(alpha)};
    for (double lam : {1e6, 1e8, 1e10, 1e12}) {
      const double predicted =
          std::sqrt(4.0 * M_PI * lam) * std::pow(std::log(lam), alpha);
      const double ratio = phi(lam) / predicted;
      require(r, ratio >= kPhiRatioLo && ratio <= kPhiRatioHi,
              "phi ratio " + fmt(ratio) + " at alpha " + fmt(alpha) +
                  ", lambda " + fmt(lam));
    }
  }
  if (r.status == CheckStatus::kPass)
    r.detail = "ratio within [0.7, 1.3] on 3 alphas x 4 lambdas";
}

void check_potential(CheckResult& r) {
  const CorrelationModel& model = shared_model();
  const double alpha = model.alpha();
  const double paths =
      static_cast<double>(model.options().mc_paths);
  std::vector<double> products;
  for (double eps : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2}) {
    const double inv = model.potential_cdf(eps, PotentialBackend::kLaplaceInversion);
    const double mc = model.potential_cdf(eps, PotentialBackend::kMonteCarlo);
    const double se = std::sqrt(std::max(mc * (1.0 - mc), 1e-12) / paths);
    require(r, std::abs(inv - mc) <= kBackendSigmas * se + kBackendAbsSlack,
            "backends differ at eps " + fmt(eps) + ": " + fmt(inv) + " vs " +
                fmt(mc));
    products.push_back(inv * std::pow(eps, -0.5) *
                       std::pow(std::log(1.0 / eps), alpha));
  }
  const double band = band_ratio(products);
  require(r, band < kBandFactor, "normalized U band " + fmt(band));
  if (r.status == CheckStatus::kPass)
    r.detail = "backends within 3 sigma; normalized band " + fmt(band);
}

void check_kernel_asymptotics(CheckResult& r) {
  const CorrelationModel& model = shared_model();
  const double alpha = model.alpha();
  std::vector<double> f_products, fhat_products;
  for (double radius : {1e-5, 1e-4, 1e-3, 1e-2, 1e-1})
    f_products.push_back(model.phi_profile(radius) * radius * radius *
                         std::pow(std::log(1.0 / radius), alpha));
  for (double z : {1e2, 1e3, 1e4, 1e5, 1e6})
    fhat_products.push_back(model.fhat(z) * z * std::pow(std::log(z), alpha));
  const double fb = band_ratio(f_products);
  const double fhb = band_ratio(fhat_products);
  require(r, fb < kBandFactor, "f band " + fmt(fb));
  require(r, fhb < kBandFactor, "fhat band " + fmt(fhb));
  const double v1 = model.dalang_integral(1e4);
  const double v2 = model.dalang_integral(2e4);
  const double rel = (v2 - v1) / v2;
  require(r, rel >= 0.0 && rel < kDalangCauchyTol,
          "dalang increment " + fmt(rel));
  if (r.status == CheckStatus::kPass)
    r.detail = "f band " + fmt(fb) + ", fhat band " + fmt(fhb) +
               ", dalang increment " + fmt(rel);
}

void check_heat_resolvent(CheckResult& r) {
  const CorrelationModel& model = shared_model();
  const double alpha = model.alpha();
  std::vector<double> heat_products, res_products;
  for (double t : {1e-5, 1e-4, 1e-3, 1e-2})
    heat_products.push_back(model.heat_convolution_at_zero(t) * t *
                            std::pow(std::log(1.0 / t), alpha));
  for (double lam : {1e2, 1e3, 1e4, 1e5})
    res_products.push_back(model.resolvent_at_zero(lam) *
                           std::pow(std::log(lam), alpha - 1.0));
  const double hb = band_ratio(heat_products);
  const double rb = band_ratio(res_products);
  require(r, hb < kBandFactor, "heat band " + fmt(hb));
  require(r, rb < kBandFactor, "resolvent band " + fmt(rb));
  if (r.status == CheckStatus::kPass)
    r.detail = "heat band " + fmt(hb) + ", resolvent band " + fmt(rb);
}

void check_sampler_oracle(CheckResult& r, const Harness& h) {
  const CorrelationModel& model = shared_model();
  const LatticeSpec spec(8);
  const double t = 1.0;
  const std::size_t replicas = h.scaled(20000);
  const int n = spec.n;
  const int sites = n * n * n;

  SpectralSampler sampler(model, spec, t);

  // dense symmetric square root of the discrete covariance
  Eigen::MatrixXd cov(sites, sites);
  for (int a = 0; a < sites; ++a) {
    const int ai = a / (n * n), aj = (a / n) % n, ak = a % n;
    for (int b = a; b < sites; ++b) {
      const int bi = b / (n * n), bj = (b / n) % n, bk = b % n;
      const double c = sampler.covariance_lag(bi - ai, bj - aj, bk - ak);
      cov(a, b) = c;
      cov(b, a) = c;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd root =
      eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();

  std::vector<double> acc_s(static_cast<std::size_t>(sites) * sites, 0.0);
  std::vector<double> acc_d(acc_s.size(), 0.0);
  Eigen::VectorXd normals(sites), dense(sites);
  for (std::size_t rep = 0; rep < replicas; ++rep) {
    FieldSample fs = sampler.draw(h.opts.seed + 12, rep);
    for (int a = 0; a < sites; ++a)
      for (int b = a; b < sites; ++b)
        acc_s[static_cast<std::size_t>(a) * sites + b] +=
            fs.values[a] * fs.values[b];
    CounterRng rng(derive_key(h.opts.seed + 13, "verify-dense", rep));
    for (int a = 0; a < sites; ++a) normals[a] = rng.normal();
    dense.noalias() = root * normals;
    for (int a = 0; a < sites; ++a)
      for (int b = a; b < sites; ++b)
        acc_d[static_cast<std::size_t>(a) * sites + b] += dense[a] * dense[b];
  }

  std::size_t entries = 0, outliers = 0;
  const double dr = static_cast<double>(replicas);
  for (int a = 0; a < sites; ++a) {
    for (int b = a; b < sites; ++b) {
      const std::size_t idx = static_cast<std::size_t>(a) * sites + b;
      const double cs = acc_s[idx] / dr;
      const double cd = acc_d[idx] / dr;
      const double target = cov(a, b);
      const double var_est =
          (cov(a, a) * cov(b, b) + target * target) / dr;
      const double se = std::sqrt(2.0 * std::max(var_est, 1e-300));
      ++entries;
      if (std::abs(cs - cd) > kBackendSigmas * se) ++outliers;
    }
  }
  const double fraction =
      static_cast<double>(outliers) / static_cast<double>(entries);
  require(r, fraction <= kOutlierFractionMax,
          "outlier fraction " + fmt(fraction) + " over " +
              std::to_string(entries) + " entries");
  if (r.status == CheckStatus::kPass)
    r.detail = fmt(fraction * 100.0) + "% of " + std::to_string(entries) +
               " entries outside 3 sigma (limit 0.4%)";
}

void check_metric_sandwich(CheckResult& r) {
  const CorrelationModel& model = shared_model();
  CanonicalMetric metric(model, 1.0);
  const double alpha = model.alpha();
  std::vector<double> products;
  for (double h : {1e-4, 1e-3, 1e-2, 1e-1})
    products.push_back(metric.squared_distance(h) *
                       std::pow(std::log(1.0 / h), alpha - 1.0));
  const double band = band_ratio(products);
  require(r, band < kBandFactor, "metric band " + fmt(band));
  if (r.status == CheckStatus::kPass)
    r.detail = "normalized d^2 band " + fmt(band) + " over 3 decades";
}

void check_max_growth(CheckResult& r, const Harness& h) {
  // The scan samples the exact continuum covariance (circulant embedding);
  // the periodized torus field would bury the growth under its constant
  // mode and its overly smooth small lags.  The growth exponent is probed
  // at alpha 1.2: the asymptotic exponent (2 - alpha)/2 is only reachable
  // at N <= 128 when it sits near the weak-correlation value 1/2, i.e. for
  // alpha near 1.  At alpha 1.5 the chaining sum across coarse scales still
  // dominates in this range of N and every correct sampler reads ~0.45.
  CorrelationModel model{AlphaParam(kMaxGrowthAlpha)};
  MaxScanResult scan = continuum_max_scan(model, 1.0, {16, 32, 64, 128},
                                          h.scaled(500), h.opts.seed + 21);
  require(r, !scan.underpowered, "scan underpowered");
  const double target = (2.0 - kMaxGrowthAlpha) / 2.0;
  const double lo = target * (1.0 - kExponentRelTol);
  const double hi = target * (1.0 + kExponentRelTol);
  require(r, scan.fitted_exponent >= lo && scan.fitted_exponent <= hi,
          "fitted exponent " + fmt(scan.fitted_exponent) + " outside [" +
              fmt(lo) + ", " + fmt(hi) + "]");
  for (std::size_t i = 1; i < scan.rows.size(); ++i) {
    const double slack = (scan.rows[i - 1].ci_high - scan.rows[i - 1].ci_low +
                          scan.rows[i].ci_high - scan.rows[i].ci_low) /
                         2.0;
    require(r, scan.rows[i].mean_max >= scan.rows[i - 1].mean_max - slack,
            "mean max not monotone at N " + std::to_string(scan.rows[i].n));
  }
  if (r.status == CheckStatus::kPass)
    r.detail = "exponent " + fmt(scan.fitted_exponent) + " (target " +
               fmt(target) + " at alpha " + fmt(kMaxGrowthAlpha) + "), " +
               std::to_string(scan.replicas) + " replicas";
}

void check_solver_sanity(CheckResult& r, const Harness& h) {
  const CorrelationModel& model = shared_model();
  {
    SolverConfig cfg;
    cfg.lattice = LatticeSpec(8);
    cfg.dt = 1e-3;
    cfg.t_end = 0.01;
    cfg.sigma = SigmaSpec::constant(0.0);
    cfg.seed = h.opts.seed + 31;
    Trajectory traj = SpdeSolver(model, cfg).run();
    bool flat = true;
    for (double v : traj.snapshots.back().u)
      if (v != 1.0) flat = false;
    require(r, flat, "sigma 0 does not preserve u == 1");
  }
  {
    SolverConfig cfg;
    cfg.lattice = LatticeSpec(8);
    cfg.dt = 1e-3;
    cfg.t_end = 0.02;
    cfg.sigma = SigmaSpec::constant(1.0);
    cfg.coupled = true;
    cfg.seed = h.opts.seed + 32;
    Trajectory traj = SpdeSolver(model, cfg).run();
    const Snapshot& snap = traj.snapshots.back();
    bool same = snap.u == snap.z;
    require(r, same, "unit sigma coupled run is not bitwise u == Z");
  }
  for (const std::string& name : {"clip:2", "tanh:1", "id"}) {
    SolverConfig cfg;
    cfg.lattice = LatticeSpec(16);
    cfg.dt = 5e-4;
    cfg.t_end = 0.05;
    cfg.sigma = SigmaSpec::parse(name);
    cfg.seed = h.opts.seed + 33;
    const std::size_t reps = h.scaled(100);
    SpdeSolver solver(model, cfg);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      Trajectory traj = solver.run(rep);
      const auto& u = traj.snapshots.back().u;
      double m = 0.0;
      for (double v : u) m += v;
      m /= static_cast<double>(u.size());
      sum += m;
      sum_sq += m * m;
    }
    const double dr = static_cast<double>(reps);
    const double mean = sum / dr;
    const double se =
        std::sqrt(std::max(sum_sq / dr - mean * mean, 0.0) / (dr - 1.0));
    require(r, std::abs(mean - 1.0) <= kBackendSigmas * se + 1e-12,
            "replica mean " + fmt(mean) + " for sigma " + name);
  }
  if (r.status == CheckStatus::kPass)
    r.detail = "flat preservation, bitwise coupling, mean 1 within 3 sigma";
}

void check_moment_growth(CheckResult& r, const Harness& h) {
  const CorrelationModel& model = shared_model();
  SolverConfig cfg;
  cfg.lattice = LatticeSpec(16);
  cfg.dt = 5e-4;
  cfg.t_end = 0.25;
  cfg.sigma = SigmaSpec::parse("clip:2");
  cfg.seed = h.opts.seed + 41;
  cfg.snapshot_times = {0.05, 0.1, 0.2, 0.25};
  const std::size_t reps = h.scaled(120);
  SpdeSolver solver(model, cfg);
  std::vector<double> sum(4, 0.0), sum_sq(4, 0.0);
  for (std::size_t rep = 0; rep < reps; ++rep) {
    Trajectory traj = solver.run(rep);
    std::size_t idx = 0;
    for (const auto& snap : traj.snapshots) {
      if (idx >= 4) break;
      double m = 0.0;
      for (double v : snap.u) m += v * v;
      m /= static_cast<double>(snap.u.size());
      sum[idx] += m;
      sum_sq[idx] += m * m;
      ++idx;
    }
  }
  const double dr = static_cast<double>(reps);
  std::vector<double> mean(4), se(4);
  for (int i = 0; i < 4; ++i) {
    mean[i] = sum[i] / dr;
    se[i] = std::sqrt(
        std::max(sum_sq[i] / dr - mean[i] * mean[i], 0.0) / (dr - 1.0));
  }
  const double c_fit = mean[0] / (1.0 + 2.0 * 0.05);
  const double times[4] = {0.05, 0.1, 0.2, 0.25};
  for (int i = 1; i < 4; ++i)
    require(r,
            mean[i] <= c_fit * (1.0 + 2.0 * times[i]) + kBackendSigmas * se[i],
            "E u^2 " + fmt(mean[i]) + " above the linear bound at t " +
                fmt(times[i]));
  if (r.status == CheckStatus::kPass)
    r.detail = "E u^2 at t {0.1, 0.2, 0.25} below C(1 + 2t), C " + fmt(c_fit);
}

void check_increment_bands(CheckResult& r, const Harness& h) {
  const CorrelationModel& model = shared_model();
  SolverConfig spatial_cfg;
  spatial_cfg.lattice = LatticeSpec(16);
  // keep kappa_Nyquist^2 dt below ~0.6 or the scheme starves the modes that
  // carry the small-lag increments
  spatial_cfg.dt = 2.5e-4;
  spatial_cfg.t_end = 0.02;
  spatial_cfg.sigma = SigmaSpec::scaled_tanh(1.0);
  spatial_cfg.seed = h.opts.seed + 51;
  IncrementTable spatial = increment_scan(
      model, spatial_cfg, IncrementMode::kSpatial,
      {{1, 0, 0}, {2, 0, 0}, {4, 0, 0}, {8, 0, 0}, {4, 4, 0}, {4, 4, 4}},
      h.scaled(60));
  require(r, spatial.band2 < kBandFactor,
          "spatial band " + fmt(spatial.band2));

  SolverConfig temporal_cfg = spatial_cfg;
  temporal_cfg.t_end = 1.2;
  temporal_cfg.seed = h.opts.seed + 52;
  IncrementTable temporal = increment_scan_temporal(
      model, temporal_cfg, {8, 32, 128, 512, 2048}, h.scaled(30));
  require(r, temporal.band2 < kBandFactor,
          "temporal band " + fmt(temporal.band2));
  const double spatial_decades =
      std::log10(spatial.rows.back().lag / spatial.rows.front().lag);
  const double temporal_decades =
      std::log10(temporal.rows.back().lag / temporal.rows.front().lag);
  require(r, temporal_decades >= 2.0,
          "temporal span " + fmt(temporal_decades) + " decades");
  if (r.status == CheckStatus::kPass)
    r.detail = "spatial band " + fmt(spatial.band2) + " over " +
               fmt(spatial_decades) + " decades, temporal band " +
               fmt(temporal.band2) + " over " + fmt(temporal_decades) +
               " decades";
}

void check_linearization(CheckResult& r, const Harness& h) {
  const CorrelationModel& model = shared_model();
  {
    SolverConfig cfg;
    cfg.lattice = LatticeSpec(16);
    cfg.dt = 1e-3;
    cfg.t_end = 0.02;
    cfg.sigma = SigmaSpec::constant(1.0);
    cfg.seed = h.opts.seed + 61;
    ResidualTable exact =
        linearization_residual(model, cfg, {{1, 0, 0}, {4, 0, 0}}, 3);
    for (const auto& row : exact.rows)
      require(r, row.residual_sq == 0.0,
              "unit sigma residual " + fmt(row.residual_sq));
  }
  SolverConfig cfg;
  cfg.lattice = LatticeSpec(16);
  cfg.dt = 2.5e-4;
  cfg.t_end = 0.02;
  cfg.sigma = SigmaSpec::scaled_tanh(1.0);
  cfg.seed = h.opts.seed + 62;
  ResidualTable table = linearization_residual(
      model, cfg, {{1, 0, 0}, {2, 0, 0}, {4, 0, 0}, {8, 0, 0}}, h.scaled(80));
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const auto& small = table.rows[i - 1];
    const auto& large = table.rows[i];
    auto ratio_se = [](const ResidualRow& row) {
      if (row.grad_u_sq <= 0.0 || row.residual_sq <= 0.0) return 0.0;
      return row.ratio * (row.residual_se / row.residual_sq +
                          row.grad_u_se / row.grad_u_sq);
    };
    require(r,
            small.ratio <=
                large.ratio + kBackendSigmas * (ratio_se(small) + ratio_se(large)),
            "ratio not decreasing from eps " + fmt(large.eps_norm) + " to " +
                fmt(small.eps_norm));
  }
  if (r.status == CheckStatus::kPass)
    r.detail =
        "residual exactly 0 for unit sigma; ratio decreasing from " +
        fmt(table.rows.back().ratio) + " to " + fmt(table.rows.front().ratio);
}

void check_feynman_kac(CheckResult& r, const Harness& h) {
  const CorrelationModel& model = shared_model();
  {
    FeynmanKacConfig cfg;
    cfg.k = 1;
    cfg.t = 0.1;
    cfg.replicas = 10;
    cfg.seed = h.opts.seed + 71;
    FeynmanKacResult one = feynman_kac_moment(model, cfg);
    require(r, one.estimate.log_mean == 0.0,
            "k = 1 moment " + fmt(std::exp(one.estimate.log_mean)));
  }
  FeynmanKacConfig cfg;
  cfg.k = 2;
  cfg.t = 0.1;
  cfg.bm_dt = 1e-3;
  cfg.replicas = h.scaled(1500);
  cfg.seed = h.opts.seed + 72;
  FeynmanKacResult fk = feynman_kac_moment(model, cfg);

  SolverConfig scfg;
  scfg.lattice = LatticeSpec(16, 2.0);  // wide box: tame the constant mode
  scfg.dt = 1e-3;
  scfg.t_end = 0.1;
  scfg.sigma = SigmaSpec::identity();
  scfg.seed = h.opts.seed + 73;
  const std::size_t reps = h.scaled(300);
  SpdeSolver solver(model, scfg);
  double sum = 0.0;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    Trajectory traj = solver.run(rep);
    double m = 0.0;
    for (double v : traj.snapshots.back().u) m += v * v;
    sum += m / static_cast<double>(traj.snapshots.back().u.size());
  }
  const double solver_m2 = sum / static_cast<double>(reps);
  const double fk_m2 = std::exp(fk.estimate.log_mean);
  const double rel = std::abs(fk_m2 / solver_m2 - 1.0);
  require(r, rel <= kCrossMethodTol,
          "cross-method gap " + fmt(rel * 100.0) + "%");

  std::vector<double> times{0.04, 0.08, 0.12};
  std::vector<MomentEstimate> e2, e3;
  double worst_share = fk.estimate.max_weight_share;
  for (double t : times) {
    FeynmanKacConfig gc;
    gc.t = t;
    gc.bm_dt = 1e-3;
    gc.replicas = h.scaled(400);
    gc.seed = h.opts.seed + 74;
    gc.k = 2;
    MomentEstimate a = feynman_kac_moment(model, gc).estimate;
    gc.k = 3;
    MomentEstimate b = feynman_kac_moment(model, gc).estimate;
    worst_share = std::max({worst_share, a.max_weight_share,
                            b.max_weight_share});
    e2.push_back(a);
    e3.push_back(b);
  }
  if (worst_share > kShareLimit) {
    r.status = CheckStatus::kSkip;
    r.detail = "inconclusive: max weight share " + fmt(worst_share);
    return;
  }
  LyapunovFit f2 = lyapunov_fit(times, e2);
  LyapunovFit f3 = lyapunov_fit(times, e3);
  require(r, f3.slope > f2.slope,
          "k 3 slope " + fmt(f3.slope) + " not above k 2 slope " +
              fmt(f2.slope));
  if (r.status == CheckStatus::kPass)
    r.detail = "k=1 exact; particle vs solver E u^2 gap " +
               fmt(rel * 100.0) + "%; slopes " + fmt(f2.slope) + " < " +
               fmt(f3.slope);
}

}  // namespace

std::vector<CheckResult> run_acceptance(const VerifyOptions& opts) {
  Harness h{opts, {}};
  h.run("kernel.phi", false, check_phi);
  h.run("kernel.potential", false, check_potential);
  h.run("kernel.asymptotics", false, check_kernel_asymptotics);
  h.run("kernel.heat-resolvent", false, check_heat_resolvent);
  h.run("field.sampler", true, [&](CheckResult& r) { check_sampler_oracle(r, h); });
  h.run("field.metric", false, check_metric_sandwich);
  h.run("field.max-growth", true, [&](CheckResult& r) { check_max_growth(r, h); });
  h.run("solver.sanity", true, [&](CheckResult& r) { check_solver_sanity(r, h); });
  h.run("solver.moment-growth", true,
        [&](CheckResult& r) { check_moment_growth(r, h); });
  h.run("solver.increments", true,
        [&](CheckResult& r) { check_increment_bands(r, h); });
  h.run("solver.linearization", true,
        [&](CheckResult& r) { check_linearization(r, h); });
  h.run("moments.feynman-kac", true,
        [&](CheckResult& r) { check_feynman_kac(r, h); });
  return h.results;
}

int verify_exit_code(const std::vector<CheckResult>& results) {
  bool any_fail = false, any_pass = false;
  for (const auto& r : results) {
    if (r.status == CheckStatus::kFail) any_fail = true;
    if (r.status == CheckStatus::kPass) any_pass = true;
  }
  if (any_fail) return 1;
  if (!any_pass) return 3;
  return 0;
}

std::string status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::kPass: return "pass";
    case CheckStatus::kFail: return "fail";
    case CheckStatus::kSkip: return "skip";
  }
  return "unknown";
}

}  // namespace rough
