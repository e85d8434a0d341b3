#include "rough/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rough/gaussian_field.hpp"
#include "rough/rng.hpp"

namespace rough {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& terms) {
  double m = kNegInf;
  for (double t : terms) m = std::max(m, t);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double t : terms)
    if (t != kNegInf) s += std::exp(t - m);
  return m + std::log(s);
}

// mean of exp(terms) in the log domain over a resampled index set
double log_mean_resampled(const std::vector<double>& terms,
                          const std::vector<std::size_t>& idx) {
  double m = kNegInf;
  for (std::size_t i : idx) m = std::max(m, terms[i]);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (std::size_t i : idx)
    if (terms[i] != kNegInf) s += std::exp(terms[i] - m);
  return m + std::log(s) - std::log(static_cast<double>(idx.size()));
}

MomentEstimate from_log_terms(std::vector<double> terms, int k,
                              std::uint64_t bootstrap_seed,
                              int bootstrap_rounds) {
  MomentEstimate out;
  out.k = k;
  out.replicas = terms.size();
  const double lse = log_sum_exp(terms);
  if (lse == kNegInf) {
    out.all_zero = true;
    out.unreliable = true;
    out.log_mean = out.ci_low = out.ci_high = kNegInf;
    out.max_weight_share = 1.0;
    return out;
  }
  const double n = static_cast<double>(terms.size());
  out.log_mean = lse - std::log(n);
  double top = kNegInf;
  for (double t : terms) top = std::max(top, t);
  out.max_weight_share = std::exp(top - lse);
  out.unreliable = out.max_weight_share > 0.2;

  if (bootstrap_rounds > 1 && terms.size() > 1) {
    CounterRng rng(derive_key(bootstrap_seed, "moment-bootstrap"));
    std::vector<double> stats(bootstrap_rounds);
    std::vector<std::size_t> idx(terms.size());
    for (int r = 0; r < bootstrap_rounds; ++r) {
      for (auto& i : idx)
        i = std::min<std::size_t>(terms.size() - 1,
                                  static_cast<std::size_t>(rng.uniform() * n));
      stats[r] = log_mean_resampled(terms, idx);
    }
    std::sort(stats.begin(), stats.end());
    const auto pick = [&](double q) {
      const double pos = q * (stats.size() - 1);
      const std::size_t lo = static_cast<std::size_t>(pos);
      const std::size_t hi = std::min(lo + 1, stats.size() - 1);
      if (stats[lo] == kNegInf) return stats[lo];
      return stats[lo] + (pos - lo) * (stats[hi] - stats[lo]);
    };
    out.ci_low = std::min(pick(0.025), out.log_mean);
    out.ci_high = std::max(pick(0.975), out.log_mean);
  } else {
    out.ci_low = out.ci_high = out.log_mean;
  }
  return out;
}

struct Welford {
  double n = 0.0, mean = 0.0, m2 = 0.0;
  void add(double x) {
    n += 1.0;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  double se() const {
    return n > 1.5 ? std::sqrt(m2 / (n * (n - 1.0))) : 0.0;
  }
};

double log_plus(double x) { return std::max(std::log(x), 0.0); }

}  // namespace

MomentEstimate estimate_moment(const std::vector<double>& samples, int k,
                               std::uint64_t bootstrap_seed,
                               int bootstrap_rounds) {
  if (samples.empty()) throw std::invalid_argument("estimate_moment: no samples");
  if (k < 1) throw std::invalid_argument("estimate_moment: order must be >= 1");
  std::vector<double> terms(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double a = std::abs(samples[i]);
    terms[i] = a > 0.0 ? k * std::log(a) : kNegInf;
  }
  return from_log_terms(std::move(terms), k, bootstrap_seed, bootstrap_rounds);
}

MomentEstimate estimate_moment_log(const std::vector<double>& log_samples,
                                   int k, std::uint64_t bootstrap_seed,
                                   int bootstrap_rounds) {
  if (log_samples.empty())
    throw std::invalid_argument("estimate_moment_log: no samples");
  return from_log_terms(log_samples, k, bootstrap_seed, bootstrap_rounds);
}

void FeynmanKacConfig::validate() const {
  if (k < 1) throw std::invalid_argument("feynman-kac: k must be >= 1");
  if (!(t > 0.0)) throw std::invalid_argument("feynman-kac: t must be positive");
  if (!(bm_dt > 0.0))
    throw std::invalid_argument("feynman-kac: bm_dt must be positive");
  if (replicas == 0) throw std::invalid_argument("feynman-kac: no replicas");
  if (cap_radius < 0.0)
    throw std::invalid_argument("feynman-kac: cap radius must be >= 0");
  if (!(early_cutoff > 0.0) || early_cutoff > bm_dt)
    throw std::invalid_argument(
        "feynman-kac: early cutoff must lie in (0, bm_dt]");
}

FeynmanKacResult feynman_kac_moment(const CorrelationModel& model,
                                    const FeynmanKacConfig& cfg) {
  cfg.validate();
  FeynmanKacResult out;
  out.cap_radius =
      cfg.cap_radius > 0.0 ? cfg.cap_radius : model.trusted_radius();
  const double f_cap = model.phi_profile(out.cap_radius);
  const int k = cfg.k;

  // evaluation grid: geometric through the singular window, uniform after
  std::vector<double> grid;
  for (double s = cfg.early_cutoff; s < cfg.bm_dt && s < cfg.t; s *= 4.0)
    grid.push_back(s);
  const long steps = std::max<long>(1, std::llround(cfg.t / cfg.bm_dt));
  const double dt = cfg.t / static_cast<double>(steps);
  for (long s = 1; s <= steps; ++s) grid.push_back(dt * static_cast<double>(s));
  if (k > 1) out.early_mean_offset = CanonicalMetric(model, cfg.early_cutoff).variance();

  std::vector<double> energies(cfg.replicas, 0.0);
  std::size_t pair_evals = 0, cap_hits = 0;
  std::vector<std::array<double, 3>> w(k);
  std::vector<double> f_prev(static_cast<std::size_t>(k) * k, 0.0);
  const double pair_offset =
      out.early_mean_offset * (static_cast<double>(k) * (k - 1) / 2.0);
  for (std::size_t rep = 0; rep < cfg.replicas; ++rep) {
    CounterRng rng(derive_key(cfg.seed, "feynman-kac", rep));
    for (auto& p : w) p = {0.0, 0.0, 0.0};
    double energy = pair_offset;
    double prev_t = 0.0;
    bool first = true;
    for (double cur_t : grid) {
      const double sdt = std::sqrt(cur_t - prev_t);
      for (auto& p : w)
        for (double& c : p) c += sdt * rng.normal();
      for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
          const double dx = w[i][0] - w[j][0];
          const double dy = w[i][1] - w[j][1];
          const double dz = w[i][2] - w[j][2];
          const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
          ++pair_evals;
          double fv;
          if (r < out.cap_radius) {
            ++cap_hits;
            fv = f_cap;
          } else {
            fv = model.phi_profile(r);
          }
          // trapezoid over [prev_t, cur_t]; the window below the first grid
          // point is already in the deterministic offset
          if (!first)
            energy += 0.5 * (f_prev[i * k + j] + fv) * (cur_t - prev_t);
          f_prev[i * k + j] = fv;
        }
      }
      prev_t = cur_t;
      first = false;
    }
    energies[rep] = energy;
  }
  out.cap_hit_fraction =
      pair_evals == 0
          ? 0.0
          : static_cast<double>(cap_hits) / static_cast<double>(pair_evals);
  out.estimate = estimate_moment_log(energies, k, cfg.seed);
  if (k == 1) {
    // empty pair sum; force the exact value in case a future edit breaks it
    out.estimate.log_mean = out.estimate.ci_low = out.estimate.ci_high = 0.0;
  }
  return out;
}

LyapunovFit lyapunov_fit(const std::vector<double>& times,
                         const std::vector<MomentEstimate>& estimates) {
  if (times.size() != estimates.size())
    throw std::invalid_argument("lyapunov_fit: size mismatch");
  if (times.size() < 3)
    throw std::invalid_argument("lyapunov_fit: need at least 3 time points");
  LyapunovFit fit;
  fit.k = estimates.front().k;
  const std::size_t n = times.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && estimates[i].log_mean < estimates[i - 1].log_mean)
      fit.nonmonotone = true;
    sx += times[i];
    sy += estimates[i].log_mean;
    sxx += times[i] * times[i];
    sxy += times[i] * estimates[i].log_mean;
  }
  const double dn = static_cast<double>(n);
  const double denom = dn * sxx - sx * sx;
  fit.slope = (dn * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / dn;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = estimates[i].log_mean - fit.intercept - fit.slope * times[i];
    ss += r * r;
  }
  if (n > 2)
    fit.slope_stderr = std::sqrt(ss / (dn - 2.0) / (sxx - sx * sx / dn));
  return fit;
}

namespace {

void finish_bands(IncrementTable& table) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  double lo4 = lo, hi4 = 0.0;
  for (const auto& row : table.rows) {
    if (row.lag <= 0.0) continue;
    lo = std::min(lo, row.law2);
    hi = std::max(hi, row.law2);
    lo4 = std::min(lo4, row.law4);
    hi4 = std::max(hi4, row.law4);
  }
  table.band2 = (lo > 0.0 && std::isfinite(lo)) ? hi / lo : 0.0;
  table.band4 = (lo4 > 0.0 && std::isfinite(lo4)) ? hi4 / lo4 : 0.0;
}

}  // namespace

IncrementTable increment_scan(const CorrelationModel& model,
                              const SolverConfig& config, IncrementMode mode,
                              const std::vector<std::array<int, 3>>& shifts,
                              std::size_t replicas) {
  if (mode == IncrementMode::kTemporal)
    throw std::invalid_argument(
        "increment_scan: temporal mode takes step lags; use "
        "increment_scan_temporal");
  if (shifts.empty() || replicas == 0)
    throw std::invalid_argument("increment_scan: empty scan");
  SolverConfig cfg = config;
  cfg.snapshot_times.clear();
  cfg.validate();
  const int n = cfg.lattice.n;
  const double h = cfg.lattice.spacing();
  const double alpha = model.alpha();

  IncrementTable table;
  table.mode = IncrementMode::kSpatial;
  table.rows.resize(shifts.size());
  std::vector<Welford> w2(shifts.size()), w4(shifts.size());

  SpdeSolver solver(model, cfg);
  for (std::size_t rep = 0; rep < replicas; ++rep) {
    Trajectory traj = solver.run(rep);
    const std::vector<double>& u = traj.snapshots.back().u;
    for (std::size_t s = 0; s < shifts.size(); ++s) {
      const auto& sh = shifts[s];
      double sum2 = 0.0, sum4 = 0.0;
      for (int i = 0; i < n; ++i) {
        const int i2 = (i + sh[0] % n + n) % n;
        for (int j = 0; j < n; ++j) {
          const int j2 = (j + sh[1] % n + n) % n;
          for (int l = 0; l < n; ++l) {
            const int l2 = (l + sh[2] % n + n) % n;
            const double d = u[(static_cast<std::size_t>(i2) * n + j2) * n + l2] -
                             u[(static_cast<std::size_t>(i) * n + j) * n + l];
            sum2 += d * d;
            sum4 += d * d * d * d;
          }
        }
      }
      const double sites = static_cast<double>(n) * n * n;
      w2[s].add(sum2 / sites);
      w4[s].add(sum4 / sites);
    }
  }
  for (std::size_t s = 0; s < shifts.size(); ++s) {
    IncrementRow& row = table.rows[s];
    const auto& sh = shifts[s];
    row.lag = h * std::sqrt(static_cast<double>(sh[0]) * sh[0] +
                            static_cast<double>(sh[1]) * sh[1] +
                            static_cast<double>(sh[2]) * sh[2]);
    row.m2 = w2[s].mean;
    row.m2_se = w2[s].se();
    row.m4 = w4[s].mean;
    row.m4_se = w4[s].se();
    if (row.lag > 0.0) {
      const double lg = log_plus(1.0 / row.lag);
      row.law2 = row.m2 * std::pow(lg, alpha - 1.0);
      row.law4 = row.m4 * std::pow(lg, 2.0 * (alpha - 1.0));
    }
  }
  finish_bands(table);
  return table;
}

IncrementTable increment_scan_temporal(const CorrelationModel& model,
                                       const SolverConfig& config,
                                       const std::vector<long>& step_lags,
                                       std::size_t replicas) {
  if (step_lags.empty() || replicas == 0)
    throw std::invalid_argument("increment_scan: empty scan");
  SolverConfig cfg = config;
  cfg.validate();
  const long total = cfg.steps();
  for (long lag : step_lags) {
    if (lag < 0 || lag >= total)
      throw std::invalid_argument(
          "increment_scan: temporal lag outside the run");
  }
  cfg.snapshot_times.clear();
  cfg.snapshot_times.push_back(cfg.t_end);
  for (long lag : step_lags)
    if (lag > 0)
      cfg.snapshot_times.push_back(cfg.t_end - static_cast<double>(lag) * cfg.dt);

  const int n = cfg.lattice.n;
  const double sites = static_cast<double>(n) * n * n;
  const double alpha = model.alpha();

  IncrementTable table;
  table.mode = IncrementMode::kTemporal;
  table.rows.resize(step_lags.size());
  std::vector<Welford> w2(step_lags.size()), w4(step_lags.size());

  // subtract the lattice average per snapshot: the constant mode feels no
  // damping and its random-walk variance would dominate every temporal lag
  auto centered = [&](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= sites;
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - mean;
    return out;
  };

  SpdeSolver solver(model, cfg);
  for (std::size_t rep = 0; rep < replicas; ++rep) {
    Trajectory traj = solver.run(rep);
    std::vector<double> final_c;
    for (const auto& snap : traj.snapshots)
      if (snap.step == total) final_c = centered(snap.u);
    for (std::size_t s = 0; s < step_lags.size(); ++s) {
      const long lag = step_lags[s];
      double sum2 = 0.0, sum4 = 0.0;
      if (lag > 0) {
        const long want = total - lag;
        const std::vector<double>* earlier = nullptr;
        for (const auto& snap : traj.snapshots)
          if (snap.step == want) earlier = &snap.u;
        if (earlier == nullptr)
          throw std::logic_error("increment_scan: missing snapshot");
        std::vector<double> ec = centered(*earlier);
        for (std::size_t i = 0; i < ec.size(); ++i) {
          const double d = final_c[i] - ec[i];
          sum2 += d * d;
          sum4 += d * d * d * d;
        }
      }
      w2[s].add(sum2 / sites);
      w4[s].add(sum4 / sites);
    }
  }
  for (std::size_t s = 0; s < step_lags.size(); ++s) {
    IncrementRow& row = table.rows[s];
    row.lag = static_cast<double>(step_lags[s]) * cfg.dt;
    row.m2 = w2[s].mean;
    row.m2_se = w2[s].se();
    row.m4 = w4[s].mean;
    row.m4_se = w4[s].se();
    if (row.lag > 0.0) {
      const double lg = log_plus(1.0 / row.lag);
      row.law2 = row.m2 * std::pow(lg, alpha - 1.0);
      row.law4 = row.m4 * std::pow(lg, 2.0 * (alpha - 1.0));
    }
  }
  finish_bands(table);
  return table;
}

std::size_t oscillation_full_count(double delta) {
  if (!(delta > 0.0) || delta > 1.0)
    throw std::invalid_argument("oscillation: delta must be in (0, 1]");
  const std::size_t m =
      static_cast<std::size_t>(std::floor(1.0 / std::sqrt(delta)));
  const std::size_t side = 2 * m + 1;
  return side * side * side;
}

OscillationScan oscillation_growth(const CorrelationModel& model,
                                   const SolverConfig& base,
                                   const std::vector<double>& deltas,
                                   std::size_t replicas, std::uint64_t seed,
                                   std::size_t budget) {
  if (deltas.empty() || replicas == 0)
    throw std::invalid_argument("oscillation: empty scan");
  AlphaParam(model.alpha()).require_field_range();
  SolverConfig cfg = base;
  cfg.coupled = true;
  cfg.seed = seed;
  cfg.snapshot_times.clear();
  cfg.validate();
  const int n = cfg.lattice.n;
  const double h = cfg.lattice.spacing();
  const double alpha = model.alpha();

  OscillationScan scan;
  scan.t = cfg.t_end;
  scan.replicas = replicas;
  scan.rows.resize(deltas.size());

  // per delta: the lattice offsets of the points y_i, built once
  struct PointSet {
    std::vector<std::array<int, 3>> offsets;
  };
  std::vector<PointSet> sets(deltas.size());
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    const double delta = deltas[d];
    OscillationRow& row = scan.rows[d];
    row.delta = delta;
    row.full_count = oscillation_full_count(delta);
    row.rho = std::pow(std::abs(std::log(delta)), 1.0 - alpha / 2.0);
    const long stride = std::lround(delta / h);
    if (stride < 1)
      throw std::invalid_argument(
          "oscillation: delta below the lattice spacing");
    const long m = static_cast<long>(std::floor(1.0 / std::sqrt(delta)));
    const long side = 2 * m + 1;
    long dims = 3;
    std::size_t count = static_cast<std::size_t>(side) * side * side;
    while (dims > 1 && count > budget) {
      --dims;
      count /= static_cast<std::size_t>(side);
      row.truncated = true;
    }
    auto& offs = sets[d].offsets;
    for (long i = -m; i <= m; ++i) {
      const long lo2 = dims >= 2 ? -m : 0, hi2 = dims >= 2 ? m : 0;
      for (long j = lo2; j <= hi2; ++j) {
        const long lo3 = dims >= 3 ? -m : 0, hi3 = dims >= 3 ? m : 0;
        for (long l = lo3; l <= hi3; ++l) {
          if (i == 0 && j == 0 && l == 0) continue;
          offs.push_back({static_cast<int>(((i * stride) % n + n) % n),
                          static_cast<int>(((j * stride) % n + n) % n),
                          static_cast<int>(((l * stride) % n + n) % n)});
        }
      }
    }
    row.used_count = offs.size();
  }

  std::vector<Welford> wu(deltas.size()), wz(deltas.size()), wd(deltas.size());
  SpdeSolver solver(model, cfg);
  for (std::size_t rep = 0; rep < replicas; ++rep) {
    Trajectory traj = solver.run(rep);
    const Snapshot& snap = traj.snapshots.back();
    const double ux = snap.u[0];  // base point x = origin site
    const double zx = snap.z[0];
    const double sig = cfg.sigma(ux);
    for (std::size_t d = 0; d < deltas.size(); ++d) {
      double mu = 0.0, mz = 0.0, md = 0.0;
      for (const auto& o : sets[d].offsets) {
        const std::size_t idx =
            (static_cast<std::size_t>(o[0]) * n + o[1]) * n + o[2];
        const double du = snap.u[idx] - ux;
        const double dz = snap.z[idx] - zx;
        mu = std::max(mu, std::abs(du));
        mz = std::max(mz, std::abs(dz));
        md = std::max(md, std::abs(du - sig * dz));
      }
      wu[d].add(mu);
      wz[d].add(mz);
      wd[d].add(md);
    }
  }
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    OscillationRow& row = scan.rows[d];
    row.u_max_mean = wu[d].mean;
    row.u_max_se = wu[d].se();
    row.z_max_mean = wz[d].mean;
    row.z_max_se = wz[d].se();
    row.d_max_mean = wd[d].mean;
    row.d_max_se = wd[d].se();
  }
  return scan;
}

}  // namespace rough
