#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rough/levy_kernel.hpp"
#include "rough/spde.hpp"

namespace rough {

// Monte-Carlo moment estimate kept in the log domain. Exponential moments of
// rough fields are variance-hostile: a single replica can carry most of the
// empirical mean. The max-weight share makes that visible instead of letting
// a silently broken average through.
struct MomentEstimate {
  int k = 1;
  double log_mean = 0.0;  // log of the empirical mean of |X|^k
  double ci_low = 0.0;    // bootstrap interval on log_mean
  double ci_high = 0.0;
  std::size_t replicas = 0;
  double max_weight_share = 0.0;  // largest single-sample weight
  bool unreliable = false;        // share above 20%
  bool all_zero = false;          // every sample was 0; log_mean is -inf
};

// Estimate E|X|^k from samples. Accumulation, bootstrap, and the returned
// interval all live in log space so energies of thousands of nats cannot
// overflow. Permutation invariant in the samples.
MomentEstimate estimate_moment(const std::vector<double>& samples, int k,
                               std::uint64_t bootstrap_seed = 0,
                               int bootstrap_rounds = 400);

// Same estimator when the samples are already logs of nonnegative values
// (log |X|^k per replica), as produced by exponential-functional Monte Carlo.
MomentEstimate estimate_moment_log(const std::vector<double>& log_samples,
                                   int k, std::uint64_t bootstrap_seed = 0,
                                   int bootstrap_rounds = 400);

struct FeynmanKacConfig {
  int k = 2;               // particle count; k*(k-1)/2 pair energies
  double t = 0.1;          // horizon
  double bm_dt = 1e-3;     // Brownian step
  std::size_t replicas = 2000;
  std::uint64_t seed = 0;
  double cap_radius = 0.0;  // 0: use the kernel's trusted radius
  // Pairs start at zero separation and the expected pair energy density has
  // an integrable log singularity at s = 0 whose mass decays so slowly that
  // no sampled grid reaches it. Times in [early_cutoff, bm_dt] are sampled
  // on a geometric grid; the window below early_cutoff enters through its
  // exact mean, the time-integrated heat convolution.
  double early_cutoff = 1e-8;

  void validate() const;  // throws std::invalid_argument
};

struct FeynmanKacResult {
  MomentEstimate estimate;
  double cap_radius = 0.0;
  // fraction of pair evaluations that landed inside the cap; large values
  // mean the near-collision profile, not the sampled kernel, drives the
  // number
  double cap_hit_fraction = 0.0;
  // deterministic per-pair energy mean of the unresolved early window
  double early_mean_offset = 0.0;
};

// Particle estimate of E|u(t,x)|^k for the multiplicative equation: k
// independent Brownian motions, pairwise kernel energies integrated along
// the paths, exponential moment taken in log domain. k = 1 returns exactly 1.
FeynmanKacResult feynman_kac_moment(const CorrelationModel& model,
                                    const FeynmanKacConfig& cfg);

struct LyapunovFit {
  int k = 0;
  double slope = 0.0;  // d/dt of log E|u(t)|^k, least squares
  double intercept = 0.0;
  double slope_stderr = 0.0;
  bool nonmonotone = false;  // estimates were not increasing in t
};

// Least-squares growth rate of log-moment estimates against time.
// Desk-scale horizons cannot reach the asymptotic growth regime; treat the
// output as a diagnostic trend, not a measured Lyapunov exponent.
LyapunovFit lyapunov_fit(const std::vector<double>& times,
                         const std::vector<MomentEstimate>& estimates);

enum class IncrementMode { kSpatial, kTemporal };

struct IncrementRow {
  double lag = 0.0;  // physical distance or time difference
  double m2 = 0.0, m2_se = 0.0;
  double m4 = 0.0, m4_se = 0.0;
  double law2 = 0.0;  // m2 * [log+(1/lag)]^{alpha-1}
  double law4 = 0.0;  // m4 * [log+(1/lag)]^{2(alpha-1)}
};

struct IncrementTable {
  IncrementMode mode = IncrementMode::kSpatial;
  std::vector<IncrementRow> rows;
  double band2 = 0.0;  // max/min of law2 over rows with positive lag
  double band4 = 0.0;
};

// Spatial scan: E|u(t,x+eps)-u(t,x)|^k at the final time over lattice
// shifts. Temporal scan: E|u(T)-u(T-h)|^k at a fixed site for step lags,
// computed on the mean-removed field; the lattice average performs a random
// walk whose variance grows linearly in t (the constant mode feels no heat
// damping) and would otherwise swamp every temporal increment.
// Zero lags are allowed and produce exact zeros; lags below the lattice
// resolution are rejected.
IncrementTable increment_scan(const CorrelationModel& model,
                              const SolverConfig& config, IncrementMode mode,
                              const std::vector<std::array<int, 3>>& shifts,
                              std::size_t replicas);
IncrementTable increment_scan_temporal(const CorrelationModel& model,
                                       const SolverConfig& config,
                                       const std::vector<long>& step_lags,
                                       std::size_t replicas);

// Refining lattice around a base point: y_i = x + i*delta for integer
// vectors i with |i_j| <= floor(1/sqrt(delta)).
std::size_t oscillation_full_count(double delta);

struct OscillationRow {
  double delta = 0.0;
  std::size_t full_count = 0;  // (2 floor(1/sqrt(delta)) + 1)^3
  std::size_t used_count = 0;  // after budget truncation
  bool truncated = false;      // reduced to a slice (and possibly a line)
  double rho = 0.0;            // |log delta|^{1 - alpha/2}
  double u_max_mean = 0.0, u_max_se = 0.0;
  double z_max_mean = 0.0, z_max_se = 0.0;
  double d_max_mean = 0.0, d_max_se = 0.0;
};

struct OscillationScan {
  double t = 0.0;
  std::size_t replicas = 0;
  std::vector<OscillationRow> rows;
};

// Coupled-run oscillation statistics: per replica and per delta, the max
// over the refining lattice of |u(t,y_i)-u(t,x)|, of |Z(t,y_i)-Z(t,x)|, and
// of the linearization residual
//   D(x,y_i) = u(y_i)-u(x) - sigma(u(x)) [Z(y_i)-Z(x)].
// Both fields come from the same coupled trajectory so they share the
// lattice discretization bias. Deltas are snapped to lattice multiples;
// point sets over the budget collapse to the i3 = 0 slice, then to the
// i2 = i3 = 0 line, and the truncation is recorded.
OscillationScan oscillation_growth(const CorrelationModel& model,
                                   const SolverConfig& base,
                                   const std::vector<double>& deltas,
                                   std::size_t replicas, std::uint64_t seed,
                                   std::size_t budget = 4096);

}  // namespace rough
