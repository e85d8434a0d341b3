#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rough/levy_kernel.hpp"

namespace rough {

// Periodic lattice with n points per axis on a torus of side `box`.
// `slice_dim` selects where lattice statistics are gathered: 3 means the
// full grid, 2 restricts maxima and moments to the z=0 plane (memory
// relief for large n; the field itself is always synthesized in 3D).
struct LatticeSpec {
  int n = 8;
  double box = 1.0;
  int slice_dim = 3;

  LatticeSpec() = default;
  LatticeSpec(int n_, double box_ = 1.0, int slice_dim_ = 3);

  double spacing() const { return box / n; }
  std::size_t sites() const {
    auto m = static_cast<std::size_t>(n);
    return m * m * m;
  }
};

// Spectral density of the centered part of the linearized solution at a
// fixed time:
//
//   g_t(z) = (2 pi)^{-3} fhat(||z||) (1 - e^{-t ||z||^2}) / ||z||^2,
//
// radial, nonnegative, with the removable singularity at z = 0 filled by
// its limit t (2 pi)^{-3}.  Its total mass over R^3 is the pointwise
// variance of the field.
class ZSpectralDensity {
 public:
  ZSpectralDensity(const CorrelationModel& model, double t);

  double operator()(double z_norm) const;
  double time() const { return t_; }

 private:
  const CorrelationModel* model_;
  double t_;
};

enum class FieldGen { kSpectral, kDense, kCirculant };

struct FieldSample {
  LatticeSpec lattice;
  std::vector<double> values;  // row-major, z fastest
  FieldGen gen = FieldGen::kSpectral;
  std::uint64_t seed = 0;

  double at(int i, int j, int k) const {
    auto n = static_cast<std::size_t>(lattice.n);
    return values[(static_cast<std::size_t>(i) * n + j) * n + k];
  }
};

// Evaluates the canonical metric d(x,x') = sqrt(E|Z(t,x) - Z(t,x')|^2) of
// the stationary field, together with its variance and covariance.  All
// quantities reduce to radial integrals of the spectral density; the
// squared distance is computed directly from the subtracted form
//
//   d^2(h) = (1/pi^2) int_0^inf r^2 fhat(r) (1-e^{-t r^2})/r^2
//                                 (1 - sinc(r h)) dr,
//
// which avoids the catastrophic cancellation of Var - Cov at small
// separations.  The integral has a slowly decaying tail (the integrand
// falls off like 1/(r log^alpha r)); it is handled by an exp-exp
// substitution plus an alternating half-period sum for the oscillatory
// part.
class CanonicalMetric {
 public:
  CanonicalMetric(const CorrelationModel& model, double t);

  double time() const { return t_; }
  /// Var Z(t,x), the full spectral mass of g_t.
  double variance() const { return variance_; }

  /// Squared distance as a function of the Euclidean separation.
  double squared_distance(double separation) const;

  double distance(const Vec3& x, const Vec3& y) const;
  double covariance(const Vec3& x, const Vec3& y) const;

 private:
  const CorrelationModel* model_;
  double t_;
  double variance_;
};

/// Cov(Z(t,x), Z(t,x')); stationary, depends on x - x' only.
double covariance_pair(const CorrelationModel& model, double t, const Vec3& x,
                       const Vec3& y);

/// Canonical metric distance between two points at time t.
double canonical_distance(const CorrelationModel& model, double t,
                          const Vec3& x, const Vec3& y);

// Stationary Gaussian synthesis on the periodic lattice.  The discrete
// spectral target places weight w_k = g_t(2 pi k~/L) (2 pi / L)^3 on each
// lattice frequency (k~ the aliased integer vector with components in
// [-n/2, n/2]), so the field drawn has covariance
//
//   Cov(Delta) = sum_k w_k cos(2 pi k . Delta / n)
//
// exactly.  That discrete target, not the R^3 kernel, is the contract the
// oracle tests check against; the truncation bias relative to R^3 is
// reported by aliasing_fraction().  Synthesis filters lattice white noise
// through sqrt(w_k / n^3) in Fourier space, O(n^3 log n) per draw.
class SpectralSampler {
 public:
  SpectralSampler(const CorrelationModel& model, const LatticeSpec& spec,
                  double t, double aliasing_warn_fraction = 0.5);
  ~SpectralSampler();
  SpectralSampler(const SpectralSampler&) = delete;
  SpectralSampler& operator=(const SpectralSampler&) = delete;

  /// Deterministic per (seed, replica); distinct replicas are independent
  /// streams of the same seed.
  FieldSample draw(std::uint64_t seed, std::uint64_t replica = 0);

  /// Pointwise variance of the discrete target, sum_k w_k.
  double lattice_variance() const;
  /// Exact covariance of the discrete target at an integer lag.
  double covariance_lag(int di, int dj, int dk) const;

  /// Spectral mass of g_t beyond the Nyquist sphere ||z|| = pi n / L,
  /// as a fraction of the full mass.  The rough kernels decay only
  /// logarithmically in frequency, so this is not small; it quantifies
  /// the documented gap between the discrete target and the R^3 field.
  double aliasing_fraction() const { return aliasing_fraction_; }
  bool aliasing_flagged() const { return aliasing_flagged_; }

  const LatticeSpec& lattice() const { return spec_; }
  double time() const { return t_; }

 private:
  LatticeSpec spec_;
  double t_;
  double lattice_variance_ = 0.0;
  double aliasing_fraction_ = 0.0;
  bool aliasing_flagged_ = false;
  std::vector<double> sqrt_weights_;  // half spectrum, sqrt(w_k / n^3)
  std::vector<double> cov_table_;     // n^3 lags, z fastest
  void* real_buf_ = nullptr;
  void* cplx_buf_ = nullptr;
  void* plan_forward_ = nullptr;
  void* plan_backward_ = nullptr;
};

// Samples the stationary R^3 field at time t restricted to the lattice
// {j/n : 0 <= j < n}^3, with the exact continuum covariance, via circulant
// embedding on a torus of 2n points per axis.  This differs from
// SpectralSampler, whose target is the periodized and Nyquist-truncated
// torus kernel: the truncation leaves the torus field much smoother than
// the continuum one at lags near the grid spacing, and the periodization
// adds a constant mode of variance t (box 1) that the continuum field does
// not have.  The embedded covariance taps come from the canonical metric
// (Var - d^2/2), radially interpolated; the embedding spectrum can carry a
// small negative part, which is clipped to zero and reported.  One complex
// FFT on (2n)^3 points yields two independent draws (consecutive replica
// indices), so amortized cost is half an FFT per field.
class CirculantSampler {
 public:
  CirculantSampler(const CorrelationModel& model, int n, double t,
                   double box = 1.0);
  ~CirculantSampler();
  CirculantSampler(const CirculantSampler&) = delete;
  CirculantSampler& operator=(const CirculantSampler&) = delete;

  int n() const { return n_; }
  double time() const { return t_; }
  /// Continuum Var Z(t,x).
  double variance() const { return variance_; }
  /// Clipped share of the absolute spectral mass of the embedding.
  double clipped_fraction() const { return clipped_fraction_; }

  FieldSample draw(std::uint64_t seed, std::uint64_t replica);

  /// Exact covariance of the draws (the clipped-spectrum target) at an
  /// integer lag, |d*| <= n per axis.  Tabulated only for n <= 32; throws
  /// otherwise.
  double covariance_lag(int di, int dj, int dk) const;

 private:
  int n_ = 0;
  double t_ = 0.0;
  double box_ = 1.0;
  double variance_ = 0.0;
  double clipped_fraction_ = 0.0;
  std::vector<double> amp_;       // sqrt(spectrum / M^3) on the (2n)^3 torus
  std::vector<double> realized_cov_;  // [0, n]^3 corner taps, n <= 32 only
  void* cplx_buf_ = nullptr;      // fftw_complex[(2n)^3]
  void* plan_backward_ = nullptr;
  bool cache_valid_ = false;      // buffer holds the pair for cache_*
  std::uint64_t cache_seed_ = 0;
  std::uint64_t cache_pair_ = 0;
};

struct MaxScanRow {
  int n = 0;
  double mean_max = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  // Prop-style small-max event {max <= (log n)^{1-alpha/2} / K}:
  double tail_threshold = 0.0;
  double tail_frequency = 0.0;
};

struct MaxScanResult {
  std::vector<MaxScanRow> rows;
  // least-squares slope of log E max against log log n (rows with n >= 4)
  double fitted_exponent = 0.0;
  double exponent_stderr = 0.0;
  double tail_constant = 0.0;
  double lattice_variance = 0.0;  // discrete variance of the sampling grid
  int replicas = 0;
  bool underpowered = false;  // replica budget too thin for the CIs
};

// Monte-Carlo scan of E max |Z(t, j/n)| over nested sublattices of the
// unit cube.  All requested n share one synthesis lattice at max(ns), so
// the maxima are over genuinely nested point sets replica by replica.
// Each n must be 1 or a power of two.
MaxScanResult lattice_max_scan(const CorrelationModel& model, double t,
                               std::vector<int> ns, int replicas,
                               std::uint64_t seed, double tail_constant = 3.0,
                               int slice_dim = 3);

// Same nested-maximum scan against the exact continuum covariance, using
// CirculantSampler at max(ns).  This is the right target for the growth
// law of E max |Z(t, j/N)|: the periodized torus field of lattice_max_scan
// carries the artifacts described on CirculantSampler, which swamp the
// growth in N.  All ns must be powers of two (>= 2 here, since the scan
// shares one synthesis grid).
MaxScanResult continuum_max_scan(const CorrelationModel& model, double t,
                                 std::vector<int> ns, int replicas,
                                 std::uint64_t seed,
                                 double tail_constant = 3.0,
                                 double box = 1.0);

struct DudleyEstimate {
  double entropy_integral = 0.0;
  double diameter = 0.0;       // in the canonical metric
  std::size_t points = 0;
  std::size_t centers = 0;     // greedy centers actually placed
};

// Entropy integral int_0^diam sqrt(log+ N(eps)) d eps for a finite point
// set, with covering numbers from farthest-point greedy covering in the
// canonical metric (a 2-approximation; the two-sided expected-maximum
// bound absorbs constants anyway).  If the center budget runs out before
// the minimum separation is reached, the remaining sliver is bounded by
// the trivial covering N <= |A|.
DudleyEstimate dudley_bound_estimate(const CorrelationModel& model, double t,
                                     const std::vector<Vec3>& points,
                                     std::size_t max_centers = 8192);

}  // namespace rough
