#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "rough/quadrature.hpp"
#include "rough/rng.hpp"

namespace rough {

using Vec3 = std::array<double, 3>;

inline double norm3(const Vec3& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

/// Roughness parameter.  The kernel family is defined for alpha > 1; the
/// Gaussian-field and solver experiments additionally require alpha < 2.
struct AlphaParam {
  double alpha;
  explicit AlphaParam(double a);
  void require_field_range() const;  // throws unless 1 < alpha < 2
};

/// Upper end of the jump-size support, exp(-1).
inline constexpr double kJumpSupportMax = 0.36787944117144232160;

/// Levy density r -> (log(1/r))^alpha * r^(-3/2) on (0, exp(-1)).
class LevyDensity {
 public:
  explicit LevyDensity(AlphaParam alpha) : alpha_(alpha.alpha) {}
  double operator()(double r) const;
  /// nu[a, b) by quadrature, 0 <= a < b <= exp(-1).
  double mass(double a, double b) const;
  /// int_a^b r nu(dr).
  double mean(double a, double b) const;
  /// int_a^b r^2 nu(dr).
  double second_moment(double a, double b) const;
  /// int (1 ^ r) nu(dr); finite-variation diagnostic.
  double finite_variation_integral() const;
  double alpha() const { return alpha_; }

 private:
  double alpha_;
};

/// Laplace exponent Phi(lambda) = int (1 - e^{-lambda t}) nu(dt).
/// The direct evaluation substitutes t = u^2 to tame the endpoint
/// singularity; very large lambda switches to the scaled representation
/// Phi(lambda) = sqrt(lambda) * int (1-e^{-s}) (log(lambda/s))^alpha s^{-3/2} ds,
/// which stays accurate up to (and in log form far beyond) overflow.
class LaplaceExponent {
 public:
  explicit LaplaceExponent(AlphaParam alpha, QuadOptions quad = {});
  double operator()(double lambda) const;
  /// log Phi(e^L), usable for L far outside double range of lambda.
  double log_value(double log_lambda) const;
  double alpha() const { return alpha_; }

 private:
  double direct(double lambda) const;
  double scaled_integral(double log_lambda) const;  // Phi / sqrt(lambda)
  double alpha_;
  QuadOptions quad_;
};

enum class PotentialBackend { kLaplaceInversion, kMonteCarlo };

/// Gaver-Stehfest inversion of the Laplace transform of the CDF of U,
/// (LU)(lambda)/lambda = 1 / (lambda (1 + Phi(lambda))).
class GaverStehfest {
 public:
  using Exponent = std::function<double(double)>;

  explicit GaverStehfest(int order = 14);
  /// U[0, s).  Sets *unstable if the order-(n) and order-(n-2) results
  /// disagree beyond the tolerance.
  double cdf(const Exponent& phi, double s, bool* unstable = nullptr) const;
  int order() const { return order_; }

 private:
  double eval(const Exponent& phi, double s, int order) const;
  int order_;
  std::vector<double> coeffs_;        // order_
  std::vector<double> coeffs_check_;  // order_ - 2
};

/// Draws T_S for S ~ Exp(1) independent of the subordinator T.  Jumps at
/// least delta are simulated exactly (dyadic size layers; layers with
/// large Poisson counts use a CLT approximation of the layer sum, which
/// only ever triggers when the count itself is CLT-sized); jumps below
/// delta are replaced by their compensating drift.
class SubordinatorSampler {
 public:
  explicit SubordinatorSampler(AlphaParam alpha, double delta = 1e-8);
  double draw(CounterRng& rng) const;
  double small_jump_drift() const { return drift_; }
  double total_jump_rate() const;
  double alpha() const { return alpha_; }

 private:
  struct Layer {
    double lo, hi;
    double rate;        // nu[lo, hi)
    double mean_jump;   // conditional mean
    double var_jump;    // conditional variance
  };
  double draw_jump(CounterRng& rng, const Layer& layer) const;
  double alpha_;
  double delta_;
  double drift_;
  std::vector<Layer> layers_;
};

struct PotentialGrid {
  double s_min = 1e-12;
  double s_max = 1e3;
  int points = 512;
};

/// Discretized 1-potential measure U on a logarithmic grid.
class PotentialMeasure {
 public:
  using GridSpec = PotentialGrid;

  static PotentialMeasure build_inversion(const LaplaceExponent& phi,
                                          const GridSpec& grid = {},
                                          int gs_order = 14);
  static PotentialMeasure build_monte_carlo(const SubordinatorSampler& sampler,
                                            std::size_t paths,
                                            std::uint64_t seed,
                                            const GridSpec& grid = {});

  /// U[0, eps), log-interpolated on the grid (sqrt-scaled below s_min).
  double cdf(double eps) const;
  double mass_tail() const { return mass_tail_; }
  PotentialBackend backend() const { return backend_; }
  bool inversion_flagged_unstable() const { return unstable_; }
  /// Largest U[x-r, x+r) / U[0, r) over a deterministic sample of (x, r);
  /// weak unimodality asserts this stays at or below 4.
  double weak_unimodality_ratio() const;

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& cdf_values() const { return cdf_values_; }

 private:
  PotentialMeasure() = default;
  std::vector<double> breakpoints_;  // increasing, log spaced
  std::vector<double> cdf_values_;   // U[0, s_i), nondecreasing, <= 1
  double mass_tail_ = 0.0;
  double log_power_ = 0.0;  // exponent of the log factor in U[0, eps)
  PotentialBackend backend_ = PotentialBackend::kLaplaceInversion;
  bool unstable_ = false;
};

/// Heat kernel p_t(x) in R^3, radial form.
double heat_kernel(double t, double r);

/// Admissibility probe.  Accepts raw alpha (including values at or below
/// 1, where the integral diverges) so the checker can flag inadmissible
/// kernels that AlphaParam would reject outright.  The spectral integral
/// converges iff its radial integrand decays faster than 1/log r per
/// log-octave; the probe measures that decay exponent directly at two
/// well-separated log-frequencies and also reports the cutoff-doubling
/// increments of the truncated integral.
struct AdmissibilityReport {
  bool admissible;
  double tail_decay_exponent;  // converges iff > 1
  double last_rel_increment;
  std::vector<double> values;  // at cutoff, 2*cutoff, 4*cutoff, ...
};
AdmissibilityReport dalang_admissibility(double alpha_raw,
                                         double base_cutoff = 1e4,
                                         int doublings = 3);

struct ModelOptions {
  QuadOptions quad;                       // Phi quadrature
  PotentialMeasure::GridSpec grid;        // U grid
  int gs_order = 14;
  std::size_t mc_paths = 100000;          // MC backend path budget
  std::uint64_t mc_seed = 2026;
  double subordinator_delta = 1e-8;
};

/// Owns alpha together with the Phi / U / f / fhat evaluators.
class CorrelationModel {
 public:
  explicit CorrelationModel(AlphaParam alpha, ModelOptions opts = {});
  ~CorrelationModel();
  CorrelationModel(CorrelationModel&&) noexcept;
  CorrelationModel& operator=(CorrelationModel&&) noexcept;

  double alpha() const { return alpha_.alpha; }
  const LaplaceExponent& laplace_exponent() const { return phi_; }

  double phi(double lambda) const { return phi_(lambda); }
  double log_phi(double log_lambda) const { return phi_.log_value(log_lambda); }

  /// fhat(z) = 1 / (1 + Phi(||z||^2 / 2)); exact composition.
  double fhat(double z_norm) const;
  /// Same quantity in log form.  Backed by a one-time spline of log Phi
  /// (absolute accuracy ~1e-8) so the integral evaluators, which hit it
  /// millions of times in nested quadrature, stay fast; fhat() itself
  /// composes with the exact quadrature.
  double log_fhat(double log_z_norm) const;

  /// f(x) = int p_s(x) U(ds) against the discretized U.  Throws
  /// std::domain_error below the grid's trusted radius.
  double f_eval(const Vec3& x) const { return phi_profile(norm3(x)); }
  double phi_profile(double r) const;
  double trusted_radius() const;

  /// int_{||z|| <= cutoff} fhat(z) / (1 + ||z||^2) dz.
  double dalang_integral(double cutoff) const;

  /// (p_{2t} * f)(0) in Fourier form.
  double heat_convolution_at_zero(double t) const;
  double log_heat_convolution_at_zero(double log_t) const;

  /// (R_lambda f)(0) = int_0^inf (p_s * f)(0) e^{-lambda s} ds.
  double resolvent_at_zero(double lambda) const;

  const PotentialMeasure& potential(
      PotentialBackend backend = PotentialBackend::kLaplaceInversion) const;
  const SubordinatorSampler& subordinator() const { return sampler_; }
  double potential_cdf(double eps, PotentialBackend backend) const;

  const ModelOptions& options() const { return opts_; }

 private:
  AlphaParam alpha_;
  ModelOptions opts_;
  LaplaceExponent phi_;
  SubordinatorSampler sampler_;
  double small_lambda_slope_;  // int t nu(dt), the lambda -> 0 slope of Phi
  mutable std::unique_ptr<PotentialMeasure> inversion_;
  mutable std::unique_ptr<PotentialMeasure> monte_carlo_;

  // Spline of log Phi vs L = log lambda: a dense uniform grid through the
  // transition region, a coarser one to L = 5000, and beyond that a grid
  // in log L for the residual against the square-root-log asymptotic.
  struct PhiSpline;
  const PhiSpline& phi_spline() const;
  double log_phi_cached(double L) const;
  mutable std::unique_ptr<PhiSpline> spline_;
};

}  // namespace rough
