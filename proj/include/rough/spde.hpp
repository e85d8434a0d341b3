#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rough/gaussian_field.hpp"
#include "rough/levy_kernel.hpp"

namespace rough {

enum class SigmaKind { kConstant, kClippedIdentity, kScaledTanh, kIdentity };

// Multiplicative nonlinearity sigma(u).  All kinds are globally Lipschitz;
// the bounded kinds report sigma_0 = sup|sigma| for the moment bounds that
// need it.
struct SigmaSpec {
  SigmaKind kind = SigmaKind::kConstant;
  double param = 1.0;  // c, clip bound M, or tanh scale a

  static SigmaSpec constant(double c) { return {SigmaKind::kConstant, c}; }
  static SigmaSpec clipped_identity(double bound);
  static SigmaSpec scaled_tanh(double scale);
  static SigmaSpec identity() { return {SigmaKind::kIdentity, 0.0}; }

  /// Accepts "const:c", "clip:M", "tanh:a", "id".
  static SigmaSpec parse(const std::string& text);
  std::string describe() const;

  double operator()(double z) const;
  bool bounded() const { return kind != SigmaKind::kIdentity; }
  /// sup |sigma|; throws for the unbounded kind.
  double bound() const;
  double lipschitz() const;
};

struct SolverConfig {
  LatticeSpec lattice{64, 1.0};
  double dt = 1e-4;
  double t_end = 0.25;
  SigmaSpec sigma = SigmaSpec::constant(1.0);
  std::uint64_t seed = 1;
  bool coupled = false;
  std::vector<double> snapshot_times;  // empty: final state only

  void validate() const;  // throws std::invalid_argument
  /// Advisory only: the linear flow is integrated exactly, so this guards
  /// just the explicit treatment of the noise term.
  bool dt_within_stability_guard() const {
    double h = lattice.spacing();
    return dt <= h * h / 2.0;
  }
  std::int64_t steps() const;
};

struct Snapshot {
  double t = 0.0;
  std::int64_t step = 0;
  std::vector<double> u;
  std::vector<double> z;  // empty unless the run is coupled
};

struct Trajectory {
  SolverConfig config;
  std::uint64_t replica = 0;
  std::uint64_t noise_key = 0;  // stream key; with the step index it
                                // reproduces any increment of the run
  std::vector<Snapshot> snapshots;
};

// Exponential-Euler integrator for the mild equation on the periodic
// lattice:
//
//   u_{n+1} = p_dt * (u_n + sigma(u_n) xi_n),
//
// with the heat semigroup applied exactly in spectral space
// (multiplication by e^{-||kappa||^2 dt / 2}) and xi_n the f-correlated
// spatial noise increment carrying one step of the time integral.  In
// coupled mode a linearized copy with sigma == 1 evolves under the very
// same increments, which makes the sigma == constant(1) identity u == Z
// hold bitwise.
class SpdeSolver {
 public:
  SpdeSolver(const CorrelationModel& model, SolverConfig config);
  ~SpdeSolver();
  SpdeSolver(const SpdeSolver&) = delete;
  SpdeSolver& operator=(const SpdeSolver&) = delete;

  Trajectory run(std::uint64_t replica = 0);

  /// One f-correlated noise increment, scaled by sqrt(dt); deterministic
  /// per (key, step) and independent across steps.
  FieldSample noise_increment(std::uint64_t key, std::uint64_t step);

  /// In-place exponential-Euler step of an arbitrary state under a given
  /// increment.  Throws std::runtime_error on non-finite values (blowup).
  void step(std::vector<double>& u, const std::vector<double>& noise,
            const SigmaSpec& sigma);

  /// Per-site variance of one increment: dt times the discrete spectral
  /// mass of fhat on the lattice frequencies.
  double noise_site_variance() const { return noise_site_variance_; }
  /// Exact spatial covariance of one increment at an integer lag.
  double noise_covariance_lag(int di, int dj, int dk) const;

  /// Fraction of the Dalang-weighted spectral mass int fhat/(1+||z||^2)
  /// beyond the Nyquist sphere.  The raw noise spectrum has infinite mass
  /// (the lattice underresolves the kernel singularity), so the resolvent
  /// weighting is what admits a meaningful truncation fraction.
  double truncation_fraction() const { return truncation_fraction_; }

  const SolverConfig& config() const { return config_; }

 private:
  SolverConfig config_;
  double noise_site_variance_ = 0.0;
  double truncation_fraction_ = 0.0;
  std::vector<double> noise_sqrt_weights_;  // half spectrum, incl. sqrt(dt)
  std::vector<double> heat_multiplier_;     // half spectrum, incl. 1/n^3
  std::vector<double> noise_cov_table_;
  void* real_buf_ = nullptr;
  void* cplx_buf_ = nullptr;
  void* plan_forward_ = nullptr;
  void* plan_backward_ = nullptr;

  void fill_noise(std::vector<double>& out, std::uint64_t key,
                  std::uint64_t step);
};

struct ResidualRow {
  std::array<int, 3> shift{};  // in lattice units
  double eps_norm = 0.0;       // physical shift length
  double grad_u_sq = 0.0;      // E |u(x+eps) - u(x)|^2
  double grad_u_se = 0.0;
  double linear_sq = 0.0;      // E |sigma(u(x)) (Z(x+eps) - Z(x))|^2
  double linear_se = 0.0;
  double residual_sq = 0.0;    // E |grad u - sigma(u) grad Z|^2
  double residual_se = 0.0;
  double ratio = 0.0;          // residual_sq / grad_u_sq
};

struct ResidualTable {
  double t = 0.0;
  int replicas = 0;
  std::vector<ResidualRow> rows;
};

// Local-linearization experiment: coupled (u, Z) runs to t_end, then
// spatial increments of u compared against sigma(u) times the matching
// increments of Z, averaged over sites and replicas.  Shifts are lattice
// vectors; the zero shift is rejected.
ResidualTable linearization_residual(const CorrelationModel& model,
                                     SolverConfig config,
                                     const std::vector<std::array<int, 3>>& shifts,
                                     int replicas);

}  // namespace rough
