#include "rough/spde.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "rough/quadrature.hpp"
#include "rough/rng.hpp"

namespace rough {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Radial integrals of fhat with the resolvent weight r^2/(1+r^2); same
// exp-exp tail treatment as the field-variance integrals.
double dalang_mass_head(const CorrelationModel& m, double r_lo, double r_hi) {
  auto f = [&m](double w) {
    double r = std::exp(w);
    return r * std::exp(m.log_fhat(w)) * (r * r / (1.0 + r * r));
  };
  return integrate_or_throw(f, std::log(r_lo), std::log(r_hi),
                            {1e-8, 0.0, 4000});
}

double dalang_mass_tail(const CorrelationModel& m, double r_lo) {
  const double y_hi = 31.0;
  auto f = [&m](double y) {
    double w = std::exp(y);
    double e2w = 2.0 * w > 700.0 ? 0.0 : std::exp(-2.0 * w);
    return std::exp(y + w + m.log_fhat(w)) / (1.0 + e2w);
  };
  double body =
      integrate_or_throw(f, std::log(std::log(r_lo)), y_hi, {1e-8, 0.0, 2000});
  return body + f(y_hi) / (m.alpha() - 1.0);
}

}  // namespace

SigmaSpec SigmaSpec::clipped_identity(double bound) {
  if (!(bound > 0.0)) {
    throw std::invalid_argument("SigmaSpec: clip bound must be positive");
  }
  return {SigmaKind::kClippedIdentity, bound};
}

SigmaSpec SigmaSpec::scaled_tanh(double scale) {
  if (!(scale > 0.0)) {
    throw std::invalid_argument("SigmaSpec: tanh scale must be positive");
  }
  return {SigmaKind::kScaledTanh, scale};
}

SigmaSpec SigmaSpec::parse(const std::string& text) {
  if (text == "id") return identity();
  auto colon = text.find(':');
  if (colon != std::string::npos) {
    std::string head = text.substr(0, colon);
    double value;
    try {
      value = std::stod(text.substr(colon + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("SigmaSpec: bad numeric value in '" + text +
                                  "'");
    }
    if (head == "const") return constant(value);
    if (head == "clip") return clipped_identity(value);
    if (head == "tanh") return scaled_tanh(value);
  }
  throw std::invalid_argument(
      "SigmaSpec: expected const:c, clip:M, tanh:a, or id; got '" + text +
      "'");
}

std::string SigmaSpec::describe() const {
  switch (kind) {
    case SigmaKind::kConstant:
      return "const:" + std::to_string(param);
    case SigmaKind::kClippedIdentity:
      return "clip:" + std::to_string(param);
    case SigmaKind::kScaledTanh:
      return "tanh:" + std::to_string(param);
    case SigmaKind::kIdentity:
      return "id";
  }
  return "?";
}

double SigmaSpec::operator()(double z) const {
  switch (kind) {
    case SigmaKind::kConstant:
      return param;
    case SigmaKind::kClippedIdentity:
      return std::clamp(z, -param, param);
    case SigmaKind::kScaledTanh:
      return param * std::tanh(z / param);
    case SigmaKind::kIdentity:
      return z;
  }
  return 0.0;
}

double SigmaSpec::bound() const {
  switch (kind) {
    case SigmaKind::kConstant:
      return std::abs(param);
    case SigmaKind::kClippedIdentity:
    case SigmaKind::kScaledTanh:
      return param;
    case SigmaKind::kIdentity:
      throw std::domain_error("SigmaSpec: identity kind is unbounded");
  }
  return 0.0;
}

double SigmaSpec::lipschitz() const {
  return kind == SigmaKind::kConstant ? 0.0 : 1.0;
}

void SolverConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("SolverConfig: dt must be > 0");
  if (!(t_end >= 0.0)) {
    throw std::invalid_argument("SolverConfig: t_end must be >= 0");
  }
  for (double t : snapshot_times) {
    if (t < 0.0 || t > t_end * (1.0 + 1e-12)) {
      throw std::invalid_argument(
          "SolverConfig: snapshot times must lie in [0, t_end]");
    }
  }
}

std::int64_t SolverConfig::steps() const {
  return std::llround(t_end / dt);
}

SpdeSolver::SpdeSolver(const CorrelationModel& model, SolverConfig config)
    : config_(std::move(config)) {
  config_.validate();
  AlphaParam(model.alpha()).require_field_range();

  const int n = config_.lattice.n;
  const double box = config_.lattice.box;
  const std::size_t half =
      static_cast<std::size_t>(n) * n * (n / 2 + 1);
  const double n3 = static_cast<double>(config_.lattice.sites());
  const double cell = std::pow(2.0 * kPi / box, 3.0);
  const double inv_2pi3 = 1.0 / 248.05021344239856;

  noise_sqrt_weights_.resize(half);
  heat_multiplier_.resize(half);
  std::unordered_map<long, double> shell;
  double total = 0.0;
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i) {
    long ki = i <= n / 2 ? i : i - n;
    for (int j = 0; j < n; ++j) {
      long kj = j <= n / 2 ? j : j - n;
      for (int k = 0; k < n / 2 + 1; ++k, ++idx) {
        long m2 = ki * ki + kj * kj + static_cast<long>(k) * k;
        auto it = shell.find(m2);
        double fh;
        if (it != shell.end()) {
          fh = it->second;
        } else {
          double r = 2.0 * kPi * std::sqrt(static_cast<double>(m2)) / box;
          fh = r > 0.0 ? std::exp(model.log_fhat(std::log(r))) : 1.0;
          shell.emplace(m2, fh);
        }
        double w = inv_2pi3 * fh * cell;
        noise_sqrt_weights_[idx] = std::sqrt(config_.dt * w / n3);
        double kappa2 = (2.0 * kPi / box) * (2.0 * kPi / box) *
                        static_cast<double>(m2);
        heat_multiplier_[idx] = std::exp(-kappa2 * config_.dt / 2.0) / n3;
        total += ((k == 0 || k == n / 2) ? 1.0 : 2.0) * config_.dt * w;
      }
    }
  }
  noise_site_variance_ = total;

  real_buf_ = fftw_malloc(sizeof(double) * config_.lattice.sites());
  cplx_buf_ = fftw_malloc(sizeof(fftw_complex) * half);
  if (real_buf_ == nullptr || cplx_buf_ == nullptr) throw std::bad_alloc();
  auto* re = static_cast<double*>(real_buf_);
  auto* cx = static_cast<fftw_complex*>(cplx_buf_);
  plan_forward_ = fftw_plan_dft_r2c_3d(n, n, n, re, cx, FFTW_ESTIMATE);
  plan_backward_ = fftw_plan_dft_c2r_3d(n, n, n, cx, re, FFTW_ESTIMATE);

  if (n <= 128) {
    for (std::size_t q = 0; q < half; ++q) {
      cx[q][0] = noise_sqrt_weights_[q] * noise_sqrt_weights_[q] * n3;
      cx[q][1] = 0.0;
    }
    fftw_execute(static_cast<fftw_plan>(plan_backward_));
    noise_cov_table_.assign(re, re + config_.lattice.sites());
  }

  double r_nyq = kPi * n / box;
  double head = dalang_mass_head(model, 1e-8, std::max(r_nyq, 40.0));
  double tail = dalang_mass_tail(model, std::max(r_nyq, 40.0));
  double beyond =
      r_nyq >= 40.0 ? dalang_mass_tail(model, r_nyq)
                    : dalang_mass_head(model, std::max(r_nyq, 1e-8), 40.0) +
                          dalang_mass_tail(model, 40.0);
  truncation_fraction_ = beyond / (head + tail);
}

SpdeSolver::~SpdeSolver() {
  if (plan_forward_ != nullptr) {
    fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
  }
  if (plan_backward_ != nullptr) {
    fftw_destroy_plan(static_cast<fftw_plan>(plan_backward_));
  }
  fftw_free(real_buf_);
  fftw_free(cplx_buf_);
}

double SpdeSolver::noise_covariance_lag(int di, int dj, int dk) const {
  const int n = config_.lattice.n;
  auto wrap = [n](int d) {
    int m = d % n;
    return m < 0 ? m + n : m;
  };
  if (!noise_cov_table_.empty()) {
    auto nn = static_cast<std::size_t>(n);
    return noise_cov_table_[(static_cast<std::size_t>(wrap(di)) * nn +
                             wrap(dj)) *
                                nn +
                            wrap(dk)];
  }
  const double n3 = static_cast<double>(config_.lattice.sites());
  const double step = 2.0 * kPi / n;
  double acc = 0.0;
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n / 2 + 1; ++k, ++idx) {
        double w = noise_sqrt_weights_[idx] * noise_sqrt_weights_[idx] * n3;
        double mult = (k == 0 || k == n / 2) ? 1.0 : 2.0;
        acc += mult * w *
               std::cos(step * (static_cast<double>(i) * di +
                                static_cast<double>(j) * dj +
                                static_cast<double>(k) * dk));
      }
    }
  }
  return acc;
}

void SpdeSolver::fill_noise(std::vector<double>& out, std::uint64_t key,
                            std::uint64_t step) {
  const std::size_t sites = config_.lattice.sites();
  const std::size_t half = noise_sqrt_weights_.size();
  auto* re = static_cast<double*>(real_buf_);
  auto* cx = static_cast<fftw_complex*>(cplx_buf_);
  CounterRng rng(derive_key(key, "noise-step", step));
  for (std::size_t q = 0; q < sites; ++q) re[q] = rng.normal();
  fftw_execute(static_cast<fftw_plan>(plan_forward_));
  for (std::size_t q = 0; q < half; ++q) {
    cx[q][0] *= noise_sqrt_weights_[q];
    cx[q][1] *= noise_sqrt_weights_[q];
  }
  fftw_execute(static_cast<fftw_plan>(plan_backward_));
  out.assign(re, re + sites);
}

FieldSample SpdeSolver::noise_increment(std::uint64_t key,
                                        std::uint64_t step) {
  FieldSample out;
  out.lattice = config_.lattice;
  out.gen = FieldGen::kSpectral;
  out.seed = key;
  fill_noise(out.values, key, step);
  return out;
}

void SpdeSolver::step(std::vector<double>& u, const std::vector<double>& noise,
                      const SigmaSpec& sigma) {
  const std::size_t sites = config_.lattice.sites();
  if (u.size() != sites || noise.size() != sites) {
    throw std::invalid_argument("SpdeSolver::step: shape mismatch");
  }
  auto* re = static_cast<double*>(real_buf_);
  auto* cx = static_cast<fftw_complex*>(cplx_buf_);
  for (std::size_t q = 0; q < sites; ++q) {
    re[q] = u[q] + sigma(u[q]) * noise[q];
  }
  fftw_execute(static_cast<fftw_plan>(plan_forward_));
  const std::size_t half = heat_multiplier_.size();
  for (std::size_t q = 0; q < half; ++q) {
    cx[q][0] *= heat_multiplier_[q];
    cx[q][1] *= heat_multiplier_[q];
  }
  fftw_execute(static_cast<fftw_plan>(plan_backward_));
  for (std::size_t q = 0; q < sites; ++q) {
    if (!std::isfinite(re[q])) {
      throw std::runtime_error("SpdeSolver::step: non-finite state (blowup)");
    }
    u[q] = re[q];
  }
}

Trajectory SpdeSolver::run(std::uint64_t replica) {
  const std::size_t sites = config_.lattice.sites();
  const std::int64_t n_steps = config_.steps();

  Trajectory traj;
  traj.config = config_;
  traj.replica = replica;
  traj.noise_key = derive_key(config_.seed, "spde-replica", replica);

  std::vector<double> u(sites, 1.0);
  std::vector<double> z;
  if (config_.coupled) z.assign(sites, 1.0);
  std::vector<double> noise;

  std::vector<std::int64_t> snap_steps;
  if (config_.snapshot_times.empty()) {
    snap_steps.push_back(n_steps);
  } else {
    for (double t : config_.snapshot_times) {
      snap_steps.push_back(std::llround(t / config_.dt));
    }
  }
  const SigmaSpec linear = SigmaSpec::constant(1.0);

  auto record = [&](std::int64_t step_idx) {
    for (std::size_t q = 0; q < snap_steps.size(); ++q) {
      if (snap_steps[q] == step_idx) {
        Snapshot snap;
        snap.t = step_idx * config_.dt;
        snap.step = step_idx;
        snap.u = u;
        snap.z = z;
        traj.snapshots.push_back(std::move(snap));
        break;
      }
    }
  };

  record(0);
  for (std::int64_t s = 0; s < n_steps; ++s) {
    fill_noise(noise, traj.noise_key, static_cast<std::uint64_t>(s));
    try {
      step(u, noise, config_.sigma);
      if (config_.coupled) step(z, noise, linear);
    } catch (const std::runtime_error& err) {
      throw std::runtime_error(std::string(err.what()) + " at step " +
                               std::to_string(s + 1));
    }
    record(s + 1);
  }
  return traj;
}

ResidualTable linearization_residual(
    const CorrelationModel& model, SolverConfig config,
    const std::vector<std::array<int, 3>>& shifts, int replicas) {
  if (replicas < 2) {
    throw std::invalid_argument("linearization_residual: need >= 2 replicas");
  }
  for (const auto& s : shifts) {
    if (s[0] == 0 && s[1] == 0 && s[2] == 0) {
      throw std::invalid_argument(
          "linearization_residual: zero shift is below the lattice spacing");
    }
  }
  config.coupled = true;
  config.snapshot_times.clear();  // final state only
  SpdeSolver solver(model, config);

  const int n = config.lattice.n;
  const std::size_t count = shifts.size();
  // per-replica spatial means, then replica statistics
  std::vector<double> acc_a(count, 0.0), acc_a2(count, 0.0);
  std::vector<double> acc_b(count, 0.0), acc_b2(count, 0.0);
  std::vector<double> acc_c(count, 0.0), acc_c2(count, 0.0);

  for (int rep = 0; rep < replicas; ++rep) {
    Trajectory traj = solver.run(static_cast<std::uint64_t>(rep));
    const auto& u = traj.snapshots.back().u;
    const auto& z = traj.snapshots.back().z;
    auto at = [n](const std::vector<double>& v, int i, int j, int k) {
      auto nn = static_cast<std::size_t>(n);
      auto w = [n](int x) {
        int m = x % n;
        return m < 0 ? m + n : m;
      };
      return v[(static_cast<std::size_t>(w(i)) * nn + w(j)) * nn + w(k)];
    };
    for (std::size_t q = 0; q < count; ++q) {
      const auto& sh = shifts[q];
      double a = 0.0, b = 0.0, c = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) {
            double du = at(u, i + sh[0], j + sh[1], k + sh[2]) - at(u, i, j, k);
            double dz = at(z, i + sh[0], j + sh[1], k + sh[2]) - at(z, i, j, k);
            double lin = config.sigma(at(u, i, j, k)) * dz;
            a += du * du;
            b += lin * lin;
            double d = du - lin;
            c += d * d;
          }
        }
      }
      double n3 = static_cast<double>(config.lattice.sites());
      a /= n3;
      b /= n3;
      c /= n3;
      acc_a[q] += a;
      acc_a2[q] += a * a;
      acc_b[q] += b;
      acc_b2[q] += b * b;
      acc_c[q] += c;
      acc_c2[q] += c * c;
    }
  }

  ResidualTable table;
  table.t = config.t_end;
  table.replicas = replicas;
  auto finish = [replicas](double sum, double sum_sq, double* se) {
    double mean = sum / replicas;
    double var = (sum_sq / replicas - mean * mean) *
                 replicas / std::max(1, replicas - 1);
    *se = std::sqrt(std::max(var, 0.0) / replicas);
    return mean;
  };
  for (std::size_t q = 0; q < count; ++q) {
    ResidualRow row;
    row.shift = shifts[q];
    double h = config.lattice.spacing();
    row.eps_norm = h * std::sqrt(static_cast<double>(
                           shifts[q][0] * shifts[q][0] +
                           shifts[q][1] * shifts[q][1] +
                           shifts[q][2] * shifts[q][2]));
    row.grad_u_sq = finish(acc_a[q], acc_a2[q], &row.grad_u_se);
    row.linear_sq = finish(acc_b[q], acc_b2[q], &row.linear_se);
    row.residual_sq = finish(acc_c[q], acc_c2[q], &row.residual_se);
    row.ratio = row.grad_u_sq > 0.0 ? row.residual_sq / row.grad_u_sq : 0.0;
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace rough
