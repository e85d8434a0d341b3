#include "rough/gaussian_field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <unordered_map>

#include "rough/quadrature.hpp"
#include "rough/rng.hpp"

namespace rough {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPiCubed = 248.05021344239856;

double sinc(double x) {
  double ax = std::abs(x);
  if (ax < 1e-4) {
    double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

double fhat_fast(const CorrelationModel& m, double r) {
  return r > 0.0 ? std::exp(m.log_fhat(std::log(r))) : 1.0;
}

// int_{r_lo}^{r_hi} (1 - e^{-t r^2}) fhat(r) dr, adaptively in w = log r.
// This is the radial spectral mass integrand: r^2 g_t(r) up to (2 pi^2)^-1.
double mass_head(const CorrelationModel& m, double t, double r_lo,
                 double r_hi) {
  auto f = [&m, t](double w) {
    double r = std::exp(w);
    return r * std::exp(m.log_fhat(w)) * (-std::expm1(-t * r * r));
  };
  return integrate_or_throw(f, std::log(r_lo), std::log(r_hi),
                            {1e-8, 0.0, 4000});
}

// Same integrand on [r_lo, inf).  The tail falls off like 1/(r (log r)^alpha),
// so a second substitution y = log log r turns it into exponential decay
// e^{(1-alpha) y}; the sliver beyond the quadrature window is added back in
// closed form from that rate.
double mass_tail(const CorrelationModel& m, double t, double r_lo) {
  // The window stops at w ~ 1e6: past that the integrand is
  // 2^{-alpha} e^{(1-alpha)y} up to O(1/w), so the closed-form remainder
  // below is accurate to ~e^{-y_hi} while the quadrature stays clear of
  // the w + log_fhat(w) cancellation noise that grows with w.  For alpha
  // near 1 the tail weight decays slowly and that noise would otherwise
  // keep the adaptive rule from converging.
  const double y_hi = 14.0;
  auto f = [&m, t](double y) {
    double w = std::exp(y);
    double damp = 2.0 * w > 700.0 ? 1.0 : -std::expm1(-t * std::exp(2.0 * w));
    return std::exp(y + w + m.log_fhat(w)) * damp;
  };
  double y_lo = std::log(std::log(r_lo));
  if (y_lo >= y_hi) return f(y_lo) / (m.alpha() - 1.0);
  double body = integrate_or_throw(f, y_lo, y_hi, {1e-8, 0.0, 2000});
  return body + f(y_hi) / (m.alpha() - 1.0);
}

// int_{r1}^inf (1 - e^{-t r^2}) fhat(r) sinc(r h) dr.  Half-period pieces
// alternate in sign with slowly decaying magnitude; iterated averaging of
// the partial sums (Euler acceleration) extracts the limit.
double oscillatory_tail(const CorrelationModel& m, double t, double h,
                        double r1) {
  const double half_period = kPi / h;
  auto f = [&](double r) {
    return (-std::expm1(-t * r * r)) * fhat_fast(m, r) * sinc(r * h);
  };
  double first_zero = std::ceil(r1 / half_period) * half_period;
  double gap = 0.0;
  if (first_zero > r1 * (1.0 + 1e-12)) {
    gap = integrate_or_throw(f, r1, first_zero, {1e-7, 0.0, 800});
  }
  constexpr int kTerms = 16;
  double partial[kTerms];
  double acc = 0.0;
  for (int j = 0; j < kTerms; ++j) {
    double a = first_zero + j * half_period;
    acc += integrate_or_throw(f, a, a + half_period, {1e-7, 0.0, 800});
    partial[j] = acc;
  }
  for (int k = 1; k < kTerms; ++k) {
    for (int j = 0; j + k < kTerms; ++j) {
      partial[j] = 0.5 * (partial[j] + partial[j + 1]);
    }
  }
  return gap + partial[0];
}

}  // namespace

LatticeSpec::LatticeSpec(int n_, double box_, int slice_dim_)
    : n(n_), box(box_), slice_dim(slice_dim_) {
  if (n < 2 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("LatticeSpec: n must be a power of two >= 2");
  }
  if (!(box > 0.0)) {
    throw std::invalid_argument("LatticeSpec: box side must be positive");
  }
  if (slice_dim < 1 || slice_dim > 3) {
    throw std::invalid_argument("LatticeSpec: slice_dim must be 1, 2, or 3");
  }
}

ZSpectralDensity::ZSpectralDensity(const CorrelationModel& model, double t)
    : model_(&model), t_(t) {
  if (!(t > 0.0)) {
    throw std::invalid_argument("ZSpectralDensity: t must be positive");
  }
}

double ZSpectralDensity::operator()(double z_norm) const {
  // fhat via its log-spline form: this evaluator runs once per lattice
  // frequency shell during synthesis setup.
  if (z_norm <= 0.0 || t_ * z_norm * z_norm < 1e-12) {
    return t_ * fhat_fast(*model_, z_norm) / kTwoPiCubed;
  }
  double r2 = z_norm * z_norm;
  return fhat_fast(*model_, z_norm) * (-std::expm1(-t_ * r2)) / r2 /
         kTwoPiCubed;
}

CanonicalMetric::CanonicalMetric(const CorrelationModel& model, double t)
    : model_(&model), t_(t) {
  if (!(t > 0.0)) {
    throw std::invalid_argument("CanonicalMetric: t must be positive");
  }
  // Total spectral mass; the piece below r = 1e-8 is bounded by t r^3 / 3
  // and is far below the quadrature tolerance.
  variance_ = (mass_head(model, t, 1e-8, 40.0) + mass_tail(model, t, 40.0)) /
              (2.0 * kPi * kPi);
}

double CanonicalMetric::squared_distance(double separation) const {
  if (!(separation > 0.0)) return 0.0;
  const CorrelationModel& m = *model_;
  const double h = separation;
  // Past r1 the sinc factor has completed several periods and the monotone
  // and oscillatory parts of the tail are split.
  const double r1 = std::max(40.0, 8.0 * kPi / h);
  auto f = [&m, this, h](double w) {
    double r = std::exp(w);
    return r * std::exp(m.log_fhat(w)) * (-std::expm1(-t_ * r * r)) *
           (1.0 - sinc(r * h));
  };
  double head =
      integrate_or_throw(f, std::log(1e-8), std::log(r1), {1e-7, 0.0, 4000});
  double tail = mass_tail(m, t_, r1) - oscillatory_tail(m, t_, h, r1);
  return (head + tail) / (kPi * kPi);
}

double CanonicalMetric::distance(const Vec3& x, const Vec3& y) const {
  Vec3 d{x[0] - y[0], x[1] - y[1], x[2] - y[2]};
  return std::sqrt(squared_distance(norm3(d)));
}

double CanonicalMetric::covariance(const Vec3& x, const Vec3& y) const {
  Vec3 d{x[0] - y[0], x[1] - y[1], x[2] - y[2]};
  return variance_ - 0.5 * squared_distance(norm3(d));
}

double covariance_pair(const CorrelationModel& model, double t, const Vec3& x,
                       const Vec3& y) {
  return CanonicalMetric(model, t).covariance(x, y);
}

double canonical_distance(const CorrelationModel& model, double t,
                          const Vec3& x, const Vec3& y) {
  return CanonicalMetric(model, t).distance(x, y);
}

SpectralSampler::SpectralSampler(const CorrelationModel& model,
                                 const LatticeSpec& spec, double t,
                                 double aliasing_warn_fraction)
    : spec_(spec), t_(t) {
  AlphaParam(model.alpha()).require_field_range();
  ZSpectralDensity g(model, t);

  const int n = spec_.n;
  const std::size_t nz = static_cast<std::size_t>(n / 2 + 1);
  const std::size_t half = static_cast<std::size_t>(n) * n * nz;
  const double n3 = static_cast<double>(spec_.sites());
  const double cell = std::pow(2.0 * kPi / spec_.box, 3.0);

  sqrt_weights_.resize(half);
  std::unordered_map<long, double> shell;  // |k|^2 -> g value
  shell.reserve(static_cast<std::size_t>(3 * (n / 2) * (n / 2) + 8));
  double total = 0.0;
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i) {
    long ki = i <= n / 2 ? i : i - n;
    for (int j = 0; j < n; ++j) {
      long kj = j <= n / 2 ? j : j - n;
      for (int k = 0; k < n / 2 + 1; ++k, ++idx) {
        long m2 = ki * ki + kj * kj + static_cast<long>(k) * k;
        auto it = shell.find(m2);
        double gv;
        if (it != shell.end()) {
          gv = it->second;
        } else {
          gv = g(2.0 * kPi * std::sqrt(static_cast<double>(m2)) / spec_.box);
          shell.emplace(m2, gv);
        }
        double w = gv * cell;
        sqrt_weights_[idx] = std::sqrt(w / n3);
        total += (k == 0 || k == n / 2) ? w : 2.0 * w;
      }
    }
  }
  lattice_variance_ = total;

  real_buf_ = fftw_malloc(sizeof(double) * spec_.sites());
  cplx_buf_ = fftw_malloc(sizeof(fftw_complex) * half);
  if (real_buf_ == nullptr || cplx_buf_ == nullptr) {
    throw std::bad_alloc();
  }
  auto* re = static_cast<double*>(real_buf_);
  auto* cx = static_cast<fftw_complex*>(cplx_buf_);
  plan_forward_ =
      fftw_plan_dft_r2c_3d(n, n, n, re, cx, FFTW_ESTIMATE);
  plan_backward_ =
      fftw_plan_dft_c2r_3d(n, n, n, cx, re, FFTW_ESTIMATE);

  // Exact covariance table of the discrete target: one inverse transform
  // of the weights.  Skipped above 128 per axis (lags are then summed on
  // demand) to stay inside the desk-scale memory budget.
  if (n <= 128) {
    for (std::size_t q = 0; q < half; ++q) {
      cx[q][0] = sqrt_weights_[q] * sqrt_weights_[q] * n3;
      cx[q][1] = 0.0;
    }
    fftw_execute(static_cast<fftw_plan>(plan_backward_));
    cov_table_.assign(re, re + spec_.sites());
  }

  // Continuum mass beyond the Nyquist sphere, relative to the full mass.
  double r_nyq = kPi * n / spec_.box;
  double head = mass_head(model, t, 1e-8, 40.0);
  double far = mass_tail(model, t, 40.0);
  double beyond = r_nyq >= 40.0
                      ? mass_tail(model, t, r_nyq)
                      : mass_head(model, t, std::max(r_nyq, 1e-8), 40.0) + far;
  aliasing_fraction_ = beyond / (head + far);
  aliasing_flagged_ = aliasing_fraction_ > aliasing_warn_fraction;
}

SpectralSampler::~SpectralSampler() {
  if (plan_forward_ != nullptr) {
    fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
  }
  if (plan_backward_ != nullptr) {
    fftw_destroy_plan(static_cast<fftw_plan>(plan_backward_));
  }
  fftw_free(real_buf_);
  fftw_free(cplx_buf_);
}

FieldSample SpectralSampler::draw(std::uint64_t seed, std::uint64_t replica) {
  const int n = spec_.n;
  const std::size_t sites = spec_.sites();
  const std::size_t half =
      static_cast<std::size_t>(n) * n * (n / 2 + 1);
  auto* re = static_cast<double*>(real_buf_);
  auto* cx = static_cast<fftw_complex*>(cplx_buf_);

  CounterRng rng(derive_key(seed, "gaussian-field", replica));
  for (std::size_t q = 0; q < sites; ++q) re[q] = rng.normal();
  fftw_execute(static_cast<fftw_plan>(plan_forward_));
  for (std::size_t q = 0; q < half; ++q) {
    cx[q][0] *= sqrt_weights_[q];
    cx[q][1] *= sqrt_weights_[q];
  }
  fftw_execute(static_cast<fftw_plan>(plan_backward_));

  FieldSample out;
  out.lattice = spec_;
  out.values.assign(re, re + sites);
  out.gen = FieldGen::kSpectral;
  out.seed = seed;
  return out;
}

double SpectralSampler::lattice_variance() const { return lattice_variance_; }

double SpectralSampler::covariance_lag(int di, int dj, int dk) const {
  const int n = spec_.n;
  auto wrap = [n](int d) {
    int m = d % n;
    return m < 0 ? m + n : m;
  };
  if (!cov_table_.empty()) {
    std::size_t nn = static_cast<std::size_t>(n);
    return cov_table_[(static_cast<std::size_t>(wrap(di)) * nn + wrap(dj)) *
                          nn +
                      wrap(dk)];
  }
  const double n3 = static_cast<double>(spec_.sites());
  const double step = 2.0 * kPi / n;
  double acc = 0.0;
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n / 2 + 1; ++k, ++idx) {
        double w = sqrt_weights_[idx] * sqrt_weights_[idx] * n3;
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

namespace {
// Shared by the two max scans: per-n summary rows plus the growth-exponent
// fit of log E max against log log n.
void summarize_max_scan(const std::vector<std::vector<double>>& maxima,
                        const std::vector<int>& ns, double alpha,
                        MaxScanResult* outp);
}  // namespace

MaxScanResult lattice_max_scan(const CorrelationModel& model, double t,
                               std::vector<int> ns, int replicas,
                               std::uint64_t seed, double tail_constant,
                               int slice_dim) {
  if (ns.empty()) throw std::invalid_argument("lattice_max_scan: empty scan");
  if (replicas < 2) {
    throw std::invalid_argument("lattice_max_scan: need at least 2 replicas");
  }
  for (std::size_t q = 0; q < ns.size(); ++q) {
    int n = ns[q];
    if (n < 1 || (n & (n - 1)) != 0) {
      throw std::invalid_argument(
          "lattice_max_scan: each n must be 1 or a power of two");
    }
    if (q > 0 && n <= ns[q - 1]) {
      throw std::invalid_argument("lattice_max_scan: ns must be increasing");
    }
  }

  const int n_top = std::max(ns.back(), 2);
  SpectralSampler sampler(model, LatticeSpec(n_top, 1.0, slice_dim), t);

  std::vector<std::vector<double>> maxima(ns.size());
  for (auto& v : maxima) v.reserve(static_cast<std::size_t>(replicas));
  for (int rep = 0; rep < replicas; ++rep) {
    FieldSample f = sampler.draw(seed, static_cast<std::uint64_t>(rep));
    for (std::size_t q = 0; q < ns.size(); ++q) {
      int n = ns[q];
      int stride = n_top / n;
      int kmax = slice_dim >= 3 ? n : 1;
      double best = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < kmax; ++k) {
            double v = std::abs(f.at(i * stride, j * stride, k * stride));
            if (v > best) best = v;
          }
        }
      }
      maxima[q].push_back(best);
    }
  }

  MaxScanResult out;
  out.tail_constant = tail_constant;
  out.lattice_variance = sampler.lattice_variance();
  out.replicas = replicas;
  out.underpowered = replicas < 50;
  summarize_max_scan(maxima, ns, model.alpha(), &out);
  return out;
}

namespace {

void summarize_max_scan(const std::vector<std::vector<double>>& maxima,
                        const std::vector<int>& ns, double alpha,
                        MaxScanResult* outp) {
  MaxScanResult& out = *outp;
  const double tail_constant = out.tail_constant;
  for (std::size_t q = 0; q < ns.size(); ++q) {
    const auto& v = maxima[q];
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= v.size();
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= (v.size() - 1);
    double se = std::sqrt(var / v.size());
    MaxScanRow row;
    row.n = ns[q];
    row.mean_max = mean;
    row.ci_low = mean - 1.96 * se;
    row.ci_high = mean + 1.96 * se;
    double logn = std::log(static_cast<double>(ns[q]));
    row.tail_threshold =
        logn > 0.0 ? std::pow(logn, 1.0 - alpha / 2.0) / tail_constant : 0.0;
    std::size_t hits = 0;
    for (double x : v) {
      if (x <= row.tail_threshold) ++hits;
    }
    row.tail_frequency = static_cast<double>(hits) / v.size();
    out.rows.push_back(row);
  }

  // Growth exponent: slope of log E max against log log n.
  std::vector<double> xs, ys;
  for (const auto& row : out.rows) {
    if (row.n >= 4 && row.mean_max > 0.0) {
      xs.push_back(std::log(std::log(static_cast<double>(row.n))));
      ys.push_back(std::log(row.mean_max));
    }
  }
  if (xs.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (std::size_t q = 0; q < xs.size(); ++q) {
      mx += xs[q];
      my += ys[q];
    }
    mx /= xs.size();
    my /= ys.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t q = 0; q < xs.size(); ++q) {
      sxx += (xs[q] - mx) * (xs[q] - mx);
      sxy += (xs[q] - mx) * (ys[q] - my);
    }
    out.fitted_exponent = sxy / sxx;
    if (xs.size() >= 3) {
      double rss = 0.0;
      for (std::size_t q = 0; q < xs.size(); ++q) {
        double r = ys[q] - my - out.fitted_exponent * (xs[q] - mx);
        rss += r * r;
      }
      out.exponent_stderr = std::sqrt(rss / (xs.size() - 2) / sxx);
    }
  }
}

}  // namespace

CirculantSampler::CirculantSampler(const CorrelationModel& model, int n,
                                   double t, double box)
    : n_(n), t_(t), box_(box) {
  if (n < 2 || (n & (n - 1)) != 0) {
    throw std::invalid_argument(
        "CirculantSampler: n must be a power of two >= 2");
  }
  if (!(box > 0.0)) {
    throw std::invalid_argument("CirculantSampler: box must be positive");
  }
  AlphaParam(model.alpha()).require_field_range();
  CanonicalMetric metric(model, t);
  variance_ = metric.variance();

  // Radial covariance profile on a log grid; separations run from the grid
  // spacing to the diagonal of the embedding cell.
  const double h = box / n;
  const int table_n = 512;
  const double r_lo = 0.999 * h;
  const double r_hi = 1.001 * std::sqrt(3.0) * box;
  std::vector<double> log_r(table_n), d2(table_n);
  for (int i = 0; i < table_n; ++i) {
    log_r[i] = std::log(r_lo) +
               (std::log(r_hi) - std::log(r_lo)) * i / (table_n - 1);
    d2[i] = metric.squared_distance(std::exp(log_r[i]));
  }
  const double log_step = log_r[1] - log_r[0];
  auto cov_at = [&](double r) {
    if (r <= 0.0) return variance_;
    double x = std::log(r);
    int i = static_cast<int>((x - log_r[0]) / log_step);
    i = std::clamp(i, 0, table_n - 2);
    double w = (x - log_r[i]) / log_step;
    return variance_ - 0.5 * (d2[i] * (1.0 - w) + d2[i + 1] * w);
  };

  const int em = 2 * n;
  const std::size_t total = static_cast<std::size_t>(em) * em * em;
  cplx_buf_ = fftw_malloc(sizeof(fftw_complex) * total);
  if (cplx_buf_ == nullptr) throw std::bad_alloc();
  auto* cx = static_cast<fftw_complex*>(cplx_buf_);
  plan_backward_ = fftw_plan_dft_3d(em, em, em, cx, cx, FFTW_BACKWARD,
                                    FFTW_ESTIMATE);

  std::size_t idx = 0;
  for (int i = 0; i < em; ++i) {
    int it = i <= n ? i : i - em;
    for (int j = 0; j < em; ++j) {
      int jt = j <= n ? j : j - em;
      for (int k = 0; k < em; ++k, ++idx) {
        int kt = k <= n ? k : k - em;
        double r = h * std::sqrt(static_cast<double>(it) * it +
                                 static_cast<double>(jt) * jt +
                                 static_cast<double>(kt) * kt);
        cx[idx][0] = cov_at(r);
        cx[idx][1] = 0.0;
      }
    }
  }
  // Forward transform of the taps = embedding spectrum (real by symmetry).
  fftw_plan fwd =
      fftw_plan_dft_3d(em, em, em, cx, cx, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(fwd);
  fftw_destroy_plan(fwd);

  amp_.resize(total);
  double clipped = 0.0, mass = 0.0;
  const double scale = static_cast<double>(total);
  for (std::size_t q = 0; q < total; ++q) {
    double v = cx[q][0];
    mass += std::abs(v);
    if (v < 0.0) {
      clipped += -v;
      v = 0.0;
    }
    amp_[q] = std::sqrt(v / scale);
  }
  clipped_fraction_ = mass > 0.0 ? clipped / mass : 0.0;

  // Realized covariance of the clipped target: one backward transform.
  // Kept only at small n, where the unit oracles want exact entries.
  if (n <= 32) {
    for (std::size_t q = 0; q < total; ++q) {
      cx[q][0] = amp_[q] * amp_[q] * scale;
      cx[q][1] = 0.0;
    }
    fftw_execute(static_cast<fftw_plan>(plan_backward_));
    const int side = n + 1;
    realized_cov_.resize(static_cast<std::size_t>(side) * side * side);
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        for (int k = 0; k <= n; ++k) {
          realized_cov_[(static_cast<std::size_t>(i) * side + j) * side + k] =
              cx[(static_cast<std::size_t>(i) * em + j) * em + k][0] / scale;
        }
      }
    }
  }
}

double CirculantSampler::covariance_lag(int di, int dj, int dk) const {
  if (realized_cov_.empty()) {
    throw std::logic_error(
        "CirculantSampler::covariance_lag: table kept only for n <= 32");
  }
  auto fold = [this](int d) {
    const int em = 2 * n_;
    int m = ((d % em) + em) % em;
    return m <= n_ ? m : em - m;
  };
  const std::size_t side = static_cast<std::size_t>(n_) + 1;
  return realized_cov_[(fold(di) * side + fold(dj)) * side + fold(dk)];
}

CirculantSampler::~CirculantSampler() {
  if (plan_backward_ != nullptr) {
    fftw_destroy_plan(static_cast<fftw_plan>(plan_backward_));
  }
  fftw_free(cplx_buf_);
}

FieldSample CirculantSampler::draw(std::uint64_t seed, std::uint64_t replica) {
  const std::uint64_t pair = replica / 2;
  const int part = static_cast<int>(replica % 2);
  auto* cx = static_cast<fftw_complex*>(cplx_buf_);
  const std::size_t total = amp_.size();

  if (!cache_valid_ || cache_seed_ != seed || cache_pair_ != pair) {
    // Unconstrained complex white noise through the spectral amplitudes:
    // the real and imaginary parts of the backward transform are two
    // independent fields with the embedded covariance.
    CounterRng rng(derive_key(seed, "circulant-field", pair));
    for (std::size_t q = 0; q < total; ++q) {
      cx[q][0] = amp_[q] * rng.normal();
      cx[q][1] = amp_[q] * rng.normal();
    }
    fftw_execute(static_cast<fftw_plan>(plan_backward_));
    cache_valid_ = true;
    cache_seed_ = seed;
    cache_pair_ = pair;
  }

  const int em = 2 * n_;
  FieldSample out;
  out.lattice = LatticeSpec(n_, box_);
  out.gen = FieldGen::kCirculant;
  out.seed = seed;
  out.values.resize(static_cast<std::size_t>(n_) * n_ * n_);
  std::size_t w = 0;
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      const std::size_t base =
          (static_cast<std::size_t>(i) * em + j) * em;
      for (int k = 0; k < n_; ++k, ++w) {
        out.values[w] = cx[base + k][part];
      }
    }
  }
  return out;
}

MaxScanResult continuum_max_scan(const CorrelationModel& model, double t,
                                 std::vector<int> ns, int replicas,
                                 std::uint64_t seed, double tail_constant,
                                 double box) {
  if (ns.empty()) throw std::invalid_argument("continuum_max_scan: empty scan");
  if (replicas < 2) {
    throw std::invalid_argument("continuum_max_scan: need at least 2 replicas");
  }
  for (std::size_t q = 0; q < ns.size(); ++q) {
    int n = ns[q];
    if (n < 2 || (n & (n - 1)) != 0) {
      throw std::invalid_argument(
          "continuum_max_scan: each n must be a power of two >= 2");
    }
    if (q > 0 && n <= ns[q - 1]) {
      throw std::invalid_argument("continuum_max_scan: ns must be increasing");
    }
  }

  const int n_top = ns.back();
  CirculantSampler sampler(model, n_top, t, box);

  std::vector<std::vector<double>> maxima(ns.size());
  for (auto& v : maxima) v.reserve(static_cast<std::size_t>(replicas));
  for (int rep = 0; rep < replicas; ++rep) {
    FieldSample f = sampler.draw(seed, static_cast<std::uint64_t>(rep));
    for (std::size_t q = 0; q < ns.size(); ++q) {
      int n = ns[q];
      int stride = n_top / n;
      double best = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) {
            double v = std::abs(f.at(i * stride, j * stride, k * stride));
            if (v > best) best = v;
          }
        }
      }
      maxima[q].push_back(best);
    }
  }

  MaxScanResult out;
  out.tail_constant = tail_constant;
  out.lattice_variance = sampler.variance();
  out.replicas = replicas;
  out.underpowered = replicas < 50;
  summarize_max_scan(maxima, ns, model.alpha(), &out);
  return out;
}

DudleyEstimate dudley_bound_estimate(const CorrelationModel& model, double t,
                                     const std::vector<Vec3>& points,
                                     std::size_t max_centers) {
  DudleyEstimate out;
  out.points = points.size();
  if (points.size() <= 1) {
    out.centers = points.size();
    return out;
  }

  CanonicalMetric metric(model, t);
  // The metric is a radial profile of the Euclidean separation; tabulate it
  // once on a log grid and interpolate, so the O(points * centers) greedy
  // pass stays cheap.
  double span = 0.0;
  Vec3 lo = points[0], hi = points[0];
  for (const auto& p : points) {
    for (int c = 0; c < 3; ++c) {
      lo[c] = std::min(lo[c], p[c]);
      hi[c] = std::max(hi[c], p[c]);
    }
  }
  span = norm3({hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]});
  if (!(span > 0.0)) {
    out.centers = 1;
    return out;  // all points coincide
  }
  const double s_lo = span * 1e-9;
  const int table_n = 96;
  const double step = std::log(span / s_lo) / (table_n - 1);
  std::vector<double> table(table_n);
  for (int q = 0; q < table_n; ++q) {
    table[q] = std::sqrt(
        metric.squared_distance(s_lo * std::exp(step * q)));
  }
  auto dmap = [&](double s) {
    if (s <= s_lo) return table.front();
    double u = std::log(s / s_lo) / step;
    int q = std::min(static_cast<int>(u), table_n - 2);
    double frac = u - q;
    return table[q] + frac * (table[q + 1] - table[q]);
  };
  auto metric_dist = [&](const Vec3& a, const Vec3& b) {
    double s = norm3({a[0] - b[0], a[1] - b[1], a[2] - b[2]});
    return s > 0.0 ? dmap(s) : 0.0;
  };

  // Farthest-point greedy: the k-th insertion radius bounds the covering
  // number, N(eps) <= k + 1 for eps in [radius_{k+1}, radius_k).
  std::vector<double> dist(points.size());
  for (std::size_t q = 0; q < points.size(); ++q) {
    dist[q] = metric_dist(points[q], points[0]);
  }
  std::vector<double> radii;
  while (radii.size() + 1 < std::min(points.size(), max_centers)) {
    std::size_t far = 0;
    for (std::size_t q = 1; q < points.size(); ++q) {
      if (dist[q] > dist[far]) far = q;
    }
    if (!(dist[far] > 0.0)) break;
    radii.push_back(dist[far]);
    for (std::size_t q = 0; q < points.size(); ++q) {
      dist[q] = std::min(dist[q], metric_dist(points[q], points[far]));
    }
  }
  out.centers = radii.size() + 1;

  // The first insertion radius is the diameter up to a factor of two; the
  // entropy-integral bands absorb that slack.
  out.diameter = radii.empty() ? 0.0 : radii.front();

  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < radii.size(); ++k) {
    integral += (radii[k] - radii[k + 1]) *
                std::sqrt(std::log(static_cast<double>(k + 2)));
  }
  if (!radii.empty()) {
    integral +=
        radii.back() * std::sqrt(std::log(static_cast<double>(points.size())));
  }
  out.entropy_integral = integral;
  return out;
}

}  // namespace rough
