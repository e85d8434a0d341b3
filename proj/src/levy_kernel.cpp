#include "rough/levy_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rough {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLn2 = 0.69314718055994530942;

// Lambda above which the Laplace exponent switches to the scaled
// representation (the direct integrand becomes needle-like).
constexpr double kPhiDirectMax = 1e6;

}  // namespace

AlphaParam::AlphaParam(double a) : alpha(a) {
  if (!(a > 1.0)) {
    throw std::invalid_argument("alpha must exceed 1, got " +
                                std::to_string(a));
  }
}

void AlphaParam::require_field_range() const {
  if (!(alpha < 2.0)) {
    throw std::invalid_argument(
        "this operation requires alpha in (1, 2), got " +
        std::to_string(alpha));
  }
}

double LevyDensity::operator()(double r) const {
  if (r <= 0.0 || r >= kJumpSupportMax) return 0.0;
  return std::pow(std::log(1.0 / r), alpha_) * std::pow(r, -1.5);
}

// All moments substitute r = u^2: the endpoint singularity r^{-3/2}
// becomes u^{-3}, and dr = 2u du.
double LevyDensity::mass(double a, double b) const {
  b = std::min(b, kJumpSupportMax);
  if (!(a > 0.0) || a >= b) {
    if (a <= 0.0) throw std::invalid_argument("Levy mass diverges at 0");
    return 0.0;
  }
  double al = alpha_;
  auto g = [al](double u) {
    return 2.0 * std::pow(2.0 * std::log(1.0 / u), al) / (u * u);
  };
  return integrate_or_throw(g, std::sqrt(a), std::sqrt(b));
}

double LevyDensity::mean(double a, double b) const {
  b = std::min(b, kJumpSupportMax);
  a = std::max(a, 0.0);
  if (a >= b) return 0.0;
  double al = alpha_;
  auto g = [al](double u) {
    return 2.0 * std::pow(2.0 * std::log(1.0 / u), al);
  };
  return integrate_or_throw(g, std::sqrt(a), std::sqrt(b));
}

double LevyDensity::second_moment(double a, double b) const {
  b = std::min(b, kJumpSupportMax);
  a = std::max(a, 0.0);
  if (a >= b) return 0.0;
  double al = alpha_;
  auto g = [al](double u) {
    return 2.0 * u * u * std::pow(2.0 * std::log(1.0 / u), al);
  };
  return integrate_or_throw(g, std::sqrt(a), std::sqrt(b));
}

double LevyDensity::finite_variation_integral() const {
  return mean(0.0, kJumpSupportMax);
}

namespace {

double phi_direct(double al, double lambda, const QuadOptions& quad) {
  if (lambda <= 0.0) return 0.0;
  auto g = [al, lambda](double u) {
    return -std::expm1(-lambda * u * u) * 2.0 *
           std::pow(2.0 * std::log(1.0 / u), al) / (u * u);
  };
  return integrate_or_throw(g, 0.0, std::exp(-0.5), quad);
}

// Phi(lambda) / sqrt(lambda) for log(lambda) = L, via the rescaled jump
// variable s = lambda t.  The near part keeps the exact 1 - e^{-s} factor;
// past s = 49 the factor is 1 to within e^{-49} and the remaining mass is
// integrated in w = log sqrt(s).
double phi_scaled_integral(double al, double L, const QuadOptions& quad) {
  auto near = [al, L](double v) {
    double lg = L - 2.0 * std::log(v);
    return -std::expm1(-v * v) * 2.0 * std::pow(lg, al) / (v * v);
  };
  double I = integrate_or_throw(near, 0.0, 7.0, quad);
  double w_hi = 0.5 * (L - 1.0);
  double w_lo = std::log(7.0);
  if (w_hi > w_lo) {
    auto far = [al, L](double w) {
      return 2.0 * std::pow(L - 2.0 * w, al) * std::exp(-w);
    };
    I += integrate_or_throw(far, w_lo, std::min(w_hi, w_lo + 60.0), quad);
  }
  return I;
}

}  // namespace

LaplaceExponent::LaplaceExponent(AlphaParam alpha, QuadOptions quad)
    : alpha_(alpha.alpha), quad_(quad) {}

double LaplaceExponent::direct(double lambda) const {
  return phi_direct(alpha_, lambda, quad_);
}

double LaplaceExponent::scaled_integral(double log_lambda) const {
  return phi_scaled_integral(alpha_, log_lambda, quad_);
}

double LaplaceExponent::operator()(double lambda) const {
  if (lambda <= 0.0) return 0.0;
  if (lambda <= kPhiDirectMax) return direct(lambda);
  return std::exp(log_value(std::log(lambda)));
}

double LaplaceExponent::log_value(double log_lambda) const {
  if (log_lambda <= std::log(kPhiDirectMax)) {
    return std::log(direct(std::exp(log_lambda)));
  }
  return 0.5 * log_lambda + std::log(scaled_integral(log_lambda));
}

namespace {

std::vector<double> stehfest_coeffs(int n) {
  std::vector<double> a(static_cast<std::size_t>(n));
  int half = n / 2;
  for (int k = 1; k <= n; ++k) {
    double sum = 0.0;
    for (int j = (k + 1) / 2; j <= std::min(k, half); ++j) {
      double lg = half * std::log(static_cast<double>(j)) +
                  std::lgamma(2.0 * j + 1.0) - std::lgamma(half - j + 1.0) -
                  std::lgamma(j + 1.0) - std::lgamma(static_cast<double>(j)) -
                  std::lgamma(k - j + 1.0) - std::lgamma(2.0 * j - k + 1.0);
      sum += std::exp(lg);
    }
    a[static_cast<std::size_t>(k - 1)] =
        ((half + k) % 2 == 0 ? 1.0 : -1.0) * sum;
  }
  return a;
}

}  // namespace

GaverStehfest::GaverStehfest(int order) : order_(order) {
  if (order < 6 || order % 2 != 0) {
    throw std::invalid_argument("Gaver-Stehfest order must be even and >= 6");
  }
  coeffs_ = stehfest_coeffs(order);
  coeffs_check_ = stehfest_coeffs(order - 2);
}

double GaverStehfest::eval(const Exponent& phi, double s, int order) const {
  const std::vector<double>& a = (order == order_) ? coeffs_ : coeffs_check_;
  double scale = kLn2 / s;
  double sum = 0.0;
  for (int k = 1; k <= order; ++k) {
    double lambda = k * scale;
    double F = 1.0 / (lambda * (1.0 + phi(lambda)));
    sum += a[static_cast<std::size_t>(k - 1)] * F;
  }
  return scale * sum;
}

double GaverStehfest::cdf(const Exponent& phi, double s,
                          bool* unstable) const {
  double v = eval(phi, s, order_);
  if (unstable != nullptr) {
    double check = eval(phi, s, order_ - 2);
    // The scheme's intrinsic truncation error shrinks slowly with the
    // order; consecutive orders agreeing to ~1e-3 already rules out the
    // oscillatory blowup that signals ill-conditioning.
    double scale = std::max(std::abs(v), std::abs(check));
    *unstable = std::abs(v - check) > 1e-9 + 1e-3 * scale;
  }
  return v;
}

SubordinatorSampler::SubordinatorSampler(AlphaParam alpha, double delta)
    : alpha_(alpha.alpha), delta_(delta) {
  if (!(delta > 0.0) || delta >= kJumpSupportMax) {
    throw std::invalid_argument("subordinator cutoff out of range");
  }
  LevyDensity nu(alpha);
  drift_ = nu.mean(0.0, delta);
  double hi = kJumpSupportMax;
  while (hi > delta) {
    double lo = std::max(hi / 2.0, delta);
    Layer layer;
    layer.lo = lo;
    layer.hi = hi;
    layer.rate = nu.mass(lo, hi);
    double m1 = nu.mean(lo, hi) / layer.rate;
    double m2 = nu.second_moment(lo, hi) / layer.rate;
    layer.mean_jump = m1;
    layer.var_jump = std::max(m2 - m1 * m1, 0.0);
    layers_.push_back(layer);
    hi = lo;
  }
}

double SubordinatorSampler::total_jump_rate() const {
  double r = 0.0;
  for (const Layer& layer : layers_) r += layer.rate;
  return r;
}

double SubordinatorSampler::draw_jump(CounterRng& rng,
                                      const Layer& layer) const {
  // Proposal: normalized r^{-3/2} restricted to the layer, drawn by CDF
  // inversion; thinning by the monotone log factor.
  double ca = 1.0 / std::sqrt(layer.lo);
  double cb = 1.0 / std::sqrt(layer.hi);
  double log_ref = std::pow(std::log(1.0 / layer.lo), alpha_);
  for (;;) {
    double u = ca - rng.uniform() * (ca - cb);
    double r = 1.0 / (u * u);
    double accept = std::pow(std::log(1.0 / r), alpha_) / log_ref;
    if (rng.uniform() <= accept) return r;
  }
}

double SubordinatorSampler::draw(CounterRng& rng) const {
  double horizon = rng.exponential();
  double total = horizon * drift_;
  for (const Layer& layer : layers_) {
    std::uint64_t n = rng.poisson(horizon * layer.rate);
    if (n == 0) continue;
    if (n <= 32) {
      for (std::uint64_t i = 0; i < n; ++i) total += draw_jump(rng, layer);
    } else {
      double nd = static_cast<double>(n);
      double sum = nd * layer.mean_jump +
                   std::sqrt(nd * layer.var_jump) * rng.normal();
      total += std::clamp(sum, nd * layer.lo, nd * layer.hi);
    }
  }
  return total;
}

PotentialMeasure PotentialMeasure::build_inversion(
    const LaplaceExponent& phi, const GridSpec& grid, int gs_order) {
  PotentialMeasure u;
  u.backend_ = PotentialBackend::kLaplaceInversion;
  u.log_power_ = phi.alpha();
  GaverStehfest gs(gs_order);
  double log_lo = std::log(grid.s_min);
  double log_hi = std::log(grid.s_max);
  u.breakpoints_.resize(static_cast<std::size_t>(grid.points));
  u.cdf_values_.resize(static_cast<std::size_t>(grid.points));
  for (int i = 0; i < grid.points; ++i) {
    double s =
        std::exp(log_lo + (log_hi - log_lo) * i / double(grid.points - 1));
    bool bad = false;
    double c = gs.cdf([&phi](double l) { return phi(l); }, s, &bad);
    u.breakpoints_[static_cast<std::size_t>(i)] = s;
    u.cdf_values_[static_cast<std::size_t>(i)] = std::clamp(c, 0.0, 1.0);
    u.unstable_ = u.unstable_ || bad;
  }
  // The transform pins U(R+) = 1 / (1 + Phi(0+)) = 1; inversion noise can
  // break monotonicity at the sub-tolerance level, so restore it.
  for (std::size_t i = 1; i < u.cdf_values_.size(); ++i) {
    u.cdf_values_[i] = std::max(u.cdf_values_[i], u.cdf_values_[i - 1]);
  }
  u.mass_tail_ = 1.0 - u.cdf_values_.back();
  return u;
}

PotentialMeasure PotentialMeasure::build_monte_carlo(
    const SubordinatorSampler& sampler, std::size_t paths, std::uint64_t seed,
    const GridSpec& grid) {
  PotentialMeasure u;
  u.backend_ = PotentialBackend::kMonteCarlo;
  u.log_power_ = sampler.alpha();
  std::vector<double> draws(paths);
  for (std::size_t i = 0; i < paths; ++i) {
    CounterRng rng(derive_key(seed, "potential-mc", i));
    draws[i] = sampler.draw(rng);
  }
  std::sort(draws.begin(), draws.end());
  double log_lo = std::log(grid.s_min);
  double log_hi = std::log(grid.s_max);
  u.breakpoints_.resize(static_cast<std::size_t>(grid.points));
  u.cdf_values_.resize(static_cast<std::size_t>(grid.points));
  for (int i = 0; i < grid.points; ++i) {
    double s =
        std::exp(log_lo + (log_hi - log_lo) * i / double(grid.points - 1));
    auto it = std::lower_bound(draws.begin(), draws.end(), s);
    u.breakpoints_[static_cast<std::size_t>(i)] = s;
    u.cdf_values_[static_cast<std::size_t>(i)] =
        double(it - draws.begin()) / double(paths);
  }
  u.mass_tail_ = 1.0 - u.cdf_values_.back();
  return u;
}

double PotentialMeasure::cdf(double eps) const {
  if (eps <= 0.0) return 0.0;
  double s0 = breakpoints_.front();
  if (eps < s0) {
    // Below the grid U[0, eps) scales like sqrt(eps) with a slowly varying
    // log correction; extrapolate with both factors.
    double ratio = std::sqrt(eps / s0) *
                   std::pow(std::log(1.0 / s0) / std::log(1.0 / eps),
                            log_power_);
    return cdf_values_.front() * ratio;
  }
  if (eps >= breakpoints_.back()) return cdf_values_.back();
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), eps);
  std::size_t i = static_cast<std::size_t>(it - breakpoints_.begin());
  double t = (std::log(eps) - std::log(breakpoints_[i - 1])) /
             (std::log(breakpoints_[i]) - std::log(breakpoints_[i - 1]));
  return cdf_values_[i - 1] + t * (cdf_values_[i] - cdf_values_[i - 1]);
}

double PotentialMeasure::weak_unimodality_ratio() const {
  double worst = 0.0;
  double s_lo = breakpoints_.front() * 10.0;
  double s_hi = breakpoints_.back() / 10.0;
  for (int ix = 0; ix < 48; ++ix) {
    double x = s_lo * std::pow(s_hi / s_lo, ix / 47.0);
    for (int ir = 0; ir < 24; ++ir) {
      double r = x * std::pow(1e-4, ir / 23.0);
      double denom = cdf(r);
      if (denom <= 0.0) continue;
      double band = cdf(x + r) - cdf(std::max(x - r, 0.0));
      worst = std::max(worst, band / denom);
    }
  }
  return worst;
}

double heat_kernel(double t, double r) {
  return std::pow(2.0 * kPi * t, -1.5) * std::exp(-r * r / (2.0 * t));
}

// Uniform-grid cubic interpolation with central-difference slopes.
struct UniformSpline {
  double x0 = 0.0, h = 1.0;
  std::vector<double> y;

  void build(double lo, double hi, int n,
             const std::function<double(double)>& f) {
    x0 = lo;
    h = (hi - lo) / (n - 1);
    y.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = f(lo + i * h);
  }

  double eval(double x) const {
    double t = (x - x0) / h;
    auto n = static_cast<long>(y.size());
    long i = std::clamp(static_cast<long>(t), 0L, n - 2);
    t -= double(i);
    double ym = y[static_cast<std::size_t>(std::max(i - 1, 0L))];
    double y0 = y[static_cast<std::size_t>(i)];
    double y1 = y[static_cast<std::size_t>(i + 1)];
    double yp = y[static_cast<std::size_t>(std::min(i + 2, n - 1))];
    double m0 = 0.5 * (y1 - ym);
    double m1 = 0.5 * (yp - y0);
    double t2 = t * t, t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 +
           (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1;
  }
};

struct CorrelationModel::PhiSpline {
  static constexpr double kDenseLo = -30.0;
  static constexpr double kDenseHi = 60.0;
  static constexpr double kCoarseHi = 5000.0;
  static constexpr double kLogHi = 1e18;
  UniformSpline dense;     // log Phi on L in [kDenseLo, kDenseHi]
  UniformSpline coarse;    // log Phi on L in [kDenseHi, kCoarseHi]
  UniformSpline residual;  // log Phi - asymptotic, on log L past kCoarseHi
  double alpha = 0.0;

  double asymptotic(double L) const {
    // log of (4 pi e^L)^{1/2} L^alpha
    return 0.5 * (std::log(4.0 * kPi) + L) + alpha * std::log(L);
  }
};

const CorrelationModel::PhiSpline& CorrelationModel::phi_spline() const {
  if (!spline_) {
    auto s = std::make_unique<PhiSpline>();
    s->alpha = alpha_.alpha;
    auto exact = [this](double L) { return phi_.log_value(L); };
    s->dense.build(PhiSpline::kDenseLo, PhiSpline::kDenseHi, 1801, exact);
    s->coarse.build(PhiSpline::kDenseHi, PhiSpline::kCoarseHi, 4941, exact);
    const PhiSpline* sp = s.get();
    s->residual.build(std::log(PhiSpline::kCoarseHi),
                      std::log(PhiSpline::kLogHi), 513,
                      [&exact, sp](double x) {
                        double L = std::exp(x);
                        return exact(L) - sp->asymptotic(L);
                      });
    spline_ = std::move(s);
  }
  return *spline_;
}

double CorrelationModel::log_phi_cached(double L) const {
  const PhiSpline& s = phi_spline();
  if (L <= PhiSpline::kDenseHi) return s.dense.eval(L);
  if (L <= PhiSpline::kCoarseHi) return s.coarse.eval(L);
  if (L <= PhiSpline::kLogHi) {
    return s.asymptotic(L) + s.residual.eval(std::log(L));
  }
  // The residual decays like 1/L; utterly negligible out here.
  return s.asymptotic(L);
}

CorrelationModel::CorrelationModel(AlphaParam alpha, ModelOptions opts)
    : alpha_(alpha),
      opts_(opts),
      phi_(alpha, opts.quad),
      sampler_(alpha, opts.subordinator_delta),
      small_lambda_slope_(LevyDensity(alpha).finite_variation_integral()) {}

CorrelationModel::~CorrelationModel() = default;
CorrelationModel::CorrelationModel(CorrelationModel&&) noexcept = default;
CorrelationModel& CorrelationModel::operator=(CorrelationModel&&) noexcept =
    default;

const PotentialMeasure& CorrelationModel::potential(
    PotentialBackend backend) const {
  if (backend == PotentialBackend::kLaplaceInversion) {
    if (!inversion_) {
      inversion_ = std::make_unique<PotentialMeasure>(
          PotentialMeasure::build_inversion(phi_, opts_.grid, opts_.gs_order));
    }
    return *inversion_;
  }
  if (!monte_carlo_) {
    monte_carlo_ = std::make_unique<PotentialMeasure>(
        PotentialMeasure::build_monte_carlo(sampler_, opts_.mc_paths,
                                            opts_.mc_seed, opts_.grid));
  }
  return *monte_carlo_;
}

double CorrelationModel::potential_cdf(double eps,
                                       PotentialBackend backend) const {
  return potential(backend).cdf(eps);
}

double CorrelationModel::log_fhat(double log_z_norm) const {
  double L = 2.0 * log_z_norm - kLn2;  // log of ||z||^2 / 2
  if (L < std::log(opts_.grid.s_min)) {
    // Phi(lambda) ~ lambda * int t nu(dt) as lambda -> 0.
    return -std::log1p(std::exp(L) * small_lambda_slope_);
  }
  double lp = log_phi_cached(L);
  if (lp > 36.0) return -lp;
  return -std::log1p(std::exp(lp));
}

double CorrelationModel::fhat(double z_norm) const {
  if (z_norm <= 0.0) return 1.0;
  if (z_norm < 1e150) return 1.0 / (1.0 + phi_(z_norm * z_norm / 2.0));
  return std::exp(log_fhat(std::log(z_norm)));
}

double CorrelationModel::trusted_radius() const {
  return 3.0 * std::sqrt(opts_.grid.s_min);
}

double CorrelationModel::phi_profile(double r) const {
  if (r < trusted_radius()) {
    throw std::domain_error(
        "kernel evaluation at radius " + std::to_string(r) +
        " below the smallest trusted radius " +
        std::to_string(trusted_radius()) +
        " of the discretized potential measure");
  }
  const PotentialMeasure& u = potential(PotentialBackend::kLaplaceInversion);
  const std::vector<double>& s = u.breakpoints();
  const std::vector<double>& c = u.cdf_values();
  double total = 0.0;
  // Head [0, s_0): refine with the extrapolated CDF so radii near the
  // trusted floor still see a resolved peak.
  {
    int sub = 32;
    double lo = s.front() * 1e-4;
    double prev_s = 0.0, prev_c = 0.0;
    for (int j = 1; j <= sub; ++j) {
      double sj = lo * std::pow(s.front() / lo, j / double(sub));
      double cj = u.cdf(sj);
      double w = cj - prev_c;
      if (w > 0.0) {
        double rep = prev_s > 0.0 ? std::sqrt(prev_s * sj) : sj / 2.0;
        total += w * heat_kernel(rep, r);
      }
      prev_s = sj;
      prev_c = cj;
    }
  }
  for (std::size_t i = 1; i < s.size(); ++i) {
    double w = c[i] - c[i - 1];
    if (w <= 0.0) continue;
    total += w * heat_kernel(std::sqrt(s[i - 1] * s[i]), r);
  }
  if (u.mass_tail() > 0.0) total += u.mass_tail() * heat_kernel(s.back(), r);
  return total;
}

double CorrelationModel::dalang_integral(double cutoff) const {
  double head = integrate_or_throw(
                    [this](double r) {
                      return r * r / (1.0 + r * r) * fhat(r);
                    },
                    0.0, std::min(cutoff, 1.0));
  double tail = 0.0;
  if (cutoff > 1.0) {
    tail = integrate_or_throw(
               [this](double w) {
                 double e2 = std::exp(2.0 * w);
                 return std::exp(3.0 * w + log_fhat(w)) / (1.0 + e2);
               },
               0.0, std::log(cutoff));
  }
  return (head + tail) / (2.0 * kPi * kPi);
}

double CorrelationModel::log_heat_convolution_at_zero(double log_t) const {
  double J = integrate_or_throw(
                 [this, log_t](double rho) {
                   if (rho <= 0.0) return 0.0;
                   return rho * rho *
                          std::exp(-rho * rho +
                                   log_fhat(std::log(rho) - 0.5 * log_t));
                 },
                 0.0, 7.0);
  return std::log(J / (2.0 * kPi * kPi)) - 1.5 * log_t;
}

double CorrelationModel::heat_convolution_at_zero(double t) const {
  return std::exp(log_heat_convolution_at_zero(std::log(t)));
}

double CorrelationModel::resolvent_at_zero(double lambda) const {
  if (!(lambda >= std::exp(1.0))) {
    throw std::invalid_argument("resolvent evaluation requires lambda >= e");
  }
  double q0 = std::log(lambda);
  double s1 = 1.0 / lambda;
  // s in [1/lambda, 80/lambda]: smooth, exponentially damped.
  double upper = integrate_or_throw(
                     [this, lambda](double s) {
                       return std::exp(log_heat_convolution_at_zero(
                                           std::log(s / 2.0)) -
                                       lambda * s);
                     },
                     s1, 80.0 / lambda, {1e-7, 0.0, 4000});
  // s in (0, 1/lambda] in q = log(1/s): the integrand decays like q^{-alpha},
  // a logarithmic tail.
  double a = alpha_.alpha;
  double lower = integrate_log_tail(
      [this, lambda](double q) {
        double log_s = -q;
        return std::exp(log_heat_convolution_at_zero(log_s - kLn2) + log_s -
                        lambda * std::exp(log_s));
      },
      q0, a, 1e-5);
  return upper + lower;
}

AdmissibilityReport dalang_admissibility(double alpha_raw, double base_cutoff,
                                         int doublings) {
  QuadOptions quad;
  auto log_fhat_raw = [alpha_raw, &quad](double w) {
    double L = 2.0 * w - kLn2;
    double log_phi = (L <= std::log(kPhiDirectMax))
                         ? std::log(phi_direct(alpha_raw, std::exp(L), quad))
                         : 0.5 * L + std::log(phi_scaled_integral(
                                         alpha_raw, L, quad));
    if (log_phi > 36.0) return -log_phi;
    return -std::log1p(std::exp(log_phi));
  };
  auto fhat_raw = [&log_fhat_raw](double r) {
    return r > 0.0 ? std::exp(log_fhat_raw(std::log(r))) : 1.0;
  };
  auto value_at = [&](double cutoff) {
    double head = integrate_or_throw(
                      [&](double r) {
                        return r * r / (1.0 + r * r) * fhat_raw(r);
                      },
                      0.0, std::min(cutoff, 1.0));
    double tail = 0.0;
    if (cutoff > 1.0) {
      tail = integrate_or_throw(
                 [&](double w) {
                   double e2 = std::exp(2.0 * w);
                   return std::exp(3.0 * w + log_fhat_raw(w)) / (1.0 + e2);
                 },
                 0.0, std::log(cutoff));
    }
    return (head + tail) / (2.0 * kPi * kPi);
  };
  AdmissibilityReport report;
  double cutoff = base_cutoff;
  report.values.push_back(value_at(cutoff));
  double rel = 1.0;
  for (int i = 0; i < doublings; ++i) {
    cutoff *= 2.0;
    double next = value_at(cutoff);
    rel = (next - report.values.back()) / next;
    report.values.push_back(next);
  }
  report.last_rel_increment = rel;
  // In w = log r the integrand is exp(w + log_fhat(w)) up to a factor that
  // is 1 beyond w ~ few; its decay exponent in log w decides convergence.
  double w1 = std::max(20.0, std::log(base_cutoff));
  double w2 = 2.0 * w1;
  report.tail_decay_exponent =
      ((w1 + log_fhat_raw(w1)) - (w2 + log_fhat_raw(w2))) /
      std::log(w2 / w1);
  report.admissible = report.tail_decay_exponent > 1.02;
  return report;
}

}  // namespace rough
