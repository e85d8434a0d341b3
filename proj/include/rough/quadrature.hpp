#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace rough {

/// Raised when an adaptive rule exhausts its interval budget before
/// reaching the requested tolerance.  Carries the best error estimate
/// achieved so far.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double achieved_error)
      : std::runtime_error(what + " (achieved error estimate " +
                           std::to_string(achieved_error) + ")"),
        achieved_error(achieved_error) {}
  double achieved_error;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;   // absolute error estimate
  std::size_t evals = 0;
  bool converged = false;
};

struct QuadOptions {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  std::size_t max_intervals = 4000;
};

/// Adaptive Gauss-Kronrod 7/15 on [a, b].  Bisects the interval with the
/// largest error estimate until the global estimate meets tolerance.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opts = {});

/// Same, but throws ConvergenceError instead of returning converged=false.
double integrate_or_throw(const std::function<double(double)>& f, double a,
                          double b, const QuadOptions& opts = {},
                          const std::string& label = "integrate");

/// Integral over [u0, inf) of g(u), where g eventually decays like
/// u^(-decay) with decay > 1.  Uses geometrically growing panels
/// [u, 2u] plus a power-law remainder estimate once panels stabilize.
/// Intended for spectral tails that decay like a power of log(r): the
/// caller substitutes u = log(r) and these integrals converge far too
/// slowly for any fixed-range rule.
double integrate_log_tail(const std::function<double(double)>& g, double u0,
                          double decay, double rel_tol = 1e-5,
                          int max_doublings = 60);

}  // namespace rough
