// Adaptive Gauss-Kronrod (7/15) integration on finite intervals.
#pragma once

#include <functional>
#include <span>

namespace edsense::integrate {

struct Tolerance {
  double absolute = 0.0;
  double relative = 1e-10;
  int max_subdivisions = 2000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
  bool converged = false;
};

/// Globally adaptive bisection: the interval with the largest error estimate
/// is split until error <= max(absolute, relative * |value|).
Result adaptive(const std::function<double(double)>& f, double a, double b,
                const Tolerance& tol = {});

/// As adaptive(), with the initial partition given by sorted breakpoints
/// (first and last are the integration limits).
Result adaptive(const std::function<double(double)>& f,
                std::span<const double> breakpoints, const Tolerance& tol = {});

/// Same as adaptive(), but throws ConvergenceError when the tolerance is not
/// met. `what` names the caller in the exception message.
double adaptive_or_throw(const std::function<double(double)>& f,
                         std::span<const double> breakpoints, const Tolerance& tol,
                         const char* what);

}  // namespace edsense::integrate
