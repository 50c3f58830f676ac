#include "edsense/specfun.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "edsense/error.hpp"

namespace edsense::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Above this argument the Bessel asymptotic expansion is used, provided
// x also exceeds order^2.
constexpr double kBesselAsymptoticMin = 30.0;

// Continued fraction for erfcx, valid and fast for x >= ~2.
double erfcx_continued_fraction(double x) {
  // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
  // evaluated with the modified Lentz algorithm.
  constexpr double kTiny = 1e-300;
  double f = x;
  double c = x;
  double d = 0.0;
  for (int n = 1; n < 5000; ++n) {
    const double a = 0.5 * n;
    d = x + a * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = x + a / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 0.5 * kEps) {
      return 1.0 / (std::sqrt(std::numbers::pi) * f);
    }
  }
  throw ConvergenceError("erfcx: continued fraction did not converge at x = " +
                         std::to_string(x));
}

// Power series in (x/2)^2 for I_v(x)/x^v, returned as a log.
double log_bessel_ratio_series(double v, double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  double log_scale = 0.0;
  for (int k = 1; k < 1000000; ++k) {
    term *= q / (k * (k + v));
    sum += term;
    if (sum > 1e250) {
      sum *= 1e-250;
      term *= 1e-250;
      log_scale += 250.0 * std::numbers::ln10;
    }
    // Terms rise until k(k+v) ~ q, then fall geometrically.
    if (k * (k + v) > q && term < kEps * 0.25 * sum) break;
  }
  return std::log(sum) + log_scale - v * std::numbers::ln2 - std::lgamma(v + 1.0);
}

// ln I_v(x) from the large-argument expansion
// I_v(x) ~ e^x / sqrt(2 pi x) * sum_k (-1)^k a_k(v) / x^k.
double log_bessel_i_asymptotic(double v, double x) {
  const double mu = 4.0 * v * v;
  double term = 1.0;
  double sum = 1.0;
  double prev_abs = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (8.0 * k * x);
    const double a = std::abs(term);
    if (a > prev_abs) break;  // series started diverging
    sum += term;
    if (a < kEps * std::abs(sum)) break;
    prev_abs = a;
  }
  return x - 0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(sum);
}

void check_bessel_args(double order, double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw DomainError("bessel_i: argument must be finite and >= 0");
  }
  if (!(order >= -0.5) || !std::isfinite(order)) {
    throw DomainError("bessel_i: order must be >= -0.5");
  }
}

// L_n(x) and L_{n-1}(x) by the three-term recurrence, with a shared
// power-of-two scale factor so that large orders and nodes do not overflow.
struct LaguerrePair {
  double ln;       // scaled L_n(x)
  double ln_prev;  // scaled L_{n-1}(x)
  double log_scale;
};

LaguerrePair laguerre_pair(int n, double x) {
  double p_prev = 1.0;  // L_0
  double p = 1.0 - x;   // L_1
  double log_scale = 0.0;
  if (n == 0) return {1.0, 0.0, 0.0};
  for (int j = 1; j < n; ++j) {
    const double next = ((2.0 * j + 1.0 - x) * p - j * p_prev) / (j + 1.0);
    p_prev = p;
    p = next;
    if (std::abs(p) > 1e200) {
      p *= 1e-200;
      p_prev *= 1e-200;
      log_scale += 200.0 * std::numbers::ln10;
    }
  }
  return {p, p_prev, log_scale};
}

}  // namespace

double erfc(double x) {
  if (std::isnan(x)) throw DomainError("erfc: NaN argument");
  return std::erfc(x);
}

double erfcx(double x) {
  if (std::isnan(x)) throw DomainError("erfcx: NaN argument");
  if (x < 2.0) return std::exp(x * x) * std::erfc(x);
  if (x > 1e4) {
    // Asymptotic series; the next term is below 1e-23 relative here, and the
    // continued fraction stalls on rounding once x^2 swamps its partials.
    const double r = 1.0 / (x * x);
    return (1.0 - 0.5 * r * (1.0 - 1.5 * r)) / (x * std::sqrt(std::numbers::pi));
  }
  return erfcx_continued_fraction(x);
}

double inv_erfc(double p) {
  if (!(p > 0.0 && p < 2.0)) {
    throw DomainError("inv_erfc: p must lie in (0, 2)");
  }
  if (p == 1.0) return 0.0;
  if (p > 1.0) return -inv_erfc(2.0 - p);

  // Solve erfc(x) = p for x > 0. Bracket, then safeguarded Newton on
  // g(x) = erfc(x) - p, whose derivative is -2/sqrt(pi) exp(-x^2).
  double lo = 0.0;
  double hi = 1.0;
  while (std::erfc(hi) > p) {
    lo = hi;
    hi *= 2.0;
    if (hi > 64.0) throw DomainError("inv_erfc: p below representable range");
  }
  // Asymptotic starting point: erfc(x) ~ exp(-x^2) / (x sqrt(pi)).
  double x = std::sqrt(std::max(-std::log(p * std::sqrt(std::numbers::pi)), 0.25));
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double g = std::erfc(x) - p;
    if (g == 0.0) return x;
    if (g > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double slope = -2.0 / std::sqrt(std::numbers::pi) * std::exp(-x * x);
    double next = x - g / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 2.0 * kEps * std::abs(x)) return next;
    x = next;
  }
  return x;
}

double ln_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("ln_gamma: argument must be > 0");
  return std::lgamma(x);
}

double gamma_p(double a, double x) {
  if (!(a > 0.0)) throw DomainError("gamma_p: shape must be > 0");
  if (!(x >= 0.0)) throw DomainError("gamma_p: argument must be >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double log_prefix = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    // Series: P(a,x) = x^a e^-x / Gamma(a+1) * sum x^n / ((a+1)...(a+n)).
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 0; n < 100000; ++n) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * kEps) {
        return std::min(1.0, sum * std::exp(log_prefix));
      }
    }
    throw ConvergenceError("gamma_p: series did not converge");
  }
  // Continued fraction for Q(a,x), modified Lentz.
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) {
      return std::max(0.0, 1.0 - std::exp(log_prefix) * h);
    }
  }
  throw ConvergenceError("gamma_p: continued fraction did not converge");
}

double log_bessel_i_ratio(double order, double x) {
  if (!(order > -1.0) || !std::isfinite(order)) {
    throw DomainError("log_bessel_i_ratio: order must be > -1");
  }
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw DomainError("log_bessel_i_ratio: argument must be finite and >= 0");
  }
  if (x == 0.0) return -order * std::numbers::ln2 - std::lgamma(order + 1.0);
  if (x >= kBesselAsymptoticMin && x >= order * order) {
    return log_bessel_i_asymptotic(order, x) - order * std::log(x);
  }
  return log_bessel_ratio_series(order, x);
}

double bessel_i(double order, double x) {
  check_bessel_args(order, x);
  if (x == 0.0) {
    if (order == 0.0) return 1.0;
    return order > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::exp(log_bessel_i_ratio(order, x) + order * std::log(x));
}

double bessel_i_scaled(double order, double x) {
  check_bessel_args(order, x);
  if (x == 0.0) return bessel_i(order, 0.0);
  return std::exp(log_bessel_i_ratio(order, x) + order * std::log(x) - x);
}

QuadratureRule gauss_laguerre(int order) {
  if (order < 1 || order > kMaxLaguerreOrder) {
    throw DomainError("gauss_laguerre: order must be in [1, " +
                      std::to_string(kMaxLaguerreOrder) + "]");
  }
  const auto n = static_cast<Eigen::Index>(order);

  // Golub-Welsch: the nodes are the eigenvalues of the symmetric Jacobi
  // matrix with diagonal 2i+1 and off-diagonal i+1.
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(std::max<Eigen::Index>(n - 1, 1));
  for (Eigen::Index i = 0; i < n; ++i) diag(i) = 2.0 * static_cast<double>(i) + 1.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) sub(i) = static_cast<double>(i) + 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("gauss_laguerre: eigenvalue solver failed");
  }

  QuadratureRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  rule.log_weights.resize(order);
  for (int i = 0; i < order; ++i) {
    double x = solver.eigenvalues()(i);
    // Newton polish on L_n; x L_n'(x) = n (L_n(x) - L_{n-1}(x)).
    for (int it = 0; it < 8; ++it) {
      const LaguerrePair lp = laguerre_pair(order, x);
      const double deriv = order * (lp.ln - lp.ln_prev) / x;
      const double step = lp.ln / deriv;
      x -= step;
      if (std::abs(step) <= 4.0 * kEps * x) break;
    }
    // w_i = x_i / ((n+1)^2 L_{n+1}(x_i)^2).
    const LaguerrePair next = laguerre_pair(order + 1, x);
    const double log_w = std::log(x) - 2.0 * std::log(order + 1.0) -
                         2.0 * (std::log(std::abs(next.ln)) + next.log_scale);
    rule.nodes[i] = x;
    rule.log_weights[i] = log_w;
    rule.weights[i] = std::exp(log_w);
  }
  return rule;
}

}  // namespace edsense::specfun
