// Special functions and Gauss-Laguerre rules used across the library.
//
// Everything here is pure and thread-safe. Functions throw DomainError on
// arguments outside their documented domain.
#pragma once

#include <cstddef>
#include <vector>

namespace edsense::specfun {

/// Complementary error function.
double erfc(double x);

/// Scaled complementary error function exp(x^2) * erfc(x). Finite for all
/// finite x that do not overflow exp(x^2) (x > -26.6).
double erfcx(double x);

/// Inverse of erfc on (0, 2).
double inv_erfc(double p);

/// ln Gamma(x) for x > 0.
double ln_gamma(double x);

/// Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0.
double gamma_p(double a, double x);

/// Modified Bessel function of the first kind I_order(x), order >= -0.5,
/// x >= 0. Overflows to +inf beyond x ~ 713; use bessel_i_scaled there.
double bessel_i(double order, double x);

/// Scaled Bessel function exp(-x) * I_order(x). Same domain as bessel_i,
/// finite for every finite x.
double bessel_i_scaled(double order, double x);

/// ln(I_order(x) / x^order) for order > -1, x >= 0.
///
/// The ratio I_v(x)/x^v is an entire function of x^2 with value
/// 2^-v / Gamma(v + 1) at the origin, so this form stays finite as x -> 0 and
/// never overflows. The fading kernels are written in terms of it.
double log_bessel_i_ratio(double order, double x);

/// Gauss-Laguerre rule for integrals of e^-x g(x) over [0, inf).
struct QuadratureRule {
  std::vector<double> nodes;        // strictly increasing, > 0
  std::vector<double> weights;      // exp(log_weights); may underflow to 0
  std::vector<double> log_weights;  // always finite

  [[nodiscard]] std::size_t order() const noexcept { return nodes.size(); }
};

inline constexpr int kMaxLaguerreOrder = 200;

/// Nodes and weights of the order-n rule, 1 <= n <= kMaxLaguerreOrder.
/// Deterministic for a given order.
QuadratureRule gauss_laguerre(int order);

}  // namespace edsense::specfun
