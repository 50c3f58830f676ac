#include "edsense/detector.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "edsense/error.hpp"
#include "edsense/integrate.hpp"
#include "edsense/specfun.hpp"

namespace edsense {

namespace {

constexpr double kTwoOverSqrtPi = 2.0 / 1.7724538509055160273;

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// e^(-c2^2) * erfcx(v), evaluated without overflow for v >= c2 when c2 < 0.
double damped_erfcx(double v, double c2) {
  if (v < 0.0) return std::exp(v * v - c2 * c2) * specfun::erfc(v);
  return std::exp(-c2 * c2) * specfun::erfcx(v);
}

// e^(-c2^2) J_m(v) for m = 0..n, J_m(v) = int_0^inf t^m e^(-t^2 - 2 v t) dt.
//
// The J_m satisfy 2 J_m + 2 v J_(m-1) = (m-1) J_(m-2). Upward recursion
// cancels badly for positive v, where J is the minimal solution; there the
// recurrence is run downward from a far starting index (Miller) and
// normalized by J_0.
std::vector<double> damped_laplace_moments(int n, double v, double c2) {
  std::vector<double> j(n + 1);
  j[0] = 0.5 * std::sqrt(std::numbers::pi) * damped_erfcx(v, c2);
  if (n == 0) return j;
  constexpr double kMillerThreshold = 1.0;
  if (v < kMillerThreshold) {
    j[1] = 0.5 * (std::exp(-c2 * c2) - 2.0 * v * j[0]);
    for (int m = 2; m <= n; ++m) j[m] = 0.5 * ((m - 1) * j[m - 2] - 2.0 * v * j[m - 1]);
    return j;
  }
  if (j[0] == 0.0) return j;
  const double root = std::sqrt(2.0 * n) + 20.0 / v;
  const int start = n + static_cast<int>(std::ceil(0.5 * root * root)) + 5;
  std::vector<double> y(start + 2, 0.0);
  // J_m shrinks roughly like Gamma(m/2) going down; rescale to stay clear of
  // underflow. Only indices <= n and the two carried values are kept.
  y[start] = 1.0;
  for (int m = start + 1; m >= 2; --m) {
    y[m - 2] = (2.0 * y[m] + 2.0 * v * y[m - 1]) / (m - 1);
    if (y[m - 2] < 1e-200) {
      for (int i = m - 2; i <= std::max(m, n); ++i) y[i] *= 1e200;
    }
  }
  const double scale = j[0] / y[0];
  for (int m = 1; m <= n; ++m) j[m] = y[m] * scale;
  return j;
}

// Expectation over T ~ Gamma(shape, 1) of erfc(c1 T / rate + c2).
double gamma_expected_erfc(double shape, double rate, const DetectorConstants& k) {
  const double lg = specfun::ln_gamma(shape);
  const double t_max = shape + 40.0 + 12.0 * std::sqrt(shape);
  const double t_star = -k.c2 * rate / k.c1;      // erfc argument crosses 0
  const double t_width = 6.0 * rate / k.c1;       // erfc falls from ~2 to ~0
  std::vector<double> marks{t_star - t_width, t_star, t_star + t_width, shape - 1.0};

  integrate::Tolerance tol;
  tol.absolute = 1e-13;
  tol.relative = 1e-12;
  tol.max_subdivisions = 4000;

  auto arg = [&](double t) { return k.c1 * t / rate + k.c2; };
  std::vector<double> breaks;
  if (shape >= 1.0) {
    breaks.push_back(0.0);
    for (double m : marks) {
      if (m > 0.0 && m < t_max) breaks.push_back(m);
    }
    breaks.push_back(t_max);
    std::sort(breaks.begin(), breaks.end());
    auto f = [&](double t) {
      const double log_density = (t > 0.0 ? (shape - 1.0) * std::log(t) : 0.0) - t - lg;
      return std::exp(log_density) * specfun::erfc(arg(t));
    };
    return integrate::adaptive_or_throw(f, breaks, tol, "pd_avg_quadrature");
  }
  // shape < 1: substitute t = s^(1/shape) to remove the endpoint singularity.
  const double inv = 1.0 / shape;
  const double s_max = std::pow(t_max, shape);
  breaks.push_back(0.0);
  for (double m : marks) {
    if (m > 0.0 && m < t_max) breaks.push_back(std::pow(m, shape));
  }
  breaks.push_back(s_max);
  std::sort(breaks.begin(), breaks.end());
  const double prefactor = std::exp(-lg) * inv;
  auto f = [&](double s) {
    const double t = std::pow(s, inv);
    return prefactor * std::exp(-t) * specfun::erfc(arg(t));
  };
  return integrate::adaptive_or_throw(f, breaks, tol, "pd_avg_quadrature");
}

// For z small against c1 the Leibniz sum cancels (its terms grow like
// n!/z^(n+1)). There, expand e^(-z g) instead:
//   (-1)^n F^(n)(z) = sum_m (-z)^m / m! M_(n+m),
//   M_p = integral_0^inf g^p erfc(c1 g + c2) dg
//       = 2 e^(-c2^2) J_(p+1)(c2) / (sqrt(pi) (p+1) c1^(p+1)).
std::optional<double> erfc_laplace_derivative_series(int n, double z,
                                                    const DetectorConstants& k) {
  // J_m grows like Gamma((m+1)/2); 150 terms stay finite in double.
  constexpr int kMaxTerms = 150;
  const std::vector<double> j = damped_laplace_moments(n + kMaxTerms + 1, k.c2, k.c2);
  double sum = 0.0;
  double coeff = 1.0;  // (-z)^m / m!
  for (int m = 0; m < kMaxTerms; ++m) {
    const int p = n + m;
    const double term = coeff * kTwoOverSqrtPi * j[p + 1] / ((p + 1) * std::pow(k.c1, p + 1));
    if (!std::isfinite(term)) return std::nullopt;
    sum += term;
    if (m > 4 && std::abs(term) <= 1e-17 * std::abs(sum)) return (n % 2) ? -sum : sum;
    coeff *= -z / (m + 1);
  }
  return std::nullopt;
}

}  // namespace

double signal_variance_growth(SignalModel model, double snr) {
  return model == SignalModel::CSCG ? 2.0 * snr + snr * snr : 2.0 * snr;
}

SignalModel parse_signal_model(std::string_view name) {
  if (name == "cscg" || name == "CSCG") return SignalModel::CSCG;
  if (name == "psk" || name == "PSK") return SignalModel::PSK;
  throw DomainError("unknown signal model '" + std::string(name) + "' (expected cscg or psk)");
}

std::string_view to_string(SignalModel model) {
  return model == SignalModel::CSCG ? "cscg" : "psk";
}

void DetectorConfig::validate() const {
  if (n_samples < 1) throw DomainError("detector: n_samples must be >= 1");
  if (!(noise_power > 0.0) || !std::isfinite(noise_power)) {
    throw DomainError("detector: noise_power must be finite and > 0");
  }
  if (!(threshold > 0.0) || !std::isfinite(threshold)) {
    throw DomainError("detector: threshold must be finite and > 0");
  }
}

DetectorConstants DetectorConstants::from(const DetectorConfig& cfg) {
  cfg.validate();
  const double n = static_cast<double>(cfg.n_samples);
  return {std::sqrt(0.5 * n),
          (n * cfg.noise_power - cfg.threshold) / (std::sqrt(2.0 * n) * cfg.noise_power)};
}

double pf(const DetectorConfig& cfg) {
  cfg.validate();
  const double n = static_cast<double>(cfg.n_samples);
  return 0.5 * specfun::erfc((cfg.threshold - n * cfg.noise_power) /
                             (std::sqrt(2.0 * n) * cfg.noise_power));
}

double threshold_for_pf(std::int64_t n_samples, double noise_power, double target_pf) {
  if (!(target_pf > 0.0 && target_pf < 1.0)) {
    throw DomainError("threshold_for_pf: target must lie in (0, 1)");
  }
  if (n_samples < 1) throw DomainError("threshold_for_pf: n_samples must be >= 1");
  if (!(noise_power > 0.0)) throw DomainError("threshold_for_pf: noise_power must be > 0");
  const double n = static_cast<double>(n_samples);
  return n * noise_power + std::sqrt(2.0 * n) * noise_power * specfun::inv_erfc(2.0 * target_pf);
}

DetectorConfig config_for_pf(std::int64_t n_samples, double noise_power, double target_pf,
                             SignalModel model) {
  DetectorConfig cfg{n_samples, noise_power, threshold_for_pf(n_samples, noise_power, target_pf),
                     model};
  cfg.validate();
  return cfg;
}

double pd_instant(const DetectorConfig& cfg, double snr, bool low_snr) {
  cfg.validate();
  if (!(snr >= 0.0)) throw DomainError("pd_instant: SNR must be >= 0");
  const double n = static_cast<double>(cfg.n_samples);
  double spread = std::sqrt(2.0 * n) * cfg.noise_power;
  if (!low_snr) spread *= std::sqrt(1.0 + signal_variance_growth(cfg.signal_model, snr));
  return 0.5 * specfun::erfc((cfg.threshold - n * cfg.noise_power * (1.0 + snr)) / spread);
}

double erfc_laplace_derivative(int n, double z, const DetectorConstants& k) {
  if (n < 0 || n > kMaxClosedFormShape - 1) {
    throw DomainError("erfc_laplace_derivative: order must be in [0, " +
                      std::to_string(kMaxClosedFormShape - 1) + "]");
  }
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw DomainError("erfc_laplace_derivative: rate must be finite and > 0");
  }
  if (z < 2.0 * k.c1) {
    if (auto series = erfc_laplace_derivative_series(n, z, k)) return *series;
  }
  const double v = k.c2 + z / (2.0 * k.c1);
  const std::vector<double> j = damped_laplace_moments(n, v, k.c2);

  // h(z) = erfc(c2) - e^(-c2^2) erfcx(v); for m >= 1,
  // h^(m)(z) = -(-1/c1)^m (2/sqrt(pi)) e^(-c2^2) J_m(v).
  std::array<double, kMaxClosedFormShape> dh{};
  dh[0] = specfun::erfc(k.c2) - kTwoOverSqrtPi * j[0];
  double factor = 1.0;
  for (int m = 1; m <= n; ++m) {
    factor *= -1.0 / k.c1;
    dh[m] = -factor * kTwoOverSqrtPi * j[m];
  }
  // Leibniz rule with d^r/dz^r (1/z) = (-1)^r r! z^-(r+1).
  double sum = 0.0;
  for (int m = 0; m <= n; ++m) {
    const int r = n - m;
    const double inv_deriv = ((r % 2) ? -1.0 : 1.0) * factorial(r) / std::pow(z, r + 1);
    sum += binomial(n, m) * dh[m] * inv_deriv;
  }
  return sum;
}

bool closed_form_applicable(const MixtureGamma& mg) {
  for (const auto& t : mg.terms()) {
    const double r = std::round(t.shape);
    if (std::abs(t.shape - r) > 1e-12 || r < 1.0 || r > kMaxClosedFormShape) return false;
  }
  return true;
}

double pd_avg_closed_form(const MixtureGamma& mg, const DetectorConfig& cfg) {
  if (!closed_form_applicable(mg)) {
    throw DomainError("pd_avg_closed_form: every shape must be an integer in [1, " +
                      std::to_string(kMaxClosedFormShape) + "]");
  }
  const DetectorConstants k = DetectorConstants::from(cfg);
  double sum = 0.0;
  for (const auto& t : mg.terms()) {
    const int order = static_cast<int>(std::round(t.shape)) - 1;
    const double sign = (order % 2) ? -1.0 : 1.0;
    sum += t.weight * sign * erfc_laplace_derivative(order, t.rate, k);
  }
  return 1.0 - 0.5 * sum;
}

double pd_avg_quadrature(const MixtureGamma& mg, const DetectorConfig& cfg) {
  const DetectorConstants k = DetectorConstants::from(cfg);
  double sum = 0.0;
  for (const auto& t : mg.terms()) {
    const double mass =
        t.weight * std::exp(specfun::ln_gamma(t.shape) - t.shape * std::log(t.rate));
    sum += mass * gamma_expected_erfc(t.shape, t.rate, k);
  }
  return 1.0 - 0.5 * sum;
}

AvgMethod parse_avg_method(std::string_view name) {
  if (name == "auto") return AvgMethod::Auto;
  if (name == "closed") return AvgMethod::ClosedForm;
  if (name == "quadrature") return AvgMethod::Quadrature;
  throw DomainError("unknown method '" + std::string(name) +
                    "' (expected auto, closed or quadrature)");
}

double pd_avg(const MixtureGamma& mg, const DetectorConfig& cfg, AvgMethod method) {
  switch (method) {
    case AvgMethod::ClosedForm:
      return pd_avg_closed_form(mg, cfg);
    case AvgMethod::Quadrature:
      return pd_avg_quadrature(mg, cfg);
    case AvgMethod::Auto:
      break;
  }
  return closed_form_applicable(mg) ? pd_avg_closed_form(mg, cfg) : pd_avg_quadrature(mg, cfg);
}

double p_md(const MixtureGamma& mg, const DetectorConfig& cfg, AvgMethod method) {
  return 1.0 - pd_avg(mg, cfg, method);
}

}  // namespace edsense
