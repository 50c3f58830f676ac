#include "edsense/fading.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "edsense/error.hpp"
#include "edsense/integrate.hpp"
#include "edsense/specfun.hpp"

namespace edsense {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

void require_positive(double v, const char* name) {
  if (!positive_finite(v)) {
    throw DomainError(std::string("channel parameter '") + name + "' must be finite and > 0");
  }
}

// Integral of exp(log_f(u)) over the real line, where log_f is unimodal-ish
// and negligible outside [lo, hi]. The integrand is scanned on a grid to
// locate its peak, trimmed to where it exceeds peak * e^-46, and integrated
// adaptively in units of the peak value to avoid under/overflow.
template <typename LogF>
double integrate_log_integrand(const LogF& log_f, double lo, double hi, const char* what) {
  if (!(hi > lo)) return 0.0;
  constexpr double kStep = 0.1;
  const int n = std::clamp(static_cast<int>(std::ceil((hi - lo) / kStep)), 32, 4000);
  const double h = (hi - lo) / n;
  std::vector<double> values(n + 1);
  int peak = 0;
  for (int i = 0; i <= n; ++i) {
    values[i] = log_f(lo + i * h);
    if (std::isnan(values[i])) values[i] = kNegInf;
    if (values[i] > values[peak]) peak = i;
  }
  const double log_peak = values[peak];
  if (!std::isfinite(log_peak)) return 0.0;

  constexpr double kCut = 46.0;
  int first = peak;
  while (first > 0 && values[first - 1] > log_peak - kCut) --first;
  int last = peak;
  while (last < n && values[last + 1] > log_peak - kCut) ++last;
  first = std::max(first - 1, 0);
  last = std::min(last + 1, n);

  const double a = lo + first * h;
  const double b = lo + last * h;
  const double m = lo + peak * h;
  std::vector<double> breaks{a};
  if (m > a && m < b) breaks.push_back(m);
  breaks.push_back(b);

  integrate::Tolerance tol;
  tol.relative = 1e-10;
  tol.absolute = 0.0;
  tol.max_subdivisions = 4000;
  const double scaled = integrate::adaptive_or_throw(
      [&](double u) { return std::exp(log_f(u) - log_peak); }, breaks, tol, what);
  return scaled * std::exp(log_peak);
}

// Shared description of the conditional power kernel of either family.
struct Kernel {
  double alpha;
  double k_shadow;
  double omega;
  double decay;  // exponential decay rate of the kernel density in w
  double mu;
  std::function<double(double)> log_pdf;  // ln f_W(w)
};

Kernel make_kernel(const AlphaKappaMuShadowParams& p) {
  const double kappa = p.kappa;
  const double mu = p.mu;
  return {p.alpha,
          p.k_shadow,
          p.omega,
          mu * (1.0 + kappa),
          mu,
          [kappa, mu](double w) { return kappa_mu_log_pdf(kappa, mu, w); }};
}

Kernel make_kernel(const AlphaEtaMuShadowParams& p) {
  const double h = p.h();
  const double big_h = p.big_h();
  const double mu = p.mu;
  return {p.alpha,
          p.k_shadow,
          p.omega,
          2.0 * mu * (h - std::abs(big_h)),
          mu,
          [h, big_h, mu](double w) { return eta_mu_log_pdf(h, big_h, mu, w); }};
}

// w above which the kernel density is below e^-1000 of its bulk.
double kernel_dead_w(const Kernel& k, double extra_growth) {
  return (1000.0 + 20.0 * k.mu + extra_growth) / k.decay;
}

double exact_pdf_kernel(const Kernel& k, double extra_growth, double g) {
  if (!(g > 0.0) || !std::isfinite(g)) {
    throw DomainError("exact_pdf: argument must be finite and > 0");
  }
  const double log_g = std::log(g);
  const double half_alpha = 0.5 * k.alpha;
  const double log_norm = -specfun::ln_gamma(k.k_shadow) - k.k_shadow * std::log(k.omega) +
                          std::log(half_alpha) - log_g;
  // Integrand over u = ln y: f_W(w) (alpha/2) (w/g) * y * gamma_pdf(y).
  auto log_f = [&](double u) {
    const double log_w = half_alpha * (log_g - u);
    const double w = std::exp(log_w);
    if (!(w > 0.0) || !std::isfinite(w)) return kNegInf;
    return k.log_pdf(w) + log_w + k.k_shadow * u - std::exp(u) / k.omega + log_norm;
  };
  const double lo = log_g - std::log(kernel_dead_w(k, extra_growth)) / half_alpha;
  const double hi = std::log(k.omega) + std::log(k.k_shadow + 1000.0);
  return integrate_log_integrand(log_f, lo, hi, "exact_pdf");
}

// E[W^(2/alpha)] of the kernel.
double kernel_power_moment(const Kernel& k, double extra_growth) {
  const double s = 2.0 / k.alpha;
  auto log_f = [&](double v) {
    const double w = std::exp(v);
    if (!(w > 0.0) || !std::isfinite(w)) return kNegInf;
    return k.log_pdf(w) + (s + 1.0) * v;
  };
  const double hi = std::log(kernel_dead_w(k, extra_growth));
  const double lo = -(1000.0 + 10.0 * s) / std::max(k.mu, 1e-3);
  return integrate_log_integrand(log_f, std::max(lo, -750.0), hi, "exact_mean");
}

// MG construction shared by both families. For node x with weight w the
// term is: shape k, rate (c/x)^(2/alpha)/omega, raw weight
// exp(log_w + node_exponent * ln x + log_bessel(x)), then normalized to
// unit mass.
template <typename LogBessel>
MixtureGamma mg_from_nodes(double alpha, double k_shadow, double omega, double scale_c,
                           double node_exponent, const LogBessel& log_bessel, int terms) {
  const specfun::QuadratureRule rule = specfun::gauss_laguerre(terms);
  const double lg_k = specfun::ln_gamma(k_shadow);
  const double log_c = std::log(scale_c);
  const std::size_t n = rule.order();

  std::vector<double> log_theta(n);
  std::vector<double> log_rate(n);
  std::vector<double> log_mass(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double log_x = std::log(rule.nodes[i]);
    log_theta[i] = rule.log_weights[i] + node_exponent * log_x + log_bessel(rule.nodes[i]);
    log_rate[i] = (2.0 / alpha) * (log_c - log_x) - std::log(omega);
    log_mass[i] = log_theta[i] + lg_k - k_shadow * log_rate[i];
    if (!std::isfinite(log_theta[i]) || !std::isfinite(log_mass[i])) {
      throw FitError("mixture-gamma fit: non-finite raw weight at node " + std::to_string(i), i);
    }
  }
  const double max_mass = *std::max_element(log_mass.begin(), log_mass.end());
  double sum = 0.0;
  for (double lm : log_mass) sum += std::exp(lm - max_mass);
  const double log_total = max_mass + std::log(sum);

  std::vector<GammaTerm> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double weight = std::exp(log_theta[i] - log_total);
    const double rate = std::exp(log_rate[i]);
    // Raw weights are positive by construction (checked in log form above);
    // a final weight may still underflow to 0 for far-tail nodes of large
    // rules, whose share of the mass is below e^-700.
    if (!(weight >= 0.0) || !std::isfinite(weight)) {
      throw FitError("mixture-gamma fit: weight overflow at node " + std::to_string(i), i);
    }
    if (!(rate > 0.0) || !std::isfinite(rate)) {
      throw FitError("mixture-gamma fit: rate out of range at node " + std::to_string(i), i);
    }
    if (i > 0 && !(rate < out[i - 1].rate)) {
      throw FitError("mixture-gamma fit: rates not strictly decreasing at node " +
                         std::to_string(i),
                     i);
    }
    out[i] = {weight, k_shadow, rate};
  }
  return MixtureGamma(std::move(out));
}

double kappa_extra_growth(const AlphaKappaMuShadowParams& p) { return 4.0 * p.kappa * p.mu; }

}  // namespace

void AlphaKappaMuShadowParams::validate() const {
  require_positive(alpha, "alpha");
  require_positive(kappa, "kappa");
  require_positive(mu, "mu");
  require_positive(k_shadow, "k");
  require_positive(omega, "omega");
}

double AlphaEtaMuShadowParams::h() const {
  if (format == EtaFormat::FormatI) return (1.0 + eta) * (1.0 + eta) / (4.0 * eta);
  return 1.0 / (1.0 - eta * eta);
}

double AlphaEtaMuShadowParams::big_h() const {
  if (format == EtaFormat::FormatI) return (1.0 - eta * eta) / (4.0 * eta);
  return eta / (1.0 - eta * eta);
}

void AlphaEtaMuShadowParams::validate() const {
  require_positive(alpha, "alpha");
  require_positive(mu, "mu");
  require_positive(k_shadow, "k");
  require_positive(omega, "omega");
  if (format == EtaFormat::FormatI) {
    require_positive(eta, "eta");
  } else if (!(eta > -1.0 && eta < 1.0)) {
    throw DomainError("channel parameter 'eta' must lie in (-1, 1) for format II");
  }
}

double kappa_mu_log_pdf(double kappa, double mu, double w) {
  // X = mu (1 + kappa) W has density
  // e^-(kappa mu) 2^(mu-1) x^(mu-1) e^-x R_(mu-1)(2 sqrt(kappa mu x)),
  // with R_v(z) = I_v(z) / z^v.
  const double c = mu * (1.0 + kappa);
  const double x = c * w;
  const double log_x = std::log(x);
  return std::log(c) - kappa * mu + (mu - 1.0) * (std::numbers::ln2 + log_x) - x +
         specfun::log_bessel_i_ratio(mu - 1.0, 2.0 * std::sqrt(kappa * mu * x));
}

double eta_mu_log_pdf(double h, double big_h, double mu, double w) {
  // 2 sqrt(pi) mu^(mu+1/2) h^mu (2 mu)^(mu-1/2) / Gamma(mu)
  //   * w^(2 mu - 1) e^(-2 mu h w) R_(mu-1/2)(2 mu |H| w)
  const double nu = mu - 0.5;
  return std::log(2.0 * std::sqrt(std::numbers::pi)) + (mu + 0.5) * std::log(mu) +
         mu * std::log(h) + nu * std::log(2.0 * mu) - specfun::ln_gamma(mu) +
         (2.0 * mu - 1.0) * std::log(w) - 2.0 * mu * h * w +
         specfun::log_bessel_i_ratio(nu, 2.0 * mu * std::abs(big_h) * w);
}

double exact_pdf_akm(const AlphaKappaMuShadowParams& p, double g) {
  p.validate();
  return exact_pdf_kernel(make_kernel(p), kappa_extra_growth(p), g);
}

double exact_pdf_aem(const AlphaEtaMuShadowParams& p, double g) {
  p.validate();
  return exact_pdf_kernel(make_kernel(p), 0.0, g);
}

double exact_pdf(const ChannelParams& p, double g) {
  return std::visit(
      [g](const auto& params) -> double {
        using T = std::decay_t<decltype(params)>;
        if constexpr (std::is_same_v<T, AlphaKappaMuShadowParams>) {
          return exact_pdf_akm(params, g);
        } else {
          return exact_pdf_aem(params, g);
        }
      },
      p);
}

MixtureGamma mg_from_akm(const AlphaKappaMuShadowParams& p, int terms) {
  p.validate();
  const double order = p.mu - 1.0;
  const double bessel_scale = 2.0 * std::sqrt(p.kappa * p.mu);
  // theta ~ w x^((mu-1)/2 - 2k/alpha) I_(mu-1)(2 sqrt(kappa mu x)); with the
  // Bessel ratio form the node exponent absorbs another (mu-1)/2.
  return mg_from_nodes(
      p.alpha, p.k_shadow, p.omega, p.mu * (1.0 + p.kappa), p.mu - 1.0 - 2.0 * p.k_shadow / p.alpha,
      [&](double x) { return specfun::log_bessel_i_ratio(order, bessel_scale * std::sqrt(x)); },
      terms);
}

MixtureGamma mg_from_aem(const AlphaEtaMuShadowParams& p, int terms) {
  p.validate();
  const double h = p.h();
  const double ratio = std::abs(p.big_h()) / h;
  const double order = p.mu - 0.5;
  return mg_from_nodes(
      p.alpha, p.k_shadow, p.omega, 2.0 * p.mu * h, 2.0 * p.mu - 1.0 - 2.0 * p.k_shadow / p.alpha,
      [&](double x) { return specfun::log_bessel_i_ratio(order, ratio * x); }, terms);
}

MixtureGamma mg_fit(const ChannelParams& p, int terms) {
  return std::visit(
      [terms](const auto& params) -> MixtureGamma {
        using T = std::decay_t<decltype(params)>;
        if constexpr (std::is_same_v<T, AlphaKappaMuShadowParams>) {
          return mg_from_akm(params, terms);
        } else {
          return mg_from_aem(params, terms);
        }
      },
      p);
}

double channel_omega(const ChannelParams& p) {
  return std::visit([](const auto& params) { return params.omega; }, p);
}

double channel_k_shadow(const ChannelParams& p) {
  return std::visit([](const auto& params) { return params.k_shadow; }, p);
}

double total_variation(const MixtureGamma& mg, const ChannelParams& p) {
  constexpr int kPoints = 2000;
  const double omega = channel_omega(p);
  const double log_lo = std::log10(1e-6 * omega);
  const double log_hi = std::log10(1e3 * omega);
  double prev_g = 0.0;
  double prev_d = 0.0;
  double sum = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const double g = std::pow(10.0, log_lo + (log_hi - log_lo) * i / (kPoints - 1));
    const double d = std::abs(mg_pdf(mg, g) - exact_pdf(p, g));
    if (i > 0) sum += 0.5 * (d + prev_d) * (g - prev_g);
    prev_g = g;
    prev_d = d;
  }
  return sum;
}

double exact_mean(const ChannelParams& p) {
  return std::visit(
      [](const auto& params) -> double {
        params.validate();
        using T = std::decay_t<decltype(params)>;
        double extra = 0.0;
        if constexpr (std::is_same_v<T, AlphaKappaMuShadowParams>) {
          extra = kappa_extra_growth(params);
        }
        return params.k_shadow * params.omega *
               kernel_power_moment(make_kernel(params), extra);
      },
      p);
}

namespace {

double read_omega(const nlohmann::json& j) {
  const bool has_db = j.contains("omega_db");
  const bool has_lin = j.contains("omega_linear");
  if (has_db == has_lin) {
    throw DomainError("channel must specify exactly one of 'omega_db' or 'omega_linear'");
  }
  if (has_db) return std::pow(10.0, j.at("omega_db").get<double>() / 10.0);
  return j.at("omega_linear").get<double>();
}

}  // namespace

void to_json(nlohmann::json& j, const AlphaKappaMuShadowParams& p) {
  j = nlohmann::json{{"family", "akm"},   {"alpha", p.alpha}, {"kappa", p.kappa},
                     {"mu", p.mu},        {"k", p.k_shadow},  {"omega_linear", p.omega}};
}

void from_json(const nlohmann::json& j, AlphaKappaMuShadowParams& p) {
  j.at("alpha").get_to(p.alpha);
  j.at("kappa").get_to(p.kappa);
  j.at("mu").get_to(p.mu);
  j.at("k").get_to(p.k_shadow);
  p.omega = read_omega(j);
}

void to_json(nlohmann::json& j, const AlphaEtaMuShadowParams& p) {
  j = nlohmann::json{{"family", "aem"},
                     {"alpha", p.alpha},
                     {"eta", p.eta},
                     {"format", p.format == EtaFormat::FormatI ? "I" : "II"},
                     {"mu", p.mu},
                     {"k", p.k_shadow},
                     {"omega_linear", p.omega}};
}

void from_json(const nlohmann::json& j, AlphaEtaMuShadowParams& p) {
  j.at("alpha").get_to(p.alpha);
  j.at("eta").get_to(p.eta);
  const std::string format = j.value("format", std::string("I"));
  if (format == "I") {
    p.format = EtaFormat::FormatI;
  } else if (format == "II") {
    p.format = EtaFormat::FormatII;
  } else {
    throw DomainError("eta format must be \"I\" or \"II\"");
  }
  j.at("mu").get_to(p.mu);
  j.at("k").get_to(p.k_shadow);
  p.omega = read_omega(j);
}

}  // namespace edsense
