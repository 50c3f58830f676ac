// Composite multipath/shadowing channels: alpha-kappa-mu/Gamma and
// alpha-eta-mu/Gamma.
//
// Both families share one generative structure. A shadowed local mean y is
// Gamma(k, scale omega) distributed, and conditioned on y the instantaneous
// SNR is g = y * W^(2/alpha), with W a unit-mean kappa-mu (resp. eta-mu)
// power variate. The exact PDF integrates the conditional density over y;
// the mixture-gamma approximation applies Gauss-Laguerre quadrature to the
// same integral after the change of variable x = c * (g/y)^(alpha/2).
#pragma once

#include <variant>

#include "edsense/mixture_gamma.hpp"
#include "json.hpp"

namespace edsense {

struct AlphaKappaMuShadowParams {
  double alpha = 2.0;     // non-linearity of the medium
  double kappa = 1.0;     // dominant-to-scattered power ratio
  double mu = 1.0;        // multipath cluster count (real-valued)
  double k_shadow = 4.0;  // gamma shadowing shape
  double omega = 1.0;     // gamma shadowing scale (linear)

  /// Throws DomainError unless every field is finite and > 0.
  void validate() const;
};

enum class EtaFormat { FormatI, FormatII };

struct AlphaEtaMuShadowParams {
  double alpha = 2.0;
  double eta = 0.5;
  EtaFormat format = EtaFormat::FormatI;
  double mu = 1.0;
  double k_shadow = 4.0;
  double omega = 1.0;

  /// FormatI: (1+eta)^2/(4 eta); FormatII: 1/(1-eta^2).
  [[nodiscard]] double h() const;
  /// FormatI: (1-eta^2)/(4 eta); FormatII: eta/(1-eta^2). May be negative.
  [[nodiscard]] double big_h() const;

  /// Throws DomainError on non-positive fields or eta outside its format's
  /// range (FormatI: eta > 0, FormatII: -1 < eta < 1).
  void validate() const;
};

using ChannelParams = std::variant<AlphaKappaMuShadowParams, AlphaEtaMuShadowParams>;

/// ln of the unit-mean kappa-mu power density at w > 0.
double kappa_mu_log_pdf(double kappa, double mu, double w);

/// ln of the unit-mean eta-mu power density at w > 0, for shape constants
/// h > 0 and H (only |H| matters).
double eta_mu_log_pdf(double h, double big_h, double mu, double w);

/// Exact composite density at g > 0, by adaptive quadrature over the
/// shadowed mean (relative accuracy 1e-8). Throws ConvergenceError if the
/// integrator misses its tolerance.
double exact_pdf_akm(const AlphaKappaMuShadowParams& p, double g);
double exact_pdf_aem(const AlphaEtaMuShadowParams& p, double g);
double exact_pdf(const ChannelParams& p, double g);

/// Unit-mass mixture-gamma approximation with `terms` Gauss-Laguerre nodes
/// (1..200). Every term has shape k_shadow; rates decrease with the node.
MixtureGamma mg_from_akm(const AlphaKappaMuShadowParams& p, int terms);
MixtureGamma mg_from_aem(const AlphaEtaMuShadowParams& p, int terms);
MixtureGamma mg_fit(const ChannelParams& p, int terms);

/// Total variation distance between the MG density and the exact density,
/// by trapezoidal integration of |difference| over 2000 log-spaced points
/// spanning [1e-6 * omega, 1e3 * omega].
double total_variation(const MixtureGamma& mg, const ChannelParams& p);

/// Mean of the exact composite density: E[y] * E[W^(2/alpha)], computed by
/// quadrature of the conditional power density.
double exact_mean(const ChannelParams& p);

double channel_omega(const ChannelParams& p);
double channel_k_shadow(const ChannelParams& p);

// JSON object with keys alpha, kappa | (eta, format), mu, k, and exactly one
// of omega_db / omega_linear. omega_db converts as 10^(dB/10).
void to_json(nlohmann::json& j, const AlphaKappaMuShadowParams& p);
void from_json(const nlohmann::json& j, AlphaKappaMuShadowParams& p);
void to_json(nlohmann::json& j, const AlphaEtaMuShadowParams& p);
void from_json(const nlohmann::json& j, AlphaEtaMuShadowParams& p);

}  // namespace edsense
