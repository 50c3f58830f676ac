// Energy detector statistics under the Gaussian (large-N) approximation of
// the accumulated energy, and their average over a mixture-gamma channel.
#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "edsense/mixture_gamma.hpp"

namespace edsense {

/// Signal model; selects the variance growth zeta(g) of the energy under H1.
enum class SignalModel {
  CSCG,  // zeta(g) = 2 g + g^2
  PSK,   // zeta(g) = 2 g
};

double signal_variance_growth(SignalModel model, double snr);

SignalModel parse_signal_model(std::string_view name);
std::string_view to_string(SignalModel model);

struct DetectorConfig {
  std::int64_t n_samples = 100;
  double noise_power = 1.0;
  double threshold = 100.0;
  SignalModel signal_model = SignalModel::CSCG;

  void validate() const;
};

/// The average detection probability is 1 - 1/2 E[erfc(c1 g + c2)], where
/// c1 = sqrt(N/2) and c2 = (N s2 - threshold) / (sqrt(2N) s2).
struct DetectorConstants {
  double c1;
  double c2;

  static DetectorConstants from(const DetectorConfig& cfg);
};

double pf(const DetectorConfig& cfg);

/// Threshold achieving the target false-alarm probability, 0 < target < 1.
double threshold_for_pf(std::int64_t n_samples, double noise_power, double target_pf);

/// Convenience: a config whose threshold meets `target_pf`.
DetectorConfig config_for_pf(std::int64_t n_samples, double noise_power, double target_pf,
                             SignalModel model = SignalModel::CSCG);

/// Detection probability at a fixed SNR. With low_snr the H1 variance is
/// taken equal to the H0 variance; otherwise it is N s2^2 (1 + zeta(g)).
double pd_instant(const DetectorConfig& cfg, double snr, bool low_snr = true);

/// F^(n)(z), the n-th derivative in z of
/// F(z) = integral_0^inf e^(-z g) erfc(c1 g + c2) dg
///      = (erfc(c2) - e^(-c2^2) erfcx(c2 + z/(2 c1))) / z.
/// Computed exactly (no numerical differentiation) for 0 <= n <= 11.
double erfc_laplace_derivative(int n, double z, const DetectorConstants& k);

/// Highest gamma shape accepted by the closed form.
inline constexpr int kMaxClosedFormShape = 12;

/// True when every shape is an integer in [1, kMaxClosedFormShape].
bool closed_form_applicable(const MixtureGamma& mg);

/// Average detection probability by per-term adaptive quadrature
/// (absolute accuracy 1e-9). Works for any positive shapes.
double pd_avg_quadrature(const MixtureGamma& mg, const DetectorConfig& cfg);

/// Average detection probability in closed form via derivatives of F.
/// Throws DomainError if closed_form_applicable(mg) is false.
double pd_avg_closed_form(const MixtureGamma& mg, const DetectorConfig& cfg);

enum class AvgMethod { Auto, ClosedForm, Quadrature };

AvgMethod parse_avg_method(std::string_view name);

/// Dispatches to the closed form when applicable (Auto) or as requested.
double pd_avg(const MixtureGamma& mg, const DetectorConfig& cfg, AvgMethod method = AvgMethod::Auto);

/// Miss-detection probability 1 - pd_avg.
double p_md(const MixtureGamma& mg, const DetectorConfig& cfg, AvgMethod method = AvgMethod::Auto);

}  // namespace edsense
