// Monte-Carlo oracle: composite-fading SNR variates and simulated detector
// decisions, independent of the quadrature and mixture-gamma code paths.
//
// Sequences are reproducible for a fixed (seed, stream_id) with a given
// standard library; concurrent workers must use distinct stream ids.
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "edsense/detector.hpp"
#include "edsense/fading.hpp"

namespace edsense {

struct RngConfig {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t trials = 0;
};

/// mt19937_64 seeded from both halves of seed and stream id.
std::mt19937_64 make_engine(const RngConfig& rng);

/// Requires integer mu. Each variate is y * W^(2/alpha), y ~ Gamma(k, omega)
/// and W = sum over mu clusters of |(X + p) + j(Q + q)|^2 with unit mean.
std::vector<double> sample_akm_gamma(const AlphaKappaMuShadowParams& p, const RngConfig& rng,
                                     std::int64_t count);

/// FormatI only; requires 2 mu to be an integer (the number of clusters).
std::vector<double> sample_aem_gamma(const AlphaEtaMuShadowParams& p, const RngConfig& rng,
                                     std::int64_t count);

std::vector<double> sample_channel(const ChannelParams& p, const RngConfig& rng,
                                   std::int64_t count);

/// Sample mean of pd_instant (low-SNR form) with the standard error of the
/// mean.
McEstimate empirical_pd_channel_mc(std::span<const double> snr_samples, const DetectorConfig& cfg);

/// Draws the SNR and then the accumulated energy from its Gaussian H1 law
/// N(N s2 (1+g), N s2^2 (1 + zeta(g))); counts threshold crossings.
McEstimate empirical_pd_full_mc(const ChannelParams& p, const DetectorConfig& cfg,
                                std::int64_t trials, const RngConfig& rng);

/// Largest deviation between the empirical CDF of `samples` and `cdf`.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Dvoretzky-Kiefer-Wolfowitz half-width sqrt(ln(2/delta) / (2n)).
double dkw_epsilon(std::int64_t n, double delta);

}  // namespace edsense
