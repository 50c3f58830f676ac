#include "edsense/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "edsense/error.hpp"

namespace edsense {

namespace {

bool is_integer(double v) { return std::abs(v - std::round(v)) < 1e-12; }

void require_count(std::int64_t count) {
  if (count < 1) throw DomainError("sample count must be >= 1");
}

// Draws one SNR variate; holds the per-family distributions.
class ChannelSampler {
 public:
  explicit ChannelSampler(const AlphaKappaMuShadowParams& p)
      : exponent_(2.0 / p.alpha),
        clusters_(static_cast<int>(std::round(p.mu))),
        shadow_(p.k_shadow, p.omega) {
    p.validate();
    if (!is_integer(p.mu)) {
      throw DomainError("sample_akm_gamma: mu must be an integer (got " + std::to_string(p.mu) +
                        ")");
    }
    // Scattered power 1/(1+kappa) spread over 2 mu real dimensions; the
    // dominant power kappa/(1+kappa) split evenly across in-phase and
    // quadrature of every cluster.
    const double sigma = std::sqrt(1.0 / (2.0 * p.mu * (1.0 + p.kappa)));
    const double mean = std::sqrt(p.kappa / (2.0 * p.mu * (1.0 + p.kappa)));
    in_phase_ = std::normal_distribution<double>(mean, sigma);
    quadrature_ = in_phase_;
  }

  explicit ChannelSampler(const AlphaEtaMuShadowParams& p)
      : exponent_(2.0 / p.alpha),
        clusters_(static_cast<int>(std::round(2.0 * p.mu))),
        shadow_(p.k_shadow, p.omega) {
    p.validate();
    if (p.format != EtaFormat::FormatI) {
      throw DomainError("sample_aem_gamma: only format I is supported");
    }
    if (!is_integer(2.0 * p.mu)) {
      throw DomainError("sample_aem_gamma: 2 mu must be an integer (got " +
                        std::to_string(2.0 * p.mu) + ")");
    }
    // 2 mu clusters, in-phase/quadrature power ratio eta, unit total mean.
    const double q_var = 1.0 / (2.0 * p.mu * (1.0 + p.eta));
    in_phase_ = std::normal_distribution<double>(0.0, std::sqrt(p.eta * q_var));
    quadrature_ = std::normal_distribution<double>(0.0, std::sqrt(q_var));
  }

  double operator()(std::mt19937_64& engine) {
    double power = 0.0;
    for (int i = 0; i < clusters_; ++i) {
      const double x = in_phase_(engine);
      const double q = quadrature_(engine);
      power += x * x + q * q;
    }
    return shadow_(engine) * std::pow(power, exponent_);
  }

 private:
  double exponent_;
  int clusters_;
  std::gamma_distribution<double> shadow_;
  std::normal_distribution<double> in_phase_;
  std::normal_distribution<double> quadrature_;
};

ChannelSampler make_sampler(const ChannelParams& p) {
  return std::visit([](const auto& params) { return ChannelSampler(params); }, p);
}

std::vector<double> draw(ChannelSampler sampler, const RngConfig& rng, std::int64_t count) {
  require_count(count);
  auto engine = make_engine(rng);
  std::vector<double> out(static_cast<std::size_t>(count));
  for (auto& g : out) {
    // A zero power draw has probability zero but is representable; redraw.
    do {
      g = sampler(engine);
    } while (!(g > 0.0));
  }
  return out;
}

}  // namespace

std::mt19937_64 make_engine(const RngConfig& rng) {
  std::seed_seq seq{static_cast<std::uint32_t>(rng.seed), static_cast<std::uint32_t>(rng.seed >> 32),
                    static_cast<std::uint32_t>(rng.stream_id),
                    static_cast<std::uint32_t>(rng.stream_id >> 32)};
  return std::mt19937_64(seq);
}

std::vector<double> sample_akm_gamma(const AlphaKappaMuShadowParams& p, const RngConfig& rng,
                                     std::int64_t count) {
  return draw(ChannelSampler(p), rng, count);
}

std::vector<double> sample_aem_gamma(const AlphaEtaMuShadowParams& p, const RngConfig& rng,
                                     std::int64_t count) {
  return draw(ChannelSampler(p), rng, count);
}

std::vector<double> sample_channel(const ChannelParams& p, const RngConfig& rng,
                                   std::int64_t count) {
  return draw(make_sampler(p), rng, count);
}

McEstimate empirical_pd_channel_mc(std::span<const double> snr_samples, const DetectorConfig& cfg) {
  if (snr_samples.empty()) throw DomainError("empirical_pd_channel_mc: no samples");
  cfg.validate();
  // Welford accumulation.
  double mean = 0.0;
  double m2 = 0.0;
  std::int64_t n = 0;
  for (double g : snr_samples) {
    const double pd = pd_instant(cfg, g, true);
    ++n;
    const double delta = pd - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (pd - mean);
  }
  const double variance = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  return {mean, std::sqrt(variance / static_cast<double>(n)), n};
}

McEstimate empirical_pd_full_mc(const ChannelParams& p, const DetectorConfig& cfg,
                                std::int64_t trials, const RngConfig& rng) {
  require_count(trials);
  cfg.validate();
  ChannelSampler sampler = make_sampler(p);
  auto engine = make_engine(rng);
  std::normal_distribution<double> unit(0.0, 1.0);
  const double n = static_cast<double>(cfg.n_samples);
  const double s2 = cfg.noise_power;
  std::int64_t hits = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    const double g = sampler(engine);
    const double mean = n * s2 * (1.0 + g);
    const double sd = std::sqrt(n * (1.0 + signal_variance_growth(cfg.signal_model, g))) * s2;
    if (mean + sd * unit(engine) > cfg.threshold) ++hits;
  }
  const double value = static_cast<double>(hits) / static_cast<double>(trials);
  return {value, std::sqrt(value * (1.0 - value) / static_cast<double>(trials)), trials};
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw DomainError("ks_distance: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    worst = std::max({worst, std::abs(f - static_cast<double>(i) / n),
                      std::abs(static_cast<double>(i + 1) / n - f)});
  }
  return worst;
}

double dkw_epsilon(std::int64_t n, double delta) {
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

}  // namespace edsense
