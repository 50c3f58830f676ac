#include "edsense/mixture_gamma.hpp"

#include <cmath>
#include <string>

#include "json.hpp"

#include "edsense/error.hpp"
#include "edsense/specfun.hpp"

namespace edsense {

namespace {

// Gamma(b + n) z^-(b + n), the integral of g^(b+n-1) e^(-z g).
double gamma_integral(const GammaTerm& t, double n) {
  return std::exp(specfun::ln_gamma(t.shape + n) - (t.shape + n) * std::log(t.rate));
}

}  // namespace

MixtureGamma::MixtureGamma(std::vector<GammaTerm> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw DomainError("MixtureGamma: at least one term required");
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& t = terms_[i];
    if (!(t.shape > 0.0) || !std::isfinite(t.shape)) {
      throw DomainError("MixtureGamma: shape of term " + std::to_string(i) + " must be > 0");
    }
    if (!(t.rate > 0.0) || !std::isfinite(t.rate)) {
      throw DomainError("MixtureGamma: rate of term " + std::to_string(i) + " must be > 0");
    }
    if (!std::isfinite(t.weight)) {
      throw DomainError("MixtureGamma: weight of term " + std::to_string(i) + " is not finite");
    }
  }
}

bool MixtureGamma::is_normalized(double tol) const {
  return std::abs(mg_total_mass(*this) - 1.0) <= tol;
}

MixtureGamma MixtureGamma::scaled(double factor) const {
  std::vector<GammaTerm> out(terms_.begin(), terms_.end());
  for (auto& t : out) t.weight *= factor;
  return MixtureGamma(std::move(out));
}

MixtureGamma MixtureGamma::normalized() const {
  const double mass = mg_total_mass(*this);
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw DomainError("MixtureGamma: cannot normalize a mixture with non-positive mass");
  }
  return scaled(1.0 / mass);
}

double mg_pdf(const MixtureGamma& mg, double g) {
  if (!(g >= 0.0)) throw DomainError("mg_pdf: argument must be >= 0");
  double sum = 0.0;
  if (g == 0.0) {
    for (const auto& t : mg.terms()) {
      if (t.shape < 1.0) throw DomainError("mg_pdf: density diverges at 0 for shape < 1");
      if (t.shape == 1.0) sum += t.weight;
    }
    return sum;
  }
  const double log_g = std::log(g);
  for (const auto& t : mg.terms()) {
    if (t.weight == 0.0) continue;
    const double log_abs = std::log(std::abs(t.weight)) + (t.shape - 1.0) * log_g - t.rate * g;
    sum += std::copysign(std::exp(log_abs), t.weight);
  }
  return sum;
}

double mg_total_mass(const MixtureGamma& mg) {
  double sum = 0.0;
  for (const auto& t : mg.terms()) sum += t.weight * gamma_integral(t, 0.0);
  return sum;
}

double mg_moment(const MixtureGamma& mg, unsigned n) {
  double sum = 0.0;
  for (const auto& t : mg.terms()) sum += t.weight * gamma_integral(t, n);
  return sum;
}

double mg_cdf(const MixtureGamma& mg, double g) {
  if (!(g >= 0.0)) throw DomainError("mg_cdf: argument must be >= 0");
  double sum = 0.0;
  for (const auto& t : mg.terms()) {
    sum += t.weight * gamma_integral(t, 0.0) * specfun::gamma_p(t.shape, t.rate * g);
  }
  return sum;
}

void to_json(nlohmann::json& j, const GammaTerm& t) {
  j = nlohmann::json{{"weight", t.weight}, {"shape", t.shape}, {"rate", t.rate}};
}

void from_json(const nlohmann::json& j, GammaTerm& t) {
  j.at("weight").get_to(t.weight);
  j.at("shape").get_to(t.shape);
  j.at("rate").get_to(t.rate);
}

nlohmann::json mg_to_json(const MixtureGamma& mg) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : mg.terms()) arr.push_back(t);
  return arr;
}

MixtureGamma mg_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw DomainError("mixture gamma JSON must be an array of terms");
  return MixtureGamma(j.get<std::vector<GammaTerm>>());
}

}  // namespace edsense
