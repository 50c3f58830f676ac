// Mixture-gamma (MG) densities f(g) = sum_v w_v g^(b_v - 1) exp(-z_v g).
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"

namespace edsense {

struct GammaTerm {
  double weight;  // w_v, unnormalized coefficient (not a probability)
  double shape;   // b_v > 0
  double rate;    // z_v > 0
};

/// Ordered, immutable list of gamma terms. The constructor checks that shapes
/// and rates are positive and weights finite; unit total mass is not enforced
/// (see is_normalized), so diagnostic or deliberately perturbed mixtures are
/// representable.
class MixtureGamma {
 public:
  explicit MixtureGamma(std::vector<GammaTerm> terms);

  [[nodiscard]] std::span<const GammaTerm> terms() const noexcept { return terms_; }
  [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }

  /// Total mass equals 1 within `tol`.
  [[nodiscard]] bool is_normalized(double tol = 1e-12) const;

  /// Copy with every weight multiplied by `factor`.
  [[nodiscard]] MixtureGamma scaled(double factor) const;

  /// Copy rescaled to unit total mass.
  [[nodiscard]] MixtureGamma normalized() const;

 private:
  std::vector<GammaTerm> terms_;
};

/// Density at g >= 0. g = 0 is rejected when any shape is below 1.
double mg_pdf(const MixtureGamma& mg, double g);

/// Exact integral of the density over [0, inf): sum w_v Gamma(b_v) z_v^-b_v.
double mg_total_mass(const MixtureGamma& mg);

/// Raw moment E[g^n] = sum w_v Gamma(b_v + n) z_v^-(b_v + n).
double mg_moment(const MixtureGamma& mg, unsigned n);

/// Distribution function sum w_v Gamma(b_v) z_v^-b_v P(b_v, z_v g).
double mg_cdf(const MixtureGamma& mg, double g);

// JSON: array of {"weight", "shape", "rate"} objects.
void to_json(nlohmann::json& j, const GammaTerm& t);
void from_json(const nlohmann::json& j, GammaTerm& t);
nlohmann::json mg_to_json(const MixtureGamma& mg);
MixtureGamma mg_from_json(const nlohmann::json& j);

}  // namespace edsense
