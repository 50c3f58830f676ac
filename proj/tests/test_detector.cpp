#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <random>

#include "edsense/detector.hpp"
#include "edsense/error.hpp"
#include "edsense/fading.hpp"
#include "edsense/montecarlo.hpp"

using edsense::AvgMethod;
using edsense::DetectorConfig;
using edsense::DetectorConstants;
using edsense::MixtureGamma;
using edsense::SignalModel;

namespace {

constexpr double kOmega = 0.31623;

MixtureGamma fig2_mg(double alpha = 2.0, double kappa = 1.0, double mu = 1.0, double k = 4.0) {
  return edsense::mg_fit(edsense::AlphaKappaMuShadowParams{alpha, kappa, mu, k, kOmega}, 20);
}

DetectorConfig at_pf(std::int64_t n, double p, SignalModel m = SignalModel::CSCG) {
  return edsense::config_for_pf(n, 1.0, p, m);
}

// (-1)^n F^(n)(z) = integral_0^inf g^n e^(-z g) erfc(c1 g + c2) dg.
double laplace_moment(int n, double z, const DetectorConstants& k) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(
      [&](double g) {
        const double arg = k.c1 * g + k.c2;
        return arg > 27.0 ? 0.0 : std::pow(g, n) * std::exp(-z * g) * boost::math::erfc(arg);
      },
      1e-13);
}

}  // namespace

TEST(Pf, KnownValuesAndMonotonicity) {
  EXPECT_DOUBLE_EQ(edsense::pf({100, 1.0, 100.0, SignalModel::CSCG}), 0.5);
  // 100 + sqrt(200) * 1.6449763571331870.
  EXPECT_NEAR(edsense::threshold_for_pf(100, 1.0, 0.01), 123.26347874, 1e-8);
  EXPECT_NEAR(edsense::pf({100, 1.0, 123.26347874, SignalModel::CSCG}), 0.01, 1e-9);
  double prev = 1.0;
  for (double excess = 0.5; excess < 60.0; excess *= 2.0) {
    const double p = edsense::pf({100, 1.0, 100.0 + excess, SignalModel::CSCG});
    EXPECT_LT(p, prev);
    prev = p;
  }
}

TEST(Threshold, RoundTrip) {
  EXPECT_DOUBLE_EQ(edsense::threshold_for_pf(250, 2.0, 0.5), 500.0);
  for (std::int64_t n : {10, 100, 1000, 5000}) {
    for (double p : {0.001, 0.01, 0.1, 0.4}) {
      EXPECT_NEAR(edsense::pf(at_pf(n, p)), p, 1e-9 * p) << "N=" << n << " p=" << p;
    }
  }
  EXPECT_THROW(edsense::threshold_for_pf(100, 1.0, 0.0), edsense::DomainError);
  EXPECT_THROW(edsense::threshold_for_pf(100, 1.0, 1.0), edsense::DomainError);
  EXPECT_THROW(edsense::threshold_for_pf(0, 1.0, 0.1), edsense::DomainError);
}

TEST(DetectorConfig, Validation) {
  EXPECT_THROW((DetectorConfig{0, 1.0, 1.0, SignalModel::CSCG}.validate()), edsense::DomainError);
  EXPECT_THROW((DetectorConfig{10, 0.0, 1.0, SignalModel::CSCG}.validate()), edsense::DomainError);
  EXPECT_THROW((DetectorConfig{10, 1.0, -1.0, SignalModel::CSCG}.validate()), edsense::DomainError);
  EXPECT_EQ(edsense::parse_signal_model("psk"), SignalModel::PSK);
  EXPECT_EQ(edsense::parse_signal_model("cscg"), SignalModel::CSCG);
  EXPECT_THROW(edsense::parse_signal_model("qam"), edsense::DomainError);
  EXPECT_EQ(edsense::parse_avg_method("closed"), AvgMethod::ClosedForm);
  EXPECT_THROW(edsense::parse_avg_method("exact"), edsense::DomainError);
}

TEST(DetectorConstants, RewriteOfDetectionProbability) {
  const auto cfg = at_pf(300, 0.02);
  const auto k = DetectorConstants::from(cfg);
  EXPECT_DOUBLE_EQ(k.c1, std::sqrt(150.0));
  for (double g = 0.0; g < 2.0; g += 0.01) {
    EXPECT_NEAR(edsense::pd_instant(cfg, g), 1.0 - 0.5 * std::erfc(k.c1 * g + k.c2), 1e-14);
  }
}

TEST(PdInstant, ZeroSnrIsFalseAlarm) {
  for (auto m : {SignalModel::CSCG, SignalModel::PSK}) {
    const auto cfg = at_pf(500, 0.01, m);
    EXPECT_EQ(edsense::pd_instant(cfg, 0.0, true), edsense::pf(cfg));
    EXPECT_EQ(edsense::pd_instant(cfg, 0.0, false), edsense::pf(cfg));
  }
}

TEST(PdInstant, NondecreasingInSnr) {
  const auto cfg = at_pf(100, 0.01);
  double prev = 0.0;
  for (double g = 0.0; g <= 10.0; g += 0.01) {
    const double p = edsense::pd_instant(cfg, g);
    EXPECT_GE(p, prev);
    EXPECT_LE(p, 1.0);
    prev = p;
  }
  EXPECT_THROW(edsense::pd_instant(cfg, -0.1), edsense::DomainError);
}

TEST(PdInstant, ExactBranchUsesSignalVariance) {
  const auto cfg = at_pf(1000, 0.01);
  const double n = 1000.0;
  for (double g : {0.01, 0.03, 0.05}) {
    const double zeta = 2.0 * g + g * g;
    const double want = 0.5 * boost::math::erfc((cfg.threshold - n * (1.0 + g)) /
                                                (std::sqrt(2.0 * n) * std::sqrt(1.0 + zeta)));
    EXPECT_NEAR(edsense::pd_instant(cfg, g, false), want, 1e-15);
  }
  // The low-SNR form tracks the exact one to within 0.01 up to g = 0.04; the
  // gap reaches 0.0109 at g = 0.05.
  auto gap = [&](double g) {
    return std::abs(edsense::pd_instant(cfg, g, true) - edsense::pd_instant(cfg, g, false));
  };
  for (int i = 0; i <= 8; ++i) EXPECT_LE(gap(0.005 * i), 0.01) << "g=" << 0.005 * i;
  EXPECT_NEAR(gap(0.01), 0.00107, 5e-5);
  EXPECT_NEAR(gap(0.03), 0.00637, 5e-5);
  EXPECT_NEAR(gap(0.05), 0.01087, 5e-5);
}

TEST(LaplaceDerivative, MatchesIndependentQuadrature) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> log_z(std::log(0.01), std::log(200.0));
  std::uniform_real_distribution<double> c1(3.0, 40.0);
  std::uniform_real_distribution<double> c2(-4.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    const DetectorConstants k{c1(rng), c2(rng)};
    const double z = std::exp(log_z(rng));
    for (int n = 0; n < edsense::kMaxClosedFormShape; ++n) {
      const double want = laplace_moment(n, z, k) * ((n % 2) ? -1.0 : 1.0);
      const double got = edsense::erfc_laplace_derivative(n, z, k);
      EXPECT_NEAR(got, want, 1e-9 * std::abs(want)) << "n=" << n << " z=" << z << " c1=" << k.c1
                                                    << " c2=" << k.c2;
    }
  }
}

TEST(LaplaceDerivative, MatchesRichardsonDifferences) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> log_z(std::log(0.01), std::log(200.0));
  std::uniform_real_distribution<double> c1(3.0, 40.0);
  std::uniform_real_distribution<double> c2(-4.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    const DetectorConstants k{c1(rng), c2(rng)};
    const double z = std::exp(log_z(rng));
    for (int n = 1; n <= 4; ++n) {
      auto f = [&](double x) { return edsense::erfc_laplace_derivative(n - 1, x, k); };
      const double h = 1e-4 * z;
      auto central = [&](double step) { return (f(z + step) - f(z - step)) / (2.0 * step); };
      const double fd = (4.0 * central(0.5 * h) - central(h)) / 3.0;
      const double got = edsense::erfc_laplace_derivative(n, z, k);
      EXPECT_NEAR(got, fd, 1e-5 * std::abs(got)) << "n=" << n << " z=" << z;
    }
  }
}

TEST(LaplaceDerivative, BaseIdentity) {
  const DetectorConstants k{std::sqrt(50.0), -1.7};
  for (double z : {0.1, 1.0, 10.0}) {
    const double v = k.c2 + z / (2.0 * k.c1);
    const double printed_structure =
        (std::erfc(k.c2) - std::exp((z * z + 4.0 * z * k.c1 * k.c2) / (4.0 * k.c1 * k.c1)) * std::erfc(v)) / z;
    EXPECT_NEAR(edsense::erfc_laplace_derivative(0, z, k), printed_structure, 1e-13);
  }
  EXPECT_THROW(edsense::erfc_laplace_derivative(12, 1.0, k), edsense::DomainError);
  EXPECT_THROW(edsense::erfc_laplace_derivative(0, 0.0, k), edsense::DomainError);
}

TEST(PdAvg, ClosedFormMatchesQuadratureForIntegerShapes) {
  const auto cfg = at_pf(100, 0.01);
  for (double k : {1.0, 2.0, 3.0, 4.0}) {
    const auto mg = fig2_mg(2.0, 1.0, 1.0, k);
    EXPECT_NEAR(edsense::pd_avg_closed_form(mg, cfg), edsense::pd_avg_quadrature(mg, cfg), 1e-8) << "k=" << k;
  }
}

TEST(PdAvg, RandomSweepDualPath) {
  std::mt19937_64 rng(33);
  std::uniform_int_distribution<int> k(1, 6);
  std::uniform_int_distribution<std::int64_t> n(50, 2000);
  std::uniform_real_distribution<double> log_pf(std::log(1e-3), std::log(0.1));
  std::uniform_real_distribution<double> alpha(1.0, 3.0);
  std::uniform_real_distribution<double> kappa(0.1, 8.0);
  for (int i = 0; i < 50; ++i) {
    const auto mg = fig2_mg(alpha(rng), kappa(rng), 1.0 + (i % 3), k(rng));
    const auto cfg = at_pf(n(rng), std::exp(log_pf(rng)));
    EXPECT_NEAR(edsense::pd_avg_closed_form(mg, cfg), edsense::pd_avg_quadrature(mg, cfg), 1e-8);
  }
}

TEST(PdAvg, SingleExponentialTermsAgreeWithOneTermIntegrals) {
  const MixtureGamma mg({{0.3 * 2.0, 1.0, 2.0}, {0.7 * 0.5, 1.0, 0.5}});
  const auto cfg = at_pf(200, 0.05);
  const auto k = DetectorConstants::from(cfg);
  const double want = 1.0 - 0.5 * (0.6 * laplace_moment(0, 2.0, k) + 0.35 * laplace_moment(0, 0.5, k));
  EXPECT_NEAR(edsense::pd_avg_closed_form(mg, cfg), want, 1e-12);
  EXPECT_NEAR(edsense::pd_avg_quadrature(mg, cfg), want, 1e-10);
}

TEST(PdAvg, DegenerateChannelGivesFalseAlarm) {
  const MixtureGamma mg({{1e8, 1.0, 1e8}});
  for (double p : {0.001, 0.01, 0.1}) {
    const auto cfg = at_pf(500, p);
    EXPECT_NEAR(edsense::pd_avg_closed_form(mg, cfg), p, 1e-4);
    EXPECT_NEAR(edsense::pd_avg_quadrature(mg, cfg), p, 1e-4);
  }
}

TEST(PdAvg, BoundsAndComplement) {
  for (double alpha : {1.0, 2.0, 3.0}) {
    const auto mg = fig2_mg(alpha);
    for (double p : {0.001, 0.01, 0.2}) {
      const auto cfg = at_pf(100, p);
      const double pd = edsense::pd_avg(mg, cfg);
      EXPECT_GE(pd, edsense::pf(cfg));
      EXPECT_LE(pd, 1.0);
      EXPECT_NEAR(pd + edsense::p_md(mg, cfg), 1.0, 1e-12);
    }
  }
}

TEST(PdAvg, NonincreasingInThreshold) {
  const auto mg = fig2_mg();
  double prev = 1.0;
  for (double lambda = 90.0; lambda < 160.0; lambda += 2.0) {
    const DetectorConfig cfg{100, 1.0, lambda, SignalModel::CSCG};
    const double pd = edsense::pd_avg(mg, cfg);
    EXPECT_LE(pd, prev);
    prev = pd;
  }
}

TEST(PdAvg, ImprovesWithSampleCount) {
  const auto mg = fig2_mg();
  double prev = 0.0;
  for (std::int64_t n : {100, 1000, 10000}) {
    const double pd = edsense::pd_avg_closed_form(mg, at_pf(n, 0.01));
    EXPECT_GT(pd, prev);
    prev = pd;
  }
}

TEST(PdAvg, NonIntegerShapeUsesQuadrature) {
  const auto mg = fig2_mg(2.0, 1.0, 1.0, 2.5);
  const auto cfg = at_pf(100, 0.01);
  EXPECT_FALSE(edsense::closed_form_applicable(mg));
  EXPECT_THROW(edsense::pd_avg_closed_form(mg, cfg), edsense::DomainError);
  EXPECT_EQ(edsense::pd_avg(mg, cfg), edsense::pd_avg_quadrature(mg, cfg));
  // Bracketed by the neighbouring integer shadowing shapes.
  const double lo = edsense::pd_avg(fig2_mg(2.0, 1.0, 1.0, 2.0), cfg);
  const double hi = edsense::pd_avg(fig2_mg(2.0, 1.0, 1.0, 3.0), cfg);
  const double mid = edsense::pd_avg(mg, cfg);
  EXPECT_GT(mid, std::min(lo, hi));
  EXPECT_LT(mid, std::max(lo, hi));
}

TEST(PMd, DecreasesWithAlpha) {
  const auto cfg = at_pf(500, 0.01);
  double prev = 1.0;
  for (double alpha : {1.0, 2.0, 3.0}) {
    const double pmd = edsense::p_md(fig2_mg(alpha), cfg);
    EXPECT_LT(pmd, prev);
    prev = pmd;
  }
}

// The analytic eta trend follows the simulated channel: both fall as eta
// rises towards 1 (format I).
TEST(PMd, EtaTrendMatchesSimulation) {
  const auto cfg = at_pf(100, 0.01);
  double prev_analytic = 1.0;
  double prev_mc = 1.0;
  for (double eta : {0.1, 0.3, 0.9}) {
    const edsense::AlphaEtaMuShadowParams p{2.0, eta, edsense::EtaFormat::FormatI, 2.0, 4.0, kOmega};
    const double analytic = edsense::p_md(edsense::mg_fit(p, 20), cfg);
    const auto samples = edsense::sample_aem_gamma(p, {5, 0}, 100000);
    const auto mc = edsense::empirical_pd_channel_mc(samples, cfg);
    EXPECT_NEAR(1.0 - mc.value, analytic, 4.0 * mc.std_error) << "eta=" << eta;
    EXPECT_LT(analytic, prev_analytic);
    EXPECT_LT(1.0 - mc.value, prev_mc);
    prev_analytic = analytic;
    prev_mc = 1.0 - mc.value;
  }
}
