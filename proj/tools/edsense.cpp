// edsense: energy-detection sensing over composite fading channels.
//
// Exit codes: 0 success, 2 config or usage error, 3 numerical
// non-convergence or fit failure, 4 Monte-Carlo oracle disagreement.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "edsense/error.hpp"
#include "edsense/experiment.hpp"
#include "edsense/specfun.hpp"

namespace {

namespace ex = edsense::experiment;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitOracle = 4;

struct Options {
  std::string config;
  std::string out;
  std::string method = "auto";
  std::optional<int> terms;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string mg;
};

void add_common(CLI::App* cmd, Options& o, bool with_out, bool with_seed) {
  cmd->add_option("--config", o.config, "experiment config (JSON)")->required();
  if (with_out) cmd->add_option("--out", o.out, "output CSV path (default: stdout)");
  cmd->add_option("--method", o.method, "P_d averaging: auto, closed or quadrature")
      ->check(CLI::IsMember({"auto", "closed", "quadrature"}));
  cmd->add_option("--terms", o.terms, "number of mixture-gamma terms S")
      ->check(CLI::Range(1, edsense::specfun::kMaxLaguerreOrder));
  if (with_seed) cmd->add_option("--seed", o.seed, "Monte-Carlo seed (overrides mc.seed)");
  cmd->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
}

ex::ExperimentConfig load(const Options& o) {
  auto cfg = ex::ExperimentConfig::load(o.config);
  if (o.terms) cfg.mg_terms = *o.terms;
  if (o.seed) {
    if (!cfg.mc) cfg.mc = ex::McSpec{};
    cfg.mc->seed = *o.seed;
  }
  return cfg;
}

ex::RunOptions run_options(const Options& o) {
  return {edsense::parse_avg_method(o.method), o.jobs, &std::cerr};
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw edsense::ConfigError(path + ": cannot open for writing");
  out << text;
  if (!out.flush()) throw edsense::ConfigError(path + ": write failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-detection spectrum sensing over alpha-kappa-mu/Gamma and "
               "alpha-eta-mu/Gamma composite fading"};
  app.require_subcommand(1);

  Options o;
  auto* mg_fit = app.add_subcommand("mg-fit", "fit a mixture-gamma model and print it as JSON");
  add_common(mg_fit, o, false, false);
  auto* pmd = app.add_subcommand("pmd-curve", "miss-detection probability over the sweep grid");
  add_common(pmd, o, true, true);
  auto* roc = app.add_subcommand("roc", "average detection vs false-alarm probability");
  add_common(roc, o, true, false);
  auto* verify = app.add_subcommand("mc-verify", "check the analytic P_d against Monte-Carlo");
  add_common(verify, o, false, true);
  verify->add_option("--mg", o.mg, "verify this MG (JSON) instead of fitting one");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const auto cfg = load(o);
    const auto opts = run_options(o);
    if (mg_fit->parsed()) {
      std::cout << ex::run_mg_fit(cfg).dump(2) << '\n';
    } else if (pmd->parsed()) {
      emit(ex::to_csv(ex::run_pmd_curve(cfg, opts)), o.out);
    } else if (roc->parsed()) {
      emit(ex::to_csv(ex::run_roc(cfg, opts)), o.out);
    } else if (verify->parsed()) {
      std::optional<edsense::MixtureGamma> mg;
      if (!o.mg.empty()) mg = ex::load_mg(o.mg);
      const auto report = ex::run_mc_verify(cfg, opts, mg);
      std::cout << report.text();
      return report.passed() ? 0 : kExitOracle;
    }
  } catch (const edsense::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const edsense::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const edsense::FitError& e) {
    std::cerr << "fit error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const edsense::ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
