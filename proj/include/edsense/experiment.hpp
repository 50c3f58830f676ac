// Experiment configs, parameter sweeps and result emission behind the CLI.
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edsense/detector.hpp"
#include "edsense/fading.hpp"
#include "edsense/mixture_gamma.hpp"
#include "edsense/montecarlo.hpp"

namespace edsense::experiment {

/// Sweepable parameter names: alpha, kappa, eta, mu, k, omega_db,
/// omega_linear, n_samples, target_pf, threshold.
struct SweepAxis {
  std::string param;
  std::vector<double> values;  // ascending, at least two
};

/// Kappa values below this floor are raised to it (kappa = 0 has no
/// dominant component; the kernel is defined for kappa > 0).
inline constexpr double kKappaFloor = 1e-6;

struct DetectorSpec {
  std::int64_t n_samples = 100;
  double noise_power = 1.0;
  std::optional<double> target_pf;
  std::optional<double> threshold;
  SignalModel signal_model = SignalModel::CSCG;

  [[nodiscard]] DetectorConfig resolve() const;
};

struct McSpec {
  std::int64_t trials = 100000;
  std::uint64_t seed = 1;
};

struct ExperimentConfig {
  ChannelParams channel;
  DetectorSpec detector;
  int mg_terms = 20;
  std::vector<SweepAxis> axes;  // at most two
  std::optional<McSpec> mc;

  /// Parses a JSON document. Throws ConfigError; parse errors carry
  /// "line:column" of the offending byte.
  static ExperimentConfig parse(std::string_view text, std::string_view source_name = "config");
  static ExperimentConfig load(const std::string& path);
};

struct GridPoint {
  std::vector<double> axis_values;
  ChannelParams channel;
  DetectorSpec detector;
};

/// Cartesian product of the axes, first axis outermost, so points come out
/// in lexicographic order of their axis values. Throws ConfigError if a
/// point has invalid parameters.
std::vector<GridPoint> expand_grid(const ExperimentConfig& cfg);

enum class RowMethod { ClosedForm, Quadrature, MonteCarlo };
std::string_view to_string(RowMethod m);

struct SweepRow {
  std::vector<double> axis_values;
  double p_d_avg = 0.0;
  double p_md = 0.0;
  RowMethod method = RowMethod::ClosedForm;
  std::optional<double> std_error;
};

struct SweepResult {
  std::vector<std::string> axis_names;
  std::vector<SweepRow> rows;
};

struct RunOptions {
  AvgMethod method = AvgMethod::Auto;
  int jobs = 1;
  std::ostream* log = nullptr;  // notices; may be null
};

/// Runs `task(i)` for i in [0, count) on `jobs` worker threads.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task);

/// P_md over the sweep grid. One analytic row per grid point, followed by a
/// Monte-Carlo row when the config has an mc block.
SweepResult run_pmd_curve(const ExperimentConfig& cfg, const RunOptions& opts);

/// CSV: header row, comma separated, LF endings, 17 significant digits.
std::string to_csv(const SweepResult& result);

/// Receiver operating characteristic: 50 log-spaced false-alarm targets in
/// [1e-4, 0.5] for every grid point.
struct RocResult {
  std::vector<std::string> axis_names;
  struct Row {
    std::vector<double> axis_values;
    double p_f;
    double p_d_avg;
  };
  std::vector<Row> rows;
};

std::vector<double> roc_pf_grid();
RocResult run_roc(const ExperimentConfig& cfg, const RunOptions& opts);
std::string to_csv(const RocResult& result);

struct McVerifyPoint {
  std::vector<double> axis_values;
  std::optional<double> closed_form;
  double quadrature = 0.0;
  double analytic = 0.0;  // the value compared against (closed form when available)
  McEstimate mc;
  double z = 0.0;
};

struct McVerifyReport {
  std::vector<std::string> axis_names;
  std::vector<McVerifyPoint> points;
  double z_limit = 4.0;
  [[nodiscard]] bool passed() const;
  [[nodiscard]] std::string text() const;
};

/// Compares the analytic average detection probability against the channel
/// Monte-Carlo estimate at every grid point. Requires an mc block. When
/// `mg_override` is set (single-point configs only) it replaces the fitted
/// mixture.
McVerifyReport run_mc_verify(const ExperimentConfig& cfg, const RunOptions& opts,
                             const std::optional<MixtureGamma>& mg_override = std::nullopt);

/// mg-fit output for the base point: parameters, MG terms and diagnostics.
nlohmann::json run_mg_fit(const ExperimentConfig& cfg);

/// Accepts either a bare MG term array or an mg-fit document with an "mg" key.
MixtureGamma load_mg(const std::string& path);

/// printf("%.17g").
std::string format_number(double v);

}  // namespace edsense::experiment
