#include "edsense/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "edsense/error.hpp"
#include "edsense/specfun.hpp"
#include "json.hpp"

namespace edsense::experiment {

namespace {

using nlohmann::json;

const std::set<std::string> kAkmParams{"alpha", "kappa", "mu", "k", "omega_db", "omega_linear"};
const std::set<std::string> kAemParams{"alpha", "eta", "mu", "k", "omega_db", "omega_linear"};
const std::set<std::string> kDetectorParams{"n_samples", "target_pf", "threshold"};

[[noreturn]] void fail(const std::string& source, const std::string& msg) {
  throw ConfigError(source + ": " + msg);
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& source, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) fail(source, "unknown key '" + key + "' in " + where);
  }
}

const json& require_object(const json& parent, const char* key, const std::string& source) {
  if (!parent.contains(key)) fail(source, std::string("missing '") + key + "' section");
  const json& obj = parent.at(key);
  if (!obj.is_object()) fail(source, std::string("'") + key + "' must be an object");
  return obj;
}

double number_at(const json& obj, const char* key, const std::string& source,
                 const std::string& where) {
  if (!obj.contains(key)) fail(source, where + ": missing '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number()) fail(source, where + "." + key + " must be a number");
  return v.get<double>();
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

ChannelParams parse_channel(const json& c, const std::string& source) {
  if (!c.contains("family") || !c.at("family").is_string()) {
    fail(source, "channel.family must be \"akm\" or \"aem\"");
  }
  const std::string family = c.at("family").get<std::string>();
  std::set<std::string> allowed = family == "akm" ? kAkmParams : kAemParams;
  allowed.insert("family");
  if (family == "aem") allowed.insert("format");
  if (family != "akm" && family != "aem") {
    fail(source, "channel.family must be \"akm\" or \"aem\" (got \"" + family + "\")");
  }
  reject_unknown_keys(c, allowed, source, "channel");
  try {
    if (family == "akm") {
      auto p = c.get<AlphaKappaMuShadowParams>();
      p.kappa = std::max(p.kappa, kKappaFloor);
      return p;
    }
    return c.get<AlphaEtaMuShadowParams>();
  } catch (const json::exception& e) {
    fail(source, std::string("channel: ") + e.what());
  } catch (const DomainError& e) {
    fail(source, std::string("channel: ") + e.what());
  }
}

DetectorSpec parse_detector(const json& d, const std::string& source) {
  reject_unknown_keys(d, {"n_samples", "noise_power", "target_pf", "threshold", "signal_model"},
                      source, "detector");
  DetectorSpec spec;
  if (!d.contains("n_samples") || !d.at("n_samples").is_number_integer()) {
    fail(source, "detector.n_samples must be an integer");
  }
  spec.n_samples = d.at("n_samples").get<std::int64_t>();
  if (d.contains("noise_power")) spec.noise_power = number_at(d, "noise_power", source, "detector");
  const bool has_pf = d.contains("target_pf");
  const bool has_threshold = d.contains("threshold");
  if (has_pf == has_threshold) {
    fail(source, "detector: exactly one of target_pf and threshold must be given");
  }
  if (has_pf) spec.target_pf = number_at(d, "target_pf", source, "detector");
  if (has_threshold) spec.threshold = number_at(d, "threshold", source, "detector");
  if (d.contains("signal_model")) {
    if (!d.at("signal_model").is_string()) fail(source, "detector.signal_model must be a string");
    try {
      spec.signal_model = parse_signal_model(d.at("signal_model").get<std::string>());
    } catch (const DomainError& e) {
      fail(source, std::string("detector: ") + e.what());
    }
  }
  return spec;
}

SweepAxis parse_axis(const json& a, const std::string& source, std::size_t index) {
  const std::string where = "sweep[" + std::to_string(index) + "]";
  if (!a.is_object()) fail(source, where + " must be an object");
  reject_unknown_keys(a, {"param", "values", "start", "stop", "points", "spacing"}, source, where);
  if (!a.contains("param") || !a.at("param").is_string()) {
    fail(source, where + ".param must be a string");
  }
  SweepAxis axis;
  axis.param = a.at("param").get<std::string>();
  if (a.contains("values")) {
    if (a.contains("start") || a.contains("stop") || a.contains("points") || a.contains("spacing")) {
      fail(source, where + ": give either values or start/stop/points, not both");
    }
    const json& vals = a.at("values");
    if (!vals.is_array()) fail(source, where + ".values must be an array");
    for (const auto& v : vals) {
      if (!v.is_number()) fail(source, where + ".values must contain numbers");
      axis.values.push_back(v.get<double>());
    }
  } else {
    const double start = number_at(a, "start", source, where);
    const double stop = number_at(a, "stop", source, where);
    if (!a.contains("points") || !a.at("points").is_number_integer()) {
      fail(source, where + ".points must be an integer");
    }
    const auto points = a.at("points").get<std::int64_t>();
    if (points < 2) fail(source, where + ": an axis needs at least 2 points");
    if (points > 100000) fail(source, where + ": too many points");
    std::string spacing = "linear";
    if (a.contains("spacing")) {
      if (!a.at("spacing").is_string()) fail(source, where + ".spacing must be a string");
      spacing = a.at("spacing").get<std::string>();
    }
    if (spacing != "linear" && spacing != "log") {
      fail(source, where + ".spacing must be \"linear\" or \"log\"");
    }
    if (spacing == "log" && !(start > 0.0 && stop > 0.0)) {
      fail(source, where + ": log spacing needs positive start and stop");
    }
    for (std::int64_t i = 0; i < points; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(points - 1);
      if (spacing == "linear") {
        axis.values.push_back(i == points - 1 ? stop : start + t * (stop - start));
      } else {
        axis.values.push_back(i == points - 1 ? stop
                                              : std::exp(std::log(start) +
                                                         t * (std::log(stop) - std::log(start))));
      }
    }
  }
  if (axis.values.size() < 2) fail(source, where + ": an axis needs at least 2 points");
  for (double v : axis.values) {
    if (!std::isfinite(v)) fail(source, where + ": values must be finite");
  }
  if (axis.param == "kappa") {
    for (double& v : axis.values) v = std::max(v, kKappaFloor);
  }
  if (axis.param == "n_samples") {
    // Generated ranges are rounded; explicit lists must already be integral.
    if (!a.contains("values")) {
      for (double& v : axis.values) v = std::round(v);
    }
    for (double v : axis.values) {
      if (v != std::round(v)) fail(source, where + ": n_samples values must be integers");
    }
  }
  std::sort(axis.values.begin(), axis.values.end());
  if (std::adjacent_find(axis.values.begin(), axis.values.end()) != axis.values.end()) {
    fail(source, where + ": duplicate values");
  }
  return axis;
}

void apply(GridPoint& point, const std::string& param, double v) {
  if (kDetectorParams.count(param)) {
    if (param == "n_samples") point.detector.n_samples = static_cast<std::int64_t>(v);
    if (param == "target_pf") point.detector.target_pf = v;
    if (param == "threshold") point.detector.threshold = v;
    return;
  }
  std::visit(
      [&](auto& p) {
        if (param == "alpha") p.alpha = v;
        if (param == "mu") p.mu = v;
        if (param == "k") p.k_shadow = v;
        if (param == "omega_db") p.omega = std::pow(10.0, v / 10.0);
        if (param == "omega_linear") p.omega = v;
        if constexpr (std::is_same_v<std::decay_t<decltype(p)>, AlphaKappaMuShadowParams>) {
          if (param == "kappa") p.kappa = v;
        } else {
          if (param == "eta") p.eta = v;
        }
      },
      point.channel);
}

std::string axis_label(const std::vector<std::string>& names, const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ' ';
    out += names[i] + '=' + format_number(values[i]);
  }
  return out;
}

std::vector<std::string> axis_names(const ExperimentConfig& cfg) {
  std::vector<std::string> names;
  for (const auto& a : cfg.axes) names.push_back(a.param);
  return names;
}

// Fits every grid point once; shared by all commands.
std::vector<MixtureGamma> fit_all(const std::vector<GridPoint>& grid, int terms, int jobs) {
  std::vector<std::optional<MixtureGamma>> fits(grid.size());
  parallel_for(grid.size(), jobs, [&](std::size_t i) { fits[i] = mg_fit(grid[i].channel, terms); });
  std::vector<MixtureGamma> out;
  out.reserve(fits.size());
  for (auto& f : fits) out.push_back(std::move(*f));
  return out;
}

struct Evaluation {
  double value;
  RowMethod method;
};

Evaluation evaluate(const MixtureGamma& mg, const DetectorConfig& det, AvgMethod method) {
  const bool closed = method == AvgMethod::Quadrature ? false : closed_form_applicable(mg);
  const double v = closed ? pd_avg_closed_form(mg, det) : pd_avg_quadrature(mg, det);
  return {v, closed ? RowMethod::ClosedForm : RowMethod::Quadrature};
}

// Removes rounding excursions just outside [0, 1]; larger ones are left
// visible.
double clamp_probability(double p) {
  if (p < 0.0 && p > -1e-12) return 0.0;
  if (p > 1.0 && p < 1.0 + 1e-12) return 1.0;
  return p;
}

void notice_fallbacks(const std::vector<MixtureGamma>& fits, const RunOptions& opts) {
  if (opts.method != AvgMethod::ClosedForm || !opts.log) return;
  const auto n = std::count_if(fits.begin(), fits.end(),
                               [](const MixtureGamma& mg) { return !closed_form_applicable(mg); });
  if (n > 0) {
    *opts.log << "notice: closed form needs integer shapes <= " << kMaxClosedFormShape << "; "
              << n << " grid point(s) evaluated by quadrature instead\n";
  }
}

std::uint64_t to_stream(std::size_t i) { return static_cast<std::uint64_t>(i); }

}  // namespace

DetectorConfig DetectorSpec::resolve() const {
  if (target_pf) return config_for_pf(n_samples, noise_power, *target_pf, signal_model);
  if (!threshold) throw ConfigError("detector: neither target_pf nor threshold set");
  DetectorConfig cfg{n_samples, noise_power, *threshold, signal_model};
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::parse(std::string_view text, std::string_view source_name) {
  const std::string source(source_name);
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": parse error: " + e.what());
  }
  if (!doc.is_object()) fail(source, "top level must be an object");
  reject_unknown_keys(doc, {"channel", "detector", "mg_terms", "sweep", "mc"}, source, "config");

  ExperimentConfig cfg;
  cfg.channel = parse_channel(require_object(doc, "channel", source), source);
  cfg.detector = parse_detector(require_object(doc, "detector", source), source);
  if (doc.contains("mg_terms")) {
    if (!doc.at("mg_terms").is_number_integer()) fail(source, "mg_terms must be an integer");
    cfg.mg_terms = doc.at("mg_terms").get<int>();
  }
  if (cfg.mg_terms < 1 || cfg.mg_terms > specfun::kMaxLaguerreOrder) {
    fail(source, "mg_terms must lie in [1, " + std::to_string(specfun::kMaxLaguerreOrder) + "]");
  }
  if (doc.contains("sweep")) {
    const json& sweep = doc.at("sweep");
    if (!sweep.is_array()) fail(source, "sweep must be an array of axes");
    if (sweep.size() > 2) fail(source, "at most 2 sweep axes are supported");
    for (std::size_t i = 0; i < sweep.size(); ++i) cfg.axes.push_back(parse_axis(sweep[i], source, i));
  }
  const bool akm = std::holds_alternative<AlphaKappaMuShadowParams>(cfg.channel);
  for (const auto& axis : cfg.axes) {
    const auto& channel_params = akm ? kAkmParams : kAemParams;
    if (!channel_params.count(axis.param) && !kDetectorParams.count(axis.param)) {
      fail(source, "parameter '" + axis.param + "' cannot be swept for this channel family");
    }
    if (axis.param == "target_pf" && !cfg.detector.target_pf) {
      fail(source, "sweeping target_pf requires detector.target_pf");
    }
    if (axis.param == "threshold" && !cfg.detector.threshold) {
      fail(source, "sweeping threshold requires detector.threshold");
    }
  }
  if (cfg.axes.size() == 2) {
    const auto& a = cfg.axes[0].param;
    const auto& b = cfg.axes[1].param;
    const bool both_omega = (a == "omega_db" || a == "omega_linear") &&
                            (b == "omega_db" || b == "omega_linear");
    if (a == b || both_omega) fail(source, "the two sweep axes must name different parameters");
  }
  if (doc.contains("mc")) {
    const json& mc = doc.at("mc");
    if (!mc.is_object()) fail(source, "mc must be an object");
    reject_unknown_keys(mc, {"trials", "seed"}, source, "mc");
    McSpec spec;
    if (mc.contains("trials")) {
      if (!mc.at("trials").is_number_integer() || mc.at("trials").get<std::int64_t>() < 2) {
        fail(source, "mc.trials must be an integer >= 2");
      }
      spec.trials = mc.at("trials").get<std::int64_t>();
    }
    if (mc.contains("seed")) {
      if (!mc.at("seed").is_number_unsigned()) fail(source, "mc.seed must be a non-negative integer");
      spec.seed = mc.at("seed").get<std::uint64_t>();
    }
    cfg.mc = spec;
  }
  // Fail early on invalid parameters, including every sweep point.
  expand_grid(cfg);
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

std::vector<GridPoint> expand_grid(const ExperimentConfig& cfg) {
  std::vector<GridPoint> grid{GridPoint{{}, cfg.channel, cfg.detector}};
  for (const auto& axis : cfg.axes) {
    std::vector<GridPoint> next;
    next.reserve(grid.size() * axis.values.size());
    for (const auto& base : grid) {
      for (double v : axis.values) {
        GridPoint p = base;
        p.axis_values.push_back(v);
        apply(p, axis.param, v);
        next.push_back(std::move(p));
      }
    }
    grid = std::move(next);
  }
  const auto names = axis_names(cfg);
  for (const auto& p : grid) {
    try {
      std::visit([](const auto& c) { c.validate(); }, p.channel);
      (void)p.detector.resolve();
    } catch (const DomainError& e) {
      std::string where = p.axis_values.empty() ? "" : " at " + axis_label(names, p.axis_values);
      throw ConfigError("invalid parameters" + where + ": " + e.what());
    }
  }
  return grid;
}

std::string_view to_string(RowMethod m) {
  switch (m) {
    case RowMethod::ClosedForm:
      return "closed_form";
    case RowMethod::Quadrature:
      return "quadrature";
    case RowMethod::MonteCarlo:
      return "mc";
  }
  return "unknown";
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  pool.clear();
  if (first_error) std::rethrow_exception(first_error);
}

SweepResult run_pmd_curve(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto grid = expand_grid(cfg);
  const auto fits = fit_all(grid, cfg.mg_terms, opts.jobs);
  notice_fallbacks(fits, opts);

  const bool with_mc = cfg.mc.has_value();
  std::vector<SweepRow> analytic(grid.size());
  std::vector<SweepRow> simulated(with_mc ? grid.size() : 0);
  parallel_for(grid.size(), opts.jobs, [&](std::size_t i) {
    const DetectorConfig det = grid[i].detector.resolve();
    const Evaluation e = evaluate(fits[i], det, opts.method);
    const double pd = clamp_probability(e.value);
    analytic[i] = {grid[i].axis_values, pd, 1.0 - pd, e.method, std::nullopt};
    if (with_mc) {
      const auto samples = sample_channel(grid[i].channel, {cfg.mc->seed, to_stream(i)},
                                          cfg.mc->trials);
      const McEstimate est = empirical_pd_channel_mc(samples, det);
      simulated[i] = {grid[i].axis_values, est.value, 1.0 - est.value, RowMethod::MonteCarlo,
                      est.std_error};
    }
  });

  SweepResult out{axis_names(cfg), {}};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.rows.push_back(std::move(analytic[i]));
    if (with_mc) out.rows.push_back(std::move(simulated[i]));
  }
  return out;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv(const SweepResult& result) {
  std::string out;
  for (const auto& name : result.axis_names) out += name + ',';
  out += "p_d_avg,p_md,method,std_error\n";
  for (const auto& row : result.rows) {
    for (double v : row.axis_values) out += format_number(v) + ',';
    out += format_number(row.p_d_avg) + ',' + format_number(row.p_md) + ',';
    out += std::string(to_string(row.method)) + ',';
    if (row.std_error) out += format_number(*row.std_error);
    out += '\n';
  }
  return out;
}

std::vector<double> roc_pf_grid() {
  constexpr int kPoints = 50;
  const double lo = std::log(1e-4);
  const double hi = std::log(0.5);
  std::vector<double> pf(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    pf[i] = i == kPoints - 1 ? 0.5 : std::exp(lo + (hi - lo) * i / (kPoints - 1));
  }
  pf[0] = 1e-4;
  return pf;
}

RocResult run_roc(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (cfg.detector.threshold) {
    throw ConfigError("roc: the config must specify target_pf, not threshold");
  }
  for (const auto& a : cfg.axes) {
    if (a.param == "target_pf") throw ConfigError("roc: target_pf is swept internally");
  }
  const auto grid = expand_grid(cfg);
  const auto fits = fit_all(grid, cfg.mg_terms, opts.jobs);
  notice_fallbacks(fits, opts);
  const auto pfs = roc_pf_grid();

  std::vector<std::vector<RocResult::Row>> per_point(grid.size());
  parallel_for(grid.size(), opts.jobs, [&](std::size_t i) {
    for (double pf : pfs) {
      const auto& d = grid[i].detector;
      const DetectorConfig det = config_for_pf(d.n_samples, d.noise_power, pf, d.signal_model);
      const double pd = clamp_probability(evaluate(fits[i], det, opts.method).value);
      per_point[i].push_back({grid[i].axis_values, pf, pd});
    }
  });
  RocResult out{axis_names(cfg), {}};
  for (auto& rows : per_point) {
    for (auto& r : rows) out.rows.push_back(std::move(r));
  }
  return out;
}

std::string to_csv(const RocResult& result) {
  std::string out;
  for (const auto& name : result.axis_names) out += name + ',';
  out += "p_f,p_d_avg\n";
  for (const auto& row : result.rows) {
    for (double v : row.axis_values) out += format_number(v) + ',';
    out += format_number(row.p_f) + ',' + format_number(row.p_d_avg) + '\n';
  }
  return out;
}

bool McVerifyReport::passed() const {
  return std::all_of(points.begin(), points.end(),
                     [&](const McVerifyPoint& p) { return std::abs(p.z) <= z_limit; });
}

std::string McVerifyReport::text() const {
  std::ostringstream out;
  double worst = 0.0;
  for (const auto& p : points) {
    if (!axis_names.empty()) out << "point " << axis_label(axis_names, p.axis_values) << '\n';
    if (p.closed_form) out << "  closed_form  p_d_avg = " << format_number(*p.closed_form) << '\n';
    out << "  quadrature   p_d_avg = " << format_number(p.quadrature) << '\n';
    out << "  monte_carlo  p_d_avg = " << format_number(p.mc.value) << " +- "
        << format_number(p.mc.std_error) << " (" << p.mc.trials << " trials)\n";
    out << "  z = " << format_number(p.z) << '\n';
    worst = std::max(worst, std::abs(p.z));
  }
  out << "result: " << (passed() ? "PASS" : "FAIL") << " (max |z| = " << format_number(worst)
      << ", limit " << format_number(z_limit) << ")\n";
  return out.str();
}

McVerifyReport run_mc_verify(const ExperimentConfig& cfg, const RunOptions& opts,
                             const std::optional<MixtureGamma>& mg_override) {
  if (!cfg.mc) throw ConfigError("mc-verify: the config needs an mc block with trials and seed");
  const auto grid = expand_grid(cfg);
  if (mg_override && grid.size() != 1) {
    throw ConfigError("mc-verify: an explicit MG can only be checked against a single-point config");
  }
  const std::vector<MixtureGamma> fits =
      mg_override ? std::vector<MixtureGamma>{*mg_override}
                  : fit_all(grid, cfg.mg_terms, opts.jobs);

  McVerifyReport report;
  report.axis_names = axis_names(cfg);
  report.points.resize(grid.size());
  parallel_for(grid.size(), opts.jobs, [&](std::size_t i) {
    const DetectorConfig det = grid[i].detector.resolve();
    McVerifyPoint& p = report.points[i];
    p.axis_values = grid[i].axis_values;
    p.quadrature = pd_avg_quadrature(fits[i], det);
    if (closed_form_applicable(fits[i])) p.closed_form = pd_avg_closed_form(fits[i], det);
    p.analytic = opts.method == AvgMethod::Quadrature || !p.closed_form ? p.quadrature
                                                                         : *p.closed_form;
    const auto samples = sample_channel(grid[i].channel, {cfg.mc->seed, to_stream(i)},
                                        cfg.mc->trials);
    p.mc = empirical_pd_channel_mc(samples, det);
    const double se = p.mc.std_error > 0.0 ? p.mc.std_error : 1e-300;
    p.z = (p.mc.value - p.analytic) / se;
  });
  return report;
}

nlohmann::json run_mg_fit(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const MixtureGamma mg = mg_fit(cfg.channel, cfg.mg_terms);
  const double tv = total_variation(mg, cfg.channel);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json out;
  std::visit([&](const auto& p) { out["channel"] = p; }, cfg.channel);
  out["terms"] = cfg.mg_terms;
  out["mg"] = mg_to_json(mg);
  out["diagnostics"] = {{"total_variation", tv},
                        {"total_mass", mg_total_mass(mg)},
                        {"mean_mg", mg_moment(mg, 1)},
                        {"mean_exact", exact_mean(cfg.channel)},
                        {"wall_time_s", seconds}};
  return out;
}

MixtureGamma load_mg(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": parse error: " + e.what());
  }
  try {
    return mg_from_json(doc.is_object() && doc.contains("mg") ? doc.at("mg") : doc);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace edsense::experiment
