#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "edsense/error.hpp"
#include "edsense/experiment.hpp"

namespace ex = edsense::experiment;

namespace {

const char* kBase = R"({
  "channel": {"family": "akm", "alpha": 2, "kappa": 1, "mu": 1, "k": 4, "omega_db": -5},
  "detector": {"n_samples": 100, "noise_power": 1, "target_pf": 0.01},
  "mg_terms": 20
})";

ex::ExperimentConfig with(const std::string& patch) {
  auto doc = nlohmann::json::parse(kBase);
  doc.merge_patch(nlohmann::json::parse(patch));
  return ex::ExperimentConfig::parse(doc.dump());
}

std::string config_error(const std::string& text) {
  try {
    ex::ExperimentConfig::parse(text, "cfg.json");
  } catch (const edsense::ConfigError& e) {
    return e.what();
  }
  return "";
}

std::vector<std::vector<std::string>> csv_rows(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(Config, ParsesBaseDocument) {
  const auto cfg = with("{}");
  const auto& p = std::get<edsense::AlphaKappaMuShadowParams>(cfg.channel);
  EXPECT_NEAR(p.omega, 0.31622776601683794, 1e-15);
  EXPECT_EQ(cfg.detector.n_samples, 100);
  EXPECT_EQ(cfg.mg_terms, 20);
  EXPECT_TRUE(cfg.axes.empty());
  EXPECT_FALSE(cfg.mc.has_value());
  EXPECT_NEAR(cfg.detector.resolve().threshold, 123.26347874, 1e-8);
}

TEST(Config, MalformedJsonReportsLineAndColumn) {
  const std::string msg = config_error("{\n  \"channel\": {\n    \"alpha\": 2,,\n  }\n}");
  EXPECT_NE(msg.find("cfg.json:3:"), std::string::npos) << msg;
  EXPECT_NE(msg.find("parse error"), std::string::npos) << msg;
}

TEST(Config, RejectsInvalidDocuments) {
  EXPECT_THROW(with(R"({"detector": {"threshold": 120}})"), edsense::ConfigError);
  EXPECT_THROW(with(R"({"detector": {"target_pf": null}})"), edsense::ConfigError);
  EXPECT_THROW(with(R"({"channel": {"family": "rayleigh"}})"), edsense::ConfigError);
  EXPECT_THROW(with(R"({"channel": {"omega_linear": 1}})"), edsense::ConfigError);
  EXPECT_THROW(with(R"({"channel": {"alpha": -1}})"), edsense::ConfigError);
  EXPECT_THROW(with(R"({"detector": {"target_pf": 1.5}})"), edsense::ConfigError);
  EXPECT_THROW(with(R"({"mg_terms": 0})"), edsense::ConfigError);
  EXPECT_THROW(with(R"({"colour": "blue"})"), edsense::ConfigError);
  EXPECT_THROW(with(R"({"sweep": [{"param": "alpha", "values": [1]}]})"), edsense::ConfigError);
  EXPECT_THROW(with(R"({"sweep": [{"param": "eta", "values": [1, 2]}]})"), edsense::ConfigError);
  EXPECT_THROW(with(R"({"sweep": [{"param": "alpha", "values": [1, 1]}]})"), edsense::ConfigError);
  EXPECT_THROW(with(R"({"sweep": [{"param": "alpha", "values": [1, 2]}, {"param": "mu", "values": [1, 2]},
                                  {"param": "k", "values": [1, 2]}]})"),
               edsense::ConfigError);
  EXPECT_THROW(with(R"({"sweep": [{"param": "alpha", "start": 0, "stop": 1, "points": 3, "spacing": "log"}]})"),
               edsense::ConfigError);
  EXPECT_THROW(with(R"({"sweep": [{"param": "alpha", "values": [0.5, -1]}]})"), edsense::ConfigError);
  EXPECT_THROW(with(R"({"sweep": [{"param": "threshold", "values": [110, 120]}]})"), edsense::ConfigError);
  EXPECT_THROW(with(R"({"mc": {"trials": 1}})"), edsense::ConfigError);
}

TEST(Config, AxisSpacingAndKappaFloor) {
  const auto cfg = with(R"({"sweep": [{"param": "kappa", "start": 0, "stop": 10, "points": 21},
                                      {"param": "n_samples", "start": 10, "stop": 1000, "points": 3, "spacing": "log"}]})");
  ASSERT_EQ(cfg.axes.size(), 2u);
  EXPECT_EQ(cfg.axes[0].values.front(), ex::kKappaFloor);
  EXPECT_EQ(cfg.axes[0].values[1], 0.5);
  EXPECT_EQ(cfg.axes[0].values.back(), 10.0);
  EXPECT_EQ(cfg.axes[1].values[1], 100.0);
  EXPECT_THROW(with(R"({"sweep": [{"param": "n_samples", "values": [10.5, 20]}]})"), edsense::ConfigError);
}

TEST(Grid, LexicographicOrder) {
  const auto cfg = with(R"({"sweep": [{"param": "alpha", "values": [3, 1, 2]},
                                      {"param": "n_samples", "values": [500, 100]}]})");
  const auto grid = ex::expand_grid(cfg);
  ASSERT_EQ(grid.size(), 6u);
  for (std::size_t i = 1; i < grid.size(); ++i) EXPECT_LT(grid[i - 1].axis_values, grid[i].axis_values);
  EXPECT_EQ(std::get<edsense::AlphaKappaMuShadowParams>(grid[5].channel).alpha, 3.0);
  EXPECT_EQ(grid[5].detector.n_samples, 500);
}

TEST(PmdCurve, CsvContract) {
  const auto cfg = with(R"({"sweep": [{"param": "mu", "values": [1, 2]}, {"param": "omega_db", "values": [-10, 0]}]})");
  const auto result = ex::run_pmd_curve(cfg, {});
  const std::string csv = ex::to_csv(result);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  const auto rows = csv_rows(csv);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"mu", "omega_db", "p_d_avg", "p_md", "method", "std_error"}));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double pd = std::stod(rows[i][2]);
    const double pmd = std::stod(rows[i][3]);
    EXPECT_NEAR(pd + pmd, 1.0, 1e-12);
    EXPECT_GE(pmd, 0.0);
    EXPECT_LE(pmd, 1.0);
    EXPECT_EQ(rows[i][4], "closed_form");
    EXPECT_EQ(rows[i][5], "");
  }
  EXPECT_EQ(ex::format_number(0.1), "0.10000000000000001");
}

TEST(PmdCurve, ParallelRunsMatchSerial) {
  const auto cfg = with(R"({"sweep": [{"param": "kappa", "start": 0.5, "stop": 5, "points": 6},
                                      {"param": "alpha", "values": [1, 2, 3]}],
                            "mc": {"trials": 2000, "seed": 9}})");
  const std::string serial = ex::to_csv(ex::run_pmd_curve(cfg, {edsense::AvgMethod::Auto, 1, nullptr}));
  const std::string parallel = ex::to_csv(ex::run_pmd_curve(cfg, {edsense::AvgMethod::Auto, 4, nullptr}));
  EXPECT_EQ(serial, parallel);
}

TEST(PmdCurve, MonteCarloRowsFollowAnalyticRows) {
  const auto cfg = with(R"({"sweep": [{"param": "alpha", "values": [1, 2]}], "mc": {"trials": 20000, "seed": 3}})");
  const auto result = ex::run_pmd_curve(cfg, {});
  ASSERT_EQ(result.rows.size(), 4u);
  EXPECT_EQ(result.rows[1].method, ex::RowMethod::MonteCarlo);
  ASSERT_TRUE(result.rows[1].std_error.has_value());
  EXPECT_NEAR(result.rows[1].p_d_avg, result.rows[0].p_d_avg, 5.0 * *result.rows[1].std_error);
}

TEST(PmdCurve, AlphaDominatesAcrossKappa) {
  const auto cfg = with(R"({"detector": {"n_samples": 500},
                            "sweep": [{"param": "alpha", "values": [1, 2]},
                                      {"param": "kappa", "start": 0, "stop": 10, "points": 21}]})");
  const auto rows = ex::run_pmd_curve(cfg, {}).rows;
  ASSERT_EQ(rows.size(), 42u);
  for (std::size_t i = 0; i < 21; ++i) EXPECT_LE(rows[21 + i].p_md, rows[i].p_md) << "kappa=" << rows[i].axis_values[1];
}

TEST(PmdCurve, DecreasesWithSampleCount) {
  const auto cfg = with(R"({"sweep": [{"param": "n_samples", "values": [100, 500, 1000]}]})");
  const auto rows = ex::run_pmd_curve(cfg, {}).rows;
  EXPECT_GT(rows[0].p_md, rows[1].p_md);
  EXPECT_GT(rows[1].p_md, rows[2].p_md);
}

TEST(PmdCurve, ClosedFormFallbackIsAnnounced) {
  const auto cfg = with(R"({"channel": {"k": 2.5}, "sweep": [{"param": "alpha", "values": [1, 2]}]})");
  std::ostringstream log;
  const auto result = ex::run_pmd_curve(cfg, {edsense::AvgMethod::ClosedForm, 1, &log});
  EXPECT_NE(log.str().find("quadrature"), std::string::npos);
  for (const auto& row : result.rows) EXPECT_EQ(row.method, ex::RowMethod::Quadrature);
}

TEST(Roc, ShapeAndDominance) {
  const auto cfg = with(R"({"sweep": [{"param": "n_samples", "values": [100, 1000]}]})");
  const auto roc = ex::run_roc(cfg, {});
  ASSERT_EQ(roc.rows.size(), 100u);
  const auto pfs = ex::roc_pf_grid();
  EXPECT_EQ(pfs.size(), 50u);
  EXPECT_EQ(pfs.front(), 1e-4);
  EXPECT_EQ(pfs.back(), 0.5);
  for (std::size_t i = 0; i < 50; ++i) {
    const auto& small = roc.rows[i];
    const auto& large = roc.rows[50 + i];
    EXPECT_EQ(small.p_f, large.p_f);
    EXPECT_GE(small.p_d_avg, small.p_f);
    EXPECT_GE(large.p_d_avg, small.p_d_avg);
    if (i) EXPECT_GE(small.p_d_avg, roc.rows[i - 1].p_d_avg);
  }
  EXPECT_EQ(csv_rows(ex::to_csv(roc))[0], (std::vector<std::string>{"n_samples", "p_f", "p_d_avg"}));
}

TEST(Roc, DegenerateChannelIsDiagonal) {
  const auto roc = ex::run_roc(with(R"({"channel": {"omega_db": null, "omega_linear": 1e-9}})"), {});
  for (const auto& row : roc.rows) EXPECT_NEAR(row.p_d_avg, row.p_f, 1e-3);
}

TEST(Roc, RequiresTargetPf) {
  EXPECT_THROW(ex::run_roc(with(R"({"detector": {"target_pf": null, "threshold": 120}})"), {}),
               edsense::ConfigError);
}

TEST(McVerify, DefaultConfigPassesAndCorruptionFails) {
  const auto cfg = with(R"({"mc": {"trials": 100000, "seed": 1}})");
  const auto report = ex::run_mc_verify(cfg, {});
  ASSERT_EQ(report.points.size(), 1u);
  EXPECT_TRUE(report.passed()) << report.text();
  ASSERT_TRUE(report.points[0].closed_form.has_value());
  EXPECT_NEAR(*report.points[0].closed_form, report.points[0].quadrature, 1e-8);
  EXPECT_EQ(report.text(), ex::run_mc_verify(cfg, {}).text());

  const auto corrupted = edsense::mg_fit(cfg.channel, 20).scaled(2.0);
  EXPECT_FALSE(ex::run_mc_verify(cfg, {}, corrupted).passed());
  EXPECT_THROW(ex::run_mc_verify(with("{}"), {}), edsense::ConfigError);
}

TEST(MgFitReport, Contents) {
  const auto out = ex::run_mg_fit(with("{}"));
  EXPECT_EQ(out.at("terms"), 20);
  ASSERT_EQ(out.at("mg").size(), 20u);
  for (const auto& t : out.at("mg")) EXPECT_GT(t.at("weight").get<double>(), 0.0);
  EXPECT_NEAR(out.at("diagnostics").at("total_mass").get<double>(), 1.0, 1e-12);
  EXPECT_TRUE(out.at("diagnostics").contains("total_variation"));
  EXPECT_TRUE(out.at("diagnostics").contains("wall_time_s"));
  const auto single = ex::run_mg_fit(with(R"({"mg_terms": 1})"));
  EXPECT_EQ(single.at("mg").size(), 1u);
}
