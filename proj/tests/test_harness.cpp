#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "isac/harness/config.hpp"
#include "isac/harness/experiment.hpp"
#include "isac/harness/oracle_check.hpp"

using namespace isac;
using namespace isac::harness;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.geometry.n_t = 8;
  c.geometry.n_c = 4;
  c.geometry.n_s = 4;
  c.geometry.paths = 4;
  c.beams = 8;
  c.k = 4;
  c.k_c = 3;
  c.k_s = 3;
  c.trials = 12;
  c.values = {0.0, 20.0};
  return c;
}

std::string csv_of(const std::vector<SweepRecord>& r) {
  std::ostringstream os;
  write_csv(os, r);
  return os.str();
}

}  // namespace

TEST(Harness, SingleTrialHasZeroStandardError) {
  ExperimentConfig c = small_config();
  c.trials = 1;
  c.methods = {Method::full};
  for (const auto& r : run_sweep(c, {1})) {
    EXPECT_EQ(r.objective_se, 0.0);
    EXPECT_EQ(r.trials, 1u);
    EXPECT_TRUE(std::isfinite(r.objective_mean));
  }
}

TEST(Harness, MeanAndStandardError) {
  const auto [m, se] = mean_and_se({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(m, 2.5);
  EXPECT_NEAR(se, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
}

TEST(Harness, OutputIndependentOfThreadCount) {
  ExperimentConfig c = small_config();
  c.methods = {Method::ges, Method::gcs, Method::dbs, Method::random, Method::fixed, Method::full};
  const std::string one = csv_of(run_sweep(c, {1}));
  EXPECT_EQ(one, csv_of(run_sweep(c, {4})));
  EXPECT_EQ(one, csv_of(run_sweep(c, {13})));
}

TEST(Harness, SeedChangesResults) {
  ExperimentConfig c = small_config();
  c.methods = {Method::gcs};
  const std::string a = csv_of(run_sweep(c, {2}));
  c.seed = 2;
  EXPECT_NE(a, csv_of(run_sweep(c, {2})));
}

TEST(Harness, CsvLayout) {
  ExperimentConfig c = small_config();
  c.methods = {Method::full, Method::gcs};
  const std::string csv = csv_of(run_sweep(c, {2}));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kCsvHeader);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 8);
  }
  EXPECT_EQ(rows, c.values.size() * c.methods.size());
}

TEST(Harness, FullActivationDominatesSelections) {
  // Adding chains never lowers the MI terms, so "full" is an upper bound.
  ExperimentConfig c = small_config();
  c.methods = {Method::full, Method::ges, Method::gcs, Method::random, Method::fixed};
  const auto recs = run_sweep(c, {2});
  for (const auto& r : recs)
    for (const auto& f : recs)
      if (f.method == "full" && f.point == r.point) EXPECT_LE(r.objective_mean, f.objective_mean + 1e-12);
}

TEST(Harness, GreedyBeatsRandomOnAverage) {
  ExperimentConfig c = small_config();
  c.trials = 40;
  c.values = {20.0};
  c.methods = {Method::gcs, Method::random};
  const auto recs = run_sweep(c, {2});
  EXPECT_GT(recs[0].objective_mean, recs[1].objective_mean);
}

TEST(Harness, KSweepUsesValueAsCardinality) {
  ExperimentConfig c = small_config();
  c.sweep = SweepKind::k;
  c.values = {2.0, 8.0};
  c.k_c = c.geometry.n_c;
  c.k_s = c.geometry.n_s;
  c.methods = {Method::gcs, Method::full};
  const auto recs = run_sweep(c, {2});
  // At K = N every chain is active.
  EXPECT_NEAR(recs[2].objective_mean, recs[3].objective_mean, 1e-12);
  EXPECT_LT(recs[0].objective_mean, recs[2].objective_mean);
}

TEST(HarnessConfig, RoundTrip) {
  ExperimentConfig c = small_config();
  c.methods = {Method::exhaustive, Method::gcs};
  c.architecture = Architecture::antenna;
  const ExperimentConfig back = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(back).dump(), config_to_json(c).dump());
}

TEST(HarnessConfig, RejectsBadInput) {
  const json base = config_to_json(small_config());
  const auto with = [&](const char* key, json v) {
    json j = base;
    j[key] = std::move(v);
    return j;
  };
  EXPECT_THROW(config_from_json(with("bogus", 1)), ConfigError);
  EXPECT_THROW(config_from_json(with("trials", 0)), ConfigError);
  EXPECT_THROW(config_from_json(with("trials", -3)), ConfigError);
  EXPECT_THROW(config_from_json(with("trials", "many")), ConfigError);
  EXPECT_THROW(config_from_json(with("omega_c", 1.5)), ConfigError);
  EXPECT_THROW(config_from_json(with("k", 9)), ConfigError);
  EXPECT_THROW(config_from_json(with("k_c", 0)), ConfigError);
  EXPECT_THROW(config_from_json(with("methods", json::array({"ges", "ges"}))), ConfigError);
  EXPECT_THROW(config_from_json(with("methods", json::array({"magic"}))), ConfigError);
  EXPECT_THROW(config_from_json(with("sweep", "speed")), ConfigError);
  EXPECT_THROW(config_from_json(with("sector_hi", 2.0)), ConfigError);
  EXPECT_THROW(config_from_json(with("values", json::array())), ConfigError);

  json k_sweep = with("sweep", "k");
  k_sweep["values"] = json::array({1.5});
  EXPECT_THROW(config_from_json(k_sweep), ConfigError);

  json dbs_antenna = with("architecture", "antenna");
  dbs_antenna["methods"] = json::array({"dbs"});
  EXPECT_THROW(config_from_json(dbs_antenna), ConfigError);
}

TEST(HarnessConfig, DefaultsFollowGeometry) {
  const ExperimentConfig c = config_from_json(json{{"n_t", 6}, {"n_c", 3}, {"n_s", 2}, {"k", 3}});
  EXPECT_EQ(c.beams, 6u);
  EXPECT_EQ(c.k_c, 3u);
  EXPECT_EQ(c.k_s, 2u);
}

TEST(HarnessConfig, MissingFileIsConfigError) {
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
  const auto path = std::filesystem::temp_directory_path() / "isac_bad_config.json";
  std::ofstream(path) << "{ not json";
  EXPECT_THROW(load_config(path.string()), ConfigError);
  std::filesystem::remove(path);
}

TEST(Harness, CapacityCheckedBeforeAnyTrial) {
  ExperimentConfig c = small_config();
  c.geometry.n_t = 40;
  c.beams = 40;
  c.k = 20;
  c.methods = {Method::exhaustive};
  c.trials = 1000000;  // would take far too long if trials started
  EXPECT_THROW(run_sweep(c, {2}), CapacityError);

  c = small_config();
  c.methods = {Method::exhaustive};
  c.exhaustive_cap = 10;
  EXPECT_THROW(run_sweep(c, {2}), CapacityError);
}

TEST(Harness, ExhaustiveIsBestAmongMethods) {
  ExperimentConfig c = small_config();
  c.trials = 20;
  c.values = {20.0};
  c.k_c = c.geometry.n_c;
  c.k_s = c.geometry.n_s;
  c.methods = {Method::exhaustive, Method::ges, Method::gcs, Method::dbs, Method::random, Method::fixed};
  const auto grid = run_trials(c, {2});
  for (std::size_t t = 0; t < c.trials; ++t)
    for (std::size_t m = 1; m < c.methods.size(); ++m)
      EXPECT_LE(grid[0][m][t].objective, grid[0][0][t].objective + 1e-9);
}

TEST(HarnessPareto, RequiresEndpoints) {
  ExperimentConfig c = small_config();
  c.sweep = SweepKind::pareto;
  c.values = {0.0, 0.5};
  EXPECT_THROW(run_pareto(c, {1}), ConfigError);
  c.sweep = SweepKind::snr;
  c.values = {0.0, 1.0};
  EXPECT_THROW(run_pareto(c, {1}), ConfigError);
}

TEST(HarnessPareto, EndpointsOptimizeSingleTerm) {
  ExperimentConfig c = small_config();
  c.sweep = SweepKind::pareto;
  c.values = {0.0, 0.5, 1.0};
  c.methods = {Method::ges, Method::random};
  const auto recs = run_pareto(c, {2});
  // At omega_c = 1 the reported objective is the communication term alone.
  const auto& comm_end = recs[4];
  ASSERT_EQ(comm_end.point, 1.0);
  EXPECT_NEAR(comm_end.objective_mean, comm_end.ic_mean, 1e-12);
  const auto& sense_end = recs[0];
  EXPECT_NEAR(sense_end.objective_mean, sense_end.is_mean, 1e-12);
  // Moving weight toward a term never lowers it.
  EXPECT_GE(recs[4].ic_mean, recs[2].ic_mean - 1e-9);
  EXPECT_GE(recs[0].is_mean, recs[2].is_mean - 1e-9);
}

TEST(HarnessPareto, CommunicationEndIgnoresSensing) {
  // With omega_c = 1, scaling the sensing covariances must not move the selection.
  ExperimentConfig c = small_config();
  const Scene scene = trial_scene(c, 3);
  SelectionProblem prob = candidate_problem(c, scene);
  const LinkParams p = c.link_at(30.0, 1.0);
  const SelectionSet before = ges_select(prob, p, c.k);
  for (auto& r : prob.sensing) r *= 1e3;
  EXPECT_EQ(ges_select(prob, p, c.k), before);
}

TEST(HarnessPareto, SymmetricSceneGivesSymmetricEndpoints) {
  // Candidates 0,1 carry strong communication gain and weak sensing gain;
  // 2,3 the mirror image. With T = N_s = 1 the two normalized terms coincide
  // at full selection, and the two endpoints swap coordinates.
  const double strong = 3.0, weak = 0.5;
  SelectionProblem prob;
  prob.channel = CMatrix(4, 4);
  CMatrix r(4, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    prob.channel(i, i) = i < 2 ? strong : weak;
    r(i, i) = i < 2 ? weak * weak : strong * strong;
  }
  prob.sensing = {r};
  LinkParams p = LinkParams::from_snr_db(10.0, 1.0, 1.0);
  const MIReport all = evaluate(prob, p, SelectionSet::full(4));
  EXPECT_NEAR(all.comm_normalized, all.sensing_normalized, 1e-12);

  const SelectionSet comm_end = ges_select(prob, p, 2);
  const SelectionSet sense_end = ges_select(prob, p.with_omega_c(0.0), 2);
  const MIReport c = evaluate(prob, p, comm_end), s = evaluate(prob, p, sense_end);
  EXPECT_EQ(comm_end.positions(), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(sense_end.positions(), (std::vector<std::size_t>{2, 3}));
  EXPECT_NEAR(c.comm_normalized, s.sensing_normalized, 1e-12);
  EXPECT_NEAR(c.sensing_normalized, s.comm_normalized, 1e-12);
}

TEST(Harness, KSweepNearExhaustiveAndDbsCloseToGcs) {
  // Beamspace, M = N_t = 16, 30 dB, full receive; reduced trial count and K
  // grid so the enumeration stays quick.
  ExperimentConfig c;
  c.sweep = SweepKind::k;
  c.values = {4.0, 8.0, 12.0};
  c.trials = 16;
  c.snr_db = 30.0;
  c.methods = {Method::exhaustive, Method::ges, Method::gcs, Method::dbs};
  const auto recs = run_sweep(c);
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    const auto* row = &recs[i * 4];
    EXPECT_GE(row[1].objective_mean, 0.99 * row[0].objective_mean) << "K " << c.values[i];
    EXPECT_GE(row[2].objective_mean, 0.99 * row[0].objective_mean) << "K " << c.values[i];
    if (c.values[i] == 8.0) EXPECT_GE(row[3].objective_mean, 0.95 * row[2].objective_mean);
  }
}

TEST(HarnessOutput, PlotDataAndManifest) {
  ExperimentConfig c = small_config();
  c.methods = {Method::gcs, Method::full};
  const auto recs = run_sweep(c, {2});
  const auto dir = std::filesystem::temp_directory_path() / "isac_plot_test";
  std::filesystem::create_directories(dir);
  const auto files = write_plot_data(dir, "snr", c, recs);
  ASSERT_EQ(files.size(), 2u);
  std::ifstream in(files[0]);
  std::string header, row;
  std::getline(in, header);
  EXPECT_EQ(header.front(), '#');
  std::size_t rows = 0;
  while (std::getline(in, row)) ++rows;
  EXPECT_EQ(rows, c.values.size());
  const json m = manifest_json("sweep", c, files);
  EXPECT_EQ(m["verb"], "sweep");
  EXPECT_TRUE(m.contains("git_describe"));
  EXPECT_EQ(config_from_json(m["config"]).seed, c.seed);
  std::filesystem::remove_all(dir);
}

TEST(HarnessOracle, PassesOnDefaultSmallConfig) {
  ExperimentConfig c = small_config();
  c.snr_db = 20.0;
  c.trials = 100;
  const OracleReport r = oracle_check(c);
  EXPECT_TRUE(r.passed()) << r.to_json().dump(2);
  ASSERT_TRUE(r.greedy_exhaustive_ratio.has_value());
  EXPECT_GE(*r.greedy_exhaustive_ratio, 0.99);
}

TEST(HarnessOracle, AntennaDomainPasses) {
  ExperimentConfig c = small_config();
  c.architecture = Architecture::antenna;
  c.methods = {Method::gcs};
  c.trials = 20;
  const OracleReport r = oracle_check(c, {.threads = 2});
  EXPECT_TRUE(r.passed()) << r.to_json().dump(2);
}

TEST(HarnessOracle, InjectedErrorIsReportedWithItsTrial) {
  ExperimentConfig c = small_config();
  c.trials = 10;
  OracleOptions opt;
  opt.threads = 2;
  opt.perturb_trial = 6;
  const OracleReport r = oracle_check(c, opt);
  EXPECT_FALSE(r.passed());
  const auto& upd = r.checks[2];
  ASSERT_EQ(upd.name, "ges_update");
  ASSERT_EQ(upd.offending_trials, std::vector<std::size_t>{6});
  EXPECT_GT(upd.worst, 1e-8);
  EXPECT_EQ(r.to_json()["checks"][2]["offending"][0]["scene_seed"], derive_seed(c.seed, {kSceneStream, 6}));
  EXPECT_TRUE(r.checks[3].passed());  // the column-side state is untouched
}

TEST(HarnessOracle, RejectsLargeProblems) {
  ExperimentConfig c = small_config();
  c.geometry.n_t = 16;
  c.beams = 16;
  EXPECT_THROW(oracle_check(c), ConfigError);
}
