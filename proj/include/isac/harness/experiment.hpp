#pragma once

// Monte-Carlo sweeps. Trial t always sees the same scene (stream derived from
// the seed and t), across methods and sweep points, so method comparisons are
// paired. Results land in fixed slots and are reduced in order, which makes
// the output independent of the worker count.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "isac/beamspace.hpp"
#include "isac/harness/config.hpp"
#include "isac/harness/parallel.hpp"
#include "isac/metrics.hpp"
#include "isac/problem.hpp"
#include "isac/rng.hpp"
#include "isac/rx_select.hpp"
#include "isac/scene.hpp"
#include "isac/tx_select.hpp"

#ifndef ISAC_GIT_DESCRIBE
#define ISAC_GIT_DESCRIBE "unknown"
#endif

namespace isac::harness {

inline constexpr std::uint64_t kSceneStream = 0x5ce7e;
inline constexpr std::uint64_t kMethodStream = 0x5e1ec7;

struct SweepRecord {
  std::string method;
  double point = 0.0;
  double objective_mean = 0.0;
  double objective_se = 0.0;
  double ic_mean = 0.0;  // mean I_c / T
  double is_mean = 0.0;  // mean I_s / N_s
  double ee_mean = 0.0;
  std::size_t trials = 0;
  double ms = 0.0;  // mean wall time per trial, 0 unless timing is on
};

struct RunOptions {
  std::size_t threads = default_threads();
  bool timing = false;
};

struct TrialMetrics {
  double objective = 0.0;
  double ic = 0.0;
  double is = 0.0;
  double ee = 0.0;
  double seconds = 0.0;
};

inline Scene trial_scene(const ExperimentConfig& cfg, std::size_t trial) {
  Rng rng = make_stream(cfg.seed, {kSceneStream, trial});
  return generate_scene(cfg.geometry, rng);
}

// Full-receive candidate problem: antennas directly, or beams behind the DFT
// front end.
inline SelectionProblem candidate_problem(const ExperimentConfig& cfg, const Scene& scene) {
  if (cfg.architecture == Architecture::antenna) return transmit_problem(scene);
  return beamspace_problem(to_beamspace(scene, build_codebook(cfg.geometry.n_t, cfg.beams), LinkParams{}));
}

// Receive then transmit selection for one method.
inline JointSelection select_chains(Method m, const SelectionProblem& full, const LinkParams& p, std::size_t k,
                                    std::size_t k_c, std::size_t k_s, Rng& rng, std::uint64_t cap) {
  const std::size_t n = full.candidates(), n_c = full.channel.rows(), n_s = full.sensing.size();
  switch (m) {
    case Method::full:
      return {SelectionSet::full(n), SelectionSet::full(n_c), SelectionSet::full(n_s)};
    case Method::ges:
      return joint_pipeline(full, p, k, k_c, k_s, GreedyMethod::ges);
    case Method::gcs:
      return joint_pipeline(full, p, k, k_c, k_s, GreedyMethod::gcs);
    case Method::dbs: {
      // DBS only covers the beams; receive chains come from the greedy rule.
      JointSelection s{SelectionSet::full(n), rx_comm_select(full.channel, p, k_c, GreedyMethod::gcs),
                       rx_sense_select(full.sensing, p, k_s)};
      s.tx = dbs_select(restrict_receive(full, s.rx_c, s.rx_s), p, k);
      return s;
    }
    case Method::exhaustive: {
      JointSelection s{SelectionSet::full(n), rx_comm_exhaustive(full.channel, p, k_c, cap),
                       rx_sense_select(full.sensing, p, k_s)};
      s.tx = exhaustive_select(restrict_receive(full, s.rx_c, s.rx_s), p, k, cap);
      return s;
    }
    case Method::random: {
      SelectionSet rx_c = random_select(n_c, k_c, rng);
      SelectionSet rx_s = random_select(n_s, k_s, rng);
      return {random_select(n, k, rng), std::move(rx_c), std::move(rx_s)};
    }
    case Method::fixed:
      return {fixed_select(n, k), fixed_select(n_c, k_c), fixed_select(n_s, k_s)};
  }
  throw ModelError("select_chains: unknown method");
}

inline TrialMetrics evaluate_selection(const SelectionProblem& full, const JointSelection& s, const LinkParams& p,
                                       const PowerModel& power) {
  const MIReport r = evaluate(restrict_receive(full, s.rx_c, s.rx_s), p, s.tx);
  TrialMetrics t;
  t.objective = r.objective;
  t.ic = r.comm_normalized;
  t.is = r.sensing_normalized;
  t.ee = energy_efficiency(r, circuit_power(power, s.tx, s.rx_c, s.rx_s));
  return t;
}

// One method at one sweep point on one trial's problem.
inline TrialMetrics run_trial(const ExperimentConfig& cfg, const SelectionProblem& full, std::size_t trial,
                              std::size_t point_index, std::size_t method_index, bool timing) {
  const double value = cfg.values[point_index];
  const Method m = cfg.methods[method_index];
  const LinkParams p = cfg.link_for_point(value);
  Rng rng = make_stream(cfg.seed, {kMethodStream, trial, point_index, static_cast<std::uint64_t>(m)});
  const auto start = std::chrono::steady_clock::now();
  const JointSelection s = select_chains(m, full, p, cfg.k_at(value), cfg.k_c_effective(), cfg.k_s_effective(), rng,
                                         cfg.exhaustive_cap);
  const double seconds =
      timing ? std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() : 0.0;
  TrialMetrics t = evaluate_selection(full, s, p, cfg.power);
  t.seconds = seconds;
  return t;
}

// Mean and standard error (sample standard deviation over sqrt(n)).
inline std::pair<double, double> mean_and_se(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  if (x.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

// Per-trial metrics for every (point, method): [point][method][trial].
using TrialGrid = std::vector<std::vector<std::vector<TrialMetrics>>>;

inline TrialGrid run_trials(const ExperimentConfig& cfg, const RunOptions& opt) {
  cfg.validate();
  cfg.check_capacity();
  const std::size_t np = cfg.values.size(), nm = cfg.methods.size();
  TrialGrid grid(np, std::vector<std::vector<TrialMetrics>>(nm, std::vector<TrialMetrics>(cfg.trials)));
  parallel_for(cfg.trials, opt.threads, [&](std::size_t t) {
    const SelectionProblem full = candidate_problem(cfg, trial_scene(cfg, t));
    for (std::size_t i = 0; i < np; ++i)
      for (std::size_t j = 0; j < nm; ++j) grid[i][j][t] = run_trial(cfg, full, t, i, j, opt.timing);
  });
  return grid;
}

inline std::vector<SweepRecord> summarize(const ExperimentConfig& cfg, const TrialGrid& grid) {
  std::vector<SweepRecord> out;
  for (std::size_t i = 0; i < cfg.values.size(); ++i)
    for (std::size_t j = 0; j < cfg.methods.size(); ++j) {
      const auto& trials = grid[i][j];
      std::vector<double> obj, ic, is, ee;
      double seconds = 0.0;
      for (const auto& t : trials) {
        obj.push_back(t.objective);
        ic.push_back(t.ic);
        is.push_back(t.is);
        ee.push_back(t.ee);
        seconds += t.seconds;
      }
      SweepRecord r;
      r.method = to_string(cfg.methods[j]);
      r.point = cfg.values[i];
      std::tie(r.objective_mean, r.objective_se) = mean_and_se(obj);
      r.ic_mean = mean_and_se(ic).first;
      r.is_mean = mean_and_se(is).first;
      r.ee_mean = mean_and_se(ee).first;
      r.trials = trials.size();
      r.ms = 1e3 * seconds / static_cast<double>(trials.size());
      for (double v : {r.objective_mean, r.objective_se, r.ic_mean, r.is_mean, r.ee_mean})
        if (!std::isfinite(v)) throw NumericError("non-finite aggregate for method " + r.method);
      out.push_back(std::move(r));
    }
  return out;
}

inline std::vector<SweepRecord> run_sweep(const ExperimentConfig& cfg, const RunOptions& opt = {}) {
  return summarize(cfg, run_trials(cfg, opt));
}

// Weight sweep without receive selection; the grid must include both ends.
inline std::vector<SweepRecord> run_pareto(const ExperimentConfig& cfg, const RunOptions& opt = {}) {
  if (cfg.sweep != SweepKind::pareto) throw ConfigError("run_pareto needs sweep = pareto");
  const auto [lo, hi] = std::minmax_element(cfg.values.begin(), cfg.values.end());
  if (*lo != 0.0 || *hi != 1.0) throw ConfigError("pareto weight grid must include 0 and 1");
  return run_sweep(cfg, opt);
}

// ---------------------------------------------------------------------------
// Output

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline constexpr const char* kCsvHeader = "method,point,objective_mean,objective_se,Ic_mean,Is_mean,ee_mean,trials,ms";

inline void write_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
  os << kCsvHeader << '\n';
  for (const auto& r : records)
    os << r.method << ',' << format_number(r.point) << ',' << format_number(r.objective_mean) << ','
       << format_number(r.objective_se) << ',' << format_number(r.ic_mean) << ',' << format_number(r.is_mean) << ','
       << format_number(r.ee_mean) << ',' << r.trials << ',' << format_number(r.ms) << '\n';
}

// One whitespace-delimited file per method: point and the aggregate columns.
inline std::vector<std::filesystem::path> write_plot_data(const std::filesystem::path& dir, const std::string& stem,
                                                          const ExperimentConfig& cfg,
                                                          const std::vector<SweepRecord>& records) {
  std::vector<std::filesystem::path> files;
  for (Method m : cfg.methods) {
    const auto path = dir / (stem + "_" + to_string(m) + ".dat");
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "# " << to_string(cfg.sweep) << " objective_mean objective_se Ic_mean Is_mean ee_mean\n";
    for (const auto& r : records)
      if (r.method == to_string(m))
        out << format_number(r.point) << ' ' << format_number(r.objective_mean) << ' ' << format_number(r.objective_se)
            << ' ' << format_number(r.ic_mean) << ' ' << format_number(r.is_mean) << ' ' << format_number(r.ee_mean)
            << '\n';
    files.push_back(path);
  }
  return files;
}

inline json manifest_json(const std::string& verb, const ExperimentConfig& cfg,
                          const std::vector<std::filesystem::path>& outputs) {
  json files = json::array();
  for (const auto& f : outputs) files.push_back(f.filename().string());
  return {{"verb", verb}, {"git_describe", ISAC_GIT_DESCRIBE}, {"config", config_to_json(cfg)}, {"outputs", files}};
}

}  // namespace isac::harness
