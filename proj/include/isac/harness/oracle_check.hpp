#pragma once

// Cross-validation mode. For each trial both greedy selectors run in lockstep
// down to one chain with periodic refresh disabled, and after every step:
//  - each candidate's removal score is compared with the objective change
//    recomputed from scratch;
//  - the incrementally maintained inverses and diagonal quantities are
//    compared with a fresh recomputation;
//  - the two selectors' score vectors are compared.
// The greedy result at the configured K is also compared with exhaustive
// search when the enumeration fits under the cap.

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "isac/harness/config.hpp"
#include "isac/harness/experiment.hpp"
#include "isac/harness/parallel.hpp"
#include "isac/tx_select.hpp"

namespace isac::harness {

struct ChainDeviations {
  double ges_identity = 0.0;  // abs, objective units
  double gcs_identity = 0.0;
  double ges_update = 0.0;    // rel
  double gcs_update = 0.0;
  double score_agreement = 0.0;  // rel
};

namespace detail {

inline double rel_scalar(double got, double want) {
  const double scale = std::max(std::abs(want), DBL_MIN);
  return got == want ? 0.0 : std::abs(got - want) / scale;
}

inline std::vector<std::size_t> without(std::vector<std::size_t> v, std::size_t j) {
  v.erase(std::find(v.begin(), v.end(), j));
  return v;
}

inline double ges_update_error(const GesSelector& ges) {
  const GesState fresh = ges.recompute();
  const GesState& kept = ges.state();
  double worst = relative_error(kept.a, fresh.a);
  for (std::size_t n = 0; n < fresh.b.size(); ++n)
    if (fresh.b[n].rows() > 0) worst = std::max(worst, relative_error(kept.b[n], fresh.b[n]));
  // alpha and beta only: 1 - gamma*alpha cancels badly at high SNR, so even
  // two from-scratch evaluations of it disagree well above the tolerance.
  for (std::size_t j : ges.remaining()) {
    worst = std::max(worst, rel_scalar(kept.alpha[j], fresh.alpha[j]));
    for (std::size_t n = 0; n < fresh.beta.size(); ++n)
      if (fresh.b[n].rows() > 0) worst = std::max(worst, rel_scalar(kept.beta[n][j], fresh.beta[n][j]));
  }
  return worst;
}

inline double gcs_update_error(const GcsSelector& gcs) {
  const GcsState fresh = gcs.recompute();
  const GcsState& kept = gcs.state();
  double worst = relative_error(kept.d_inv, fresh.d_inv);
  for (std::size_t n = 0; n < fresh.e_inv.size(); ++n)
    worst = std::max(worst, relative_error(kept.e_inv[n], fresh.e_inv[n]));
  for (std::size_t k = 0; k < gcs.remaining().size(); ++k) {
    worst = std::max(worst, rel_scalar(kept.d_inv(k, k).real(), fresh.d_inv(k, k).real()));
    for (std::size_t n = 0; n < fresh.e_inv.size(); ++n)
      worst = std::max(worst, rel_scalar(kept.e_inv[n](k, k).real(), fresh.e_inv[n](k, k).real()));
  }
  return worst;
}

}  // namespace detail

// `perturb` > 0 adds that amount to A(0,0) after the first removal; it exists
// so the check itself can be shown to fire.
inline ChainDeviations check_removal_chain(const SelectionProblem& prob, const LinkParams& p, double perturb = 0.0) {
  const GreedyOptions no_refresh{0};
  GesSelector ges(prob, p, no_refresh);
  GcsSelector gcs(prob, p, no_refresh);
  ChainDeviations dev;
  bool first = true;
  while (ges.remaining().size() > 1) {
    const auto rem = ges.remaining();
    const double base = evaluate(prob, p, rem).objective;
    const auto ges_scores = ges.scores(), gcs_scores = gcs.scores();
    for (std::size_t k = 0; k < rem.size(); ++k) {
      const double after = evaluate(prob, p, detail::without(rem, rem[k])).objective;
      dev.ges_identity = std::max(dev.ges_identity, std::abs(after - (base + ges_scores[k])));
      dev.gcs_identity = std::max(dev.gcs_identity, std::abs(after - (base + gcs_scores[k])));
      dev.score_agreement = std::max(
          dev.score_agreement, std::abs(ges_scores[k] - gcs_scores[k]) / std::max(1.0, std::abs(gcs_scores[k])));
    }
    const std::size_t j = gcs.best_removal();
    ges.remove(j);
    gcs.remove(j);
    if (first && perturb != 0.0) {
      GesState s = ges.state();
      s.a(0, 0) += perturb;
      ges.inject_state(std::move(s));
    }
    first = false;
    dev.ges_update = std::max(dev.ges_update, detail::ges_update_error(ges));
    dev.gcs_update = std::max(dev.gcs_update, detail::gcs_update_error(gcs));
  }
  return dev;
}

struct OracleOptions {
  std::size_t threads = default_threads();
  double tolerance = 1e-8;
  double min_ratio = 0.99;  // greedy / exhaustive mean
  std::optional<std::size_t> perturb_trial;
  double perturb_magnitude = 1e-6;
  std::size_t max_candidates = 10;
};

struct OracleCheckResult {
  std::string name;
  double worst = 0.0;
  double limit = 0.0;
  bool higher_is_better = false;
  std::vector<std::size_t> offending_trials;

  bool passed() const { return offending_trials.empty() && (higher_is_better ? worst >= limit : worst <= limit); }
};

struct OracleReport {
  std::vector<OracleCheckResult> checks;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::optional<double> greedy_exhaustive_ratio;  // mean over trials

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed(); });
  }

  json to_json() const {
    json j = {{"passed", passed()}, {"trials", trials}, {"seed", seed}};
    json list = json::array();
    for (const auto& c : checks) {
      json offending = json::array();
      for (std::size_t t : c.offending_trials)
        offending.push_back({{"trial", t}, {"scene_seed", derive_seed(seed, {kSceneStream, t})}});
      list.push_back({{"name", c.name},
                      {"worst", c.worst},
                      {"limit", c.limit},
                      {"passed", c.passed()},
                      {"offending", offending}});
    }
    j["checks"] = list;
    if (greedy_exhaustive_ratio) j["greedy_exhaustive_ratio"] = *greedy_exhaustive_ratio;
    return j;
  }
};

inline OracleReport oracle_check(const ExperimentConfig& cfg, const OracleOptions& opt = {}) {
  cfg.validate();
  if (cfg.candidates() > opt.max_candidates)
    throw ConfigError("oracle mode needs at most " + std::to_string(opt.max_candidates) + " transmit candidates");
  const LinkParams p = cfg.link_at(cfg.snr_db, cfg.omega_c);
  const bool with_exhaustive = binomial(cfg.candidates(), cfg.k) <= cfg.exhaustive_cap;

  struct Row {
    ChainDeviations dev;
    double ratio = 1.0;
  };
  std::vector<Row> rows(cfg.trials);
  parallel_for(cfg.trials, opt.threads, [&](std::size_t t) {
    const SelectionProblem prob = candidate_problem(cfg, trial_scene(cfg, t));
    const double perturb = opt.perturb_trial && *opt.perturb_trial == t ? opt.perturb_magnitude : 0.0;
    rows[t].dev = check_removal_chain(prob, p, perturb);
    if (with_exhaustive) {
      const double best = evaluate(prob, p, exhaustive_select(prob, p, cfg.k, cfg.exhaustive_cap)).objective;
      rows[t].ratio = evaluate(prob, p, gcs_select(prob, p, cfg.k)).objective / best;
    }
  });

  OracleReport report;
  report.trials = cfg.trials;
  report.seed = cfg.seed;
  const auto add = [&](const std::string& name, double ChainDeviations::*field) {
    OracleCheckResult c{name, 0.0, opt.tolerance, false, {}};
    for (std::size_t t = 0; t < rows.size(); ++t) {
      const double v = rows[t].dev.*field;
      c.worst = std::max(c.worst, v);
      if (!(v <= opt.tolerance)) c.offending_trials.push_back(t);
    }
    report.checks.push_back(std::move(c));
  };
  add("ges_identity", &ChainDeviations::ges_identity);
  add("gcs_identity", &ChainDeviations::gcs_identity);
  add("ges_update", &ChainDeviations::ges_update);
  add("gcs_update", &ChainDeviations::gcs_update);
  add("ges_gcs_scores", &ChainDeviations::score_agreement);
  if (with_exhaustive) {
    double sum = 0.0;
    for (const auto& r : rows) sum += r.ratio;
    report.greedy_exhaustive_ratio = sum / static_cast<double>(rows.size());
    report.checks.push_back({"greedy_exhaustive_ratio", *report.greedy_exhaustive_ratio, opt.min_ratio, true, {}});
  }
  return report;
}

}  // namespace isac::harness
