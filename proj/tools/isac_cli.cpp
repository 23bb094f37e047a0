// Command-line driver for the Monte-Carlo experiments.
//
// Exit codes: 0 success, 1 other failure, 2 configuration or usage error,
// 3 oracle check failed, 4 exhaustive search exceeds the cap.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "isac/harness/config.hpp"
#include "isac/harness/experiment.hpp"
#include "isac/harness/oracle_check.hpp"
#include "isac/scene_io.hpp"

namespace fs = std::filesystem;
using namespace isac;
using namespace isac::harness;

namespace {

constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitOracle = 3;
constexpr int kExitCapacity = 4;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::string out = "out";
  std::size_t threads = default_threads();
  bool plot_data = false;
  bool timing = false;
};

void set_default(json& j, const char* key, json value) {
  if (!j.contains(key)) j[key] = std::move(value);
}

// Reads the config file (if any), pins the sweep kind for the verb and fills
// verb-specific defaults for keys the file leaves out.
ExperimentConfig resolve_config(const std::string& verb, const Common& c) {
  json j = c.config.empty() ? json::object() : load_config_json(c.config);
  if (c.seed) j["seed"] = *c.seed;
  if (c.trials) j["trials"] = *c.trials;

  if (verb == "oracle") {
    for (auto [k, v] : {std::pair{"n_t", 8}, {"n_c", 4}, {"n_s", 4}, {"paths", 4}, {"k", 4}, {"trials", 100}})
      set_default(j, k, v);
    set_default(j, "snr_db", 20.0);
    set_default(j, "methods", json::array({"gcs"}));
  } else if (verb == "pareto" || verb == "ee") {
    if (j.contains("sweep") && j["sweep"] != verb)
      throw ConfigError("verb '" + verb + "' cannot run a '" + j["sweep"].dump() + "' sweep");
    j["sweep"] = verb;
    if (verb == "pareto") {
      set_default(j, "values", json::array({0.0, 0.25, 0.5, 0.75, 1.0}));
    } else if (!j.contains("values")) {
      const std::size_t n = j.value("architecture", std::string("beamspace")) == "antenna"
                                ? j.value("n_t", std::size_t{16})
                                : j.value("beams", j.value("n_t", std::size_t{16}));
      json values = json::array();
      for (std::size_t k = 1; k <= n; ++k) values.push_back(k);
      j["values"] = values;
    }
  } else if (verb == "sweep" && j.contains("sweep") && j["sweep"] != "snr" && j["sweep"] != "k") {
    throw ConfigError("verb 'sweep' runs snr or k sweeps; use the '" + j["sweep"].get<std::string>() + "' verb");
  }
  return config_from_json(j);
}

fs::path prepare_out(const Common& c) {
  const fs::path dir(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + c.out + "': " + ec.message());
  return dir;
}

void write_manifest(const fs::path& dir, const std::string& verb, const ExperimentConfig& cfg,
                    std::vector<fs::path> outputs) {
  std::ofstream(dir / "manifest.json") << manifest_json(verb, cfg, outputs).dump(2) << '\n';
}

int run_experiment(const std::string& verb, const Common& c) {
  const ExperimentConfig cfg = resolve_config(verb, c);
  cfg.check_capacity();
  const fs::path dir = prepare_out(c);
  const RunOptions opt{c.threads, c.timing};
  const auto records = verb == "pareto" ? run_pareto(cfg, opt) : run_sweep(cfg, opt);

  const fs::path csv = dir / (verb + ".csv");
  {
    std::ofstream out(csv);
    if (!out) throw Error("cannot write " + csv.string());
    write_csv(out, records);
  }
  std::vector<fs::path> outputs{csv};
  if (c.plot_data)
    for (auto& f : write_plot_data(dir, verb, cfg, records)) outputs.push_back(std::move(f));
  write_manifest(dir, verb, cfg, outputs);
  std::cout << "wrote " << csv.string() << " (" << records.size() << " rows)\n";
  return 0;
}

int run_oracle(const Common& c, std::optional<std::size_t> perturb_trial) {
  const ExperimentConfig cfg = resolve_config("oracle", c);
  const fs::path dir = prepare_out(c);
  OracleOptions opt;
  opt.threads = c.threads;
  opt.perturb_trial = perturb_trial;
  const OracleReport report = oracle_check(cfg, opt);

  const fs::path path = dir / "oracle.json";
  std::ofstream(path) << report.to_json().dump(2) << '\n';
  write_manifest(dir, "oracle", cfg, {path});
  for (const auto& chk : report.checks) {
    std::cout << (chk.passed() ? "ok   " : "FAIL ") << chk.name << "  worst " << chk.worst << "  limit " << chk.limit;
    if (!chk.offending_trials.empty()) {
      const std::size_t t = chk.offending_trials.front();
      std::cout << "  first offender: trial " << t << " scene seed " << derive_seed(cfg.seed, {kSceneStream, t});
    }
    std::cout << '\n';
  }
  return report.passed() ? 0 : kExitOracle;
}

int run_scene_dump(const Common& c, std::size_t trial) {
  const ExperimentConfig cfg = resolve_config("scene-dump", c);
  const fs::path dir = prepare_out(c);
  const fs::path path = dir / ("scene_" + std::to_string(trial) + ".json");
  std::ofstream(path) << scene_to_json(trial_scene(cfg, trial)).dump(2) << '\n';
  write_manifest(dir, "scene-dump", cfg, {path});
  std::cout << "wrote " << path.string() << '\n';
  return 0;
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON experiment configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Override the configured base seed");
  cmd->add_option("--trials", c.trials, "Override the configured trial count");
  cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
  cmd->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_flag("--plot-data", c.plot_data, "Also write one .dat file per method");
  cmd->add_flag("--timing", c.timing, "Record mean wall time per trial in the ms column");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RF chain selection experiments"};
  app.require_subcommand(1);
  Common common;
  std::optional<std::size_t> perturb_trial;
  std::size_t dump_trial = 0;

  std::vector<std::pair<CLI::App*, std::string>> experiments;
  for (const char* verb : {"sweep", "pareto", "ee"}) {
    const std::string help = std::string(verb) == "sweep"    ? "SNR or K sweep"
                             : std::string(verb) == "pareto" ? "Weight sweep without receive selection"
                                                             : "Energy efficiency versus K";
    CLI::App* cmd = app.add_subcommand(verb, help);
    add_common(cmd, common);
    experiments.emplace_back(cmd, verb);
  }
  CLI::App* oracle = app.add_subcommand("oracle", "Cross-check greedy updates against recomputation");
  add_common(oracle, common);
  oracle->add_option("--perturb-trial", perturb_trial, "Corrupt the incremental state on this trial");
  CLI::App* dump = app.add_subcommand("scene-dump", "Write one trial's scene as JSON");
  add_common(dump, common);
  dump->add_option("--trial", dump_trial, "Trial index")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    for (const auto& [cmd, verb] : experiments)
      if (cmd->parsed()) return run_experiment(verb, common);
    if (oracle->parsed()) return run_oracle(common, perturb_trial);
    if (dump->parsed()) return run_scene_dump(common, dump_trial);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return kExitCapacity;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOther;
}
