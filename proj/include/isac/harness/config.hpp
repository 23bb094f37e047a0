#pragma once

// Experiment configuration: one flat JSON object. Every key is optional and
// falls back to the defaults below; unknown keys are rejected so that typos
// do not silently run a different experiment.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "isac/errors.hpp"
#include "isac/metrics.hpp"
#include "isac/scene.hpp"
#include "isac/tx_select.hpp"
#include "json.hpp"

namespace isac::harness {

using json = nlohmann::json;

enum class SweepKind { snr, k, ee, pareto };
enum class Method { ges, gcs, dbs, exhaustive, random, fixed, full };
enum class Architecture { antenna, beamspace };

inline const char* to_string(SweepKind s) {
  switch (s) {
    case SweepKind::snr: return "snr";
    case SweepKind::k: return "k";
    case SweepKind::ee: return "ee";
    case SweepKind::pareto: return "pareto";
  }
  return "?";
}

inline const char* to_string(Method m) {
  switch (m) {
    case Method::ges: return "ges";
    case Method::gcs: return "gcs";
    case Method::dbs: return "dbs";
    case Method::exhaustive: return "exhaustive";
    case Method::random: return "random";
    case Method::fixed: return "fixed";
    case Method::full: return "full";
  }
  return "?";
}

inline const char* to_string(Architecture a) { return a == Architecture::antenna ? "antenna" : "beamspace"; }

inline SweepKind parse_sweep_kind(const std::string& s) {
  if (s == "snr") return SweepKind::snr;
  if (s == "k") return SweepKind::k;
  if (s == "ee") return SweepKind::ee;
  if (s == "pareto") return SweepKind::pareto;
  throw ConfigError("unknown sweep kind '" + s + "' (expected snr, k, ee or pareto)");
}

inline Method parse_method(const std::string& s) {
  for (Method m : {Method::ges, Method::gcs, Method::dbs, Method::exhaustive, Method::random, Method::fixed,
                   Method::full})
    if (s == to_string(m)) return m;
  throw ConfigError("unknown method '" + s + "'");
}

inline Architecture parse_architecture(const std::string& s) {
  if (s == "antenna") return Architecture::antenna;
  if (s == "beamspace") return Architecture::beamspace;
  throw ConfigError("unknown architecture '" + s + "' (expected antenna or beamspace)");
}

struct ExperimentConfig {
  GeometryConfig geometry;
  double slots = 64.0;
  double snr_db = 30.0;  // used when the sweep is not over SNR
  double omega_c = 0.5;  // used when the sweep is not over the weight
  PowerModel power;

  SweepKind sweep = SweepKind::snr;
  std::vector<double> values{0.0, 10.0, 20.0, 30.0};
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  std::vector<Method> methods{Method::ges, Method::gcs, Method::dbs, Method::random, Method::fixed, Method::full};

  Architecture architecture = Architecture::beamspace;
  std::size_t beams = 16;  // M, beamspace only
  std::size_t k = 8;
  std::size_t k_c = 8;
  std::size_t k_s = 8;
  std::uint64_t exhaustive_cap = kDefaultExhaustiveCap;

  // Transmit candidates: beams or antennas.
  std::size_t candidates() const { return architecture == Architecture::beamspace ? beams : geometry.n_t; }

  bool has(Method m) const { return std::find(methods.begin(), methods.end(), m) != methods.end(); }

  LinkParams link_at(double snr, double weight) const { return LinkParams::from_snr_db(snr, weight, slots); }

  // Transmit cardinality used at sweep point `value`.
  std::size_t k_at(double value) const {
    return sweep == SweepKind::k || sweep == SweepKind::ee ? static_cast<std::size_t>(value) : k;
  }

  // Receive cardinalities; the weight sweep runs without receive selection.
  std::size_t k_c_effective() const { return sweep == SweepKind::pareto ? geometry.n_c : k_c; }
  std::size_t k_s_effective() const { return sweep == SweepKind::pareto ? geometry.n_s : k_s; }

  LinkParams link_for_point(double value) const {
    switch (sweep) {
      case SweepKind::snr: return link_at(value, omega_c);
      case SweepKind::pareto: return link_at(snr_db, value);
      default: return link_at(snr_db, omega_c);
    }
  }

  void validate() const {
    try {
      geometry.validate();
      power.validate();
      link_at(snr_db, omega_c);
    } catch (const ModelError& e) {
      throw ConfigError(e.what());
    }
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (values.empty()) throw ConfigError("sweep values must be nonempty");
    if (methods.empty()) throw ConfigError("at least one method is required");
    if (architecture == Architecture::beamspace && (beams < 1 || beams > geometry.n_t))
      throw ConfigError("beams must lie in [1, n_t]");
    if (k_c < 1 || k_c > geometry.n_c) throw ConfigError("k_c must lie in [1, n_c]");
    if (k_s < 1 || k_s > geometry.n_s) throw ConfigError("k_s must lie in [1, n_s]");
    const std::size_t n = candidates();
    for (double v : values) {
      if (!std::isfinite(v)) throw ConfigError("sweep values must be finite");
      switch (sweep) {
        case SweepKind::snr:
          if (v < -100.0 || v > 100.0) throw ConfigError("SNR values must lie in [-100, 100] dB");
          break;
        case SweepKind::pareto:
          if (v < 0.0 || v > 1.0) throw ConfigError("weight values must lie in [0, 1]");
          break;
        case SweepKind::k:
        case SweepKind::ee:
          if (v != std::floor(v) || v < 1.0 || v > static_cast<double>(n))
            throw ConfigError("K values must be integers in [1, " + std::to_string(n) + "]");
          break;
      }
    }
    if (sweep != SweepKind::k && sweep != SweepKind::ee && (k < 1 || k > n))
      throw ConfigError("k must lie in [1, " + std::to_string(n) + "]");
    if (has(Method::dbs) && architecture != Architecture::beamspace)
      throw ConfigError("method dbs requires the beamspace architecture");
  }

  // Exhaustive search must fit under the cap at every sweep point; checked
  // before any trial runs.
  void check_capacity() const {
    if (!has(Method::exhaustive)) return;
    const auto over = [&](std::size_t n, std::size_t r, const char* what) {
      const std::uint64_t c = binomial(n, r);
      if (c > exhaustive_cap)
        throw CapacityError(std::string("exhaustive ") + what + ": C(" + std::to_string(n) + ", " + std::to_string(r) +
                            ") = " + std::to_string(c) + " exceeds the cap of " + std::to_string(exhaustive_cap));
    };
    for (double v : values) over(candidates(), k_at(v), "transmit search");
    over(geometry.n_c, k_c_effective(), "receive search");
  }
};

inline json config_to_json(const ExperimentConfig& c) {
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(to_string(m));
  return {{"n_t", c.geometry.n_t},
          {"n_c", c.geometry.n_c},
          {"n_s", c.geometry.n_s},
          {"paths", c.geometry.paths},
          {"sector_lo", c.geometry.sector_lo},
          {"sector_hi", c.geometry.sector_hi},
          {"wavelength", c.geometry.wavelength},
          {"pathloss_exponent", c.geometry.pathloss_exponent},
          {"distance_min", c.geometry.distance_min},
          {"distance_max", c.geometry.distance_max},
          {"distances", c.geometry.distances},
          {"reflection_powers", c.geometry.reflection_powers},
          {"slots", c.slots},
          {"snr_db", c.snr_db},
          {"omega_c", c.omega_c},
          {"p_lo", c.power.p_lo},
          {"p_rf", c.power.p_rf},
          {"sample_rate", c.power.sample_rate},
          {"dac_bits", c.power.dac_bits},
          {"adc_bits_comm", c.power.adc_bits_comm},
          {"adc_bits_sense", c.power.adc_bits_sense},
          {"dac_coefficient", c.power.dac_coefficient},
          {"adc_coefficient", c.power.adc_coefficient},
          {"sweep", to_string(c.sweep)},
          {"values", c.values},
          {"trials", c.trials},
          {"seed", c.seed},
          {"methods", methods},
          {"architecture", to_string(c.architecture)},
          {"beams", c.beams},
          {"k", c.k},
          {"k_c", c.k_c},
          {"k_s", c.k_s},
          {"exhaustive_cap", c.exhaustive_cap}};
}

namespace detail {

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  if constexpr (std::is_unsigned_v<T>)
    if (const json& v = j.at(key); !v.is_number_integer() || v.get<std::int64_t>() < 0) throw ConfigError(std::string("config key '") + key + "' must be a non-negative integer");
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace detail

inline ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const json known = config_to_json(ExperimentConfig{});
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");

  ExperimentConfig c;
  GeometryConfig& g = c.geometry;
  detail::read(j, "n_t", g.n_t);
  detail::read(j, "n_c", g.n_c);
  detail::read(j, "n_s", g.n_s);
  detail::read(j, "paths", g.paths);
  detail::read(j, "sector_lo", g.sector_lo);
  detail::read(j, "sector_hi", g.sector_hi);
  detail::read(j, "wavelength", g.wavelength);
  detail::read(j, "pathloss_exponent", g.pathloss_exponent);
  detail::read(j, "distance_min", g.distance_min);
  detail::read(j, "distance_max", g.distance_max);
  detail::read(j, "distances", g.distances);
  detail::read(j, "reflection_powers", g.reflection_powers);
  detail::read(j, "slots", c.slots);
  detail::read(j, "snr_db", c.snr_db);
  detail::read(j, "omega_c", c.omega_c);
  detail::read(j, "p_lo", c.power.p_lo);
  detail::read(j, "p_rf", c.power.p_rf);
  detail::read(j, "sample_rate", c.power.sample_rate);
  detail::read(j, "dac_bits", c.power.dac_bits);
  detail::read(j, "adc_bits_comm", c.power.adc_bits_comm);
  detail::read(j, "adc_bits_sense", c.power.adc_bits_sense);
  detail::read(j, "dac_coefficient", c.power.dac_coefficient);
  detail::read(j, "adc_coefficient", c.power.adc_coefficient);
  detail::read(j, "values", c.values);
  detail::read(j, "trials", c.trials);
  detail::read(j, "seed", c.seed);
  detail::read(j, "beams", c.beams);
  detail::read(j, "k", c.k);
  detail::read(j, "exhaustive_cap", c.exhaustive_cap);

  std::string text;
  if (j.contains("sweep")) {
    detail::read(j, "sweep", text);
    c.sweep = parse_sweep_kind(text);
  }
  if (j.contains("architecture")) {
    detail::read(j, "architecture", text);
    c.architecture = parse_architecture(text);
  }
  if (j.contains("methods")) {
    std::vector<std::string> names;
    detail::read(j, "methods", names);
    c.methods.clear();
    std::set<std::string> seen;
    for (const auto& n : names) {
      if (!seen.insert(n).second) throw ConfigError("duplicate method '" + n + "'");
      c.methods.push_back(parse_method(n));
    }
  }
  // Receive cardinalities default to no receive selection.
  c.k_c = g.n_c;
  c.k_s = g.n_s;
  detail::read(j, "k_c", c.k_c);
  detail::read(j, "k_s", c.k_s);
  if (!j.contains("beams")) c.beams = g.n_t;
  c.validate();
  return c;
}

inline json load_config_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    json j = json::parse(buf.str());
    if (!j.is_object()) throw ConfigError("config file '" + path + "' must hold a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

inline ExperimentConfig load_config(const std::string& path) { return config_from_json(load_config_json(path)); }

}  // namespace isac::harness
