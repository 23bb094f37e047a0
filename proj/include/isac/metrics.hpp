#pragma once

// Mutual-information metrics, the weighted normalized objective, and the
// parametric circuit-power / energy-efficiency model.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "isac/errors.hpp"
#include "isac/linalg.hpp"
#include "isac/scene.hpp"
#include "isac/selection_set.hpp"

namespace isac {

struct LinkParams {
  double slots = 64.0;  // T
  double gamma = 1.0;   // P / sigma^2, linear
  double omega_c = 0.5;
  double omega_s = 0.5;

  static LinkParams from_snr_db(double snr_db, double omega_c = 0.5, double slots = 64.0) {
    LinkParams p{slots, std::pow(10.0, snr_db / 10.0), omega_c, 1.0 - omega_c};
    p.validate();
    return p;
  }

  LinkParams with_omega_c(double w) const {
    LinkParams p = *this;
    p.omega_c = w;
    p.omega_s = 1.0 - w;
    p.validate();
    return p;
  }

  void validate() const {
    if (!(slots >= 1.0)) throw ModelError("LinkParams: T must be >= 1");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ModelError("LinkParams: gamma must be positive");
    if (!(omega_c >= 0.0 && omega_c <= 1.0 && omega_s >= 0.0 && omega_s <= 1.0))
      throw ModelError("LinkParams: weights must lie in [0, 1]");
    if (std::abs(omega_c + omega_s - 1.0) > 1e-12) throw ModelError("LinkParams: weights must sum to 1");
  }
};

struct MIReport {
  double comm_mi = 0.0;     // I_c, bits
  double sensing_mi = 0.0;  // I_s, bits
  double objective = 0.0;   // (omega_c / T) I_c + (omega_s / N_s) I_s
  double comm_normalized = 0.0;     // I_c / T
  double sensing_normalized = 0.0;  // I_s / N_s
};

inline MIReport make_report(double comm_mi, double sensing_mi, const LinkParams& p, std::size_t n_s) {
  MIReport r;
  r.comm_mi = comm_mi;
  r.sensing_mi = sensing_mi;
  r.comm_normalized = comm_mi / p.slots;
  r.sensing_normalized = n_s == 0 ? 0.0 : sensing_mi / static_cast<double>(n_s);
  r.objective = p.omega_c * r.comm_normalized + p.omega_s * r.sensing_normalized;
  return r;
}

// T log2|I + gamma H H^H|, evaluated on whichever Gram matrix is smaller.
inline double comm_mi(const CMatrix& h, const LinkParams& p) {
  if (!all_finite(h)) throw ModelError("comm_mi: non-finite channel entry");
  if (h.rows() == 0 || h.cols() == 0) return 0.0;
  const CMatrix gram = h.rows() <= h.cols() ? gram_rows(h) : gram_cols(h);
  return std::max(0.0, p.slots * logdet_psd(identity_plus(gram, p.gamma)));
}

// sum_n log2|I + gamma T R_n|.
inline double sensing_mi(std::span<const CMatrix> covariances, const LinkParams& p) {
  double total = 0.0;
  for (const auto& r : covariances) {
    if (r.rows() == 0) continue;
    total += std::max(0.0, logdet_psd(identity_plus(r, p.gamma * p.slots)));
  }
  return total;
}

// Objective with transmit columns `tx`, UE rows `rx_c`, and sensing antennas
// `rx_s` (the sensing sum runs over rx_s only).
inline MIReport weighted_objective(const Scene& scene, const SelectionSet& tx, const SelectionSet& rx_c,
                                   const SelectionSet& rx_s, const LinkParams& p) {
  if (tx.empty() || rx_c.empty() || rx_s.empty()) throw ModelError("weighted_objective: empty selection set");
  const CMatrix h = subselect_columns(subselect_rows(scene.h_c, rx_c), tx);
  std::vector<CMatrix> r;
  for (std::size_t n : rx_s.positions()) r.push_back(subselect_principal(scene.r_t[n], tx));
  return make_report(comm_mi(h, p), sensing_mi(r, p), p, scene.n_s());
}

inline MIReport weighted_objective(const Scene& scene, const SelectionSet& tx, const LinkParams& p) {
  return weighted_objective(scene, tx, SelectionSet::full(scene.n_c()), SelectionSet::full(scene.n_s()), p);
}

// ---------------------------------------------------------------------------
// Circuit power and energy efficiency

// Converter power c * f_s * 2^bits (W).
inline double converter_power(double coefficient, int bits, double sample_rate) {
  return coefficient * sample_rate * std::ldexp(1.0, bits);
}

struct PowerModel {
  double p_lo = 22.5e-3;  // W
  double p_rf = 31.6e-3;  // W
  double sample_rate = 100e6;  // Hz
  int dac_bits = 12;
  int adc_bits_comm = 12;
  int adc_bits_sense = 12;
  double dac_coefficient = 1e-12;  // W / Hz
  double adc_coefficient = 1e-12;

  double dac_power() const { return converter_power(dac_coefficient, dac_bits, sample_rate); }
  double adc_power_comm() const { return converter_power(adc_coefficient, adc_bits_comm, sample_rate); }
  double adc_power_sense() const { return converter_power(adc_coefficient, adc_bits_sense, sample_rate); }

  void validate() const {
    if (!(p_lo > 0.0 && p_rf > 0.0 && sample_rate > 0.0 && dac_coefficient > 0.0 && adc_coefficient > 0.0))
      throw ModelError("PowerModel: powers, rates and coefficients must be positive");
    if (dac_bits < 1 || adc_bits_comm < 1 || adc_bits_sense < 1)
      throw ModelError("PowerModel: converter resolutions must be >= 1 bit");
  }
};

inline double circuit_power(const PowerModel& pm, std::size_t n_tx, std::size_t n_rx_c, std::size_t n_rx_s) {
  const double bs = pm.p_lo + static_cast<double>(n_tx) * (pm.dac_power() + pm.p_rf);
  const double ue = pm.p_lo + static_cast<double>(n_rx_c) * (pm.adc_power_comm() + pm.p_rf);
  const double sense = pm.p_lo + static_cast<double>(n_rx_s) * (pm.adc_power_sense() + pm.p_rf);
  return bs + ue + sense;
}

inline double circuit_power(const PowerModel& pm, const SelectionSet& tx, const SelectionSet& rx_c,
                            const SelectionSet& rx_s) {
  return circuit_power(pm, tx.size(), rx_c.size(), rx_s.size());
}

// Normalized energy efficiency: objective per watt of circuit power.
inline double energy_efficiency(const MIReport& report, double circuit_watts) {
  if (!(circuit_watts > 0.0)) throw ModelError("energy_efficiency: circuit power must be positive");
  return report.objective / circuit_watts;
}

}  // namespace isac
