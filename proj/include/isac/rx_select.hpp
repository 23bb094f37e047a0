#pragma once

// Receive-side selection. The UE and the sensing antennas affect only their
// own MI term, so the two receive problems are solved independently: UE rows
// by the same backward greedy as transmit selection (run on H^H so that rows
// become candidate columns), sensing antennas by ranking their additive
// log-det terms.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "isac/errors.hpp"
#include "isac/linalg.hpp"
#include "isac/metrics.hpp"
#include "isac/problem.hpp"
#include "isac/scene.hpp"
#include "isac/selection_set.hpp"
#include "isac/tx_select.hpp"

namespace isac {

enum class GreedyMethod { ges, gcs };

struct JointSelection {
  SelectionSet tx;
  SelectionSet rx_c;
  SelectionSet rx_s;
};

// Greedy removal over the rows of `h` (UE antennas x transmit candidates),
// maximizing I_c alone.
inline SelectionSet rx_comm_select(const CMatrix& h, const LinkParams& p, std::size_t k_c, GreedyMethod method,
                                   GreedyOptions opt = {}) {
  SelectionProblem prob;
  prob.channel = h.adjoint();
  const LinkParams comm_only = p.with_omega_c(1.0);
  return method == GreedyMethod::ges ? ges_select(prob, comm_only, k_c, opt) : gcs_select(prob, comm_only, k_c, opt);
}

inline SelectionSet rx_comm_select(const Scene& scene, const LinkParams& p, std::size_t k_c, GreedyMethod method) {
  return rx_comm_select(scene.h_c, p, k_c, method);
}

// Best k_c receive rows for I_c by enumeration.
inline SelectionSet rx_comm_exhaustive(const CMatrix& h, const LinkParams& p, std::size_t k_c,
                                       std::uint64_t cap = kDefaultExhaustiveCap) {
  SelectionProblem prob;
  prob.channel = h.adjoint();
  return exhaustive_select(prob, p.with_omega_c(1.0), k_c, cap);
}

// Per-antenna sensing term log2|I + gamma T R_n|.
inline std::vector<double> sensing_antenna_scores(std::span<const CMatrix> covariances, const LinkParams& p) {
  std::vector<double> s;
  s.reserve(covariances.size());
  for (const auto& r : covariances) s.push_back(logdet_psd(identity_plus(r, p.gamma * p.slots)));
  return s;
}

// Keep the k_s antennas with the largest terms; ties go to the smaller index.
inline SelectionSet rx_sense_select(std::span<const CMatrix> covariances, const LinkParams& p, std::size_t k_s) {
  const std::size_t ns = covariances.size();
  if (k_s < 1 || k_s > ns) throw ModelError("rx_sense_select: k_s must lie in [1, N_s]");
  const auto score = sensing_antenna_scores(covariances, p);
  std::vector<std::size_t> order(ns);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  order.resize(k_s);
  return SelectionSet::from_positions(std::move(order), ns);
}

inline SelectionSet rx_sense_select(const Scene& scene, const LinkParams& p, std::size_t k_s) {
  return rx_sense_select(scene.r_t, p, k_s);
}

// Receive chains first (independently), then transmit selection on the
// receive-restricted problem.
inline JointSelection joint_pipeline(const SelectionProblem& full, const LinkParams& p, std::size_t k,
                                     std::size_t k_c, std::size_t k_s, GreedyMethod method) {
  JointSelection out;
  out.rx_c = rx_comm_select(full.channel, p, k_c, method);
  out.rx_s = rx_sense_select(full.sensing, p, k_s);
  const SelectionProblem restricted = restrict_receive(full, out.rx_c, out.rx_s);
  out.tx = method == GreedyMethod::ges ? ges_select(restricted, p, k) : gcs_select(restricted, p, k);
  return out;
}

inline JointSelection joint_pipeline(const Scene& scene, const LinkParams& p, std::size_t k, std::size_t k_c,
                                     std::size_t k_s, GreedyMethod method) {
  return joint_pipeline(transmit_problem(scene), p, k, k_c, k_s, method);
}

}  // namespace isac
