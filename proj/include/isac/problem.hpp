#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "isac/errors.hpp"
#include "isac/linalg.hpp"
#include "isac/metrics.hpp"
#include "isac/scene.hpp"
#include "isac/selection_set.hpp"

namespace isac {

// What a subset selector sees: a channel whose columns are the candidate
// chains and the per-sensing-antenna covariances over those same candidates.
// Antenna-domain transmit selection, beamspace selection and (with the
// channel transposed) UE receive selection all reduce to this shape.
struct SelectionProblem {
  CMatrix channel;               // receive rows x candidate columns
  std::vector<CMatrix> sensing;  // candidate x candidate, one per active sensing antenna
  std::size_t sensing_norm = 1;  // N_s in omega_s / N_s

  std::size_t candidates() const { return channel.cols(); }

  void validate() const {
    for (const auto& r : sensing)
      if (r.rows() != channel.cols() || r.cols() != channel.cols())
        throw ModelError("SelectionProblem: covariance size does not match candidate count");
    if (sensing_norm == 0) throw ModelError("SelectionProblem: sensing normalization must be >= 1");
  }
};

// Keep only UE rows `rx_c` and sensing antennas `rx_s` of a full-receive problem.
inline SelectionProblem restrict_receive(const SelectionProblem& full, const SelectionSet& rx_c,
                                         const SelectionSet& rx_s) {
  if (rx_c.empty() || rx_s.empty()) throw ModelError("restrict_receive: empty receive set");
  if (rx_c.universe_size() != full.channel.rows() || rx_s.universe_size() != full.sensing.size())
    throw ModelError("restrict_receive: receive set universe mismatch");
  SelectionProblem prob;
  prob.channel = subselect_rows(full.channel, rx_c);
  for (std::size_t n : rx_s.positions()) prob.sensing.push_back(full.sensing[n]);
  prob.sensing_norm = full.sensing_norm;
  return prob;
}

// Antenna-domain transmit selection with every receive chain active.
inline SelectionProblem transmit_problem(const Scene& scene) {
  SelectionProblem prob;
  prob.channel = scene.h_c;
  prob.sensing = scene.r_t;
  prob.sensing_norm = scene.n_s();
  return prob;
}

inline SelectionProblem transmit_problem(const Scene& scene, const SelectionSet& rx_c, const SelectionSet& rx_s) {
  return restrict_receive(transmit_problem(scene), rx_c, rx_s);
}

// Objective of the candidate subset given by 0-based positions (any order).
inline MIReport evaluate(const SelectionProblem& prob, const LinkParams& p, std::span<const std::size_t> positions) {
  std::vector<std::size_t> rows(prob.channel.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  const CMatrix h = submatrix(prob.channel, rows, positions);
  std::vector<CMatrix> r;
  r.reserve(prob.sensing.size());
  for (const auto& full : prob.sensing) r.push_back(principal_submatrix(full, positions));
  return make_report(comm_mi(h, p), sensing_mi(r, p), p, prob.sensing_norm);
}

inline MIReport evaluate(const SelectionProblem& prob, const LinkParams& p, const SelectionSet& sel) {
  if (sel.universe_size() != prob.candidates()) throw ModelError("evaluate: selection universe mismatch");
  const auto pos = sel.positions();
  return evaluate(prob, p, pos);
}

}  // namespace isac
