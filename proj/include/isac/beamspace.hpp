#pragma once

// Hybrid architecture with a fixed DFT analog front end: each RF chain drives
// one beam, so selection runs over beams. The effective channel is H_c U and
// the effective sensing covariances are U^H R_n U; GES and GCS apply to these
// unchanged, and Diagonal Beam Selection scores beams from the diagonals only.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <vector>

#include "isac/errors.hpp"
#include "isac/linalg.hpp"
#include "isac/metrics.hpp"
#include "isac/problem.hpp"
#include "isac/scene.hpp"
#include "isac/selection_set.hpp"

namespace isac {

struct BeamCodebook {
  CMatrix u;  // n_t x m, column per beam

  std::size_t beams() const { return u.cols(); }
  std::size_t antennas() const { return u.rows(); }
};

// u_m[k] = sqrt(1/N_t) exp(-j 2 pi k (m-1) / M).
inline BeamCodebook build_codebook(std::size_t n_t, std::size_t m) {
  if (m < 1 || m > n_t) throw ModelError("build_codebook: beam count must lie in [1, N_t]");
  BeamCodebook cb{CMatrix(n_t, m)};
  const double amp = std::sqrt(1.0 / static_cast<double>(n_t));
  for (std::size_t beam = 0; beam < m; ++beam)
    for (std::size_t k = 0; k < n_t; ++k)
      cb.u(k, beam) = std::polar(amp, -2.0 * std::numbers::pi * static_cast<double>(k * beam) / static_cast<double>(m));
  return cb;
}

struct BeamspaceScene {
  CMatrix h_c;                           // H_c U, n_c x M
  std::vector<CMatrix> r_t;              // U^H R_n U, each M x M
  std::vector<double> d_diag;            // 1 + gamma ||[H_c U]_{:,j}||^2
  std::vector<std::vector<double>> e_diag;  // [n][j] = 1 + gamma T [U^H R_n U]_{jj}
  std::size_t n_s = 0;

  std::size_t beams() const { return h_c.cols(); }
};

inline BeamspaceScene to_beamspace(const Scene& scene, const BeamCodebook& cb, const LinkParams& p) {
  if (cb.antennas() != scene.n_t()) throw ModelError("to_beamspace: codebook antenna count differs from N_t");
  BeamspaceScene bs;
  bs.h_c = scene.h_c * cb.u;
  const CMatrix uh = cb.u.adjoint();
  for (const auto& r : scene.r_t) {
    CMatrix eff = uh * r * cb.u;
    symmetrize(eff);
    bs.r_t.push_back(std::move(eff));
  }
  bs.n_s = scene.n_s();
  const std::size_t m = cb.beams();
  bs.d_diag.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    double energy = 0.0;
    for (std::size_t i = 0; i < bs.h_c.rows(); ++i) energy += std::norm(bs.h_c(i, j));
    bs.d_diag[j] = 1.0 + p.gamma * energy;
  }
  bs.e_diag.assign(bs.r_t.size(), std::vector<double>(m));
  for (std::size_t n = 0; n < bs.r_t.size(); ++n)
    for (std::size_t j = 0; j < m; ++j) bs.e_diag[n][j] = 1.0 + p.gamma * p.slots * bs.r_t[n](j, j).real();
  return bs;
}

// Beam-domain selection problem (all receive chains active).
inline SelectionProblem beamspace_problem(const BeamspaceScene& bs) {
  SelectionProblem prob;
  prob.channel = bs.h_c;
  prob.sensing = bs.r_t;
  prob.sensing_norm = bs.n_s;
  return prob;
}

// Per-beam score w_c log2 d_j + (w_s / N_s) sum_n log2 e_{n,j}, taken from the
// diagonals of I + gamma H^H H and I + gamma T R_n of `prob`.
inline std::vector<double> dbs_scores(const SelectionProblem& prob, const LinkParams& p) {
  const std::size_t m = prob.candidates();
  std::vector<double> score(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    if (p.omega_c > 0.0) {
      double energy = 0.0;
      for (std::size_t i = 0; i < prob.channel.rows(); ++i) energy += std::norm(prob.channel(i, j));
      score[j] += p.omega_c * std::log2(1.0 + p.gamma * energy);
    }
    if (p.omega_s > 0.0) {
      double sense = 0.0;
      for (const auto& r : prob.sensing) sense += std::log2(1.0 + p.gamma * p.slots * std::max(0.0, r(j, j).real()));
      score[j] += p.omega_s / static_cast<double>(prob.sensing_norm) * sense;
    }
  }
  return score;
}

// Single pass: drop the M - k lowest-scoring beams. Among equal scores the
// smaller index is dropped first, the same convention as the greedy removals.
inline SelectionSet dbs_select(const SelectionProblem& prob, const LinkParams& p, std::size_t k) {
  const std::size_t m = prob.candidates();
  if (k < 1 || k > m) throw ModelError("dbs_select: k must lie in [1, M]");
  const auto score = dbs_scores(prob, p);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
  std::vector<std::size_t> kept(order.begin() + static_cast<std::ptrdiff_t>(m - k), order.end());
  return SelectionSet::from_positions(std::move(kept), m);
}

inline SelectionSet dbs_select(const BeamspaceScene& bs, const LinkParams& p, std::size_t k) {
  return dbs_select(beamspace_problem(bs), p, k);
}

}  // namespace isac
