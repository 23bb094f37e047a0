#pragma once

// Random channel realizations for a bistatic MIMO ISAC link: the multipath
// communication channel, the target response matrix seen by widely separated
// sensing antennas, and the per-antenna sensing covariances used by the
// sensing mutual information.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

#include "isac/errors.hpp"
#include "isac/linalg.hpp"
#include "isac/rng.hpp"
#include "isac/selection_set.hpp"

namespace isac {

struct GeometryConfig {
  std::size_t n_t = 16;    // transmit antennas
  std::size_t n_c = 8;     // UE receive antennas
  std::size_t n_s = 8;     // sensing antennas (= number of targets)
  std::size_t paths = 8;   // communication paths L
  double sector_lo = -std::numbers::pi / 3;
  double sector_hi = std::numbers::pi / 3;
  double wavelength = 0.1;         // m
  double pathloss_exponent = 2.0;  // rho
  double distance_min = 50.0;      // m, used when `distances` is empty
  double distance_max = 200.0;
  // Optional fixed antenna-target distances, row-major n_s x n_s with entry
  // [i * n_s + n] = distance from target n to sensing antenna i.
  std::vector<double> distances;
  // Per-target reflection power (sigma_n^s)^2; empty means all ones.
  std::vector<double> reflection_powers;

  double reflection_power(std::size_t target) const {
    return reflection_powers.empty() ? 1.0 : reflection_powers[target];
  }

  void validate() const {
    if (n_t < 1 || n_c < 1 || n_s < 1 || paths < 1) throw ModelError("GeometryConfig: counts must be >= 1");
    constexpr double half_pi = std::numbers::pi / 2;
    if (!(sector_lo > -half_pi && sector_hi < half_pi && sector_lo <= sector_hi))
      throw ModelError("GeometryConfig: angular sector must lie inside (-pi/2, pi/2)");
    if (!(wavelength > 0.0)) throw ModelError("GeometryConfig: wavelength must be positive");
    if (!(pathloss_exponent >= 0.0)) throw ModelError("GeometryConfig: path-loss exponent must be >= 0");
    if (distances.empty()) {
      if (!(distance_min > 0.0 && distance_max >= distance_min))
        throw ModelError("GeometryConfig: distance range must be positive and ordered");
    } else {
      if (distances.size() != n_s * n_s) throw ModelError("GeometryConfig: distances must be n_s x n_s");
      for (double d : distances)
        if (!(d > 0.0)) throw ModelError("GeometryConfig: distances must be positive");
    }
    if (!reflection_powers.empty()) {
      if (reflection_powers.size() != n_s) throw ModelError("GeometryConfig: one reflection power per target");
      for (double s : reflection_powers)
        if (!(s > 0.0)) throw ModelError("GeometryConfig: reflection powers must be positive");
    }
  }
};

// The random draws behind one scene. Kept separate from the assembled
// matrices so tests can pin any of them.
struct SceneParameters {
  std::vector<double> aod_comm;  // theta_l^c
  std::vector<double> aoa_comm;  // phi_l^c
  std::vector<cplx> gain_comm;   // a_{c,l} ~ CN(0,1)
  std::vector<double> aod_sense; // theta_n^s
  std::vector<cplx> gain_sense;  // a_{s,n} ~ CN(0, sigma_n^2)
  std::vector<double> distances; // n_s x n_s, [i * n_s + n]
};

struct Scene {
  GeometryConfig geometry;
  SceneParameters params;
  CMatrix h_c;               // n_c x n_t
  CMatrix h_s;               // n_s x n_t
  std::vector<CMatrix> r_t;  // n_s covariances, each n_t x n_t
  std::vector<double> kappa; // n_s x n_s, [n * n_s + i] = kappa_{ni}

  std::size_t n_t() const { return h_c.cols(); }
  std::size_t n_c() const { return h_c.rows(); }
  std::size_t n_s() const { return r_t.size(); }
};

// ULA response with half-wavelength spacing: entry k = exp(-j pi k sin(theta)).
inline CVector steering_tx(double theta, std::size_t n) {
  CVector v(n);
  const double phase = -std::numbers::pi * std::sin(theta);
  for (std::size_t k = 0; k < n; ++k) v[k] = std::polar(1.0, phase * static_cast<double>(k));
  return v;
}

inline CVector steering_rx(double phi, std::size_t n) { return steering_tx(phi, n); }

inline SceneParameters draw_scene_parameters(const GeometryConfig& cfg, Rng& rng) {
  cfg.validate();
  std::uniform_real_distribution<double> angle(cfg.sector_lo, cfg.sector_hi);
  SceneParameters p;
  for (std::size_t l = 0; l < cfg.paths; ++l) {
    p.aod_comm.push_back(angle(rng));
    p.aoa_comm.push_back(angle(rng));
    p.gain_comm.push_back(complex_gaussian(rng, 1.0));
  }
  for (std::size_t n = 0; n < cfg.n_s; ++n) {
    p.aod_sense.push_back(angle(rng));
    p.gain_sense.push_back(complex_gaussian(rng, cfg.reflection_power(n)));
  }
  if (cfg.distances.empty()) {
    std::uniform_real_distribution<double> dist(cfg.distance_min, cfg.distance_max);
    p.distances.resize(cfg.n_s * cfg.n_s);
    for (double& d : p.distances) d = dist(rng);
  } else {
    p.distances = cfg.distances;
  }
  return p;
}

inline Scene assemble_scene(const GeometryConfig& cfg, SceneParameters params) {
  cfg.validate();
  const std::size_t nt = cfg.n_t, nc = cfg.n_c, ns = cfg.n_s;
  if (params.aod_comm.size() != cfg.paths || params.aoa_comm.size() != cfg.paths ||
      params.gain_comm.size() != cfg.paths || params.aod_sense.size() != ns ||
      params.gain_sense.size() != ns || params.distances.size() != ns * ns)
    throw ModelError("assemble_scene: parameter sizes do not match the geometry");

  Scene s;
  s.geometry = cfg;

  s.h_c = CMatrix(nc, nt);
  for (std::size_t l = 0; l < cfg.paths; ++l) {
    const CVector r = steering_rx(params.aoa_comm[l], nc);
    const CVector t = steering_tx(params.aod_comm[l], nt);
    for (std::size_t i = 0; i < nc; ++i)
      for (std::size_t k = 0; k < nt; ++k) s.h_c(i, k) += params.gain_comm[l] * r[i] * std::conj(t[k]);
  }

  // Row gain of target n at sensing antenna i: d^{-rho/2} exp(-j 2 pi d / lambda).
  auto distance = [&](std::size_t antenna, std::size_t target) { return params.distances[antenna * ns + target]; };
  auto row_gain = [&](std::size_t antenna, std::size_t target) {
    const double d = distance(antenna, target);
    return std::polar(std::pow(d, -cfg.pathloss_exponent / 2.0), -2.0 * std::numbers::pi * d / cfg.wavelength);
  };

  std::vector<CVector> t_sense;
  for (std::size_t n = 0; n < ns; ++n) t_sense.push_back(steering_tx(params.aod_sense[n], nt));

  s.h_s = CMatrix(ns, nt);
  for (std::size_t n = 0; n < ns; ++n)
    for (std::size_t i = 0; i < ns; ++i)
      for (std::size_t k = 0; k < nt; ++k)
        s.h_s(i, k) += params.gain_sense[n] * row_gain(i, n) * std::conj(t_sense[n][k]);

  // kappa_{ni}: reflection power of target i times path loss to antenna n.
  s.kappa.assign(ns * ns, 0.0);
  for (std::size_t n = 0; n < ns; ++n)
    for (std::size_t i = 0; i < ns; ++i) s.kappa[n * ns + i] = cfg.reflection_power(i) * std::norm(row_gain(n, i));

  s.r_t.assign(ns, CMatrix(nt, nt));
  for (std::size_t n = 0; n < ns; ++n) {
    for (std::size_t i = 0; i < ns; ++i) {
      const double k = s.kappa[n * ns + i];
      for (std::size_t a = 0; a < nt; ++a)
        for (std::size_t b = 0; b < nt; ++b) s.r_t[n](a, b) += k * t_sense[i][a] * std::conj(t_sense[i][b]);
    }
    symmetrize(s.r_t[n]);
  }

  s.params = std::move(params);
  return s;
}

inline Scene generate_scene(const GeometryConfig& cfg, Rng& rng) {
  return assemble_scene(cfg, draw_scene_parameters(cfg, rng));
}

// m * S(sel): the selected columns, in set order.
inline CMatrix subselect_columns(const CMatrix& m, const SelectionSet& sel) {
  if (sel.universe_size() != m.cols())
    throw ModelError("subselect_columns: selection universe does not match column count");
  CMatrix out(m.rows(), sel.size());
  const auto pos = sel.positions();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < pos.size(); ++j) out(i, j) = m(i, pos[j]);
  return out;
}

// S^T(sel) * m: the selected rows, in set order.
inline CMatrix subselect_rows(const CMatrix& m, const SelectionSet& sel) {
  if (sel.universe_size() != m.rows())
    throw ModelError("subselect_rows: selection universe does not match row count");
  const auto pos = sel.positions();
  CMatrix out(pos.size(), m.cols());
  for (std::size_t i = 0; i < pos.size(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(pos[i], j);
  return out;
}

// S^H(sel) * m * S(sel).
inline CMatrix subselect_principal(const CMatrix& m, const SelectionSet& sel) {
  if (!m.is_square() || sel.universe_size() != m.rows())
    throw ModelError("subselect_principal: selection universe does not match matrix size");
  const auto pos = sel.positions();
  return principal_submatrix(m, pos);
}

}  // namespace isac
