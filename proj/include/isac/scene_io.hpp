#pragma once

// Scene <-> JSON. Complex entries are [re, im] pairs; matrices are arrays of
// rows. Doubles round-trip exactly through nlohmann's shortest representation.

#include <cstddef>
#include <vector>

#include "json.hpp"

#include "isac/errors.hpp"
#include "isac/linalg.hpp"
#include "isac/scene.hpp"

namespace isac {

using json = nlohmann::json;

inline json complex_to_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ModelError("scene json: complex entry must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline CMatrix matrix_from_json(const json& j) {
  if (!j.is_array()) throw ModelError("scene json: matrix must be an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = rows == 0 ? 0 : j[0].size();
  CMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (j[i].size() != cols) throw ModelError("scene json: ragged matrix");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = complex_from_json(j[i][k]);
  }
  return m;
}

inline json complex_list_to_json(const std::vector<cplx>& v) {
  json out = json::array();
  for (const auto& z : v) out.push_back(complex_to_json(z));
  return out;
}

inline std::vector<cplx> complex_list_from_json(const json& j) {
  std::vector<cplx> v;
  for (const auto& z : j) v.push_back(complex_from_json(z));
  return v;
}

inline json geometry_to_json(const GeometryConfig& g) {
  return {{"n_t", g.n_t},
          {"n_c", g.n_c},
          {"n_s", g.n_s},
          {"paths", g.paths},
          {"sector_lo", g.sector_lo},
          {"sector_hi", g.sector_hi},
          {"wavelength", g.wavelength},
          {"pathloss_exponent", g.pathloss_exponent},
          {"distance_min", g.distance_min},
          {"distance_max", g.distance_max},
          {"distances", g.distances},
          {"reflection_powers", g.reflection_powers}};
}

inline GeometryConfig geometry_from_json(const json& j) {
  GeometryConfig g;
  g.n_t = j.at("n_t").get<std::size_t>();
  g.n_c = j.at("n_c").get<std::size_t>();
  g.n_s = j.at("n_s").get<std::size_t>();
  g.paths = j.at("paths").get<std::size_t>();
  g.sector_lo = j.at("sector_lo").get<double>();
  g.sector_hi = j.at("sector_hi").get<double>();
  g.wavelength = j.at("wavelength").get<double>();
  g.pathloss_exponent = j.at("pathloss_exponent").get<double>();
  g.distance_min = j.at("distance_min").get<double>();
  g.distance_max = j.at("distance_max").get<double>();
  g.distances = j.at("distances").get<std::vector<double>>();
  g.reflection_powers = j.at("reflection_powers").get<std::vector<double>>();
  g.validate();
  return g;
}

inline json scene_to_json(const Scene& s) {
  json r_t = json::array();
  for (const auto& r : s.r_t) r_t.push_back(matrix_to_json(r));
  return {{"geometry", geometry_to_json(s.geometry)},
          {"params",
           {{"aod_comm", s.params.aod_comm},
            {"aoa_comm", s.params.aoa_comm},
            {"gain_comm", complex_list_to_json(s.params.gain_comm)},
            {"aod_sense", s.params.aod_sense},
            {"gain_sense", complex_list_to_json(s.params.gain_sense)},
            {"distances", s.params.distances}}},
          {"h_c", matrix_to_json(s.h_c)},
          {"h_s", matrix_to_json(s.h_s)},
          {"r_t", r_t},
          {"kappa", s.kappa}};
}

inline Scene scene_from_json(const json& j) {
  try {
    Scene s;
    s.geometry = geometry_from_json(j.at("geometry"));
    const json& p = j.at("params");
    s.params.aod_comm = p.at("aod_comm").get<std::vector<double>>();
    s.params.aoa_comm = p.at("aoa_comm").get<std::vector<double>>();
    s.params.gain_comm = complex_list_from_json(p.at("gain_comm"));
    s.params.aod_sense = p.at("aod_sense").get<std::vector<double>>();
    s.params.gain_sense = complex_list_from_json(p.at("gain_sense"));
    s.params.distances = p.at("distances").get<std::vector<double>>();
    s.h_c = matrix_from_json(j.at("h_c"));
    s.h_s = matrix_from_json(j.at("h_s"));
    for (const auto& r : j.at("r_t")) s.r_t.push_back(matrix_from_json(r));
    s.kappa = j.at("kappa").get<std::vector<double>>();
    return s;
  } catch (const json::exception& e) {
    throw ModelError(std::string("scene json: ") + e.what());
  }
}

}  // namespace isac
