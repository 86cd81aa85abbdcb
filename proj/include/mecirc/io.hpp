#ifndef MECIRC_IO_HPP
#define MECIRC_IO_HPP

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "band_data.hpp"
#include "block_circulant.hpp"

namespace mecirc {

using json = nlohmann::json;

// Problem: {"m": 2, "n": 1, "N": 8, "blocks": [ [[..],[..]], [[..],[..]] ]}
// Blocks are given row by row; scalar problems may use plain numbers.
struct ProblemFile {
  Index N = 0;
  BandData band;
};

// Solution: {"m": .., "N": .., "first_block_row": [...], "diagnostics": {...}}
struct SolutionDiagnostics {
  std::string method;
  std::string status;
  Index iterations = 0;
  double grad_norm = std::numeric_limits<double>::quiet_NaN();
  double jbar = std::numeric_limits<double>::quiet_NaN();
  double band_residual = std::numeric_limits<double>::quiet_NaN();
  double dempster_residual = std::numeric_limits<double>::quiet_NaN();
  double entropy = std::numeric_limits<double>::quiet_NaN();
  std::optional<bool> positive_definite;
};

struct SolutionFile {
  BlockCirculant sigma;
  SolutionDiagnostics diagnostics;
};

namespace detail {

inline json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline double number_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!j.at(key).is_number()) throw Error(Errc::BadInput, std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

inline Index index_from(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    throw Error(Errc::BadInput, std::string("field '") + key + "' must be an integer");
  }
  return j.at(key).get<Index>();
}

inline json matrix_to_json(const Matrix& a) {
  json rows = json::array();
  for (Index i = 0; i < a.rows(); ++i) {
    json r = json::array();
    for (Index j = 0; j < a.cols(); ++j) r.push_back(a(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j, Index m) {
  if (m == 1 && j.is_number()) return Matrix::Constant(1, 1, j.get<double>());
  if (!j.is_array() || static_cast<Index>(j.size()) != m) throw Error(Errc::BadInput, "block must be an m x m array");
  Matrix a(m, m);
  for (Index i = 0; i < m; ++i) {
    const json& r = j[static_cast<std::size_t>(i)];
    if (!r.is_array() || static_cast<Index>(r.size()) != m) throw Error(Errc::BadInput, "block must be an m x m array");
    for (Index k = 0; k < m; ++k) {
      const json& x = r[static_cast<std::size_t>(k)];
      if (!x.is_number()) throw Error(Errc::BadInput, "block entries must be numbers");
      a(i, k) = x.get<double>();
    }
  }
  return a;
}

inline std::vector<Matrix> blocks_from_json(const json& j, const char* key, Index m, Index count) {
  if (!j.contains(key) || !j.at(key).is_array()) throw Error(Errc::BadInput, std::string("field '") + key + "' must be an array");
  const json& arr = j.at(key);
  if (static_cast<Index>(arr.size()) != count) throw Error(Errc::BadInput, std::string("field '") + key + "' has the wrong length");
  std::vector<Matrix> out;
  for (const auto& b : arr) out.push_back(matrix_from_json(b, m));
  return out;
}

inline json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::BadInput, std::string("malformed JSON: ") + e.what());
  }
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::BadInput, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

inline json to_json(const ProblemFile& p) {
  json j;
  j["m"] = p.band.m();
  j["n"] = p.band.n();
  j["N"] = p.N;
  j["blocks"] = json::array();
  for (const auto& b : p.band.blocks()) j["blocks"].push_back(detail::matrix_to_json(b));
  return j;
}

inline ProblemFile problem_from_json(const json& j) {
  if (!j.is_object()) throw Error(Errc::BadInput, "problem must be a JSON object");
  const Index m = detail::index_from(j, "m"), n = detail::index_from(j, "n"), N = detail::index_from(j, "N");
  if (m < 1 || n < 0) throw Error(Errc::BadInput, "need m >= 1 and n >= 0");
  if (N < 2 * n + 2) throw Error(Errc::BandTooWide, "need N >= 2n + 2");
  return ProblemFile{N, BandData(detail::blocks_from_json(j, "blocks", m, n + 1))};
}

inline json to_json(const SolutionDiagnostics& d) {
  json j;
  j["method"] = d.method;
  j["status"] = d.status;
  j["iterations"] = d.iterations;
  j["grad_norm"] = detail::number_or_null(d.grad_norm);
  j["jbar"] = detail::number_or_null(d.jbar);
  j["band_residual"] = detail::number_or_null(d.band_residual);
  j["dempster_residual"] = detail::number_or_null(d.dempster_residual);
  j["entropy"] = detail::number_or_null(d.entropy);
  if (d.positive_definite) j["positive_definite"] = *d.positive_definite;
  return j;
}

inline json to_json(const SolutionFile& s) {
  json j;
  j["m"] = s.sigma.m();
  j["N"] = s.sigma.N();
  j["first_block_row"] = json::array();
  for (const auto& b : s.sigma.first_row()) j["first_block_row"].push_back(detail::matrix_to_json(b));
  j["diagnostics"] = to_json(s.diagnostics);
  return j;
}

inline SolutionFile solution_from_json(const json& j) {
  if (!j.is_object()) throw Error(Errc::BadInput, "solution must be a JSON object");
  const Index m = detail::index_from(j, "m"), N = detail::index_from(j, "N");
  if (m < 1 || N < 2) throw Error(Errc::BadInput, "need m >= 1 and N >= 2");
  SolutionFile s;
  s.sigma = BlockCirculant(detail::blocks_from_json(j, "first_block_row", m, N));
  if (!s.sigma.is_symmetric(1e-12)) throw Error(Errc::BadInput, "first block row is not that of a symmetric matrix");
  if (j.contains("diagnostics")) {
    const json& d = j.at("diagnostics");
    if (!d.is_object()) throw Error(Errc::BadInput, "diagnostics must be an object");
    s.diagnostics.method = d.value("method", "");
    s.diagnostics.status = d.value("status", "");
    s.diagnostics.iterations = d.contains("iterations") ? detail::index_from(d, "iterations") : 0;
    s.diagnostics.grad_norm = detail::number_from(d, "grad_norm");
    s.diagnostics.jbar = detail::number_from(d, "jbar");
    s.diagnostics.band_residual = detail::number_from(d, "band_residual");
    s.diagnostics.dempster_residual = detail::number_from(d, "dempster_residual");
    s.diagnostics.entropy = detail::number_from(d, "entropy");
    if (d.contains("positive_definite")) s.diagnostics.positive_definite = d.at("positive_definite").get<bool>();
  }
  return s;
}

inline ProblemFile parse_problem(const std::string& text) { return problem_from_json(detail::parse_text(text)); }
inline SolutionFile parse_solution(const std::string& text) { return solution_from_json(detail::parse_text(text)); }
inline ProblemFile read_problem_file(const std::string& path) { return parse_problem(detail::read_text(path)); }
inline SolutionFile read_solution_file(const std::string& path) { return parse_solution(detail::read_text(path)); }

}  // namespace mecirc

#endif  // MECIRC_IO_HPP
