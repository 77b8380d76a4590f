#ifndef QBODY_IO_HPP
#define QBODY_IO_HPP

// JSON encodings. Points, functionals and angle tuples are flat arrays of
// four numbers in the order (c11, c12, c21, c22) resp. (alpha, beta, gamma,
// delta); models are {"d", "psi", "A1", "A2", "B1", "B2"} with row-major
// nested arrays.

#include "qbody/boundary.hpp"
#include "qbody/completion.hpp"
#include "qbody/core.hpp"
#include "qbody/quantum.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace qbody {

using nlohmann::json;

/// Malformed input text, as opposed to a well-formed input outside the
/// domain of an operation.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline json to_json(const Vec4& v) { return json::array({v[0], v[1], v[2], v[3]}); }
inline json to_json(const Correlation& c) { return to_json(c.v); }
inline json to_json(const Functional& f) { return to_json(f.v); }
inline json to_json(const AngleTuple& t) { return json::array({t.alpha, t.beta, t.gamma, t.delta}); }

inline json to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index s = 0; s < m.cols(); ++s) row.push_back(m(r, s));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const Interval& i) { return json::array({i.lo, i.hi}); }

inline json to_json(const QuantumModel& m) {
  json psi = json::array();
  for (Eigen::Index k = 0; k < m.psi.size(); ++k) psi.push_back(m.psi[k]);
  return {{"d", m.d()}, {"psi", psi}, {"A1", to_json(m.A1)}, {"A2", to_json(m.A2)},
          {"B1", to_json(m.B1)}, {"B2", to_json(m.B2)}};
}

inline json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

inline Vec4 vec4_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw ParseError("expected an array of 4 numbers");
  Vec4 v;
  for (int k = 0; k < 4; ++k) {
    if (!j[k].is_number()) throw ParseError("expected an array of 4 numbers");
    v[k] = j[k].get<double>();
    if (!std::isfinite(v[k])) throw ParseError("entries must be finite");
  }
  return v;
}

inline Vec4 parse_vec4(const std::string& text) { return vec4_from_json(parse_json_text(text)); }

inline Mat matrix_from_json(const json& j, int d) {
  if (!j.is_array() || static_cast<int>(j.size()) != d) throw ParseError("matrix must have d rows");
  Mat m(d, d);
  for (int r = 0; r < d; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != d) throw ParseError("matrix rows must have d entries");
    for (int s = 0; s < d; ++s) {
      if (!j[r][s].is_number()) throw ParseError("matrix entries must be numbers");
      m(r, s) = j[r][s].get<double>();
    }
  }
  return m;
}

inline QuantumModel model_from_json(const json& j) {
  if (!j.is_object() || !j.contains("d") || !j["d"].is_number_integer()) throw ParseError("model needs an integer d");
  const int d = j["d"].get<int>();
  if (d < 1) throw ParseError("model dimension must be positive");
  if (!j.contains("psi") || !j["psi"].is_array() || static_cast<int>(j["psi"].size()) != d) {
    throw ParseError("psi must have d entries");
  }
  QuantumModel m;
  m.psi.resize(d);
  for (int k = 0; k < d; ++k) {
    if (!j["psi"][k].is_number()) throw ParseError("psi entries must be numbers");
    m.psi[k] = j["psi"][k].get<double>();
  }
  for (const char* key : {"A1", "A2", "B1", "B2"}) {
    if (!j.contains(key)) throw ParseError(std::string("model lacks ") + key);
  }
  m.A1 = matrix_from_json(j["A1"], d);
  m.A2 = matrix_from_json(j["A2"], d);
  m.B1 = matrix_from_json(j["B1"], d);
  m.B2 = matrix_from_json(j["B2"], d);
  return m;
}

}  // namespace qbody

#endif  // QBODY_IO_HPP
