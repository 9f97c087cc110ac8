#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <json.hpp>

#include "advbound/errors.hpp"
#include "advbound/function.hpp"
#include "advbound/matrix.hpp"
#include "advbound/report.hpp"
#include "advbound/sdp.hpp"
#include "advbound/witness.hpp"

namespace advbound {

using ojson = nlohmann::ordered_json;

// Decimal rounding to a fixed number of significant digits; emitted numbers
// reparse to exactly the rounded double, so emit-load-emit is a fixed point.
inline double round_sig(double x, int digits) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
  return std::strtod(buf, nullptr);
}

namespace detail {

inline ojson json_number(double x, int digits) {
  if (std::isinf(x)) return x > 0.0 ? "inf" : "-inf";
  if (std::isnan(x)) throw numeric_error("refusing to serialize NaN");
  return round_sig(x, digits);
}

inline const ojson& require_field(const ojson& j, const char* key,
                                  const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end())
    throw input_error(where + ": missing field \"" + key + "\"");
  return *it;
}

inline double require_number(const ojson& j, const char* key,
                             const std::string& where) {
  const ojson& v = require_field(j, key, where);
  if (!v.is_number())
    throw input_error(where + ": field \"" + key + "\" must be a number");
  return v.get<double>();
}

inline ojson matrix_to_json(const DenseMatrix& m, int digits) {
  ojson rows = ojson::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    ojson row = ojson::array();
    for (std::size_t c = 0; c < m.cols(); ++c)
      row.push_back(json_number(m(r, c), digits));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline DenseMatrix matrix_from_json(const ojson& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw input_error(where + ": expected a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty())
    throw input_error(where + ": rows must be non-empty arrays");
  const std::size_t cols = j[0].size();
  DenseMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw input_error(where + ": row " + std::to_string(r) +
                        " has inconsistent length");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number())
        throw input_error(where + ": row " + std::to_string(r) +
                          " holds a non-numeric entry");
      const double v = j[r][c].get<double>();
      if (!std::isfinite(v))
        throw input_error(where + ": row " + std::to_string(r) +
                          " holds a non-finite entry");
      m(r, c) = v;
    }
  }
  return m;
}

inline std::vector<double> vector_from_json(const ojson& j,
                                            const std::string& where) {
  if (!j.is_array() || j.empty())
    throw input_error(where + ": expected a non-empty array");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number() || !std::isfinite(j[i].get<double>()))
      throw input_error(where + ": entry " + std::to_string(i) +
                        " is not a finite number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

}  // namespace detail

inline FunctionSpec function_from_json(const ojson& j,
                                       std::size_t max_s = kDefaultMaxS) {
  const std::string where = "function document";
  if (!j.is_object()) throw input_error(where + ": expected an object");
  for (const char* key : {"n", "g", "h"}) {
    const ojson& v = detail::require_field(j, key, where);
    if (!v.is_number_integer())
      throw input_error(where + ": field \"" + std::string(key) +
                        "\" must be an integer");
  }
  const int n = j["n"].get<int>();
  const int g = j["g"].get<int>();
  const int h = j["h"].get<int>();
  std::string name;
  if (j.contains("name")) {
    if (!j["name"].is_string())
      throw input_error(where + ": field \"name\" must be a string");
    name = j["name"].get<std::string>();
  }
  const ojson& entries = detail::require_field(j, "entries", where);
  if (!entries.is_array())
    throw input_error(where + ": field \"entries\" must be an array");
  if (entries.size() > max_s)
    throw input_error(where + ": " + std::to_string(entries.size()) +
                      " entries exceed the row limit " +
                      std::to_string(max_s));

  std::vector<std::vector<int>> inputs;
  std::vector<int> outputs;
  inputs.reserve(entries.size());
  outputs.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const std::string at = "entry " + std::to_string(k);
    const ojson& e = entries[k];
    if (!e.is_object()) throw input_error(at + ": expected an object");
    const ojson& x = detail::require_field(e, "x", at);
    const ojson& f = detail::require_field(e, "f", at);
    if (!x.is_string()) throw input_error(at + ": \"x\" must be a string");
    if (!f.is_number_integer())
      throw input_error(at + ": \"f\" must be an integer");
    const std::string word = x.get<std::string>();
    std::vector<int> letters;
    letters.reserve(word.size());
    for (char ch : word) {
      const int letter = char_to_letter(ch);
      if (letter < 0)
        throw input_error(at + ": \"x\" holds the invalid digit '" +
                          std::string(1, ch) + "'");
      letters.push_back(letter);
    }
    inputs.push_back(std::move(letters));
    outputs.push_back(f.get<int>());
  }
  return FunctionSpec(n, g, h, inputs, outputs, name);
}

inline FunctionSpec load_function(const std::string& text,
                                  std::size_t max_s = kDefaultMaxS) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string("function document: invalid JSON: ") +
                      e.what());
  }
  return function_from_json(j, max_s);
}

inline ojson function_to_json(const FunctionSpec& spec) {
  ojson j;
  if (!spec.name().empty()) j["name"] = spec.name();
  j["n"] = spec.n();
  j["g"] = spec.g();
  j["h"] = spec.h();
  ojson entries = ojson::array();
  for (std::size_t x = 0; x < spec.size(); ++x)
    entries.push_back({{"x", spec.word_string(x)}, {"f", spec.output(x)}});
  j["entries"] = std::move(entries);
  return j;
}

inline ojson witness_to_json(const SpectralWitness& wit, int digits = 9) {
  return ojson{{"gamma", detail::matrix_to_json(wit.gamma, digits)}};
}

inline ojson witness_to_json(const WeightScheme& ws, int digits = 9) {
  ojson wp = ojson::array();
  for (const auto& m : ws.wp) wp.push_back(detail::matrix_to_json(m, digits));
  return ojson{{"w", detail::matrix_to_json(ws.w, digits)},
               {"wp", std::move(wp)}};
}

inline ojson witness_to_json(const ProbabilityScheme& ps, int digits = 9) {
  return ojson{{"p", detail::matrix_to_json(ps.p, digits)}};
}

inline ojson witness_to_json(const SmmSolution& sol, int digits = 9) {
  ojson r = ojson::array();
  for (const auto& m : sol.r) r.push_back(detail::matrix_to_json(m, digits));
  return ojson{{"mu", detail::json_number(sol.mu, digits)},
               {"R", std::move(r)}};
}

inline ojson witness_to_json(const GsaSolution& sol, int digits = 9) {
  ojson delta = ojson::array();
  for (double d : sol.delta) delta.push_back(detail::json_number(d, digits));
  return ojson{{"mu", detail::json_number(sol.mu, digits)},
               {"Z", detail::matrix_to_json(sol.z, digits)},
               {"delta", std::move(delta)}};
}

inline SpectralWitness spectral_from_json(const ojson& j) {
  const std::string where = "spectral witness";
  return {detail::matrix_from_json(detail::require_field(j, "gamma", where),
                                   where + " \"gamma\"")};
}

inline WeightScheme weights_from_json(const ojson& j) {
  const std::string where = "weight scheme";
  WeightScheme ws;
  ws.w = detail::matrix_from_json(detail::require_field(j, "w", where),
                                  where + " \"w\"");
  const ojson& wp = detail::require_field(j, "wp", where);
  if (!wp.is_array() || wp.empty())
    throw input_error(where + ": \"wp\" must be a non-empty array");
  for (std::size_t i = 0; i < wp.size(); ++i)
    ws.wp.push_back(detail::matrix_from_json(
        wp[i], where + " \"wp\"[" + std::to_string(i) + "]"));
  return ws;
}

inline ProbabilityScheme probabilities_from_json(const ojson& j) {
  const std::string where = "probability scheme";
  return {detail::matrix_from_json(detail::require_field(j, "p", where),
                                   where + " \"p\"")};
}

inline SmmSolution smm_from_json(const ojson& j) {
  const std::string where = "smm solution";
  SmmSolution sol;
  sol.mu = detail::require_number(j, "mu", where);
  const ojson& r = detail::require_field(j, "R", where);
  if (!r.is_array() || r.empty())
    throw input_error(where + ": \"R\" must be a non-empty array");
  for (std::size_t i = 0; i < r.size(); ++i)
    sol.r.push_back(detail::matrix_from_json(
        r[i], where + " \"R\"[" + std::to_string(i) + "]"));
  return sol;
}

inline GsaSolution gsa_from_json(const ojson& j) {
  const std::string where = "gsa solution";
  GsaSolution sol;
  sol.mu = detail::require_number(j, "mu", where);
  sol.z = detail::matrix_from_json(detail::require_field(j, "Z", where),
                                   where + " \"Z\"");
  sol.delta = detail::vector_from_json(detail::require_field(j, "delta", where),
                                       where + " \"delta\"");
  return sol;
}

inline ojson report_to_json(const BoundReport& rep, bool attach_witnesses,
                            const std::string& generated_at, int digits = 9) {
  ojson j;
  j["function"] = rep.function;
  j["generated_at"] = generated_at;
  j["values"] = ojson{{"sa", detail::json_number(rep.values.sa, digits)},
                      {"gsa", detail::json_number(rep.values.gsa, digits)},
                      {"smm", detail::json_number(rep.values.smm, digits)},
                      {"mm", detail::json_number(rep.values.mm, digits)},
                      {"wa", detail::json_number(rep.values.wa, digits)},
                      {"swa", detail::json_number(rep.values.swa, digits)}};
  ojson limits;
  for (const auto& b : rep.limits)
    limits[b.label] = detail::json_number(b.value, digits);
  j["limits"] = std::move(limits);
  j["query_lower_bound"] =
      ojson{{"eps", detail::json_number(rep.eps, digits)},
            {"value", detail::json_number(rep.query_bound, digits)}};
  j["sandwich_residual"] = detail::json_number(rep.sandwich_residual, digits);
  j["solver"] = ojson{{"converged", rep.converged},
                      {"gap", detail::json_number(rep.gap, digits)},
                      {"tol", detail::json_number(rep.tol, digits)}};
  // Witnesses are kept at full precision: rounding them would break tight
  // reload invariants (probability rows summing to 1 within 1e-12, PSD
  // margins), so only the scalar summary obeys `digits`.
  if (attach_witnesses)
    j["witnesses"] = ojson{{"spectral", witness_to_json(rep.spectral, 17)},
                           {"weights", witness_to_json(rep.weights, 17)},
                           {"probabilities",
                            witness_to_json(rep.probabilities, 17)},
                           {"smm", witness_to_json(rep.smm, 17)},
                           {"gsa", witness_to_json(rep.gsa, 17)}};
  return j;
}

}  // namespace advbound
