#pragma once

#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "advbound/convert.hpp"
#include "advbound/json_io.hpp"

namespace advbound::cli {

// Exit codes: 0 ok, 1 input error, 2 constant function, 3 non-convergence,
// 4 invalid witness.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitConstant = 2;
inline constexpr int kExitNoConverge = 3;
inline constexpr int kExitInvalidWitness = 4;

struct Options {
  std::string path;                  // function document path
  std::vector<std::string> builtin;  // builtin name followed by parameters
  std::string witness_path;
  std::string kind;
  double eps = 0.0;
  double tol = std::numeric_limits<double>::quiet_NaN();  // NaN: per-verb default
  std::string format = "json";
  std::string out;
  bool attach = false;
};

inline std::string now_utc() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ADVBOUND_MAX_S overrides both the row cap for loading and the (smaller)
// cap for SDP solving.
inline std::size_t env_cap(std::size_t dflt) {
  const char* v = std::getenv("ADVBOUND_MAX_S");
  if (v == nullptr || *v == '\0') return dflt;
  char* end = nullptr;
  const unsigned long long parsed = std::strtoull(v, &end, 10);
  if (end == v || *end != '\0' || parsed == 0)
    throw input_error("ADVBOUND_MAX_S must be a positive integer");
  return static_cast<std::size_t>(parsed);
}

inline std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw input_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline void write_document(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(out, std::ios::binary);
  if (!os) throw input_error("cannot open output file: " + out);
  os << text;
  os.flush();
  if (!os) throw input_error("cannot write output file: " + out);
}

inline ojson parse_document(const std::string& text, const std::string& what) {
  try {
    return ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw input_error(what + ": invalid JSON: " + e.what());
  }
}

inline std::string function_label(const FunctionSpec& spec) {
  if (!spec.name().empty()) return spec.name();
  return "f_n" + std::to_string(spec.n()) + "_s" + std::to_string(spec.size());
}

inline FunctionSpec resolve_function(const Options& opt) {
  if (!opt.path.empty() && !opt.builtin.empty())
    throw input_error("give either a function document or --builtin, not both");
  if (opt.path.empty() && opt.builtin.empty())
    throw input_error("no function given: pass a document path or --builtin");
  const std::size_t load_cap = env_cap(kDefaultMaxS);
  if (!opt.builtin.empty()) {
    std::vector<int> params;
    for (std::size_t i = 1; i < opt.builtin.size(); ++i) {
      const std::string& tok = opt.builtin[i];
      char* end = nullptr;
      const long v = std::strtol(tok.c_str(), &end, 10);
      if (end == tok.c_str() || *end != '\0')
        throw input_error("builtin parameter must be an integer: " + tok);
      params.push_back(static_cast<int>(v));
    }
    return builtin(opt.builtin[0], params, load_cap);
  }
  return load_function(read_file(opt.path), load_cap);
}

inline std::string sig6(double x) {
  if (std::isinf(x)) return x > 0.0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

inline std::string render_rows(
    const std::vector<std::pair<std::string, std::string>>& rows) {
  std::size_t width = 0;
  for (const auto& [k, v] : rows) width = std::max(width, k.size());
  std::ostringstream os;
  for (const auto& [k, v] : rows)
    os << k << std::string(width - k.size() + 2, ' ') << v << "\n";
  return os.str();
}

inline std::string render_report_text(const BoundReport& rep) {
  std::vector<std::pair<std::string, std::string>> rows;
  rows.emplace_back("function", rep.function);
  rows.emplace_back("converged", rep.converged ? "yes" : "no");
  rows.emplace_back("gap", sig6(rep.gap));
  rows.emplace_back("tol", sig6(rep.tol));
  rows.emplace_back("sa", sig6(rep.values.sa));
  rows.emplace_back("gsa", sig6(rep.values.gsa));
  rows.emplace_back("smm", sig6(rep.values.smm));
  rows.emplace_back("mm", sig6(rep.values.mm));
  rows.emplace_back("wa", sig6(rep.values.wa));
  rows.emplace_back("swa", sig6(rep.values.swa));
  for (const auto& b : rep.limits) rows.emplace_back(b.label, sig6(b.value));
  rows.emplace_back("eps", sig6(rep.eps));
  rows.emplace_back("query_lower_bound", sig6(rep.query_bound));
  rows.emplace_back("sandwich_residual", sig6(rep.sandwich_residual));
  return render_rows(rows);
}

inline int run_compute(const Options& opt) {
  const FunctionSpec spec = resolve_function(opt);
  const std::size_t sdp_cap = env_cap(kDefaultSdpMaxS);
  if (spec.size() > sdp_cap)
    throw input_error("function has " + std::to_string(spec.size()) +
                      " rows; SDP solves are capped at " +
                      std::to_string(sdp_cap) +
                      " rows (set ADVBOUND_MAX_S to raise)");
  const double tol = std::isnan(opt.tol) ? kDefaultSdpTol : opt.tol;
  const BoundReport rep = compute_report(spec, opt.eps, tol);
  const std::string text =
      opt.format == "text"
          ? render_report_text(rep)
          : report_to_json(rep, opt.attach, now_utc()).dump(2) + "\n";
  write_document(text, opt.out);
  if (!rep.converged) {
    std::cerr << "warning: solver gap " << sig6(rep.gap)
              << " did not reach the requested tolerance; report flagged\n";
    return kExitNoConverge;
  }
  return kExitOk;
}

inline int run_verify(const Options& opt) {
  const FunctionSpec spec = resolve_function(opt);
  const DifferenceMatrices dm = build_difference_matrices(spec);
  const ojson wj =
      parse_document(read_file(opt.witness_path), "witness document");

  ojson doc;
  doc["function"] = function_label(spec);
  doc["kind"] = opt.kind;
  doc["valid"] = false;
  int code = kExitOk;
  try {
    double value = 0.0;
    std::string cert;
    double wa = 0.0, swa = 0.0;
    if (opt.kind == "gamma") {
      const double tol = std::isnan(opt.tol) ? kDefaultTol : opt.tol;
      value = eval_spectral(spectral_from_json(wj), dm, tol);
      cert = "lower";
    } else if (opt.kind == "weights") {
      const double tol = std::isnan(opt.tol) ? kDefaultTol : opt.tol;
      const WeightScheme ws = weights_from_json(wj);
      wa = eval_weighted(ws, dm, tol);
      swa = eval_strong_weighted(ws, dm, tol);
      value = swa;
      cert = "lower";
    } else if (opt.kind == "probs") {
      value = eval_minimax(probabilities_from_json(wj), dm);
      cert = "upper";
    } else if (opt.kind == "smm") {
      const double tol = std::isnan(opt.tol) ? kDefaultSdpTol : opt.tol;
      const SmmSolution sol = smm_from_json(wj);
      const SmmVerification v = verify_smm(dm, sol, tol);
      if (!v.accepted)
        throw witness_error(v.first_violation, "rejected by the verifier");
      value = 1.0 / sol.mu;
      cert = "upper";
    } else {
      const double tol = std::isnan(opt.tol) ? kDefaultSdpTol : opt.tol;
      const GsaSolution sol = gsa_from_json(wj);
      const GsaVerification v = verify_gsa(dm, sol, tol);
      if (!v.accepted)
        throw witness_error(v.first_violation, "rejected by the verifier");
      value = 1.0 / sol.mu;
      cert = "lower";
    }
    doc["valid"] = true;
    doc["value"] = detail::json_number(value, 9);
    doc["certificate"] = cert;
    if (opt.kind == "weights") {
      doc["wa"] = detail::json_number(wa, 9);
      doc["swa"] = detail::json_number(swa, 9);
    }
  } catch (const witness_error& e) {
    const std::string what = e.what();  // "<constraint>: <detail>"
    doc["constraint"] = e.constraint();
    doc["detail"] = what.substr(e.constraint().size() + 2);
    std::cerr << "invalid witness: " << what << "\n";
    code = kExitInvalidWitness;
  }

  std::string text;
  if (opt.format == "text") {
    std::vector<std::pair<std::string, std::string>> rows;
    rows.emplace_back("function", doc["function"].get<std::string>());
    rows.emplace_back("kind", opt.kind);
    rows.emplace_back("valid", doc["valid"].get<bool>() ? "yes" : "no");
    if (doc["valid"].get<bool>()) {
      rows.emplace_back("value", doc["value"].is_string()
                                     ? doc["value"].get<std::string>()
                                     : sig6(doc["value"].get<double>()));
      rows.emplace_back("certificate", doc["certificate"].get<std::string>());
      if (doc.contains("wa")) {
        rows.emplace_back("wa", sig6(doc["wa"].get<double>()));
        rows.emplace_back("swa", sig6(doc["swa"].get<double>()));
      }
    } else {
      rows.emplace_back("constraint", doc["constraint"].get<std::string>());
      rows.emplace_back("detail", doc["detail"].get<std::string>());
    }
    text = render_rows(rows);
  } else {
    text = doc.dump(2) + "\n";
  }
  write_document(text, opt.out);
  return code;
}

inline int run_builtin(const Options& opt) {
  const FunctionSpec spec = resolve_function(opt);
  std::string text;
  if (opt.format == "text") {
    std::vector<std::pair<std::string, std::string>> rows;
    rows.emplace_back("function", function_label(spec));
    rows.emplace_back("n", std::to_string(spec.n()));
    rows.emplace_back("g", std::to_string(spec.g()));
    rows.emplace_back("h", std::to_string(spec.h()));
    for (std::size_t x = 0; x < spec.size(); ++x)
      rows.emplace_back(spec.word_string(x), std::to_string(spec.output(x)));
    text = render_rows(rows);
  } else {
    text = function_to_json(spec).dump(2) + "\n";
  }
  write_document(text, opt.out);
  return kExitOk;
}

inline int run_limits(const Options& opt) {
  const FunctionSpec spec = resolve_function(opt);
  spec.require_non_constant();
  const CertificateProfile profile = certificate_profile(spec);
  const bool boolean_out = spec.h() == 2;
  const std::vector<LimitationBound> bounds =
      limitation_bounds(profile, spec.n(), spec.is_total(), boolean_out);

  ojson doc;
  doc["function"] = function_label(spec);
  doc["n"] = spec.n();
  doc["total"] = spec.is_total();
  doc["boolean_output"] = boolean_out;
  ojson c;
  for (int letter : profile.letter_order)
    c[std::to_string(letter)] = profile.c[static_cast<std::size_t>(letter)];
  doc["c"] = std::move(c);
  doc["letter_order"] = profile.letter_order;
  ojson lims;
  for (const auto& b : bounds) lims[b.label] = detail::json_number(b.value, 9);
  doc["limits"] = std::move(lims);
  if (opt.attach) {
    ojson schemes;
    schemes["partial"] = witness_to_json(
        limitation_scheme(spec, profile, LimitationMode::partial), 17);
    if (boolean_out)
      schemes["boolean_partial"] = witness_to_json(
          limitation_scheme(spec, profile, LimitationMode::boolean_partial),
          17);
    if (spec.is_total())
      schemes["total"] = witness_to_json(
          limitation_scheme(spec, profile, LimitationMode::total), 17);
    doc["schemes"] = std::move(schemes);
  }

  std::string text;
  if (opt.format == "text") {
    std::vector<std::pair<std::string, std::string>> rows;
    rows.emplace_back("function", doc["function"].get<std::string>());
    rows.emplace_back("n", std::to_string(spec.n()));
    rows.emplace_back("total", spec.is_total() ? "yes" : "no");
    rows.emplace_back("boolean_output", boolean_out ? "yes" : "no");
    for (int letter : profile.letter_order)
      rows.emplace_back(
          "c[" + std::to_string(letter) + "]",
          std::to_string(profile.c[static_cast<std::size_t>(letter)]));
    for (const auto& b : bounds) rows.emplace_back(b.label, sig6(b.value));
    text = render_rows(rows);
  } else {
    text = doc.dump(2) + "\n";
  }
  write_document(text, opt.out);
  return kExitOk;
}

inline int run(int argc, const char* const* argv) {
  Options opt;
  CLI::App app{"adversary lower bounds for finite functions"};
  app.require_subcommand(1);

  const auto add_source = [&](CLI::App* sub) {
    sub->add_option("path", opt.path, "function document (JSON)");
    sub->add_option("--builtin", opt.builtin,
                    "builtin function: name then integer parameters")
        ->expected(-1);
  };
  const auto add_output = [&](CLI::App* sub) {
    sub->add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--out", opt.out, "write the document here, not stdout");
  };

  CLI::App* compute =
      app.add_subcommand("compute", "compute every bound formulation");
  add_source(compute);
  compute->add_option("--eps", opt.eps,
                      "two-sided error rate for the query lower bound");
  compute->add_option("--tol", opt.tol, "SDP solve tolerance");
  compute->add_flag("--attach-witnesses", opt.attach,
                    "embed the optimal witnesses in the report");
  add_output(compute);

  CLI::App* verify =
      app.add_subcommand("verify", "check a witness document for a function");
  add_source(verify);
  verify->add_option("--witness", opt.witness_path, "witness document (JSON)")
      ->required();
  verify->add_option("--kind", opt.kind, "witness kind")
      ->required()
      ->check(CLI::IsMember({"gamma", "weights", "probs", "smm", "gsa"}));
  verify->add_option("--tol", opt.tol, "verification tolerance");
  add_output(verify);

  CLI::App* bi =
      app.add_subcommand("builtin", "emit a builtin function as a document");
  bi->add_option("spec", opt.builtin, "builtin name then integer parameters")
      ->required()
      ->expected(-1);
  add_output(bi);

  CLI::App* limits = app.add_subcommand(
      "limits", "emit certificate complexities and limitation bounds");
  add_source(limits);
  limits->add_flag("--attach-witnesses", opt.attach,
                   "embed the achieving probability schemes");
  add_output(limits);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInput;
  }

  try {
    if (!std::isnan(opt.tol) && !(opt.tol > 0.0))
      throw input_error("tol must be > 0");
    if (app.got_subcommand("compute")) return run_compute(opt);
    if (app.got_subcommand("verify")) return run_verify(opt);
    if (app.got_subcommand("builtin")) return run_builtin(opt);
    return run_limits(opt);
  } catch (const witness_error& e) {
    std::cerr << "invalid witness: " << e.what() << "\n";
    return kExitInvalidWitness;
  } catch (const constant_function_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConstant;
  } catch (const input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const numeric_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConverge;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace advbound::cli
