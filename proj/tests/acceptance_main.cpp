// Acceptance gate.  Each criterion prints one PASS/FAIL line; failures list
// their violations indented below.  Exit code is nonzero when any fail.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "advbound/convert.hpp"
#include "advbound/json_io.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;

using advbound::BoundReport;
using advbound::DenseMatrix;
using advbound::DifferenceMatrices;
using advbound::FunctionSpec;
using advbound::GsaSolution;
using advbound::ojson;
using advbound::ProbabilityScheme;
using advbound::SmmSolution;
using advbound::SpectralWitness;
using advbound::WeightScheme;

namespace {

constexpr double kTol = 1e-7;

std::vector<std::string> g_notes;

bool expect(bool ok, const std::string& note) {
  if (!ok) g_notes.push_back(note);
  return ok;
}

bool flush_criterion(int index, const std::string& label) {
  const bool ok = g_notes.empty();
  std::printf("criterion %d: %s  %s\n", index, ok ? "PASS" : "FAIL",
              label.c_str());
  for (const auto& n : g_notes) std::printf("    %s\n", n.c_str());
  g_notes.clear();
  std::fflush(stdout);
  return ok;
}

struct Solved {
  FunctionSpec spec;
  DifferenceMatrices dm;
  BoundReport rep;
  double seconds = 0.0;
  std::string error;
};

std::vector<Solved> solve_chain() {
  std::vector<Solved> out;
  const auto add = [&](FunctionSpec spec) {
    Solved s{std::move(spec), {}, {}, 0.0, {}};
    s.dm = advbound::build_difference_matrices(s.spec);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      s.rep = advbound::compute_report(s.spec, 0.0, kTol);
    } catch (const std::exception& e) {
      s.error = e.what();
    }
    s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t0)
                    .count();
    out.push_back(std::move(s));
  };
  add(FunctionSpec(1, 2, 2, {{0}, {1}}, {0, 1}, "identity_1"));
  add(advbound::builtin("or", {2}));
  add(advbound::builtin("or", {3}));
  add(advbound::builtin("or", {4}));
  add(advbound::builtin("and", {2}));
  add(advbound::builtin("parity", {2}));
  add(advbound::builtin("parity", {3}));
  add(advbound::builtin("two_level_and_or", {2, 2}));
  return out;
}

double best_lower(const advbound::BoundValues& v) {
  return std::max(std::max(v.sa, v.wa), std::max(v.swa, v.gsa));
}

double best_upper(const advbound::BoundValues& v) {
  return std::min(v.smm, v.mm);
}

bool criterion_equality_chain(const std::vector<Solved>& chain) {
  for (const auto& s : chain) {
    const std::string& name = s.rep.function.empty() ? s.spec.name()
                                                     : s.rep.function;
    if (!expect(s.error.empty(), name + ": " + s.error)) continue;
    expect(s.rep.converged, name + ": solver did not converge");
    expect(s.seconds < 60.0,
           name + ": took " + std::to_string(s.seconds) + " s");
    const advbound::BoundValues& v = s.rep.values;
    const double values[6] = {v.sa, v.gsa, v.smm, v.mm, v.wa, v.swa};
    double vmin = values[0], vmax = values[0];
    for (double x : values) {
      vmin = std::min(vmin, x);
      vmax = std::max(vmax, x);
    }
    expect(vmax - vmin <= 10.0 * kTol * (1.0 + vmax),
           name + ": spread " + std::to_string(vmax - vmin));
  }
  return flush_criterion(1, "six formulations agree at tol 1e-7");
}

bool criterion_exact_values(const std::vector<Solved>& chain) {
  const std::vector<std::pair<std::string, std::pair<double, double>>> targets =
      {{"identity_1", {1.0, 1e-6}},
       {"or_2", {std::sqrt(2.0), 1e-3}},
       {"or_3", {std::sqrt(3.0), 1e-3}},
       {"or_4", {2.0, 1e-3}},
       {"parity_2", {2.0, 1e-3}},
       {"parity_3", {3.0, 1e-3}},
       {"two_level_and_or_2_2", {2.0, 1e-2}}};
  for (const auto& [name, tm] : targets) {
    const auto it = std::find_if(chain.begin(), chain.end(),
                                 [&](const Solved& s) {
                                   return s.rep.function == name;
                                 });
    if (!expect(it != chain.end() && it->error.empty(),
                name + ": report missing"))
      continue;
    const advbound::BoundValues& v = it->rep.values;
    const double values[6] = {v.sa, v.gsa, v.smm, v.mm, v.wa, v.swa};
    for (double x : values)
      expect(std::abs(x - tm.first) <= tm.second,
             name + ": value " + std::to_string(x) + " vs " +
                 std::to_string(tm.first));
  }
  return flush_criterion(2, "closed-form values for or, parity, "
                            "two-level and-or, identity");
}

bool criterion_duality(const std::vector<Solved>& chain) {
  std::mt19937 rng(90217);
  std::uniform_real_distribution<double> shrink(0.1, 0.95);
  std::uniform_real_distribution<double> bump(0.0, 0.5);
  for (const auto& s : chain) {
    if (!s.error.empty()) {
      expect(false, s.spec.name() + ": " + s.error);
      continue;
    }
    const std::string& name = s.rep.function;
    const double gap = s.rep.gsa.mu - s.rep.smm.mu;
    expect(gap >= -1e-12 * (1.0 + s.rep.gsa.mu),
           name + ": primal exceeds dual by " + std::to_string(-gap));
    expect(gap <= 10.0 * kTol * (1.0 + s.rep.smm.mu),
           name + ": gap " + std::to_string(gap));

    const std::size_t n = s.dm.d.size();
    for (int trial = 0; trial < 50; ++trial) {
      // Feasibility-preserving perturbations: mixing the primal with the
      // scaled identity keeps the diagonal exact, and inflating the dual
      // budget keeps every slack matrix PSD.
      const double c = shrink(rng);
      SmmSolution smm = s.rep.smm;
      for (auto& ri : smm.r) {
        ri *= c;
        for (std::size_t x = 0; x < ri.rows(); ++x)
          ri(x, x) += (1.0 - c) / static_cast<double>(n);
      }
      smm.mu = c * s.rep.smm.mu;

      GsaSolution gsa = s.rep.gsa;
      for (auto& dx : gsa.delta) dx += bump(rng);
      double tr = 0.0;
      for (double dx : gsa.delta) tr += dx;
      gsa.mu = tr;

      const auto vs = advbound::verify_smm(s.dm, smm, kTol);
      const auto vg = advbound::verify_gsa(s.dm, gsa, kTol);
      expect(vs.accepted, name + ": perturbed primal rejected: " +
                              vs.first_violation);
      expect(vg.accepted, name + ": perturbed dual rejected: " +
                              vg.first_violation);
      expect(smm.mu <= gsa.mu + 1e-9,
             name + ": weak duality " + std::to_string(smm.mu) + " > " +
                 std::to_string(gsa.mu));
    }
  }
  return flush_criterion(3, "duality gap and 50 weak-duality "
                            "perturbations per function");
}

bool criterion_limitations(const std::vector<Solved>& chain) {
  for (const auto& s : chain) {
    if (!s.error.empty()) {
      expect(false, s.spec.name() + ": " + s.error);
      continue;
    }
    const std::string& name = s.rep.function;
    const auto profile = advbound::certificate_profile(s.spec);
    const double c0 = profile.c[static_cast<std::size_t>(
        profile.letter_order[0])];
    const double c1 = profile.c[static_cast<std::size_t>(
        profile.letter_order[1])];
    const double root = std::sqrt(c0 * c1);
    expect(best_lower(s.rep.values) <= root + 1e-6,
           name + ": lower " + std::to_string(best_lower(s.rep.values)) +
               " above sqrt(C0 C1) = " + std::to_string(root));
    const ProbabilityScheme scheme = advbound::limitation_scheme(
        s.spec, profile, advbound::LimitationMode::total);
    const double upper = advbound::eval_minimax(scheme, s.dm);
    expect(upper <= root + 1e-9,
           name + ": scheme value " + std::to_string(upper));
    if (name.rfind("or_", 0) == 0) {
      expect(std::abs(best_lower(s.rep.values) - root) <= 1e-3,
             name + ": not tight (lower)");
      expect(std::abs(best_upper(s.rep.values) - root) <= 1e-3,
             name + ": not tight (upper)");
    }
  }
  return flush_criterion(4, "certificate-complexity ceilings, tight on or(n)");
}

bool criterion_conversions(const std::vector<Solved>& chain) {
  for (const auto& s : chain) {
    if (!s.error.empty()) {
      expect(false, s.spec.name() + ": " + s.error);
      continue;
    }
    const std::string& name = s.rep.function;
    const DifferenceMatrices& dm = s.dm;
    const BoundReport& rep = s.rep;

    const WeightScheme ws = advbound::spectral_to_weighted(rep.spectral, dm);
    expect(advbound::eval_weighted(ws, dm) >= rep.values.sa - 1e-6,
           name + ": spectral->weighted loses value");

    const SpectralWitness sw = advbound::weighted_to_spectral(rep.weights, dm);
    expect(advbound::eval_spectral(sw, dm) >= rep.values.swa - 1e-6,
           name + ": weighted->spectral loses value");

    const SpectralWitness gw = advbound::gsa_to_spectral(rep.gsa, dm);
    expect(advbound::eval_spectral(gw, dm) >= 1.0 / rep.gsa.mu - 1e-6,
           name + ": gsa->spectral loses value");

    const double num = advbound::spectral_norm(rep.spectral.gamma, 1e-9).value;
    double den = 0.0;
    for (const auto& di : dm.d)
      den = std::max(den, advbound::spectral_norm(
                              advbound::hadamard(rep.spectral.gamma, di), 1e-9)
                              .value);
    const GsaSolution forward = advbound::spectral_to_gsa(rep.spectral, dm);
    expect(forward.mu <= den / num + 1e-6,
           name + ": spectral->gsa objective too large");

    const GsaSolution round =
        advbound::spectral_to_gsa(advbound::gsa_to_spectral(rep.gsa, dm), dm);
    expect(std::abs(round.mu - rep.gsa.mu) <= 1e-6,
           name + ": round trip drifts " +
               std::to_string(round.mu - rep.gsa.mu));
  }
  return flush_criterion(5, "conversion gains and GSA round trip at 1e-6");
}

DenseMatrix random_symmetric_nonneg(std::size_t n, std::mt19937& rng,
                                    double density) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DenseMatrix m(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = r; c < n; ++c) {
      const double v = unit(rng) < density ? unit(rng) : 0.0;
      m(r, c) = v;
      m(c, r) = v;
    }
  return m;
}

bool criterion_lemmas() {
  std::mt19937 rng(771207);
  std::uniform_int_distribution<std::size_t> size_dist(2, 10);
  int bad_decomp = 0, bad_bound = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = size_dist(rng);
    const DenseMatrix s = random_symmetric_nonneg(n, rng, 0.85);
    const DenseMatrix m = advbound::mathias_decomposition(s);
    bool ok = m.is_nonnegative();
    const DenseMatrix back = advbound::hadamard(m, m.transposed());
    const double scale = 1.0 + s.max_abs();
    for (std::size_t r = 0; r < n && ok; ++r)
      for (std::size_t c = 0; c < n; ++c)
        if (std::abs(back(r, c) - s(r, c)) > 1e-9 * scale) {
          ok = false;
          break;
        }
    if (ok && !s.is_zero()) {
      const double lam = std::sqrt(oracles::sym_max_eigenvalue(s));
      const double row = advbound::max_row_norm(m);
      ok = row <= lam + 1e-9 && std::abs(row - lam) <= 1e-6;
    }
    if (!ok) ++bad_decomp;
  }
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = size_dist(rng);
    const DenseMatrix m = random_symmetric_nonneg(n, rng, 0.8);
    const DenseMatrix nm = random_symmetric_nonneg(n, rng, 0.8);
    const double bound = advbound::conditional_norm_bound(m, nm);
    const double lam = oracles::sym_max_eigenvalue(advbound::hadamard(m, nm));
    if (lam > bound + 1e-9) ++bad_bound;
  }
  expect(bad_decomp == 0,
         std::to_string(bad_decomp) + " decomposition violations");
  expect(bad_bound == 0,
         std::to_string(bad_bound) + " norm-bound violations");
  return flush_criterion(6, "decomposition and norm-bound suites, "
                            "1000 instances each");
}

bool criterion_oracles() {
  const std::vector<std::vector<int>> words = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  const auto t0 = std::chrono::steady_clock::now();
  for (int pattern = 1; pattern < 15; ++pattern) {
    std::vector<int> outputs(4);
    for (int x = 0; x < 4; ++x) outputs[static_cast<std::size_t>(x)] =
        (pattern >> x) & 1;
    const FunctionSpec spec(2, 2, 2, words, outputs,
                            "f2_" + std::to_string(pattern));
    const DifferenceMatrices dm = advbound::build_difference_matrices(spec);
    const auto pair = advbound::solve_adversary_pair(dm, kTol);
    if (!expect(pair.converged, spec.name() + ": solver did not converge"))
      continue;
    const double solved = 1.0 / pair.gsa.mu;
    const double lower = oracles::binary_gamma_lower(dm);
    const double upper = oracles::grid_probability_upper(dm, 40);
    expect(solved >= lower - 1e-6 && solved <= upper + 1e-6,
           spec.name() + ": solved " + std::to_string(solved) +
               " outside [" + std::to_string(lower) + ", " +
               std::to_string(upper) + "]");
    expect(solved - lower <= 0.03 * solved + 1e-9,
           spec.name() + ": lower oracle off by more than 3%");
    expect(upper - solved <= 0.03 * solved + 1e-9,
           spec.name() + ": upper oracle off by more than 3%");
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  expect(seconds < 120.0,
         "oracle sweep took " + std::to_string(seconds) + " s");
  return flush_criterion(7, "exhaustive n=2 oracles bracket solved values "
                            "within 3%");
}

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path out_path =
      fs::temp_directory_path() /
      ("advacc_" + std::to_string(::getpid()) + "_" +
       std::to_string(++counter) + ".out");
  const std::string cmd = std::string("\"") + ADVBOUND_CLI_BIN + "\" " + args +
                          " >" + out_path.string() + " 2>/dev/null";
  const int raw = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream is(out_path, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  r.out = ss.str();
  fs::remove(out_path);
  return r;
}

fs::path write_witness(const ojson& doc, const std::string& stem) {
  const fs::path p = fs::temp_directory_path() /
                     ("advacc_" + std::to_string(::getpid()) + "_" + stem +
                      ".json");
  std::ofstream(p) << doc.dump();
  return p;
}

bool criterion_verification() {
  const std::string fn =
      std::string(ADVBOUND_DATA_DIR) + "/functions/or2.json";
  const std::string wdir = std::string(ADVBOUND_DATA_DIR) + "/functions/";
  const double root2 = std::sqrt(2.0);

  // Hand witnesses that must be accepted at the known value.
  const auto accept = [&](const std::string& witness, const std::string& kind,
                          const std::string& cert) {
    const CliResult r =
        run_cli("verify " + fn + " --witness " + witness + " --kind " + kind);
    if (!expect(r.code == 0, kind + ": exit " + std::to_string(r.code)))
      return;
    const ojson j = ojson::parse(r.out);
    expect(j["valid"].get<bool>(), kind + ": marked invalid");
    // The CLI rounds emitted values to 9 significant digits.
    expect(std::abs(j["value"].get<double>() - root2) <= 5e-9,
           kind + ": value " + j["value"].dump());
    expect(j["certificate"] == cert, kind + ": wrong certificate side");
  };
  accept(wdir + "or2_gamma.json", "gamma", "lower");
  accept(wdir + "or2_probs.json", "probs", "upper");

  DenseMatrix w(4, 4), wp0(4, 4), wp1(4, 4);
  w(0, 1) = w(1, 0) = w(0, 2) = w(2, 0) = 1.0;
  wp0(0, 2) = wp0(2, 0) = 1.0;  // pair (00, 10) differs at the first letter
  wp1(0, 1) = wp1(1, 0) = 1.0;  // pair (00, 01) differs at the second
  const fs::path hand_weights =
      write_witness(advbound::witness_to_json(WeightScheme{w, {wp0, wp1}}),
                    "weights");
  accept(hand_weights.string(), "weights", "lower");
  fs::remove(hand_weights);

  // Single-entry corruptions, each rejected with its named constraint.
  const auto reject = [&](const ojson& doc, const std::string& kind,
                          const std::string& constraint,
                          const std::string& stem) {
    const fs::path p = write_witness(doc, stem);
    const CliResult r = run_cli("verify " + fn + " --witness " + p.string() +
                                " --kind " + kind);
    fs::remove(p);
    if (!expect(r.code == 4, stem + ": exit " + std::to_string(r.code)))
      return;
    const ojson j = ojson::parse(r.out);
    expect(j["constraint"] == constraint,
           stem + ": constraint " + j["constraint"].dump());
  };

  {
    const CliResult r = run_cli("verify " + fn + " --witness " + wdir +
                                "or2_gamma_bad.json --kind gamma");
    expect(r.code == 4, "gamma support corruption: exit " +
                            std::to_string(r.code));
    if (r.code == 4)
      expect(ojson::parse(r.out)["constraint"] == "gamma ∘ F ≠ gamma",
             "gamma support corruption misnamed");
  }
  {
    DenseMatrix g(4, 4);
    g(0, 1) = g(1, 0) = -1.0;
    g(0, 2) = g(2, 0) = 1.0;
    reject(advbound::witness_to_json(SpectralWitness{g}), "gamma",
           "gamma negative", "neg_gamma");
  }
  {
    DenseMatrix g(4, 4);
    g(0, 1) = 1.0;
    g(1, 0) = 0.5;
    reject(advbound::witness_to_json(SpectralWitness{g}), "gamma",
           "gamma not symmetric", "asym_gamma");
  }
  {
    DenseMatrix bw = w;
    bw(1, 2) = bw(2, 1) = 1.0;  // outputs of 01 and 10 agree
    reject(advbound::witness_to_json(WeightScheme{bw, {wp0, wp1}}), "weights",
           "w ≠ 0 where outputs agree", "w_support");
  }
  {
    DenseMatrix bad1 = wp1;
    bad1(0, 1) = 0.5;
    bad1(1, 0) = 0.5;  // product 0.25 < w(0,1)^2 = 1
    reject(advbound::witness_to_json(WeightScheme{w, {wp0, bad1}}), "weights",
           "w'(x,y,i)·w'(y,x,i) < w(x,y)²", "wp_product");
  }
  {
    DenseMatrix p(4, 2);
    p(0, 0) = -0.5;
    p(0, 1) = 1.5;
    p(1, 1) = 1.0;
    p(2, 0) = 1.0;
    p(3, 0) = 1.0;
    reject(advbound::witness_to_json(ProbabilityScheme{p}), "probs",
           "p negative", "p_neg");
  }
  {
    DenseMatrix p(4, 2);
    p(0, 0) = 0.6;
    p(0, 1) = 0.6;
    p(1, 1) = 1.0;
    p(2, 0) = 1.0;
    p(3, 0) = 1.0;
    reject(advbound::witness_to_json(ProbabilityScheme{p}), "probs",
           "p rows do not sum to 1", "p_rows");
  }
  {
    DenseMatrix r1(4, 4), r2(4, 4);
    r1(0, 0) = 1.0;
    r1(2, 2) = 1.0;
    r1(3, 3) = 1.0;
    r2(0, 0) = 1.0;  // doubles the first diagonal entry
    r2(1, 1) = 1.0;
    SmmSolution sol;
    sol.mu = 0.0;
    sol.r = {r1, r2};
    reject(advbound::witness_to_json(sol), "smm", "Σ_i R_i ∘ I ≠ I",
           "smm_diag");
  }
  {
    GsaSolution sol;
    sol.mu = 4.0;
    sol.z = DenseMatrix(4, 4);
    sol.delta = {1.0, 1.0, 1.0, 1.0};
    reject(advbound::witness_to_json(sol), "gsa", "Z·F ≠ 1", "gsa_zf");
  }
  return flush_criterion(8, "hand witnesses accepted, corruptions rejected "
                            "by constraint name");
}

}  // namespace

int main() {
  const std::vector<Solved> chain = solve_chain();
  bool ok = true;
  ok &= criterion_equality_chain(chain);
  ok &= criterion_exact_values(chain);
  ok &= criterion_duality(chain);
  ok &= criterion_limitations(chain);
  ok &= criterion_conversions(chain);
  ok &= criterion_lemmas();
  ok &= criterion_oracles();
  ok &= criterion_verification();
  return ok ? 0 : 1;
}
