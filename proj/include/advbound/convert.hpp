#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "advbound/eigen.hpp"
#include "advbound/errors.hpp"
#include "advbound/function.hpp"
#include "advbound/hadamard.hpp"
#include "advbound/matrix.hpp"
#include "advbound/sdp.hpp"
#include "advbound/witness.hpp"

namespace advbound {

namespace detail {

struct NormalizedWitness {
  DenseMatrix gamma;           // scaled so lambda = 1
  std::vector<double> deltav;  // unit principal eigenvector
  double mu;                   // max_i lambda(gamma ∘ D_i) after scaling
};

inline NormalizedWitness normalize_witness(const SpectralWitness& wit,
                                           const DifferenceMatrices& dm,
                                           double tol) {
  validate_spectral(wit, dm, tol);
  if (wit.gamma.is_zero()) throw witness_error("gamma = 0", "empty witness");
  const SpectralResult top = spectral_norm(wit.gamma, tol);
  NormalizedWitness out;
  out.gamma = wit.gamma;
  out.gamma *= 1.0 / top.value;
  out.deltav = top.vector;
  // Downstream weights divide by individual eigenvector coordinates, so the
  // ratios (gamma δ)[x] / δ[x] have to agree componentwise, not just in the
  // 2-norm; recenter the scale on the polished bracket.
  const double rho = detail::polish_perron(out.gamma, out.deltav);
  if (rho > 0.0) out.gamma *= 1.0 / rho;
  out.mu = 0.0;
  for (const auto& di : dm.d) {
    const DenseMatrix gd = hadamard(out.gamma, di);
    if (!gd.is_zero()) out.mu = std::max(out.mu, spectral_norm(gd, tol).value);
  }
  if (out.mu == 0.0)
    throw witness_error("gamma ∘ D_i all zero",
                        "witness corrupt: some pair must differ somewhere");
  return out;
}

}  // namespace detail

// w(x,y) = gamma[x,y] δ[x] δ[y] and w'(x,y,i) = M_i[x,y]² δ[x]² with M_i the
// row/column-balanced decomposition of gamma ∘ D_i (gamma scaled to norm 1).
inline WeightScheme spectral_to_weighted(const SpectralWitness& wit,
                                         const DifferenceMatrices& dm,
                                         double tol = kDefaultTol) {
  const auto nw = detail::normalize_witness(wit, dm, tol);
  const std::size_t s = nw.gamma.rows();
  WeightScheme ws;
  ws.w = DenseMatrix(s, s);
  for (std::size_t x = 0; x < s; ++x)
    for (std::size_t y = x + 1; y < s; ++y) {
      const double v = nw.gamma(x, y) * nw.deltav[x] * nw.deltav[y];
      ws.w(x, y) = v;
      ws.w(y, x) = v;
    }
  ws.wp.reserve(dm.d.size());
  for (const auto& di : dm.d) {
    const DenseMatrix mi = mathias_decomposition(hadamard(nw.gamma, di));
    DenseMatrix wp(s, s);
    for (std::size_t x = 0; x < s; ++x)
      for (std::size_t y = 0; y < s; ++y)
        wp(x, y) = mi(x, y) * mi(x, y) * nw.deltav[x] * nw.deltav[x];
    ws.wp.push_back(std::move(wp));
  }
  return ws;
}

// Gamma[x,y] = w(x,y) / sqrt(wt(x) wt(y)); rows with wt = 0 stay zero.
inline SpectralWitness weighted_to_spectral(const WeightScheme& ws,
                                            const DifferenceMatrices& dm,
                                            double tol = kDefaultTol) {
  validate_weights(ws, dm, tol);
  if (ws.w.is_zero()) throw witness_error("w = 0", "empty witness");
  const std::size_t s = ws.w.rows();
  const std::vector<double> wt = detail::weight_row_sums(ws.w);
  SpectralWitness out{DenseMatrix(s, s)};
  for (std::size_t x = 0; x < s; ++x) {
    if (wt[x] <= 0.0) continue;
    for (std::size_t y = x + 1; y < s; ++y) {
      if (wt[y] <= 0.0 || ws.w(x, y) == 0.0) continue;
      const double v = ws.w(x, y) / std::sqrt(wt[x] * wt[y]);
      out.gamma(x, y) = v;
      out.gamma(y, x) = v;
    }
  }
  return out;
}

// Rank-one rounding: p_x(i) is the squared row norm of the Cholesky factor
// of R_i, then rows are renormalized to exact distributions.
inline ProbabilityScheme smm_to_probability(const SmmSolution& sol,
                                            double tol = kDefaultSdpTol) {
  const std::size_t n = sol.r.size();
  if (n == 0) throw input_error("smm: no R matrices");
  const std::size_t s = sol.r[0].rows();
  ProbabilityScheme ps{DenseMatrix(s, n)};
  for (std::size_t i = 0; i < n; ++i) {
    DenseMatrix sym = sol.r[i];
    if (sym.rows() != s || sym.cols() != s)
      throw input_error("smm: R shape mismatch");
    for (std::size_t x = 0; x < s; ++x)
      for (std::size_t y = x + 1; y < s; ++y) {
        const double avg = 0.5 * (sym(x, y) + sym(y, x));
        sym(x, y) = avg;
        sym(y, x) = avg;
      }
    DenseMatrix xi;
    try {
      xi = cholesky(sym, tol);
    } catch (const numeric_error&) {
      throw witness_error("R_i not PSD", "position " + std::to_string(i + 1));
    }
    for (std::size_t x = 0; x < s; ++x) {
      const double q = row_norm(xi, x);
      ps.p(x, i) = q * q;
    }
  }
  for (std::size_t x = 0; x < s; ++x) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += ps.p(x, i);
    if (std::abs(sum - 1.0) > 10.0 * tol)
      throw witness_error("Σ_i R_i ∘ I ≠ I",
                          "row " + std::to_string(x) + " sums to " +
                              std::to_string(sum));
    for (std::size_t i = 0; i < n; ++i) ps.p(x, i) /= sum;
  }
  return ps;
}

// Gamma = Z ∘ F ∘ a aᵀ with a = 1/sqrt(delta) on rows where Z is not
// entirely zero; deleted rows re-embed as zeros.
inline SpectralWitness gsa_to_spectral(const GsaSolution& sol,
                                       const DifferenceMatrices& dm) {
  const std::size_t s = dm.f_mat.rows();
  if (sol.z.rows() != s || sol.z.cols() != s)
    throw input_error("gsa: Z shape mismatch");
  if (sol.delta.size() != s) throw input_error("gsa: delta shape mismatch");

  std::vector<bool> alive(s, false);
  for (std::size_t x = 0; x < s; ++x)
    for (std::size_t y = 0; y < s; ++y)
      if (sol.z(x, y) != 0.0) {
        alive[x] = true;
        break;
      }
  std::vector<double> a(s, 0.0);
  for (std::size_t x = 0; x < s; ++x) {
    if (!alive[x]) continue;
    if (sol.delta[x] <= 0.0)
      throw witness_error("Δ has a zero diagonal entry",
                          "row " + std::to_string(x) +
                              " carries weight but no budget");
    a[x] = 1.0 / std::sqrt(sol.delta[x]);
  }

  SpectralWitness out{DenseMatrix(s, s)};
  for (std::size_t x = 0; x < s; ++x)
    for (std::size_t y = x + 1; y < s; ++y) {
      if (!alive[x] || !alive[y] || dm.f_mat(x, y) == 0.0) continue;
      const double zsym = 0.5 * (sol.z(x, y) + sol.z(y, x));
      const double v = zsym * a[x] * a[y];
      out.gamma(x, y) = v;
      out.gamma(y, x) = v;
    }
  return out;
}

// Z = gamma ∘ δδᵀ and Delta = mu · diag(δ²) after scaling gamma to norm 1;
// tr Delta is then exactly the spectral ratio's denominator.
inline GsaSolution spectral_to_gsa(const SpectralWitness& wit,
                                   const DifferenceMatrices& dm,
                                   double tol = kDefaultTol) {
  const auto nw = detail::normalize_witness(wit, dm, tol);
  const std::size_t s = nw.gamma.rows();
  GsaSolution sol;
  sol.z = DenseMatrix(s, s);
  double zf = 0.0;
  for (std::size_t x = 0; x < s; ++x)
    for (std::size_t y = x + 1; y < s; ++y) {
      const double v = nw.gamma(x, y) * nw.deltav[x] * nw.deltav[y];
      sol.z(x, y) = v;
      sol.z(y, x) = v;
      zf += v * (dm.f_mat(x, y) + dm.f_mat(y, x));
    }
  // δᵀ gamma δ = 1 up to the eigensolver residual; rescaling both Z and
  // Delta by the same factor keeps every PSD constraint intact.
  sol.z *= 1.0 / zf;
  sol.delta.resize(s);
  sol.mu = 0.0;
  for (std::size_t x = 0; x < s; ++x) {
    sol.delta[x] = nw.mu * nw.deltav[x] * nw.deltav[x] / zf;
    sol.mu += sol.delta[x];
  }
  double zf2 = 0.0;
  for (std::size_t x = 0; x < s; ++x)
    for (std::size_t y = 0; y < s; ++y) zf2 += sol.z(x, y) * dm.f_mat(x, y);
  sol.residuals.normalization_residual = std::abs(zf2 - 1.0);
  double lo = std::numeric_limits<double>::infinity();
  DenseMatrix a(s, s);
  for (const auto& di : dm.d) {
    for (std::size_t r = 0; r < s; ++r)
      for (std::size_t c = 0; c < s; ++c)
        a(r, c) = (r == c ? sol.delta[r] : 0.0) - sol.z(r, c) * di(r, c);
    lo = std::min(lo, min_eigenvalue(a));
  }
  sol.residuals.min_eigenvalue = lo;
  sol.converged = true;
  sol.gap = 0.0;
  return sol;
}

}  // namespace advbound
