#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "advbound/eigen.hpp"
#include "advbound/errors.hpp"
#include "advbound/function.hpp"
#include "advbound/matrix.hpp"

namespace advbound {

// Gamma with gamma ∘ F = gamma: a lower-bound certificate via the spectral
// ratio lambda(gamma) / max_i lambda(gamma ∘ D_i).
struct SpectralWitness {
  DenseMatrix gamma;
};

// Weights w on input pairs plus per-position weights w'.  wp[i](x,y) is
// w'(x,y,i); wp matrices need not be symmetric.
struct WeightScheme {
  DenseMatrix w;
  std::vector<DenseMatrix> wp;
};

// Row x of p is a probability distribution over the n positions.
struct ProbabilityScheme {
  DenseMatrix p;
};

namespace detail {

inline void require_shape(const DenseMatrix& m, std::size_t rows,
                          std::size_t cols, const std::string& what) {
  if (m.rows() != rows || m.cols() != cols)
    throw input_error(what + ": shape mismatch");
}

inline void require_symmetric_within(const DenseMatrix& m, double tol,
                                     const std::string& name) {
  const double scale = tol * (1.0 + m.max_abs());
  for (std::size_t x = 0; x < m.rows(); ++x)
    for (std::size_t y = x + 1; y < m.cols(); ++y)
      if (std::abs(m(x, y) - m(y, x)) > scale)
        throw witness_error(name + " not symmetric",
                            "entry (" + std::to_string(x) + "," +
                                std::to_string(y) + ")");
}

inline void require_nonnegative_within(const DenseMatrix& m, double tol,
                                       const std::string& name) {
  const double floor = -tol * (1.0 + m.max_abs());
  for (std::size_t x = 0; x < m.rows(); ++x)
    for (std::size_t y = 0; y < m.cols(); ++y)
      if (m(x, y) < floor)
        throw witness_error(name + " negative",
                            "entry (" + std::to_string(x) + "," +
                                std::to_string(y) + ")");
}

}  // namespace detail

inline void validate_spectral(const SpectralWitness& wit,
                              const DifferenceMatrices& dm,
                              double tol = kDefaultTol) {
  const std::size_t s = dm.f_mat.rows();
  detail::require_shape(wit.gamma, s, s, "gamma");
  detail::require_symmetric_within(wit.gamma, tol, "gamma");
  detail::require_nonnegative_within(wit.gamma, tol, "gamma");
  const double scale = tol * (1.0 + wit.gamma.max_abs());
  for (std::size_t x = 0; x < s; ++x)
    for (std::size_t y = 0; y < s; ++y)
      if (dm.f_mat(x, y) == 0.0 && std::abs(wit.gamma(x, y)) > scale)
        throw witness_error("gamma ∘ F ≠ gamma",
                            "nonzero entry (" + std::to_string(x) + "," +
                                std::to_string(y) +
                                ") where outputs agree");
}

inline void validate_weights(const WeightScheme& ws,
                             const DifferenceMatrices& dm,
                             double tol = kDefaultTol) {
  const std::size_t s = dm.f_mat.rows();
  const std::size_t n = dm.d.size();
  detail::require_shape(ws.w, s, s, "w");
  if (ws.wp.size() != n) throw input_error("wp: expected one matrix per position");
  for (const auto& wp : ws.wp) detail::require_shape(wp, s, s, "wp");

  detail::require_symmetric_within(ws.w, tol, "w");
  detail::require_nonnegative_within(ws.w, tol, "w");
  for (const auto& wp : ws.wp) detail::require_nonnegative_within(wp, tol, "w'");

  const double wscale = tol * (1.0 + ws.w.max_abs());
  for (std::size_t x = 0; x < s; ++x)
    for (std::size_t y = 0; y < s; ++y)
      if (dm.f_mat(x, y) == 0.0 && std::abs(ws.w(x, y)) > wscale)
        throw witness_error("w ≠ 0 where outputs agree",
                            "entry (" + std::to_string(x) + "," +
                                std::to_string(y) + ")");

  for (std::size_t i = 0; i < n; ++i) {
    const double pscale = tol * (1.0 + ws.wp[i].max_abs());
    for (std::size_t x = 0; x < s; ++x)
      for (std::size_t y = 0; y < s; ++y)
        if ((dm.d[i](x, y) == 0.0 || dm.f_mat(x, y) == 0.0) &&
            std::abs(ws.wp[i](x, y)) > pscale)
          throw witness_error(
              "w' ≠ 0 where positions or outputs agree",
              "position " + std::to_string(i + 1) + ", entry (" +
                  std::to_string(x) + "," + std::to_string(y) + ")");
  }

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t x = 0; x < s; ++x)
      for (std::size_t y = 0; y < s; ++y) {
        if (dm.d[i](x, y) == 0.0 || dm.f_mat(x, y) == 0.0) continue;
        const double lhs = ws.wp[i](x, y) * ws.wp[i](y, x);
        const double rhs = ws.w(x, y) * ws.w(x, y);
        if (lhs < rhs - tol * (1.0 + rhs))
          throw witness_error(
              "w'(x,y,i)·w'(y,x,i) < w(x,y)²",
              "position " + std::to_string(i + 1) + ", pair (" +
                  std::to_string(x) + "," + std::to_string(y) + ")");
      }
}

inline void validate_probabilities(const ProbabilityScheme& ps,
                                   const DifferenceMatrices& dm) {
  const std::size_t s = dm.f_mat.rows();
  const std::size_t n = dm.d.size();
  detail::require_shape(ps.p, s, n, "p");
  for (std::size_t x = 0; x < s; ++x) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (ps.p(x, i) < 0.0)
        throw witness_error("p negative",
                            "row " + std::to_string(x) + ", position " +
                                std::to_string(i + 1));
      sum += ps.p(x, i);
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw witness_error("p rows do not sum to 1",
                          "row " + std::to_string(x));
  }
}

// lambda(gamma) / max_i lambda(gamma ∘ D_i), a lower certificate.
inline double eval_spectral(const SpectralWitness& wit,
                            const DifferenceMatrices& dm,
                            double tol = kDefaultTol) {
  validate_spectral(wit, dm, tol);
  if (wit.gamma.is_zero()) throw witness_error("gamma = 0", "empty witness");
  const double num = spectral_norm(wit.gamma, tol).value;
  double den = 0.0;
  for (const auto& di : dm.d)
    den = std::max(den, spectral_norm(hadamard(wit.gamma, di), tol).value);
  if (den == 0.0)
    throw witness_error("gamma ∘ D_i all zero",
                        "witness corrupt: some pair must differ somewhere");
  return num / den;
}

namespace detail {

inline std::vector<double> weight_row_sums(const DenseMatrix& m) {
  std::vector<double> sums(m.rows(), 0.0);
  for (std::size_t x = 0; x < m.rows(); ++x)
    for (std::size_t y = 0; y < m.cols(); ++y) sums[x] += m(x, y);
  return sums;
}

}  // namespace detail

// min over f(x) ≠ f(y) and positions i, j (independently) with
// v(x,i) v(y,j) > 0 of sqrt(wt(x) wt(y) / (v(x,i) v(y,j))).
inline double eval_weighted(const WeightScheme& ws,
                            const DifferenceMatrices& dm,
                            double tol = kDefaultTol) {
  validate_weights(ws, dm, tol);
  if (ws.w.is_zero()) throw witness_error("w = 0", "empty witness");
  const std::size_t s = dm.f_mat.rows();
  const std::size_t n = dm.d.size();
  const std::vector<double> wt = detail::weight_row_sums(ws.w);
  DenseMatrix v(s, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto sums = detail::weight_row_sums(ws.wp[i]);
    for (std::size_t x = 0; x < s; ++x) v(x, i) = sums[x];
  }

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < s; ++x)
    for (std::size_t y = 0; y < s; ++y) {
      if (dm.f_mat(x, y) == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) {
        if (v(x, i) <= 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
          if (v(y, j) <= 0.0) continue;
          best = std::min(best,
                          std::sqrt(wt[x] * wt[y] / (v(x, i) * v(y, j))));
        }
      }
    }
  if (!std::isfinite(best))
    throw witness_error("no admissible weight term",
                        "witness corrupt: all v(x,i) vanish on differing pairs");
  return best;
}

// min over w(x,y) > 0 and x_i ≠ y_i of sqrt(wt(x) wt(y) / (v(x,i) v(y,i))).
inline double eval_strong_weighted(const WeightScheme& ws,
                                   const DifferenceMatrices& dm,
                                   double tol = kDefaultTol) {
  validate_weights(ws, dm, tol);
  if (ws.w.is_zero()) throw witness_error("w = 0", "empty witness");
  const std::size_t s = dm.f_mat.rows();
  const std::size_t n = dm.d.size();
  const std::vector<double> wt = detail::weight_row_sums(ws.w);
  DenseMatrix v(s, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto sums = detail::weight_row_sums(ws.wp[i]);
    for (std::size_t x = 0; x < s; ++x) v(x, i) = sums[x];
  }

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < s; ++x)
    for (std::size_t y = 0; y < s; ++y) {
      if (ws.w(x, y) <= 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) {
        if (dm.d[i](x, y) == 0.0) continue;
        if (v(x, i) <= 0.0 || v(y, i) <= 0.0)
          throw witness_error(
              "w'(x,y,i)·w'(y,x,i) < w(x,y)²",
              "zero v on a pair with positive weight");
        best =
            std::min(best, std::sqrt(wt[x] * wt[y] / (v(x, i) * v(y, i))));
      }
    }
  if (!std::isfinite(best))
    throw witness_error("no admissible weight term",
                        "witness corrupt: positive weights but no differing "
                        "position");
  return best;
}

// max over f(x) ≠ f(y) of 1 / sum_{i: x_i ≠ y_i} sqrt(p_x(i) p_y(i)), an
// upper certificate.  A zero denominator yields +inf (a useless but valid
// certificate).
inline double eval_minimax(const ProbabilityScheme& ps,
                           const DifferenceMatrices& dm) {
  validate_probabilities(ps, dm);
  if (dm.f_mat.is_zero())
    throw constant_function_error("constant function has no adversary bound");
  const std::size_t s = dm.f_mat.rows();
  const std::size_t n = dm.d.size();
  double worst = 0.0;
  for (std::size_t x = 0; x < s; ++x)
    for (std::size_t y = x + 1; y < s; ++y) {
      if (dm.f_mat(x, y) == 0.0) continue;
      double overlap = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (dm.d[i](x, y) == 1.0)
          overlap += std::sqrt(ps.p(x, i) * ps.p(y, i));
      if (overlap == 0.0) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, 1.0 / overlap);
    }
  return worst;
}

}  // namespace advbound
