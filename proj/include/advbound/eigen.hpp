#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "advbound/errors.hpp"
#include "advbound/matrix.hpp"

namespace advbound {

inline constexpr double kDefaultTol = 1e-9;

// Spectral norm of a symmetric non-negative matrix together with a Perron
// eigenvector.  `vector` has unit l2 norm and non-negative entries;
// `residual` is |A v - value v| for the returned pair.
struct SpectralResult {
  double value = 0.0;
  std::vector<double> vector;
  double residual = 0.0;
};

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  DenseMatrix vectors;         // column k pairs with values[k]
};

namespace detail {

// One cyclic Jacobi pass over all (p,q) pairs.  Returns the off-diagonal
// Frobenius norm before the sweep.
inline double jacobi_sweep(DenseMatrix& a, DenseMatrix& v) {
  const std::size_t n = a.rows();
  double off = 0.0;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
  off = std::sqrt(2.0 * off);
  if (off == 0.0) return 0.0;

  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      const double apq = a(p, q);
      if (apq == 0.0) continue;
      const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
      double t;
      if (std::abs(theta) > 1e150) {
        t = 1.0 / (2.0 * theta);
      } else {
        t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
      }
      const double c = 1.0 / std::sqrt(t * t + 1.0);
      const double s = t * c;
      const double tau = s / (1.0 + c);

      const double app = a(p, p), aqq = a(q, q);
      a(p, p) = app - t * apq;
      a(q, q) = aqq + t * apq;
      a(p, q) = 0.0;
      a(q, p) = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == p || k == q) continue;
        const double akp = a(k, p), akq = a(k, q);
        a(k, p) = akp - s * (akq + tau * akp);
        a(p, k) = a(k, p);
        a(k, q) = akq + s * (akp - tau * akq);
        a(q, k) = a(k, q);
      }
      for (std::size_t k = 0; k < n; ++k) {
        const double vkp = v(k, p), vkq = v(k, q);
        v(k, p) = vkp - s * (vkq + tau * vkp);
        v(k, q) = vkq + s * (vkp - tau * vkq);
      }
    }
  }
  return off;
}

// LU factorization with partial pivoting; used by the inverse-iteration
// polish below.  Returns false only for an exactly singular pivot column.
struct LuFactors {
  DenseMatrix lu;
  std::vector<std::size_t> perm;
  bool ok = false;
};

inline LuFactors lu_factor(DenseMatrix a) {
  const std::size_t n = a.rows();
  LuFactors f;
  f.perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(a(k, k));
    for (std::size_t r = k + 1; r < n; ++r) {
      if (std::abs(a(r, k)) > best) {
        best = std::abs(a(r, k));
        piv = r;
      }
    }
    if (best == 0.0) {
      f.ok = false;
      f.lu = std::move(a);
      return f;
    }
    if (piv != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(piv, c));
      std::swap(f.perm[k], f.perm[piv]);
    }
    for (std::size_t r = k + 1; r < n; ++r) {
      a(r, k) /= a(k, k);
      const double l = a(r, k);
      if (l == 0.0) continue;
      for (std::size_t c = k + 1; c < n; ++c) a(r, c) -= l * a(k, c);
    }
  }
  f.ok = true;
  f.lu = std::move(a);
  return f;
}

inline std::vector<double> lu_solve(const LuFactors& f,
                                    const std::vector<double>& b) {
  const std::size_t n = f.lu.rows();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
    x[i] /= f.lu(i, i);
  }
  return x;
}

// Connected components of the nonzero support graph of a square matrix.
inline std::vector<std::vector<std::size_t>> support_components(
    const DenseMatrix& a) {
  const std::size_t n = a.rows();
  std::vector<int> label(n, -1);
  std::vector<std::vector<std::size_t>> comps;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] >= 0) continue;
    std::vector<std::size_t> stack{s};
    label[s] = static_cast<int>(comps.size());
    std::vector<std::size_t> comp;
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      comp.push_back(x);
      for (std::size_t y = 0; y < n; ++y) {
        if (label[y] < 0 && (a(x, y) != 0.0 || a(y, x) != 0.0)) {
          label[y] = static_cast<int>(comps.size());
          stack.push_back(y);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

struct PerronPair {
  double value = 0.0;
  std::vector<double> vector;
  double residual = 0.0;
};

// Top eigenpair of a symmetric non-negative matrix restricted to one
// connected support component.  Shifted power iteration followed by an
// inverse-iteration polish; the shift keeps the Perron eigenvalue the
// unique dominant one even for bipartite components.
inline PerronPair perron_pair(const DenseMatrix& b, double target_residual,
                              std::size_t power_cap) {
  const std::size_t n = b.rows();
  PerronPair out;
  out.vector.assign(n, 1.0 / std::sqrt(static_cast<double>(n)));

  double shift = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    double rs = 0.0;
    for (std::size_t c = 0; c < n; ++c) rs += b(r, c);
    shift = std::max(shift, rs);
  }
  if (shift == 0.0) return out;  // zero block

  std::vector<double>& v = out.vector;
  double rho = 0.0, res = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < power_cap; ++it) {
    std::vector<double> bv = matvec(b, v);
    rho = dot(v, bv);
    res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = bv[i] - rho * v[i];
      res += d * d;
    }
    res = std::sqrt(res);
    if (res <= target_residual) break;
    for (std::size_t i = 0; i < n; ++i) bv[i] += shift * v[i];
    const double nrm = norm2(bv);
    if (nrm == 0.0) break;
    for (std::size_t i = 0; i < n; ++i) v[i] = bv[i] / nrm;
  }

  // Inverse iteration with a shift just above the Rayleigh quotient pins the
  // residual down even when the top eigenvalues are nearly degenerate.
  for (int attempt = 0; attempt < 3 && res > target_residual; ++attempt) {
    const double sigma =
        rho + std::max({res, 1e-14 * (1.0 + rho), 1e-300}) * (1.0 + attempt);
    DenseMatrix shifted = b;
    for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= sigma;
    const LuFactors f = lu_factor(shifted);
    if (!f.ok) continue;
    std::vector<double> w = v;
    for (int step = 0; step < 4; ++step) {
      w = lu_solve(f, w);
      const double nrm = norm2(w);
      if (!(nrm > 0.0) || !std::isfinite(nrm)) {
        w = v;
        break;
      }
      for (double& wi : w) wi /= nrm;
    }
    const std::vector<double> bw = matvec(b, w);
    const double rho_w = dot(w, bw);
    double res_w = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = bw[i] - rho_w * w[i];
      res_w += d * d;
    }
    res_w = std::sqrt(res_w);
    if (res_w < res) {
      v = w;
      rho = rho_w;
      res = res_w;
    }
  }

  out.value = rho;
  out.residual = res;
  return out;
}

// Componentwise polish of a Perron vector.  A small 2-norm residual still
// leaves the ratios (m v)[x] / v[x] far from lambda on coordinates that sit
// orders of magnitude below the rest, and some constructions divide by those
// coordinates.  Inverse iteration shifted just above the Collatz-Wielandt
// upper bound keeps iterates positive and drives every ratio to a common
// value.  Best effort: returns the final bracket midpoint, v stays unit norm.
inline double polish_perron(const DenseMatrix& m, std::vector<double>& v) {
  const std::size_t n = m.rows();
  double rho = 0.0;
  for (int round = 0;; ++round) {
    const std::vector<double> mv = matvec(m, v);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    bool open = false;
    for (std::size_t x = 0; x < n; ++x) {
      if (v[x] > 0.0) {
        const double ratio = mv[x] / v[x];
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      } else if (mv[x] != 0.0) {
        open = true;  // support leaks outside the current iterate
      }
    }
    if (hi <= 0.0) return 0.0;
    rho = 0.5 * (lo + hi);
    if (round == 8 || (!open && hi - lo <= 1e-12 * hi)) return rho;

    DenseMatrix shifted(n, n);
    const double sigma = hi * (1.0 + 1e-12);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        shifted(r, c) = (r == c ? sigma : 0.0) - m(r, c);
    const LuFactors f = lu_factor(shifted);
    if (!f.ok) return rho;
    std::vector<double> w = lu_solve(f, v);
    for (double& wi : w) wi = std::max(wi, 0.0);
    const double nrm = norm2(w);
    if (!(nrm > 0.0) || !std::isfinite(nrm)) return rho;
    for (std::size_t x = 0; x < n; ++x) v[x] = w[x] / nrm;
  }
}

}  // namespace detail

// Full symmetric eigendecomposition by cyclic Jacobi rotations.
inline EigenDecomposition jacobi_eigen(const DenseMatrix& m,
                                       std::size_t max_sweeps = 60) {
  if (!m.is_square()) throw input_error("jacobi_eigen: matrix not square");
  if (!m.is_symmetric()) throw input_error("jacobi_eigen: matrix not symmetric");
  const std::size_t n = m.rows();
  DenseMatrix a = m;
  DenseMatrix v = DenseMatrix::identity(n);
  const double scale = m.max_abs();
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    const double off = detail::jacobi_sweep(a, v);
    if (off <= 1e-15 * (1.0 + scale) * n) break;
  }

  EigenDecomposition dec;
  dec.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) dec.values[i] = a(i, i);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return dec.values[x] < dec.values[y];
  });
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = DenseMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = dec.values[order[k]];
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

inline double min_eigenvalue(const DenseMatrix& m) {
  if (m.rows() == 0) return 0.0;
  return jacobi_eigen(m).values.front();
}

// PSD test with a scaled tolerance: PSD iff lambda_min >= -tol*(1+max|m|).
inline std::pair<bool, double> psd_check(const DenseMatrix& m,
                                         double tol = kDefaultTol) {
  if (!m.is_square()) throw input_error("psd_check: matrix not square");
  if (!m.is_symmetric()) throw input_error("psd_check: matrix not symmetric");
  const double lo = min_eigenvalue(m);
  return {lo >= -tol * (1.0 + m.max_abs()), lo};
}

// Spectral norm with Perron eigenvector for a symmetric non-negative matrix.
// Works per connected support component, so reducible matrices still get a
// non-negative eigenvector.
inline SpectralResult spectral_norm(const DenseMatrix& m,
                                    double tol = kDefaultTol) {
  if (!m.is_square()) throw input_error("spectral_norm: matrix not square");
  if (!m.is_symmetric())
    throw input_error("spectral_norm: matrix not symmetric");
  if (!m.is_nonnegative())
    throw input_error("spectral_norm: matrix has negative entries");
  if (!m.is_finite()) throw input_error("spectral_norm: non-finite entries");

  const std::size_t n = m.rows();
  SpectralResult out;
  out.vector.assign(n, 0.0);
  if (n == 0) return out;
  if (m.is_zero()) {
    out.vector[0] = 1.0;
    return out;
  }

  const double scale = 1.0 + m.max_abs();
  const double target = 0.25 * tol * scale;

  const auto comps = detail::support_components(m);
  double best_value = -1.0;
  std::vector<double> best_vec;
  std::vector<std::size_t> best_comp;
  for (const auto& comp : comps) {
    DenseMatrix sub(comp.size(), comp.size());
    for (std::size_t i = 0; i < comp.size(); ++i)
      for (std::size_t j = 0; j < comp.size(); ++j)
        sub(i, j) = m(comp[i], comp[j]);
    const auto pair = detail::perron_pair(sub, target, 200000);
    if (pair.value > best_value) {
      best_value = pair.value;
      best_vec = pair.vector;
      best_comp = comp;
    }
  }

  // Orient and clean up the component vector: the Perron vector of an
  // irreducible non-negative block is strictly positive, so any residual
  // negative entries are iteration noise.
  double sum = 0.0;
  for (double x : best_vec) sum += x;
  if (sum < 0.0)
    for (double& x : best_vec) x = -x;
  double vmax = 0.0;
  for (double x : best_vec) vmax = std::max(vmax, std::abs(x));
  for (double& x : best_vec)
    if (x < 0.0 && -x <= 1e-10 * vmax) x = 0.0;

  for (std::size_t i = 0; i < best_comp.size(); ++i)
    out.vector[best_comp[i]] = best_vec[i];
  const double nrm = norm2(out.vector);
  if (nrm > 0.0)
    for (double& x : out.vector) x /= nrm;

  out.value = std::max(0.0, best_value);
  const std::vector<double> mv = matvec(m, out.vector);
  double res = 0.0;
  bool nonneg = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = mv[i] - out.value * out.vector[i];
    res += d * d;
    nonneg = nonneg && out.vector[i] >= 0.0;
  }
  out.residual = std::sqrt(res);

  if (out.residual > tol * scale || !nonneg) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "spectral_norm: residual %.3e above tolerance %.3e",
                  out.residual, tol * scale);
    throw numeric_error(buf);
  }
  return out;
}

// Lower-triangular X with m = X X^T.  Eigenvalues of m must be >= -tol
// (scaled); small negative ones are absorbed by a diagonal shift before
// factorizing.  Indefiniteness beyond the tolerance reports the most
// negative pivot.
inline DenseMatrix cholesky(const DenseMatrix& m, double tol = kDefaultTol) {
  if (!m.is_square()) throw input_error("cholesky: matrix not square");
  if (!m.is_symmetric()) throw input_error("cholesky: matrix not symmetric");
  const std::size_t n = m.rows();
  const double scale = 1.0 + m.max_abs();
  const double eps = tol * scale;

  const double lo = n ? min_eigenvalue(m) : 0.0;
  if (lo < -eps) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "cholesky: matrix indefinite, most negative pivot %.6e", lo);
    throw numeric_error(buf);
  }

  DenseMatrix a = m;
  if (lo < 0.0)
    for (std::size_t i = 0; i < n; ++i) a(i, i) -= lo;

  DenseMatrix x(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    double p = a(k, k);
    for (std::size_t j = 0; j < k; ++j) p -= x(k, j) * x(k, j);
    if (p < -eps) {
      char buf[128];
      std::snprintf(buf, sizeof(buf),
                    "cholesky: matrix indefinite, most negative pivot %.6e", p);
      throw numeric_error(buf);
    }
    if (p <= eps * 1e-4) {
      // Semidefinite pivot: for a PSD matrix the rest of this column is
      // zero up to noise, so the column is dropped.
      x(k, k) = 0.0;
      continue;
    }
    x(k, k) = std::sqrt(p);
    for (std::size_t r = k + 1; r < n; ++r) {
      double s = a(r, k);
      for (std::size_t j = 0; j < k; ++j) s -= x(r, j) * x(k, j);
      x(r, k) = s / x(k, k);
    }
  }
  return x;
}

}  // namespace advbound
