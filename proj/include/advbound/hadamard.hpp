#pragma once

#include <cmath>
#include <vector>

#include "advbound/eigen.hpp"
#include "advbound/errors.hpp"
#include "advbound/matrix.hpp"

namespace advbound {

// Decomposition of a symmetric non-negative s into M with s = M ∘ M^T and
// max row norm r(M) = sqrt(lambda(s)):  M[x,y] = sqrt(s[x,y] d[y] / d[x])
// with d the principal eigenvector.  Applied per connected support component
// so that reducible matrices (where d has zero coordinates globally) still
// decompose; all-zero rows stay zero.
inline DenseMatrix mathias_decomposition(const DenseMatrix& s) {
  if (!s.is_square())
    throw input_error("mathias_decomposition: matrix not square");
  if (!s.is_symmetric())
    throw input_error("mathias_decomposition: matrix not symmetric");
  if (!s.is_nonnegative())
    throw input_error("mathias_decomposition: matrix has negative entries");

  const std::size_t n = s.rows();
  DenseMatrix m(n, n);
  if (s.is_zero()) return m;

  for (const auto& comp : detail::support_components(s)) {
    DenseMatrix sub(comp.size(), comp.size());
    bool zero_block = true;
    for (std::size_t i = 0; i < comp.size(); ++i)
      for (std::size_t j = 0; j < comp.size(); ++j) {
        sub(i, j) = s(comp[i], comp[j]);
        zero_block = zero_block && sub(i, j) == 0.0;
      }
    if (zero_block) continue;  // isolated vertex with no self-loop

    const SpectralResult top = spectral_norm(sub, 1e-11);
    std::vector<double> d = top.vector;
    // The row norms of m are (s d)[x] / d[x]; polish the ratios so they do
    // not drift above lambda on small coordinates.
    detail::polish_perron(sub, d);
    for (std::size_t i = 0; i < comp.size(); ++i) {
      if (d[i] > 0.0) continue;
      bool row_nonzero = false;
      for (std::size_t j = 0; j < comp.size(); ++j)
        row_nonzero = row_nonzero || sub(i, j) != 0.0;
      if (row_nonzero)
        throw numeric_error(
            "mathias_decomposition: principal eigenvector vanished on a "
            "nonzero row");
    }
    for (std::size_t i = 0; i < comp.size(); ++i)
      for (std::size_t j = 0; j < comp.size(); ++j) {
        if (sub(i, j) == 0.0) continue;
        m(comp[i], comp[j]) = std::sqrt(sub(i, j) * d[j] / d[i]);
      }
  }
  return m;
}

// B = max over (x,y) with (m ∘ nmat)[x,y] > 0 of r_x(m) * c_y(nmat), an
// upper bound on lambda(m ∘ nmat).  Returns 0 when the product is zero.
inline double conditional_norm_bound(const DenseMatrix& m,
                                     const DenseMatrix& nmat) {
  if (m.rows() != nmat.rows() || m.cols() != nmat.cols())
    throw input_error("conditional_norm_bound: shape mismatch");
  if (!m.is_nonnegative() || !nmat.is_nonnegative())
    throw input_error("conditional_norm_bound: negative entries");
  const DenseMatrix s = hadamard(m, nmat);
  if (!s.is_square())
    throw input_error("conditional_norm_bound: product not square");
  const std::size_t n = s.rows();
  double asym = 0.0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y)
      asym = std::max(asym, std::abs(s(x, y) - s(y, x)));
  if (asym > 1e-12 * (1.0 + s.max_abs()))
    throw input_error("conditional_norm_bound: product not symmetric");
  if (s.is_zero()) return 0.0;

  std::vector<double> r(n), c(n);
  for (std::size_t x = 0; x < n; ++x) r[x] = row_norm(m, x);
  for (std::size_t y = 0; y < n; ++y) c[y] = col_norm(nmat, y);
  double b = 0.0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (s(x, y) > 0.0) b = std::max(b, r[x] * c[y]);
  return b;
}

}  // namespace advbound
