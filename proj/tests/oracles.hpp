// Independent reference implementations used only by the tests.  These are
// deliberately written with different algorithms than the library so that
// agreement between the two routes is meaningful.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "advbound/matrix.hpp"

namespace oracles {

// Symmetric eigenvalues via Householder tridiagonalization followed by
// implicit-shift QL.  (The library uses cyclic Jacobi and power iteration.)
inline std::vector<double> sym_eigenvalues(advbound::DenseMatrix a) {
  const std::size_t n = a.rows();
  std::vector<double> d(n, 0.0), e(n, 0.0);
  if (n == 0) return d;

  // Householder reduction to tridiagonal form (values only).
  for (std::size_t i = n; i-- > 1;) {
    const std::size_t l = i - 1;
    double h = 0.0;
    if (l > 0) {
      double scale = 0.0;
      for (std::size_t k = 0; k <= l; ++k) scale += std::abs(a(i, k));
      if (scale == 0.0) {
        e[i] = a(i, l);
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          a(i, k) /= scale;
          h += a(i, k) * a(i, k);
        }
        double f = a(i, l);
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        a(i, l) = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
          for (std::size_t k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
          e[j] = g / h;
          f += e[j] * a(i, j);
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = a(i, j);
          e[j] = g = e[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k)
            a(j, k) -= f * e[k] + g * a(i, k);
        }
      }
    } else {
      e[i] = a(i, l);
    }
    d[i] = h;
  }
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);

  // Implicit-shift QL on the tridiagonal (d, e).
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-300 || std::abs(e[m]) <= 1e-16 * dd) break;
      }
      if (m != l) {
        if (++iter > 50) break;
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        for (std::size_t i = m; i-- > l;) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (r == 0.0 && m > l + 1) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  std::sort(d.begin(), d.end());
  return d;
}

inline double sym_max_eigenvalue(const advbound::DenseMatrix& a) {
  const std::vector<double> ev = sym_eigenvalues(a);
  return ev.empty() ? 0.0 : ev.back();
}

inline double sym_min_eigenvalue(const advbound::DenseMatrix& a) {
  const std::vector<double> ev = sym_eigenvalues(a);
  return ev.empty() ? 0.0 : ev.front();
}

}  // namespace oracles

#include <functional>

#include "advbound/function.hpp"

namespace oracles {

// Certificates straight from the definition: subset I certifies x when every
// y in S that agrees with x on I has the same output.  Subsets are tried in
// (size, lexicographic) order over explicit position lists.
inline std::vector<std::vector<int>> brute_certificates(
    const advbound::FunctionSpec& spec) {
  const int n = spec.n();
  std::vector<std::vector<int>> subsets;
  for (std::uint32_t bits = 0; bits < (std::uint32_t{1} << n); ++bits) {
    std::vector<int> subset;
    for (int i = 0; i < n; ++i)
      if (bits & (std::uint32_t{1} << i)) subset.push_back(i);
    subsets.push_back(std::move(subset));
  }
  std::sort(subsets.begin(), subsets.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a < b;
            });

  std::vector<std::vector<int>> certs(spec.size());
  for (std::size_t x = 0; x < spec.size(); ++x) {
    for (const auto& subset : subsets) {
      bool certifies = true;
      for (std::size_t y = 0; y < spec.size() && certifies; ++y) {
        bool agrees = true;
        for (int i : subset)
          if (spec.input(y)[static_cast<std::size_t>(i)] !=
              spec.input(x)[static_cast<std::size_t>(i)]) {
            agrees = false;
            break;
          }
        if (agrees && spec.output(y) != spec.output(x)) certifies = false;
      }
      if (certifies) {
        certs[x] = subset;
        break;
      }
    }
  }
  return certs;
}

// Exhaustive lower certificate: try every {0,1}-valued symmetric matrix
// supported on the output-difference pairs and keep the best spectral ratio.
// Only usable when the support has few pairs (2^pairs candidates).
inline double binary_gamma_lower(const advbound::DifferenceMatrices& dm) {
  const std::size_t s = dm.f_mat.rows();
  std::vector<std::pair<std::size_t, std::size_t>> support;
  for (std::size_t x = 0; x < s; ++x)
    for (std::size_t y = x + 1; y < s; ++y)
      if (dm.f_mat(x, y) != 0.0) support.emplace_back(x, y);

  double best = 0.0;
  for (std::uint32_t mask = 1;
       mask < (std::uint32_t{1} << support.size()); ++mask) {
    advbound::DenseMatrix gamma(s, s);
    for (std::size_t k = 0; k < support.size(); ++k)
      if (mask & (std::uint32_t{1} << k)) {
        gamma(support[k].first, support[k].second) = 1.0;
        gamma(support[k].second, support[k].first) = 1.0;
      }
    const double num = sym_max_eigenvalue(gamma);
    double den = 0.0;
    for (const auto& di : dm.d) {
      advbound::DenseMatrix masked(s, s);
      for (std::size_t x = 0; x < s; ++x)
        for (std::size_t y = 0; y < s; ++y)
          masked(x, y) = gamma(x, y) * di(x, y);
      den = std::max(den, sym_max_eigenvalue(masked));
    }
    if (den > 0.0) best = std::max(best, num / den);
  }
  return best;
}

// Exhaustive upper certificate: assign every input a query distribution from
// the 1/steps simplex grid and maximize the worst-case overlap
// min over differing pairs of sum_i sqrt(p_x(i) p_y(i)).  The certificate is
// the reciprocal of that optimum.  Branch and bound over rows.
inline double grid_probability_upper(const advbound::DifferenceMatrices& dm,
                                     int steps) {
  const std::size_t s = dm.f_mat.rows();
  const std::size_t n = dm.d.size();

  std::vector<std::vector<double>> dists;
  std::vector<int> parts(n, 0);
  const std::function<void(std::size_t, int)> fill = [&](std::size_t pos,
                                                         int left) {
    if (pos + 1 == n) {
      parts[pos] = left;
      std::vector<double> p(n);
      for (std::size_t i = 0; i < n; ++i)
        p[i] = static_cast<double>(parts[i]) / steps;
      dists.push_back(std::move(p));
      return;
    }
    for (int k = 0; k <= left; ++k) {
      parts[pos] = k;
      fill(pos + 1, left - k);
    }
  };
  fill(0, steps);

  double best_min = 0.0;
  std::vector<const std::vector<double>*> pick(s, nullptr);
  const std::function<void(std::size_t, double)> assign =
      [&](std::size_t x, double cur_min) {
        if (cur_min <= best_min) return;
        if (x == s) {
          best_min = cur_min;
          return;
        }
        for (const auto& d : dists) {
          pick[x] = &d;
          double m = cur_min;
          for (std::size_t y = 0; y < x && m > best_min; ++y) {
            if (dm.f_mat(x, y) == 0.0) continue;
            double overlap = 0.0;
            for (std::size_t i = 0; i < n; ++i)
              if (dm.d[i](x, y) != 0.0)
                overlap += std::sqrt(d[i] * (*pick[y])[i]);
            m = std::min(m, overlap);
          }
          if (m > best_min) assign(x + 1, m);
        }
      };
  assign(0, std::numeric_limits<double>::infinity());
  return best_min > 0.0 ? 1.0 / best_min
                        : std::numeric_limits<double>::infinity();
}

}  // namespace oracles
