#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "advbound/eigen.hpp"
#include "advbound/errors.hpp"
#include "advbound/function.hpp"
#include "advbound/matrix.hpp"

namespace advbound {

inline constexpr double kDefaultSdpTol = 1e-7;
inline constexpr std::size_t kDefaultSdpMaxS = 64;

struct SmmResiduals {
  double max_psd_violation = 0.0;
  double max_diag_residual = 0.0;
  double min_coverage_slack = 0.0;
};

struct GsaResiduals {
  double min_eigenvalue = 0.0;
  double normalization_residual = 0.0;
};

// Primal side: maximize mu subject to R_i PSD, sum_i R_i ∘ I = I and
// sum_i R_i ∘ D_i >= mu F.  The reported mu is recomputed from the stored
// R_i, never trusted from the solver state.
struct SmmSolution {
  double mu = 0.0;
  std::vector<DenseMatrix> r;
  SmmResiduals residuals;
  bool converged = true;
  double gap = 0.0;  // paired duality gap achieved by the solve
};

// Dual side: minimize tr Delta subject to Z >= 0 on F's support, Z·F = 1 and
// Delta - Z ∘ D_i PSD for every i.
struct GsaSolution {
  double mu = 0.0;
  DenseMatrix z;
  std::vector<double> delta;
  GsaResiduals residuals;
  bool converged = true;
  double gap = 0.0;
};

struct AdversaryPair {
  SmmSolution smm;
  GsaSolution gsa;
  bool converged = true;
  double gap = 0.0;
};

struct SmmVerification {
  bool accepted = true;
  SmmResiduals residuals;
  std::string first_violation;
};

struct GsaVerification {
  bool accepted = true;
  GsaResiduals residuals;
  std::string first_violation;
};

namespace detail {

// Plain Cholesky without tolerance logic; false on a non-positive pivot.
// Used inside the solver where iterates must stay strictly feasible.
inline bool try_cholesky(const DenseMatrix& a, DenseMatrix& l) {
  const std::size_t n = a.rows();
  l = DenseMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    double p = a(k, k);
    for (std::size_t j = 0; j < k; ++j) p -= l(k, j) * l(k, j);
    if (!(p > 0.0)) return false;
    l(k, k) = std::sqrt(p);
    for (std::size_t r = k + 1; r < n; ++r) {
      double s = a(r, k);
      for (std::size_t j = 0; j < k; ++j) s -= l(r, j) * l(k, j);
      l(r, k) = s / l(k, k);
    }
  }
  return true;
}

inline double chol_logdet(const DenseMatrix& l) {
  double s = 0.0;
  for (std::size_t k = 0; k < l.rows(); ++k) s += std::log(l(k, k));
  return 2.0 * s;
}

// (L L^T)^{-1} via forward/back substitution per unit column.
inline DenseMatrix chol_inverse(const DenseMatrix& l) {
  const std::size_t n = l.rows();
  DenseMatrix inv(n, n);
  std::vector<double> col(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = i == c ? 1.0 : 0.0;
      for (std::size_t j = 0; j < i; ++j) s -= l(i, j) * col[j];
      col[i] = s / l(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = col[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= l(j, i) * col[j];
      col[i] = s / l(i, i);
    }
    for (std::size_t i = 0; i < n; ++i) inv(i, c) = col[i];
  }
  // symmetrize against substitution round-off
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = r + 1; c < n; ++c) {
      const double v = 0.5 * (inv(r, c) + inv(c, r));
      inv(r, c) = v;
      inv(c, r) = v;
    }
  return inv;
}

struct SupportPair {
  std::size_t x, y;            // x < y, F[x,y] = 1
  std::vector<std::size_t> positions;  // i with x_i != y_i
};

// Central-path state for the barrier
//   phi(z, delta) = t sum(delta) - sum_i log det A_i - sum_e log z_e,
//   A_i = Delta - Z ∘ D_i,  subject to 2 sum_e z_e = 1.
class BarrierSolver {
 public:
  BarrierSolver(const DifferenceMatrices& dm, double tol)
      : dm_(dm), tol_(tol), m_(dm.f_mat.rows()), n_(dm.d.size()) {
    for (std::size_t x = 0; x < m_; ++x)
      for (std::size_t y = x + 1; y < m_; ++y) {
        if (dm.f_mat(x, y) == 0.0) continue;
        SupportPair pr{x, y, {}};
        for (std::size_t i = 0; i < n_; ++i)
          if (dm.d[i](x, y) == 1.0) pr.positions.push_back(i);
        pairs_.push_back(std::move(pr));
      }
    p_ = pairs_.size();
  }

  AdversaryPair run() {
    initialize();
    double t = 1.0;
    bool converged = false;
    // The measured primal/dual gap alone can dip negative from extraction
    // round-off at extreme t, so convergence also requires the central-path
    // bound (barrier degree / t) to reach the target.
    const double degree = static_cast<double>(n_ * m_ + p_);
    double best_gap = std::numeric_limits<double>::infinity();
    std::vector<double> best_z, best_delta;
    double best_t = 1.0;
    for (int outer = 0; outer < 60; ++outer) {
      if (!center(t)) break;
      const double gap = measure_gap();
      if (gap >= 0.0 && gap < best_gap) {
        best_gap = gap;
        best_z = z_;
        best_delta = delta_;
        best_t = t_last_;
      }
      const double target = tol_ * (1.0 + std::max(mu_primal_, 0.0));
      if (degree / t <= target && gap <= target) {
        converged = true;
        break;
      }
      if (t > 1e13) break;
      t *= 5.0;
    }
    if (!converged && !best_z.empty()) {
      z_ = best_z;
      delta_ = best_delta;
      t_last_ = best_t;
    }
    return extract(converged);
  }

 private:
  void initialize() {
    z_.assign(p_, 1.0 / (2.0 * static_cast<double>(p_)));
    DenseMatrix zm = z_matrix();
    double lmax = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const DenseMatrix zd = hadamard(zm, dm_.d[i]);
      if (!zd.is_zero()) lmax = std::max(lmax, spectral_norm(zd, 1e-9).value);
    }
    delta_.assign(m_, lmax + 1.0);
  }

  DenseMatrix z_matrix() const {
    DenseMatrix zm(m_, m_);
    for (std::size_t e = 0; e < p_; ++e) {
      zm(pairs_[e].x, pairs_[e].y) = z_[e];
      zm(pairs_[e].y, pairs_[e].x) = z_[e];
    }
    return zm;
  }

  // A_i factorizations for a candidate state; false if any is not PD.
  bool factorize(const std::vector<double>& z, const std::vector<double>& dl,
                 std::vector<DenseMatrix>& chol) const {
    DenseMatrix zm(m_, m_);
    for (std::size_t e = 0; e < p_; ++e) {
      zm(pairs_[e].x, pairs_[e].y) = z[e];
      zm(pairs_[e].y, pairs_[e].x) = z[e];
    }
    chol.assign(n_, DenseMatrix());
    DenseMatrix a(m_, m_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t r = 0; r < m_; ++r)
        for (std::size_t c = 0; c < m_; ++c)
          a(r, c) = (r == c ? dl[r] : 0.0) - zm(r, c) * dm_.d[i](r, c);
      if (!try_cholesky(a, chol[i])) return false;
    }
    return true;
  }

  double barrier_value(double t, const std::vector<double>& z,
                       const std::vector<double>& dl,
                       const std::vector<DenseMatrix>& chol) const {
    double phi = 0.0;
    for (double d : dl) phi += t * d;
    for (const auto& l : chol) phi -= chol_logdet(l);
    for (double ze : z) phi -= std::log(ze);
    return phi;
  }

  // One Newton centering at parameter t; returns false if the KKT system
  // becomes unsolvable before reaching the decrement target.
  bool center(double t) {
    const std::size_t nv = p_ + m_;
    t_last_ = t;
    for (int step = 0; step < 200; ++step) {
      std::vector<DenseMatrix> chol;
      if (!factorize(z_, delta_, chol)) return false;
      std::vector<DenseMatrix> b(n_);
      for (std::size_t i = 0; i < n_; ++i) b[i] = chol_inverse(chol[i]);

      std::vector<double> g(nv, 0.0);
      for (std::size_t e = 0; e < p_; ++e) {
        double s = 0.0;
        for (std::size_t i : pairs_[e].positions)
          s += b[i](pairs_[e].x, pairs_[e].y);
        g[e] = 2.0 * s - 1.0 / z_[e];
      }
      for (std::size_t x = 0; x < m_; ++x) {
        double s = 0.0;
        for (std::size_t i = 0; i < n_; ++i) s += b[i](x, x);
        g[p_ + x] = t - s;
      }

      DenseMatrix kkt(nv + 1, nv + 1);
      for (std::size_t e = 0; e < p_; ++e)
        for (std::size_t f = e; f < p_; ++f) {
          double s = 0.0;
          const auto& pe = pairs_[e];
          const auto& pf = pairs_[f];
          for (std::size_t i : pe.positions) {
            if (dm_.d[i](pf.x, pf.y) == 0.0) continue;
            s += 2.0 * (b[i](pe.x, pf.y) * b[i](pe.y, pf.x) +
                        b[i](pe.x, pf.x) * b[i](pe.y, pf.y));
          }
          if (e == f) s += 1.0 / (z_[e] * z_[e]);
          kkt(e, f) = s;
          kkt(f, e) = s;
        }
      for (std::size_t e = 0; e < p_; ++e)
        for (std::size_t x = 0; x < m_; ++x) {
          double s = 0.0;
          for (std::size_t i : pairs_[e].positions)
            s += b[i](pairs_[e].x, x) * b[i](x, pairs_[e].y);
          kkt(e, p_ + x) = -2.0 * s;
          kkt(p_ + x, e) = -2.0 * s;
        }
      for (std::size_t x = 0; x < m_; ++x)
        for (std::size_t y = x; y < m_; ++y) {
          double s = 0.0;
          for (std::size_t i = 0; i < n_; ++i) s += b[i](x, y) * b[i](x, y);
          kkt(p_ + x, p_ + y) = s;
          kkt(p_ + y, p_ + x) = s;
        }
      for (std::size_t e = 0; e < p_; ++e) {
        kkt(e, nv) = 2.0;
        kkt(nv, e) = 2.0;
      }

      double cres = -1.0;
      for (double ze : z_) cres += 2.0 * ze;
      std::vector<double> rhs(nv + 1);
      for (std::size_t k = 0; k < nv; ++k) rhs[k] = -g[k];
      rhs[nv] = -cres;

      const LuFactors lu = lu_factor(kkt);
      if (!lu.ok) return false;
      const std::vector<double> sol = lu_solve(lu, rhs);

      double slope = 0.0;
      for (std::size_t k = 0; k < nv; ++k) slope += g[k] * sol[k];
      const double decrement_sq = -slope;
      if (decrement_sq <= 2e-13 && std::abs(cres) < 1e-12) return true;

      const double phi0 = barrier_value(t, z_, delta_, chol);
      double alpha = 1.0;
      std::vector<double> zc(p_), dc(m_);
      std::vector<DenseMatrix> chol_c;
      for (;;) {
        bool positive = true;
        for (std::size_t e = 0; e < p_; ++e) {
          zc[e] = z_[e] + alpha * sol[e];
          positive = positive && zc[e] > 0.0;
        }
        for (std::size_t x = 0; x < m_; ++x) dc[x] = delta_[x] + alpha * sol[p_ + x];
        if (positive && factorize(zc, dc, chol_c)) {
          const double phi1 = barrier_value(t, zc, dc, chol_c);
          if (phi1 <= phi0 + 0.25 * alpha * slope || alpha < 1e-14) break;
        }
        alpha *= 0.5;
        if (alpha < 1e-18) return true;  // stalled; accept current point
      }
      z_ = zc;
      delta_ = dc;
    }
    return true;
  }

  // Corrected primal matrices from the current dual point: R_i = A_i^{-1}/t
  // rescaled so the diagonal constraint holds exactly.
  bool primal_from_dual(std::vector<DenseMatrix>& r, double& mu) const {
    std::vector<DenseMatrix> chol;
    if (!factorize(z_, delta_, chol)) return false;
    r.assign(n_, DenseMatrix());
    for (std::size_t i = 0; i < n_; ++i) {
      r[i] = chol_inverse(chol[i]);
      r[i] *= 1.0 / t_last_;
    }
    std::vector<double> scale(m_);
    for (std::size_t x = 0; x < m_; ++x) {
      double cx = 0.0;
      for (std::size_t i = 0; i < n_; ++i) cx += r[i](x, x);
      if (!(cx > 0.0)) return false;
      scale[x] = 1.0 / std::sqrt(cx);
    }
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t x = 0; x < m_; ++x)
        for (std::size_t y = 0; y < m_; ++y)
          r[i](x, y) *= scale[x] * scale[y];

    mu = std::numeric_limits<double>::infinity();
    for (const auto& pr : pairs_) {
      double cov = 0.0;
      for (std::size_t i : pr.positions) cov += r[i](pr.x, pr.y);
      mu = std::min(mu, cov);
    }
    return true;
  }

  double measure_gap() {
    std::vector<DenseMatrix> r;
    double mu = 0.0;
    if (!primal_from_dual(r, mu)) {
      mu_primal_ = 0.0;
      return std::numeric_limits<double>::infinity();
    }
    mu_primal_ = mu;
    double tr = 0.0;
    for (double d : delta_) tr += d;
    return tr - mu;
  }

  AdversaryPair extract(bool converged) const {
    AdversaryPair out;
    out.converged = converged;

    GsaSolution gsa;
    gsa.z = z_matrix();
    gsa.delta = delta_;
    gsa.mu = 0.0;
    for (double d : delta_) gsa.mu += d;
    double zf = -1.0;
    for (double ze : z_) zf += 2.0 * ze;
    gsa.residuals.normalization_residual = std::abs(zf);
    double lo = std::numeric_limits<double>::infinity();
    DenseMatrix a(m_, m_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t r = 0; r < m_; ++r)
        for (std::size_t c = 0; c < m_; ++c)
          a(r, c) = (r == c ? delta_[r] : 0.0) - gsa.z(r, c) * dm_.d[i](r, c);
      lo = std::min(lo, min_eigenvalue(a));
    }
    gsa.residuals.min_eigenvalue = lo;

    SmmSolution smm;
    double mu = 0.0;
    if (primal_from_dual(smm.r, mu)) {
      smm.mu = mu;
      double psd = 0.0;
      for (const auto& ri : smm.r)
        psd = std::max(psd, std::max(0.0, -min_eigenvalue(ri)));
      smm.residuals.max_psd_violation = psd;
      double diag = 0.0;
      for (std::size_t x = 0; x < m_; ++x) {
        double cx = 0.0;
        for (const auto& ri : smm.r) cx += ri(x, x);
        diag = std::max(diag, std::abs(cx - 1.0));
      }
      smm.residuals.max_diag_residual = diag;
      double slack = std::numeric_limits<double>::infinity();
      for (const auto& pr : pairs_) {
        double cov = 0.0;
        for (std::size_t i : pr.positions) cov += smm.r[i](pr.x, pr.y);
        slack = std::min(slack, cov - mu);
      }
      smm.residuals.min_coverage_slack = slack;
    } else {
      out.converged = false;
      smm.mu = 0.0;
      smm.r.assign(n_, DenseMatrix(m_, m_));
      for (std::size_t x = 0; x < m_; ++x) smm.r[0](x, x) = 1.0;
      // trivially feasible fallback: mu = 0 with identity diagonal
    }

    out.gap = gsa.mu - smm.mu;
    smm.converged = out.converged;
    gsa.converged = out.converged;
    smm.gap = out.gap;
    gsa.gap = out.gap;
    out.smm = std::move(smm);
    out.gsa = std::move(gsa);
    return out;
  }

  const DifferenceMatrices& dm_;
  double tol_;
  std::size_t m_, n_, p_ = 0;
  std::vector<SupportPair> pairs_;
  std::vector<double> z_, delta_;
  double t_last_ = 1.0;
  double mu_primal_ = 0.0;
};

}  // namespace detail

// Solves both programs at once along one central path; the duality gap of
// the returned pair certifies closeness to the optimum.
inline AdversaryPair solve_adversary_pair(const DifferenceMatrices& dm,
                                          double tol = kDefaultSdpTol) {
  if (dm.f_mat.is_zero())
    throw constant_function_error("constant function has no adversary bound");
  detail::BarrierSolver solver(dm, tol);
  return solver.run();
}

inline SmmSolution solve_smm(const DifferenceMatrices& dm,
                             double tol = kDefaultSdpTol) {
  return solve_adversary_pair(dm, tol).smm;
}

inline GsaSolution solve_gsa(const DifferenceMatrices& dm,
                             double tol = kDefaultSdpTol) {
  return solve_adversary_pair(dm, tol).gsa;
}

// Recomputes every SMM constraint from scratch; stored residuals are ignored.
inline SmmVerification verify_smm(const DifferenceMatrices& dm,
                                  const SmmSolution& sol,
                                  double tol = kDefaultSdpTol) {
  const std::size_t m = dm.f_mat.rows();
  const std::size_t n = dm.d.size();
  if (sol.r.size() != n)
    throw input_error("smm: expected one R matrix per position");
  for (const auto& ri : sol.r)
    if (ri.rows() != m || ri.cols() != m)
      throw input_error("smm: R shape mismatch");

  SmmVerification v;
  const auto fail = [&](const std::string& name) {
    if (v.accepted) {
      v.accepted = false;
      v.first_violation = name;
    }
  };

  for (std::size_t i = 0; i < n; ++i) {
    const double scale = tol * (1.0 + sol.r[i].max_abs());
    for (std::size_t x = 0; x < m; ++x)
      for (std::size_t y = x + 1; y < m; ++y)
        if (std::abs(sol.r[i](x, y) - sol.r[i](y, x)) > scale) {
          fail("R_i not symmetric");
          break;
        }
  }

  double diag = 0.0;
  for (std::size_t x = 0; x < m; ++x) {
    double cx = 0.0;
    for (const auto& ri : sol.r) cx += ri(x, x);
    diag = std::max(diag, std::abs(cx - 1.0));
  }
  v.residuals.max_diag_residual = diag;
  if (diag > tol) fail("Σ_i R_i ∘ I ≠ I");

  double slack = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < m; ++x)
    for (std::size_t y = x + 1; y < m; ++y) {
      if (dm.f_mat(x, y) == 0.0) continue;
      double cov = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (dm.d[i](x, y) == 1.0) cov += sol.r[i](x, y);
      slack = std::min(slack, cov - sol.mu);
    }
  if (!std::isfinite(slack)) slack = 0.0;  // constant function guarded upstream
  v.residuals.min_coverage_slack = slack;
  if (slack < -tol) fail("Σ_i R_i ∘ D_i < μF");

  double psd = 0.0;
  for (const auto& ri : sol.r) {
    DenseMatrix sym = ri;
    for (std::size_t x = 0; x < m; ++x)
      for (std::size_t y = x + 1; y < m; ++y) {
        const double avg = 0.5 * (sym(x, y) + sym(y, x));
        sym(x, y) = avg;
        sym(y, x) = avg;
      }
    const auto [ok, lo] = psd_check(sym, tol);
    psd = std::max(psd, std::max(0.0, -lo));
    if (!ok) fail("R_i not PSD");
  }
  v.residuals.max_psd_violation = psd;
  return v;
}

// Recomputes every GSA constraint from scratch.
inline GsaVerification verify_gsa(const DifferenceMatrices& dm,
                                  const GsaSolution& sol,
                                  double tol = kDefaultSdpTol) {
  const std::size_t m = dm.f_mat.rows();
  const std::size_t n = dm.d.size();
  if (sol.z.rows() != m || sol.z.cols() != m)
    throw input_error("gsa: Z shape mismatch");
  if (sol.delta.size() != m) throw input_error("gsa: delta shape mismatch");

  GsaVerification v;
  const auto fail = [&](const std::string& name) {
    if (v.accepted) {
      v.accepted = false;
      v.first_violation = name;
    }
  };

  const double zscale = tol * (1.0 + sol.z.max_abs());
  for (std::size_t x = 0; x < m && v.accepted; ++x)
    for (std::size_t y = x + 1; y < m; ++y)
      if (std::abs(sol.z(x, y) - sol.z(y, x)) > zscale) {
        fail("Z not symmetric");
        break;
      }
  for (std::size_t x = 0; x < m; ++x)
    for (std::size_t y = 0; y < m; ++y) {
      if (sol.z(x, y) < -zscale) fail("Z negative");
      if (dm.f_mat(x, y) == 0.0 && std::abs(sol.z(x, y)) > zscale)
        fail("Z off support of F");
    }
  for (double d : sol.delta)
    if (d < -tol) fail("Δ negative");

  double zf = 0.0;
  for (std::size_t x = 0; x < m; ++x)
    for (std::size_t y = 0; y < m; ++y) zf += sol.z(x, y) * dm.f_mat(x, y);
  v.residuals.normalization_residual = std::abs(zf - 1.0);
  if (v.residuals.normalization_residual > tol) fail("Z·F ≠ 1");

  double lo = std::numeric_limits<double>::infinity();
  DenseMatrix a(m, m);
  double amax = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < m; ++c) {
        const double zsym = 0.5 * (sol.z(r, c) + sol.z(c, r));
        a(r, c) = (r == c ? sol.delta[r] : 0.0) - zsym * dm.d[i](r, c);
      }
    amax = std::max(amax, 1.0 + a.max_abs());
    lo = std::min(lo, min_eigenvalue(a));
  }
  v.residuals.min_eigenvalue = lo;
  if (lo < -tol * amax) fail("Δ − Z ∘ D_i not PSD");

  double tr = 0.0;
  for (double d : sol.delta) tr += d;
  if (std::abs(tr - sol.mu) > tol * (1.0 + std::abs(sol.mu))) fail("μ ≠ tr Δ");
  return v;
}

}  // namespace advbound
