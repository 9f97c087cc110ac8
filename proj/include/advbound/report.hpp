#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "advbound/convert.hpp"
#include "advbound/errors.hpp"
#include "advbound/function.hpp"
#include "advbound/limitation.hpp"
#include "advbound/sdp.hpp"
#include "advbound/witness.hpp"

namespace advbound {

struct BoundValues {
  double sa = 0.0;   // eval_spectral of the converted witness (lower)
  double gsa = 0.0;  // 1 / solved trace (lower)
  double smm = 0.0;  // 1 / solved coverage (upper)
  double mm = 0.0;   // eval_minimax of the rounded scheme (upper)
  double wa = 0.0;   // eval_weighted of the converted scheme (lower)
  double swa = 0.0;  // eval_strong_weighted of the same scheme (lower)
};

struct BoundReport {
  std::string function;
  BoundValues values;
  std::vector<LimitationBound> limits;
  double eps = 0.0;
  double query_bound = 0.0;  // best lower bound scaled by the error factor
  double sandwich_residual = 0.0;
  bool converged = true;
  double gap = 0.0;
  double tol = kDefaultSdpTol;

  SpectralWitness spectral;
  WeightScheme weights;
  ProbabilityScheme probabilities;
  SmmSolution smm;
  GsaSolution gsa;
};

inline BoundReport compute_report(const FunctionSpec& spec, double eps = 0.0,
                                  double tol = kDefaultSdpTol) {
  spec.require_non_constant();
  if (!(eps >= 0.0 && eps < 0.5))
    throw input_error("compute_report: eps must lie in [0, 1/2)");
  const DifferenceMatrices dm = build_difference_matrices(spec);
  const CertificateProfile profile = certificate_profile(spec);

  BoundReport rep;
  rep.function = spec.name().empty()
                     ? "f_n" + std::to_string(spec.n()) + "_s" +
                           std::to_string(spec.size())
                     : spec.name();
  rep.eps = eps;
  rep.tol = tol;

  const AdversaryPair pair = solve_adversary_pair(dm, tol);
  rep.smm = pair.smm;
  rep.gsa = pair.gsa;
  rep.converged = pair.smm.converged && pair.gsa.converged;
  rep.gap = std::max(pair.smm.gap, pair.gsa.gap);
  rep.values.gsa = 1.0 / pair.gsa.mu;
  rep.values.smm = 1.0 / pair.smm.mu;

  rep.spectral = gsa_to_spectral(pair.gsa, dm);
  rep.values.sa = eval_spectral(rep.spectral, dm);
  rep.weights = spectral_to_weighted(rep.spectral, dm);
  rep.values.wa = eval_weighted(rep.weights, dm);
  rep.values.swa = eval_strong_weighted(rep.weights, dm);
  rep.probabilities = smm_to_probability(pair.smm, tol);
  rep.values.mm = eval_minimax(rep.probabilities, dm);

  rep.limits =
      limitation_bounds(profile, spec.n(), spec.is_total(), spec.h() == 2);

  const double lower = std::max({rep.values.sa, rep.values.wa, rep.values.swa,
                                 rep.values.gsa});
  const double upper = std::min(rep.values.mm, rep.values.smm);
  rep.sandwich_residual = upper - lower;
  rep.query_bound = query_lower_bound(lower, eps);

  if (rep.converged) {
    const double vmax = std::max({rep.values.sa, rep.values.gsa,
                                  rep.values.smm, rep.values.mm, rep.values.wa,
                                  rep.values.swa});
    const double vmin = std::min({rep.values.sa, rep.values.gsa,
                                  rep.values.smm, rep.values.mm, rep.values.wa,
                                  rep.values.swa});
    if (vmax - vmin > 10.0 * tol * (1.0 + vmax))
      throw numeric_error("bound values diverge: spread " +
                          std::to_string(vmax - vmin) + " at tolerance " +
                          std::to_string(tol));
  }
  return rep;
}

}  // namespace advbound
