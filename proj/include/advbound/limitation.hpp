#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "advbound/errors.hpp"
#include "advbound/function.hpp"
#include "advbound/witness.hpp"

namespace advbound {

enum class LimitationMode { partial, boolean_partial, total };

struct LimitationBound {
  std::string label;
  double value = 0.0;
};

namespace detail {

inline void require_profile_match(const FunctionSpec& spec,
                                  const CertificateProfile& profile) {
  if (profile.certificates.size() != spec.size() ||
      profile.c.size() != static_cast<std::size_t>(spec.h()))
    throw input_error("certificate profile does not match the function");
}

// An empty certificate says every input shares this output letter, which
// contradicts the intersecting-certificates argument behind the uniform
// schemes; only the half-and-half scheme survives it.
inline void require_certificate(const FunctionSpec& spec,
                                const std::vector<int>& cert, std::size_t x) {
  if (cert.empty())
    throw constant_function_error(
        "input \"" + spec.word_string(x) +
        "\" has an empty certificate: the function is constant on its domain");
}

}  // namespace detail

inline ProbabilityScheme limitation_scheme(const FunctionSpec& spec,
                                           const CertificateProfile& profile,
                                           LimitationMode mode) {
  detail::require_profile_match(spec, profile);
  const std::size_t s = spec.size();
  const std::size_t n = static_cast<std::size_t>(spec.n());
  if (mode == LimitationMode::total && !spec.is_total())
    throw input_error("total scheme requires a total function");
  if (mode == LimitationMode::boolean_partial && spec.h() != 2)
    throw input_error("boolean scheme requires a two-letter output alphabet");

  ProbabilityScheme ps{DenseMatrix(s, n)};
  const int one_letter =
      spec.h() >= 2 ? profile.letter_order[1] : profile.letter_order[0];
  for (std::size_t x = 0; x < s; ++x) {
    const std::vector<int>& cert = profile.certificates[x];
    if (mode != LimitationMode::partial)
      detail::require_certificate(spec, cert, x);
    switch (mode) {
      case LimitationMode::partial:
        if (cert.empty()) {
          // No certificate to carry the second half; fall back to uniform.
          for (std::size_t i = 0; i < n; ++i)
            ps.p(x, i) = 1.0 / static_cast<double>(n);
        } else {
          for (std::size_t i = 0; i < n; ++i)
            ps.p(x, i) = 0.5 / static_cast<double>(n);
          for (int i : cert)
            ps.p(x, static_cast<std::size_t>(i)) +=
                0.5 / static_cast<double>(cert.size());
        }
        break;
      case LimitationMode::boolean_partial:
        if (spec.output(x) == one_letter) {
          for (int i : cert)
            ps.p(x, static_cast<std::size_t>(i)) =
                1.0 / static_cast<double>(cert.size());
        } else {
          for (std::size_t i = 0; i < n; ++i)
            ps.p(x, i) = 1.0 / static_cast<double>(n);
        }
        break;
      case LimitationMode::total:
        for (int i : cert)
          ps.p(x, static_cast<std::size_t>(i)) =
              1.0 / static_cast<double>(cert.size());
        break;
    }
  }
  return ps;
}

// C_0 >= C_1 >= ... in profile order; the general bound holds always, the
// sharper ones need a Boolean output or a total domain.
inline std::vector<LimitationBound> limitation_bounds(
    const CertificateProfile& profile, int n, bool total, bool boolean_out) {
  if (profile.letter_order.empty() || n <= 0)
    throw input_error("limitation_bounds: empty profile");
  const double c0 = static_cast<double>(profile.c[static_cast<std::size_t>(
      profile.letter_order[0])]);
  const double c1 =
      profile.letter_order.size() >= 2
          ? static_cast<double>(
                profile.c[static_cast<std::size_t>(profile.letter_order[1])])
          : c0;
  std::vector<LimitationBound> out;
  out.push_back({"two_sqrt_c1_n", 2.0 * std::sqrt(c1 * n)});
  if (boolean_out) out.push_back({"sqrt_c1_n", std::sqrt(c1 * n)});
  if (total) out.push_back({"sqrt_c0_c1", std::sqrt(c0 * c1)});
  return out;
}

inline double query_lower_bound(double adv, double eps) {
  if (!(adv >= 0.0)) throw input_error("query_lower_bound: adv must be >= 0");
  if (!(eps >= 0.0 && eps < 0.5))
    throw input_error("query_lower_bound: eps must lie in [0, 1/2)");
  return adv * (1.0 - 2.0 * std::sqrt(eps * (1.0 - eps)));
}

}  // namespace advbound
