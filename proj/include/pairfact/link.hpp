#ifndef PAIRFACT_LINK_HPP
#define PAIRFACT_LINK_HPP

#include <cmath>
#include <string>

#include "pairfact/common.hpp"

namespace pairfact {

// Aggregation link applied to the signed score difference. The logistic and
// probit links are symmetric CDFs (sigma(u) = 1 - sigma(-u)); the identity
// link belongs to hinge-loss margin models and defines no probabilities.
enum class LinkKind { logistic, probit, identity };

inline const char* to_string(LinkKind k) {
  switch (k) {
    case LinkKind::logistic: return "logistic";
    case LinkKind::probit: return "probit";
    default: return "identity";
  }
}

inline LinkKind link_from_string(const std::string& name) {
  if (name == "logistic") return LinkKind::logistic;
  if (name == "probit") return LinkKind::probit;
  if (name == "identity") return LinkKind::identity;
  throw ValidationError("unknown link kind '" + name + "'");
}

namespace detail {

// Standard normal CDF. libm's erfc keeps the absolute error well below the
// 1e-12 the axiom checks rely on.
inline double normal_cdf(double u) { return 0.5 * std::erfc(-u * M_SQRT1_2); }

inline double normal_pdf(double u) {
  return std::exp(-0.5 * u * u) * 0.3989422804014326779399460599343818684759;
}

// Acklam's rational approximation to the normal quantile, refined with
// Newton steps against normal_cdf. Accurate to ~1e-15 over (0, 1).
inline double normal_quantile(double p) {
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  for (int i = 0; i < 3; ++i) {
    double err = normal_cdf(x) - p;
    double dens = normal_pdf(x);
    if (dens <= 0.0) break;
    x -= err / dens;
  }
  return x;
}

}  // namespace detail

struct Link {
  LinkKind kind = LinkKind::logistic;

  bool probabilistic() const { return kind != LinkKind::identity; }

  // sigma(u). Satisfies sigma(u) + sigma(-u) = 1 to within 1e-12.
  double prob(double u) const {
    switch (kind) {
      case LinkKind::logistic:
        if (u >= 0.0) {
          return 1.0 / (1.0 + std::exp(-u));
        } else {
          double t = std::exp(u);
          return t / (1.0 + t);
        }
      case LinkKind::probit:
        return detail::normal_cdf(u);
      default:
        throw LinkError("identity link defines no choice probability");
    }
  }

  // sigma^{-1}(p) on (0, 1).
  double inverse(double p) const {
    if (!(p > 0.0 && p < 1.0)) {
      throw ValidationError("probability " + fmt_double(p) +
                            " outside (0,1) for link inverse");
    }
    switch (kind) {
      case LinkKind::logistic:
        return std::log(p) - std::log1p(-p);
      case LinkKind::probit:
        return detail::normal_quantile(p);
      default:
        throw LinkError("identity link defines no inverse");
    }
  }
};

// Completes the comparison triangle: the probability for (x1, x3) implied by
// the probabilities for (x1, x2) and (x2, x3) under a sigma-transitive law.
inline double complete_transitive(const Link& link, double p12, double p23) {
  return link.prob(link.inverse(p12) + link.inverse(p23));
}

}  // namespace pairfact

#endif  // PAIRFACT_LINK_HPP
