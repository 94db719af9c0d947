#ifndef PAIRFACT_SYNTH_HPP
#define PAIRFACT_SYNTH_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pairfact/common.hpp"
#include "pairfact/link.hpp"
#include "pairfact/rng.hpp"
#include "pairfact/schema.hpp"

namespace pairfact {

// Simulated kidney-allocation decision makers. DM1 scores thresholds plus a
// Gaussian-noise comparison, DM2/DM4 are lexicographic, DM3 tallies points
// with a log transform, DM5 is the pure tallying heuristic, and CF1 is a
// conditional fixture (LYG matters only at zero dependents) used by the
// context-selection tests.
enum class DmId { dm1, dm2, dm3, dm4, dm5, cf1 };

inline const char* to_string(DmId id) {
  switch (id) {
    case DmId::dm1: return "dm1";
    case DmId::dm2: return "dm2";
    case DmId::dm3: return "dm3";
    case DmId::dm4: return "dm4";
    case DmId::dm5: return "dm5";
    default: return "cf1";
  }
}

inline DmId dm_from_string(const std::string& name) {
  if (name == "dm1") return DmId::dm1;
  if (name == "dm2") return DmId::dm2;
  if (name == "dm3") return DmId::dm3;
  if (name == "dm4") return DmId::dm4;
  if (name == "dm5") return DmId::dm5;
  if (name == "cf1") return DmId::cf1;
  throw ValidationError("unknown decision maker '" + name + "'");
}

// Patient features. Domains are chosen so every rule threshold (wait > 6,
// wait >= 5) is interior. Hints carry the known favorable directions; crimes
// is the one feature counting against a patient.
inline FeatureSchema synthetic_schema() {
  FeatureSchema schema;
  schema.features.push_back({"deps", {0, 1, 2, 3}, MonotoneHint::increasing});
  schema.features.push_back(
      {"lyg", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, MonotoneHint::increasing});
  schema.features.push_back(
      {"wait", {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, MonotoneHint::increasing});
  schema.features.push_back({"crimes", {0, 1, 2, 3}, MonotoneHint::decreasing});
  return schema;
}

namespace detail {

constexpr std::size_t kDeps = 0, kLyg = 1, kWait = 2, kCrimes = 3;

inline int sign_of(double a, double b) { return a > b ? 1 : (a < b ? -1 : 0); }

// Phi at integer arguments, with Phi(-k) = 1 - Phi(k) by construction so the
// DM1 law is complementary bit for bit.
inline double phi_int(int k) {
  static const double table[4] = {0.5, normal_cdf(1.0), normal_cdf(2.0),
                                  normal_cdf(3.0)};
  return k >= 0 ? table[k] : 1.0 - table[-k];
}

inline double step_prob(int comparison) {
  return comparison > 0 ? 1.0 : (comparison < 0 ? 0.0 : 0.5);
}

// First strictly different key decides; exhausted keys mean a fair coin.
inline double lexicographic_prob(const std::vector<double>& keys1,
                                 const std::vector<double>& keys2) {
  for (std::size_t i = 0; i < keys1.size(); ++i) {
    int s = sign_of(keys1[i], keys2[i]);
    if (s != 0) return s > 0 ? 1.0 : 0.0;
  }
  return 0.5;
}

inline int log_floor(double lyg) { return static_cast<int>(std::floor(std::log(lyg))); }

// Symmetric logistic evaluation: exact complementarity for the CF1 law.
inline double logistic_symmetric(double u) {
  double p = 1.0 / (1.0 + std::exp(-std::fabs(u)));
  return u >= 0.0 ? p : 1.0 - p;
}

inline double cf1_utility(const Alternative& x) {
  return x.values[kDeps] == 0.0 ? x.values[kLyg] : 0.0;
}

}  // namespace detail

struct SimulatedDm {
  DmId id = DmId::dm1;
  FeatureSchema schema = synthetic_schema();

  // Exact probability that the decision maker picks x1. No sampling happens
  // here; noise enters only through simulate().
  double prob(const Alternative& x1, const Alternative& x2) const {
    using namespace detail;
    const auto& a = x1.values;
    const auto& b = x2.values;
    switch (id) {
      case DmId::dm1: {
        int k = sign_of(a[kLyg], b[kLyg]);
        k += (a[kDeps] >= 1.0 ? 1 : 0) - (b[kDeps] >= 1.0 ? 1 : 0);
        k += (a[kWait] > 6.0 ? 1 : 0) - (b[kWait] > 6.0 ? 1 : 0);
        return phi_int(k);
      }
      case DmId::dm2:
        return lexicographic_prob({a[kDeps] > 0.0 ? 1.0 : 0.0, a[kLyg], a[kWait]},
                                  {b[kDeps] > 0.0 ? 1.0 : 0.0, b[kLyg], b[kWait]});
      case DmId::dm3: {
        int pa = log_floor(a[kLyg]) + static_cast<int>(a[kDeps]) +
                 (a[kWait] >= 5.0 ? 1 : 0);
        int pb = log_floor(b[kLyg]) + static_cast<int>(b[kDeps]) +
                 (b[kWait] >= 5.0 ? 1 : 0);
        return step_prob(pa - pb);
      }
      case DmId::dm4:
        return lexicographic_prob(
            {static_cast<double>(log_floor(a[kLyg])), a[kDeps], a[kWait]},
            {static_cast<double>(log_floor(b[kLyg])), b[kDeps], b[kWait]});
      case DmId::dm5: {
        int t = sign_of(a[kDeps], b[kDeps]) + sign_of(a[kLyg], b[kLyg]) +
                sign_of(a[kWait], b[kWait]) + sign_of(b[kCrimes], a[kCrimes]);
        return step_prob(t);
      }
      default:
        return logistic_symmetric(cf1_utility(x1) - cf1_utility(x2));
    }
  }
};

// n uniform scenarios with choices drawn Bernoulli(prob), fully determined
// by the seed.
inline ComparisonDataset simulate(const SimulatedDm& dm, std::size_t n,
                                  std::uint64_t seed) {
  if (n < 1) throw ValidationError("simulate requires n >= 1");
  ComparisonDataset ds;
  ds.schema = dm.schema;
  ds.records.reserve(n);
  Rng rng(derive_seed(seed, "simulate"));
  for (std::size_t i = 0; i < n; ++i) {
    ComparisonRecord rec;
    rec.first = sample_alternative(dm.schema, rng);
    rec.second = sample_alternative(dm.schema, rng);
    rec.choice = rng.next_bernoulli(dm.prob(rec.first, rec.second)) ? 1 : 0;
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

namespace detail {

using Pmf = std::map<int, double>;

inline Pmf convolve(const Pmf& a, const Pmf& b) {
  Pmf out;
  for (const auto& [va, pa] : a) {
    for (const auto& [vb, pb] : b) out[va + vb] += pa * pb;
  }
  return out;
}

// Distribution of g(F1) - g(F2) for i.i.d. uniform draws over the domain.
inline Pmf transformed_difference(const std::vector<double>& domain,
                                  int (*transform)(double)) {
  Pmf value;
  double p = 1.0 / static_cast<double>(domain.size());
  for (double v : domain) value[transform(v)] += p;
  Pmf diff;
  for (const auto& [v1, p1] : value) {
    for (const auto& [v2, p2] : value) diff[v1 - v2] += p1 * p2;
  }
  return diff;
}

inline Pmf sign_difference(std::size_t domain_size) {
  double peq = 1.0 / static_cast<double>(domain_size);
  return Pmf{{-1, (1.0 - peq) / 2.0}, {0, peq}, {+1, (1.0 - peq) / 2.0}};
}

inline Pmf indicator_difference(double q) {
  return Pmf{{-1, q * (1.0 - q)}, {0, q * q + (1.0 - q) * (1.0 - q)},
             {+1, q * (1.0 - q)}};
}

}  // namespace detail

// Expected accuracy of the Bayes-optimal predictor under uniform scenario
// sampling, E[max(p, 1-p)], computed by exact enumeration of each rule's
// sufficient statistic rather than the full scenario cross product.
inline double bayes_accuracy(const SimulatedDm& dm) {
  using namespace detail;
  const auto& features = dm.schema.features;
  const std::size_t n_deps = features[kDeps].values.size();
  const std::size_t n_lyg = features[kLyg].values.size();
  const std::size_t n_wait = features[kWait].values.size();
  const std::size_t n_crimes = features[kCrimes].values.size();

  auto count_if_wait = [&](double threshold, bool strict) {
    std::size_t c = 0;
    for (double v : features[kWait].values) {
      if (strict ? v > threshold : v >= threshold) ++c;
    }
    return static_cast<double>(c) / static_cast<double>(n_wait);
  };

  switch (dm.id) {
    case DmId::dm1: {
      double q_deps = 0.0;
      for (double v : features[kDeps].values) {
        if (v >= 1.0) q_deps += 1.0;
      }
      q_deps /= static_cast<double>(n_deps);
      Pmf k = convolve(convolve(sign_difference(n_lyg), indicator_difference(q_deps)),
                       indicator_difference(count_if_wait(6.0, true)));
      double acc = 0.0;
      for (const auto& [value, p] : k) acc += p * phi_int(std::abs(value));
      return acc;
    }
    case DmId::dm2: {
      double q = 0.0;
      for (double v : features[kDeps].values) {
        if (v > 0.0) q += 1.0;
      }
      q /= static_cast<double>(n_deps);
      double p_tie = (q * q + (1.0 - q) * (1.0 - q)) *
                     (1.0 / static_cast<double>(n_lyg)) *
                     (1.0 / static_cast<double>(n_wait));
      return 1.0 - p_tie / 2.0;
    }
    case DmId::dm3: {
      Pmf d = convolve(
          convolve(transformed_difference(features[kLyg].values, +[](double v) {
                     return detail::log_floor(v);
                   }),
                   transformed_difference(features[kDeps].values, +[](double v) {
                     return static_cast<int>(v);
                   })),
          indicator_difference(count_if_wait(5.0, false)));
      auto it = d.find(0);
      return 1.0 - (it == d.end() ? 0.0 : it->second) / 2.0;
    }
    case DmId::dm4: {
      Pmf z;
      double p = 1.0 / static_cast<double>(n_lyg);
      for (double v : features[kLyg].values) z[log_floor(v)] += p;
      double peq_z = 0.0;
      for (const auto& [value, pz] : z) peq_z += pz * pz;
      double p_tie = peq_z * (1.0 / static_cast<double>(n_deps)) *
                     (1.0 / static_cast<double>(n_wait));
      return 1.0 - p_tie / 2.0;
    }
    case DmId::dm5: {
      Pmf t = convolve(convolve(sign_difference(n_deps), sign_difference(n_lyg)),
                       convolve(sign_difference(n_wait), sign_difference(n_crimes)));
      auto it = t.find(0);
      return 1.0 - (it == t.end() ? 0.0 : it->second) / 2.0;
    }
    default: {  // cf1
      Pmf utility;
      for (double dep : features[kDeps].values) {
        for (double lyg : features[kLyg].values) {
          int u = dep == 0.0 ? static_cast<int>(lyg) : 0;
          utility[u] += 1.0 / static_cast<double>(n_deps * n_lyg);
        }
      }
      double acc = 0.0;
      for (const auto& [u1, p1] : utility) {
        for (const auto& [u2, p2] : utility) {
          acc += p1 * p2 *
                 logistic_symmetric(std::fabs(static_cast<double>(u1 - u2)));
        }
      }
      return acc;
    }
  }
}

}  // namespace pairfact

#endif  // PAIRFACT_SYNTH_HPP
