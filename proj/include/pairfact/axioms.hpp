#ifndef PAIRFACT_AXIOMS_HPP
#define PAIRFACT_AXIOMS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "pairfact/eval.hpp"
#include "pairfact/link.hpp"
#include "pairfact/model.hpp"
#include "pairfact/rng.hpp"
#include "pairfact/schema.hpp"

namespace pairfact {

// Numeric audit of a pairwise probability law against the choice axioms.
// Checkers sample scenarios from the pinned generator, so a given seed always
// probes the same sequence and a larger sample count extends it.

struct AxiomCheck {
  double max_deviation = 0.0;
  std::vector<Alternative> witness;  // arg-max pair / triple / quad
  std::size_t samples = 0;
  // Probes whose probability hit the 1e-12 inversion clamp. A nonzero count
  // means the law saturates there and deviations can be clamp artifacts.
  std::size_t clamped = 0;
};

// max |H(x1,x2) + H(x2,x1) - 1| over sampled pairs, including the identical
// pair probe (x,x) for every sampled x.
inline AxiomCheck check_complementarity(const ProbFn& predictor,
                                        const FeatureSchema& schema,
                                        std::size_t n_samples, std::uint64_t seed) {
  require_valid_schema(schema);
  Rng rng(derive_seed(seed, "axiom-complementarity"));
  AxiomCheck check;
  check.samples = n_samples;
  auto probe = [&](const Alternative& a, const Alternative& b) {
    double dev = std::fabs(predictor(a, b) + predictor(b, a) - 1.0);
    if (dev > check.max_deviation) {
      check.max_deviation = dev;
      check.witness = {a, b};
    }
  };
  for (std::size_t n = 0; n < n_samples; ++n) {
    Alternative a = sample_alternative(schema, rng);
    Alternative b = sample_alternative(schema, rng);
    probe(a, b);
    probe(a, a);
    probe(b, b);
  }
  return check;
}

// Full cross-product variant, available when the schema admits at most
// max_pairs ordered pairs.
inline AxiomCheck check_complementarity_exhaustive(const ProbFn& predictor,
                                                   const FeatureSchema& schema,
                                                   std::size_t max_pairs = 1000000) {
  require_valid_schema(schema);
  std::size_t n_alts = 1;
  for (const auto& f : schema.features) n_alts *= f.values.size();
  if (n_alts * n_alts > max_pairs) {
    throw ValidationError("schema cross product exceeds the exhaustive budget of " +
                          std::to_string(max_pairs) + " pairs");
  }
  std::vector<Alternative> all;
  all.reserve(n_alts);
  Alternative cur;
  cur.values.assign(schema.dimension(), 0.0);
  std::vector<std::size_t> odometer(schema.dimension(), 0);
  for (std::size_t n = 0; n < n_alts; ++n) {
    for (std::size_t i = 0; i < schema.dimension(); ++i) {
      cur.values[i] = schema.features[i].values[odometer[i]];
    }
    all.push_back(cur);
    for (std::size_t i = schema.dimension(); i-- > 0;) {
      if (++odometer[i] < schema.features[i].values.size()) break;
      odometer[i] = 0;
    }
  }
  AxiomCheck check;
  check.samples = n_alts * n_alts;
  for (const auto& a : all) {
    for (const auto& b : all) {
      double dev = std::fabs(predictor(a, b) + predictor(b, a) - 1.0);
      if (dev > check.max_deviation) {
        check.max_deviation = dev;
        check.witness = {a, b};
      }
    }
  }
  return check;
}

// max |H(x1,x3) - sigma(sigma^{-1}(H(x1,x2)) + sigma^{-1}(H(x2,x3)))| over
// sampled triples. Probabilities are clamped into [1e-12, 1-1e-12] before
// inversion so degenerate laws remain checkable.
inline AxiomCheck check_sigma_transitivity(const ProbFn& predictor, const Link& link,
                                           const FeatureSchema& schema,
                                           std::size_t n_triples, std::uint64_t seed) {
  require_valid_schema(schema);
  if (!link.probabilistic()) {
    throw LinkError("sigma-transitivity requires a probabilistic link");
  }
  Rng rng(derive_seed(seed, "axiom-transitivity"));
  AxiomCheck check;
  check.samples = n_triples;
  auto clamp = [&check](double p) {
    double c = std::clamp(p, 1e-12, 1.0 - 1e-12);
    if (c != p) ++check.clamped;
    return c;
  };
  for (std::size_t n = 0; n < n_triples; ++n) {
    Alternative x1 = sample_alternative(schema, rng);
    Alternative x2 = sample_alternative(schema, rng);
    Alternative x3 = sample_alternative(schema, rng);
    double implied = complete_transitive(link, clamp(predictor(x1, x2)),
                                         clamp(predictor(x2, x3)));
    double dev = std::fabs(predictor(x1, x3) - implied);
    if (dev > check.max_deviation) {
      check.max_deviation = dev;
      check.witness = {x1, x2, x3};
    }
  }
  return check;
}

// Compositionality in sigma-inverse space. Samples a base alternative and two
// single-feature modifications on distinct features outside the context, and
// measures the additivity defect of applying both changes at once. Probing a
// conditional law with context features allowed (pass an empty context) makes
// the conditional interaction visible.
inline AxiomCheck check_compositionality(const ProbFn& predictor, const Link& link,
                                         const FeatureSchema& schema,
                                         const ContextSpec& context,
                                         std::size_t n_quads, std::uint64_t seed) {
  require_valid_schema(schema);
  if (!link.probabilistic()) {
    throw LinkError("compositionality requires a probabilistic link");
  }
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < schema.dimension(); ++i) {
    if (context.empty() || *context.feature != i) eligible.push_back(i);
  }
  if (eligible.size() < 2) {
    throw ValidationError(
        "compositionality needs at least two features outside the context");
  }
  Rng rng(derive_seed(seed, "axiom-compositionality"));
  AxiomCheck check;
  check.samples = n_quads;
  auto clamp = [&check](double p) {
    double c = std::clamp(p, 1e-12, 1.0 - 1e-12);
    if (c != p) ++check.clamped;
    return c;
  };
  for (std::size_t n = 0; n < n_quads; ++n) {
    Alternative x1 = sample_alternative(schema, rng);
    std::size_t pick_i = rng.next_below(eligible.size());
    std::size_t pick_j = rng.next_below(eligible.size() - 1);
    if (pick_j >= pick_i) ++pick_j;
    std::size_t fi = eligible[pick_i];
    std::size_t fj = eligible[pick_j];

    auto fresh_value = [&](std::size_t feature) {
      const auto& vals = schema.features[feature].values;
      std::size_t cur = *schema.value_index(feature, x1.values[feature]);
      std::size_t alt = rng.next_below(vals.size() - 1);
      if (alt >= cur) ++alt;
      return vals[alt];
    };
    Alternative mod_i = x1, mod_j = x1, mod_both = x1;
    double vi = fresh_value(fi);
    double vj = fresh_value(fj);
    mod_i.values[fi] = vi;
    mod_j.values[fj] = vj;
    mod_both.values[fi] = vi;
    mod_both.values[fj] = vj;

    double lhs = link.inverse(clamp(predictor(x1, mod_both)));
    double rhs = link.inverse(clamp(predictor(x1, mod_i))) +
                 link.inverse(clamp(predictor(x1, mod_j)));
    double dev = std::fabs(lhs - rhs);
    if (dev > check.max_deviation) {
      check.max_deviation = dev;
      check.witness = {x1, mod_i, mod_j, mod_both};
    }
  }
  return check;
}

// Monotonicity audit of a stored model; the returned list is empty for every
// model the fitter can produce.
inline std::vector<MonotonicityViolation> check_monotonicity(
    const TwoStageModel& model) {
  return monotonicity_violations(model);
}

}  // namespace pairfact

#endif  // PAIRFACT_AXIOMS_HPP
