#ifndef PAIRFACT_TESTS_HELPERS_HPP
#define PAIRFACT_TESTS_HELPERS_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "pairfact/model.hpp"
#include "pairfact/rng.hpp"
#include "pairfact/schema.hpp"
#include "pairfact/synth.hpp"

namespace testing_support {

using namespace pairfact;

inline FeatureSchema binary_schema() {
  FeatureSchema schema;
  schema.features.push_back({"flag", {0, 1}, MonotoneHint::auto_detect});
  return schema;
}

// Random small schema: 2..4 features, 2..5 integer values each, auto hints.
inline FeatureSchema random_schema(Rng& rng) {
  FeatureSchema schema;
  std::size_t d = 2 + rng.next_below(3);
  for (std::size_t i = 0; i < d; ++i) {
    FeatureSpec spec;
    spec.name = "f" + std::to_string(i);
    std::size_t m = 2 + rng.next_below(4);
    double v = static_cast<double>(rng.next_below(3));
    for (std::size_t k = 0; k < m; ++k) {
      spec.values.push_back(v);
      v += 1.0 + static_cast<double>(rng.next_below(2));
    }
    schema.features.push_back(std::move(spec));
  }
  return schema;
}

// Random valid two-stage model over the given schema: random context (when
// allowed), random directions, monotone tables built from nonnegative steps,
// free bases under a context. Step sizes stay moderate so pairwise
// probabilities keep clear of the saturated tails, where the quantile of a
// double loses its conditioning.
inline TwoStageModel random_model(const FeatureSchema& schema, Rng& rng,
                                  LinkKind link, bool allow_context = true) {
  TwoStageModel model;
  model.schema = schema;
  model.link.kind = link;
  if (allow_context && schema.dimension() >= 2 && rng.next_below(2) == 0) {
    model.context.feature = rng.next_below(schema.dimension());
  }
  std::size_t n_ctx = model.context_cardinality();
  for (std::size_t i = 0; i < schema.dimension(); ++i) {
    if (!model.context.empty() && *model.context.feature == i) continue;
    EditingTable table;
    table.feature = i;
    table.direction = rng.next_below(2) == 0 ? +1 : -1;
    for (std::size_t c = 0; c < n_ctx; ++c) {
      std::vector<double> row;
      double acc = model.context.empty() ? 0.0 : rng.next_in(-0.5, 0.5);
      row.push_back(acc);
      for (std::size_t k = 1; k < schema.features[i].values.size(); ++k) {
        acc += static_cast<double>(table.direction) * rng.next_in(0.0, 0.6);
        row.push_back(acc);
      }
      table.scores.push_back(std::move(row));
    }
    model.tables.push_back(std::move(table));
  }
  return model;
}

// Choices drawn from a generating model's law; the workhorse for recovery
// and property tests.
inline ComparisonDataset sample_from_model(const TwoStageModel& truth, std::size_t n,
                                           Rng& rng) {
  ComparisonDataset ds;
  ds.schema = truth.schema;
  ds.records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ComparisonRecord rec;
    rec.first = sample_alternative(truth.schema, rng);
    rec.second = sample_alternative(truth.schema, rng);
    rec.choice = rng.next_bernoulli(truth.prob(rec.first, rec.second)) ? 1 : 0;
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

inline ComparisonDataset coin_flip_dataset(const FeatureSchema& schema, std::size_t n,
                                           Rng& rng) {
  ComparisonDataset ds;
  ds.schema = schema;
  ds.records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ComparisonRecord rec;
    rec.first = sample_alternative(schema, rng);
    rec.second = sample_alternative(schema, rng);
    rec.choice = rng.next_below(2) ? 1 : 0;
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

}  // namespace testing_support

#endif  // PAIRFACT_TESTS_HELPERS_HPP
