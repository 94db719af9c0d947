#ifndef PAIRFACT_MODEL_HPP
#define PAIRFACT_MODEL_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pairfact/common.hpp"
#include "pairfact/link.hpp"
#include "pairfact/schema.hpp"

namespace pairfact {

// The (at most one) feature whose value selects which score table applies to
// every other feature.
struct ContextSpec {
  std::optional<std::size_t> feature;

  bool empty() const { return !feature.has_value(); }

  bool operator==(const ContextSpec& o) const { return feature == o.feature; }
};

// Per-feature score table, one row per context value (a single sentinel row
// when no context is set). Each row maps the feature's k-th domain value to a
// real contribution score; rows are monotone in one shared direction.
struct EditingTable {
  std::size_t feature = 0;
  int direction = +1;  // +1 nondecreasing, -1 nonincreasing, shared across rows
  std::vector<std::vector<double>> scores;  // [context_value][feature_value]

  double at(std::size_t context_value, std::size_t value_index) const {
    return scores[context_value][value_index];
  }
};

struct ModelMetadata {
  std::string loss = "cross_entropy";
  double lambda = 0.0;
  std::uint64_t seed = 0;
  double train_loss = 0.0;
  double ftol = 0.0;
  int max_iter = 0;
  double cv_fraction = 0.0;
  int iterations = 0;
  int saturated_records = 0;
};

// Two-stage choice model: per-feature editing scores, summed and passed
// through the link on the difference of the two alternatives' totals.
struct TwoStageModel {
  FeatureSchema schema;
  ContextSpec context;
  std::vector<EditingTable> tables;  // one per non-context feature, schema order
  Link link;
  ModelMetadata metadata;

  std::size_t context_cardinality() const {
    return context.empty() ? 1 : schema.features[*context.feature].values.size();
  }

  // Sum of the editing scores for one alternative, each table addressed by
  // the alternative's own context value.
  double score(const Alternative& x) const {
    std::size_t ctx = 0;
    if (!context.empty()) {
      auto idx = schema.value_index(*context.feature, x.values[*context.feature]);
      if (!idx) {
        throw ValidationError("value " + fmt_double(x.values[*context.feature]) +
                              " not in domain of context feature " +
                              schema.features[*context.feature].name);
      }
      ctx = *idx;
    }
    double total = 0.0;
    for (const auto& table : tables) {
      auto idx = schema.value_index(table.feature, x.values[table.feature]);
      if (!idx) {
        throw ValidationError("value " + fmt_double(x.values[table.feature]) +
                              " not in domain of " +
                              schema.features[table.feature].name);
      }
      total += table.at(ctx, *idx);
    }
    return total;
  }

  // Probability that x1 is chosen over x2. Requires a probabilistic link.
  double prob(const Alternative& x1, const Alternative& x2) const {
    return link.prob(score(x1) - score(x2));
  }

  // Hard prediction from the sign of the score difference, with an explicit
  // tie at exactly zero. Valid for every link, identity included.
  Choice choose(const Alternative& x1, const Alternative& x2) const {
    double diff = score(x1) - score(x2);
    if (diff > 0.0) return Choice::first;
    if (diff < 0.0) return Choice::second;
    return Choice::tie;
  }

  // Canonical gauge: subtract each feature's mean score uniformly across all
  // of its rows. Predictions are unchanged (the shift cancels in every score
  // difference); exported curves become centered and comparable.
  TwoStageModel gauge_normalized() const {
    TwoStageModel out = *this;
    for (auto& table : out.tables) {
      double sum = 0.0;
      std::size_t count = 0;
      for (const auto& row : table.scores) {
        for (double s : row) sum += s;
        count += row.size();
      }
      double mean = count ? sum / static_cast<double>(count) : 0.0;
      for (auto& row : table.scores) {
        for (double& s : row) s -= mean;
      }
    }
    return out;
  }
};

// One adjacent-pair monotonicity violation inside a stored table.
struct MonotonicityViolation {
  std::size_t feature = 0;
  std::size_t context_value = 0;  // row index; 0 when unconditional
  std::size_t value_index = 0;    // violation between value_index and value_index+1
};

// Exact scan of all adjacent entries of every table against its direction.
inline std::vector<MonotonicityViolation> monotonicity_violations(
    const TwoStageModel& model) {
  std::vector<MonotonicityViolation> found;
  for (const auto& table : model.tables) {
    for (std::size_t c = 0; c < table.scores.size(); ++c) {
      const auto& row = table.scores[c];
      for (std::size_t k = 0; k + 1 < row.size(); ++k) {
        double step = (row[k + 1] - row[k]) * static_cast<double>(table.direction);
        if (step < 0.0) {
          found.push_back({table.feature, c, k});
        }
      }
    }
  }
  return found;
}

// Structural validation of the table layout against the schema. Used by the
// model-file reader and tests; monotonicity is scanned separately.
inline void validate_model(const TwoStageModel& model) {
  require_valid_schema(model.schema);
  const std::size_t d = model.schema.dimension();
  if (!model.context.empty() && *model.context.feature >= d) {
    throw ValidationError("context feature index out of range");
  }
  if (!model.context.empty() && d < 2) {
    throw ValidationError("a context requires at least two features");
  }
  std::vector<bool> covered(d, false);
  const std::size_t n_ctx = model.context_cardinality();
  for (const auto& table : model.tables) {
    if (table.feature >= d) throw ValidationError("table feature index out of range");
    if (!model.context.empty() && table.feature == *model.context.feature) {
      throw ValidationError("context feature " +
                            model.schema.features[table.feature].name +
                            " must not carry a table");
    }
    if (covered[table.feature]) {
      throw ValidationError("duplicate table for feature " +
                            model.schema.features[table.feature].name);
    }
    covered[table.feature] = true;
    if (table.scores.size() != n_ctx) {
      throw ValidationError("table for " + model.schema.features[table.feature].name +
                            " covers " + std::to_string(table.scores.size()) +
                            " context values, expected " + std::to_string(n_ctx));
    }
    const std::size_t m = model.schema.features[table.feature].values.size();
    for (const auto& row : table.scores) {
      if (row.size() != m) {
        throw ValidationError("table for " +
                              model.schema.features[table.feature].name +
                              " misses feature values");
      }
    }
    if (table.direction != +1 && table.direction != -1) {
      throw ValidationError("table direction must be +1 or -1");
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    bool is_ctx = !model.context.empty() && *model.context.feature == i;
    if (!is_ctx && !covered[i]) {
      throw ValidationError("missing table for feature " +
                            model.schema.features[i].name);
    }
  }
}

// Luce ranking over n items: softmax of the editing scores. Pinned to the
// logistic link, the only one that factors n-way choice this way.
inline std::vector<double> rank_distribution(const TwoStageModel& model,
                                             const std::vector<Alternative>& items) {
  if (model.link.kind != LinkKind::logistic) {
    throw LinkError("ranking requires the logistic link");
  }
  if (items.size() < 2) {
    throw ValidationError("ranking requires at least 2 items");
  }
  std::vector<double> scores;
  scores.reserve(items.size());
  for (const auto& x : items) scores.push_back(model.score(x));
  double top = scores[0];
  for (double s : scores) top = std::max(top, s);
  double denom = 0.0;
  std::vector<double> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(scores[i] - top);
    denom += out[i];
  }
  for (double& p : out) p /= denom;
  return out;
}

// Curves CSV: `feature,context,value,score`, gauge normalized, ordered by
// (feature index, context value, feature value). The context cell is empty
// when the model is unconditional.
inline std::string curves_csv(const TwoStageModel& model) {
  TwoStageModel normalized = model.gauge_normalized();
  std::string out = "feature,context,value,score\n";
  const auto& schema = normalized.schema;
  for (const auto& table : normalized.tables) {
    const auto& spec = schema.features[table.feature];
    for (std::size_t c = 0; c < table.scores.size(); ++c) {
      std::string ctx_cell;
      if (!normalized.context.empty()) {
        ctx_cell = fmt_double(schema.features[*normalized.context.feature].values[c]);
      }
      for (std::size_t k = 0; k < spec.values.size(); ++k) {
        out += spec.name + "," + ctx_cell + "," + fmt_double(spec.values[k]) + "," +
               fmt_double(table.scores[c][k]) + "\n";
      }
    }
  }
  return out;
}

}  // namespace pairfact

#endif  // PAIRFACT_MODEL_HPP
