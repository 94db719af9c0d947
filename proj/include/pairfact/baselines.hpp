#ifndef PAIRFACT_BASELINES_HPP
#define PAIRFACT_BASELINES_HPP

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "pairfact/link.hpp"
#include "pairfact/minimize.hpp"
#include "pairfact/schema.hpp"

namespace pairfact {

// Symmetric logistic regression over feature differences: the sigma-linear
// reference class. One weight per feature, no intercept (complementarity
// forbids one).
struct LinearModel {
  FeatureSchema schema;
  std::vector<double> weights;

  double score_difference(const Alternative& x1, const Alternative& x2) const {
    double u = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      u += weights[i] * (x1.values[i] - x2.values[i]);
    }
    return u;
  }

  double prob(const Alternative& x1, const Alternative& x2) const {
    return Link{LinkKind::logistic}.prob(score_difference(x1, x2));
  }

  Choice choose(const Alternative& x1, const Alternative& x2) const {
    double u = score_difference(x1, x2);
    if (u > 0.0) return Choice::first;
    if (u < 0.0) return Choice::second;
    return Choice::tie;
  }
};

struct LinearFitConfig {
  double l2 = 1e-6;
  double ftol = 1e-7;
  int max_iter = 300;
  std::uint64_t seed = 0;
};

inline LinearModel fit_symmetric_logistic(const ComparisonDataset& dataset,
                                          const LinearFitConfig& config = {}) {
  require_valid_schema(dataset.schema);
  if (dataset.records.empty()) {
    throw ValidationError("cannot fit on an empty dataset");
  }
  if (config.l2 < 0.0) throw ValidationError("l2 must be nonnegative");

  const std::size_t d = dataset.schema.dimension();
  std::vector<std::vector<double>> diffs;
  diffs.reserve(dataset.records.size());
  std::vector<int> labels;
  labels.reserve(dataset.records.size());
  for (const auto& rec : dataset.records) {
    validate_alternative(dataset.schema, rec.first);
    validate_alternative(dataset.schema, rec.second);
    std::vector<double> diff(d);
    for (std::size_t i = 0; i < d; ++i) {
      diff[i] = rec.first.values[i] - rec.second.values[i];
    }
    diffs.push_back(std::move(diff));
    labels.push_back(rec.choice);
  }

  Link logistic{LinkKind::logistic};
  auto objective = [&](const std::vector<double>& w, std::vector<double>* grad) {
    if (grad) grad->assign(d, 0.0);
    double loss = 0.0;
    for (std::size_t n = 0; n < diffs.size(); ++n) {
      double u = 0.0;
      for (std::size_t i = 0; i < d; ++i) u += w[i] * diffs[n][i];
      double p = logistic.prob(u);
      double pc = std::clamp(p, 1e-12, 1.0 - 1e-12);
      loss -= labels[n] ? std::log(pc) : std::log1p(-pc);
      if (grad) {
        double g = p - static_cast<double>(labels[n]);
        for (std::size_t i = 0; i < d; ++i) (*grad)[i] += g * diffs[n][i];
      }
    }
    for (std::size_t i = 0; i < d; ++i) {
      loss += config.l2 * w[i] * w[i];
      if (grad) (*grad)[i] += 2.0 * config.l2 * w[i];
    }
    return loss;
  };

  std::vector<double> w(d, 0.0);
  MinimizeOptions options{config.ftol, config.max_iter};
  minimize_projected(w, objective, [](std::vector<double>&) {}, options);
  return LinearModel{dataset.schema, std::move(w)};
}

inline std::string serialize_linear_model(const LinearModel& model) {
  nlohmann::json weights = nlohmann::json::object();
  for (std::size_t i = 0; i < model.weights.size(); ++i) {
    weights[model.schema.features[i].name] = model.weights[i];
  }
  nlohmann::json j{{"weights", weights}};
  return j.dump(2) + "\n";
}

// Tallying heuristic: each feature casts a sign vote in its favorable
// direction and the majority wins.
inline Choice tallying_choice(const std::vector<int>& directions,
                              const Alternative& x1, const Alternative& x2) {
  if (directions.size() != x1.values.size() ||
      directions.size() != x2.values.size()) {
    throw ValidationError("one tallying direction per feature required");
  }
  int tally = 0;
  for (std::size_t i = 0; i < directions.size(); ++i) {
    double diff = x1.values[i] - x2.values[i];
    int s = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
    tally += directions[i] * s;
  }
  if (tally > 0) return Choice::first;
  if (tally < 0) return Choice::second;
  return Choice::tie;
}

// Directions from the schema hints; auto counts as favorable-increasing.
inline std::vector<int> tallying_directions(const FeatureSchema& schema) {
  std::vector<int> dirs;
  dirs.reserve(schema.dimension());
  for (const auto& f : schema.features) {
    dirs.push_back(f.hint == MonotoneHint::decreasing ? -1 : +1);
  }
  return dirs;
}

}  // namespace pairfact

#endif  // PAIRFACT_BASELINES_HPP
