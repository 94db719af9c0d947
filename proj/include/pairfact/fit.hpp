#ifndef PAIRFACT_FIT_HPP
#define PAIRFACT_FIT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "pairfact/eval.hpp"
#include "pairfact/link.hpp"
#include "pairfact/minimize.hpp"
#include "pairfact/model.hpp"
#include "pairfact/parallel.hpp"
#include "pairfact/rng.hpp"
#include "pairfact/schema.hpp"

namespace pairfact {

enum class LossKind { cross_entropy, hinge };

inline const char* to_string(LossKind k) {
  return k == LossKind::cross_entropy ? "cross_entropy" : "hinge";
}

inline LossKind loss_from_string(const std::string& name) {
  if (name == "cross_entropy" || name == "ce") return LossKind::cross_entropy;
  if (name == "hinge") return LossKind::hinge;
  throw ValidationError("unknown loss kind '" + name + "'");
}

struct FitConfig {
  LossKind loss = LossKind::cross_entropy;
  Link link{LinkKind::logistic};
  double lambda = 1e-3;
  double ftol = 1e-7;
  int max_iter = 300;
  double cv_fraction = 0.2;
  std::uint64_t seed = 0;
  unsigned jobs = 0;  // worker pool for candidate fits; 0 = hardware concurrency
};

inline void validate_config(const FitConfig& config) {
  if (config.loss == LossKind::cross_entropy && !config.link.probabilistic()) {
    throw ValidationError("cross-entropy loss requires a logistic or probit link");
  }
  if (config.loss == LossKind::hinge && config.link.kind != LinkKind::identity) {
    throw ValidationError("hinge loss requires the identity link");
  }
  if (config.lambda < 0.0) throw ValidationError("lambda must be nonnegative");
  if (!(config.ftol > 0.0)) throw ValidationError("ftol must be positive");
  if (config.max_iter < 1) throw ValidationError("max_iter must be at least 1");
  if (!(config.cv_fraction > 0.0 && config.cv_fraction < 1.0)) {
    throw ValidationError("cv_fraction must lie in (0,1)");
  }
}

// Monotone table parameterization. For every non-context feature and context
// value the table is reconstructed as
//   h(v_0) = base,  h(v_k) = h(v_{k-1}) + direction * delta_k,  delta_k >= 0,
// which is monotone in the feature's shared direction by construction. The
// base is a free parameter only under a context (it absorbs the context
// feature's own effect, whose table is pinned to zero); without a context it
// is pure gauge and fixed to 0.
struct ParamLayout {
  std::vector<std::size_t> table_features;  // schema indices, ascending
  std::vector<std::size_t> domain_size;     // per block
  std::size_t contexts = 1;
  bool has_bases = false;
  std::vector<std::size_t> block_offset;    // start of each block
  std::size_t total = 0;

  static ParamLayout build(const FeatureSchema& schema, const ContextSpec& context) {
    ParamLayout layout;
    layout.contexts = context.empty()
                          ? 1
                          : schema.features[*context.feature].values.size();
    layout.has_bases = layout.contexts > 1;
    for (std::size_t i = 0; i < schema.dimension(); ++i) {
      if (!context.empty() && *context.feature == i) continue;
      layout.block_offset.push_back(layout.total);
      layout.table_features.push_back(i);
      layout.domain_size.push_back(schema.features[i].values.size());
      layout.total += layout.contexts * layout.segment_size(schema.features[i].values.size());
    }
    return layout;
  }

  std::size_t segment_size(std::size_t m) const {
    return (has_bases ? 1 : 0) + (m - 1);
  }

  // Start of the parameter segment of (block, context value).
  std::size_t segment(std::size_t block, std::size_t c) const {
    return block_offset[block] + c * segment_size(domain_size[block]);
  }

  // True where the coordinate is a nonnegative increment (as opposed to a base).
  std::vector<bool> increment_mask() const {
    std::vector<bool> mask(total, true);
    if (!has_bases) return mask;
    for (std::size_t b = 0; b < table_features.size(); ++b) {
      for (std::size_t c = 0; c < contexts; ++c) {
        mask[segment(b, c)] = false;
      }
    }
    return mask;
  }
};

// Loss-plus-regularizer objective over the increment/base parameterization,
// with exact analytic gradients. Directions are fixed at construction; the
// unconstrained pilot phase uses +1 everywhere.
class FitObjective {
 public:
  FitObjective(const ComparisonDataset& dataset, const FitConfig& config,
               const ContextSpec& context, std::vector<int> directions)
      : config_(config),
        context_(context),
        layout_(ParamLayout::build(dataset.schema, context)),
        directions_(std::move(directions)) {
    validate_config(config_);
    if (directions_.size() != layout_.table_features.size()) {
      throw ValidationError("one direction per fitted feature required");
    }
    compile(dataset);
  }

  const ParamLayout& layout() const { return layout_; }
  int saturated() const { return saturated_; }

  // Table entry values implied by a parameter vector.
  std::vector<std::vector<std::vector<double>>> entries(
      const std::vector<double>& params) const {
    std::vector<std::vector<std::vector<double>>> h(layout_.table_features.size());
    for (std::size_t b = 0; b < h.size(); ++b) {
      const std::size_t m = layout_.domain_size[b];
      h[b].assign(layout_.contexts, std::vector<double>(m, 0.0));
      for (std::size_t c = 0; c < layout_.contexts; ++c) {
        std::size_t seg = layout_.segment(b, c);
        double acc = layout_.has_bases ? params[seg] : 0.0;
        std::size_t delta0 = seg + (layout_.has_bases ? 1 : 0);
        h[b][c][0] = acc;
        for (std::size_t k = 1; k < m; ++k) {
          acc += static_cast<double>(directions_[b]) * params[delta0 + k - 1];
          h[b][c][k] = acc;
        }
      }
    }
    return h;
  }

  double eval(const std::vector<double>& params, std::vector<double>* grad) const {
    if (params.size() != layout_.total) {
      throw ValidationError("parameter vector has the wrong length");
    }
    auto h = entries(params);

    // Entry-level gradient, folded into the parameterization afterwards.
    std::vector<std::vector<std::vector<double>>> ge;
    if (grad) {
      ge.resize(h.size());
      for (std::size_t b = 0; b < h.size(); ++b) {
        ge[b].assign(layout_.contexts,
                     std::vector<double>(layout_.domain_size[b], 0.0));
      }
    }

    double loss = 0.0;
    int saturated = 0;
    for (const auto& rec : compiled_) {
      double diff = 0.0;
      for (std::size_t b = 0; b < h.size(); ++b) {
        diff += h[b][rec.ctx1][rec.v1[b]] - h[b][rec.ctx2][rec.v2[b]];
      }
      double dloss_ddiff = 0.0;
      if (config_.loss == LossKind::cross_entropy) {
        double p = config_.link.prob(diff);
        double pc = std::clamp(p, 1e-12, 1.0 - 1e-12);
        if (p != pc) ++saturated;
        loss -= rec.r ? std::log(pc) : std::log1p(-pc);
        if (grad) {
          if (config_.link.kind == LinkKind::logistic) {
            dloss_ddiff = p - static_cast<double>(rec.r);
          } else {
            double dens = detail::normal_pdf(diff);
            dloss_ddiff = rec.r ? -dens / pc : dens / (1.0 - pc);
          }
        }
      } else {
        double margin = rec.r ? 1.0 : -1.0;
        double v = 1.0 - margin * diff;
        if (v > 0.0) {
          loss += v;
          dloss_ddiff = -margin;
        }
      }
      if (grad && dloss_ddiff != 0.0) {
        for (std::size_t b = 0; b < h.size(); ++b) {
          ge[b][rec.ctx1][rec.v1[b]] += dloss_ddiff;
          ge[b][rec.ctx2][rec.v2[b]] -= dloss_ddiff;
        }
      }
    }
    saturated_ = saturated;

    // Context-smoothing penalty: lambda * sum over features, unordered context
    // pairs and feature values of the squared entry difference.
    if (config_.lambda > 0.0 && layout_.contexts > 1) {
      const double lambda = config_.lambda;
      const double nc = static_cast<double>(layout_.contexts);
      for (std::size_t b = 0; b < h.size(); ++b) {
        for (std::size_t k = 0; k < layout_.domain_size[b]; ++k) {
          double sum = 0.0, sumsq = 0.0;
          for (std::size_t c = 0; c < layout_.contexts; ++c) {
            sum += h[b][c][k];
            sumsq += h[b][c][k] * h[b][c][k];
          }
          // sum over unordered pairs (a,b) of (h_a - h_b)^2.
          loss += lambda * (nc * sumsq - sum * sum);
          if (grad) {
            for (std::size_t c = 0; c < layout_.contexts; ++c) {
              ge[b][c][k] += lambda * 2.0 * (nc * h[b][c][k] - sum);
            }
          }
        }
      }
    }

    if (grad) {
      grad->assign(layout_.total, 0.0);
      for (std::size_t b = 0; b < h.size(); ++b) {
        const std::size_t m = layout_.domain_size[b];
        for (std::size_t c = 0; c < layout_.contexts; ++c) {
          std::size_t seg = layout_.segment(b, c);
          std::size_t delta0 = seg + (layout_.has_bases ? 1 : 0);
          double suffix = 0.0;
          for (std::size_t k = m; k-- > 1;) {
            suffix += ge[b][c][k];
            (*grad)[delta0 + k - 1] = static_cast<double>(directions_[b]) * suffix;
          }
          suffix += ge[b][c][0];
          if (layout_.has_bases) (*grad)[seg] = suffix;
        }
      }
    }
    return loss;
  }

  std::vector<EditingTable> build_tables(const std::vector<double>& params) const {
    auto h = entries(params);
    std::vector<EditingTable> tables;
    tables.reserve(h.size());
    for (std::size_t b = 0; b < h.size(); ++b) {
      EditingTable table;
      table.feature = layout_.table_features[b];
      table.direction = directions_[b];
      table.scores = std::move(h[b]);
      tables.push_back(std::move(table));
    }
    return tables;
  }

 private:
  struct CompiledRecord {
    std::size_t ctx1 = 0, ctx2 = 0;
    std::vector<std::size_t> v1, v2;
    int r = 1;
  };

  void compile(const ComparisonDataset& dataset) {
    compiled_.reserve(dataset.records.size());
    for (std::size_t n = 0; n < dataset.records.size(); ++n) {
      const auto& rec = dataset.records[n];
      CompiledRecord c;
      c.r = rec.choice;
      auto lookup = [&](const Alternative& x, std::size_t feature) {
        auto idx = dataset.schema.value_index(feature, x.values[feature]);
        if (!idx) {
          throw ValidationError("value " + fmt_double(x.values[feature]) +
                                " not in domain of " +
                                dataset.schema.features[feature].name + " (record " +
                                std::to_string(n + 1) + ")");
        }
        return *idx;
      };
      if (!context_.empty()) {
        c.ctx1 = lookup(rec.first, *context_.feature);
        c.ctx2 = lookup(rec.second, *context_.feature);
      }
      c.v1.reserve(layout_.table_features.size());
      c.v2.reserve(layout_.table_features.size());
      for (std::size_t feature : layout_.table_features) {
        c.v1.push_back(lookup(rec.first, feature));
        c.v2.push_back(lookup(rec.second, feature));
      }
      compiled_.push_back(std::move(c));
    }
  }

  FitConfig config_;
  ContextSpec context_;
  ParamLayout layout_;
  std::vector<int> directions_;
  std::vector<CompiledRecord> compiled_;
  mutable int saturated_ = 0;
};

namespace detail {

inline std::vector<int> hint_directions(const FeatureSchema& schema,
                                        const ParamLayout& layout) {
  std::vector<int> dirs;
  dirs.reserve(layout.table_features.size());
  for (std::size_t feature : layout.table_features) {
    switch (schema.features[feature].hint) {
      case MonotoneHint::increasing: dirs.push_back(+1); break;
      case MonotoneHint::decreasing: dirs.push_back(-1); break;
      default: dirs.push_back(0); break;  // resolved by the pilot phase
    }
  }
  return dirs;
}

}  // namespace detail

// Learns the editing tables in two phases. Phase 1 fits with sign-free
// increments to pick each auto-hinted feature's direction from its fitted
// total trend; phase 2 reruns the minimization with increments projected to
// be nonnegative, which makes every returned table feasible by construction.
inline TwoStageModel fit_two_stage(const ComparisonDataset& dataset,
                                   const FitConfig& config,
                                   const ContextSpec& context) {
  validate_config(config);
  require_valid_schema(dataset.schema);
  if (dataset.records.empty()) {
    throw ValidationError("cannot fit on an empty dataset");
  }
  if (!context.empty()) {
    if (*context.feature >= dataset.schema.dimension()) {
      throw ValidationError("context feature index out of range");
    }
    if (dataset.schema.dimension() < 2) {
      throw ValidationError("a context requires at least two features");
    }
  }

  ParamLayout layout = ParamLayout::build(dataset.schema, context);
  std::vector<int> directions = detail::hint_directions(dataset.schema, layout);
  bool needs_pilot = std::any_of(directions.begin(), directions.end(),
                                 [](int d) { return d == 0; });

  std::vector<double> params(layout.total, 0.0);
  if (needs_pilot) {
    std::vector<int> pilot_dirs(directions.size(), +1);
    FitObjective pilot(dataset, config, context, pilot_dirs);
    Rng noise(derive_seed(config.seed, "fit-pilot"));
    for (double& p : params) p = noise.next_in(-1e-3, 1e-3);
    MinimizeOptions options{config.ftol, std::max(1, config.max_iter / 3)};
    minimize_projected(params, [&](const std::vector<double>& x,
                                   std::vector<double>* g) { return pilot.eval(x, g); },
                       [](std::vector<double>&) {}, options);

    for (std::size_t b = 0; b < directions.size(); ++b) {
      if (directions[b] != 0) continue;
      double trend = 0.0;
      const std::size_t m = layout.domain_size[b];
      for (std::size_t c = 0; c < layout.contexts; ++c) {
        std::size_t delta0 = layout.segment(b, c) + (layout.has_bases ? 1 : 0);
        for (std::size_t k = 0; k + 1 < m; ++k) trend += params[delta0 + k];
      }
      directions[b] = trend < 0.0 ? -1 : +1;
    }
    // Carry the pilot solution into the feasible parameterization: increments
    // are re-expressed against the chosen direction and clipped at zero.
    auto mask = layout.increment_mask();
    for (std::size_t b = 0; b < directions.size(); ++b) {
      const std::size_t seg_len = layout.segment_size(layout.domain_size[b]);
      for (std::size_t c = 0; c < layout.contexts; ++c) {
        std::size_t seg = layout.segment(b, c);
        for (std::size_t k = 0; k < seg_len; ++k) {
          if (mask[seg + k]) {
            params[seg + k] =
                std::max(0.0, static_cast<double>(directions[b]) * params[seg + k]);
          }
        }
      }
    }
  }

  FitObjective objective(dataset, config, context, directions);
  auto mask = layout.increment_mask();
  auto project = [mask](std::vector<double>& x) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (mask[i] && x[i] < 0.0) x[i] = 0.0;
    }
  };
  MinimizeOptions options{config.ftol, config.max_iter};
  MinimizeResult res = minimize_projected(
      params,
      [&](const std::vector<double>& x, std::vector<double>* g) {
        return objective.eval(x, g);
      },
      project, options);

  TwoStageModel model;
  model.schema = dataset.schema;
  model.context = context;
  model.link = config.link;
  model.tables = objective.build_tables(params);
  model.metadata.loss = to_string(config.loss);
  model.metadata.lambda = config.lambda;
  model.metadata.seed = config.seed;
  model.metadata.train_loss = res.loss;
  model.metadata.ftol = config.ftol;
  model.metadata.max_iter = config.max_iter;
  model.metadata.cv_fraction = config.cv_fraction;
  model.metadata.iterations = res.iterations;
  model.metadata.saturated_records = objective.saturated();
  return model;
}

struct ContextSelection {
  ContextSpec context;
  TwoStageModel model;
  std::vector<double> holdout_error;       // per candidate, NaN where failed
  std::vector<std::string> diagnostics;
};

// Cross-validated context choice: hold out cv_fraction of the data, fit one
// candidate per omega in {none} + all singletons, and score each by holdout
// 0-1 error (ties credit 0.5). Selection applies the one-standard-error rule:
// among candidates within one binomial standard error of the lowest error,
// the earliest wins, with no-context first and features in index order. A
// plain argmin flips on holdout noise between near-equivalent candidates;
// widening the tie to one standard error keeps the preference for the
// simpler unconditional model exactly where the extra context earns nothing.
inline ContextSelection select_context(const ComparisonDataset& dataset,
                                       const FitConfig& config) {
  validate_config(config);
  if (dataset.records.empty()) {
    throw ValidationError("cannot select a context on an empty dataset");
  }
  auto [train, holdout] = split_dataset(dataset, 1.0 - config.cv_fraction,
                                        derive_seed(config.seed, "context-cv"));

  std::vector<ContextSpec> candidates{ContextSpec{}};
  if (dataset.schema.dimension() >= 2) {
    for (std::size_t i = 0; i < dataset.schema.dimension(); ++i) {
      candidates.push_back(ContextSpec{i});
    }
  }

  ContextSelection selection;
  selection.holdout_error.assign(candidates.size(),
                                 std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> errors(candidates.size());
  parallel_for(candidates.size(), config.jobs, [&](std::size_t k) {
    try {
      TwoStageModel candidate = fit_two_stage(train, config, candidates[k]);
      ChoiceFn predict = [&candidate](const Alternative& a, const Alternative& b) {
        return candidate.choose(a, b);
      };
      selection.holdout_error[k] = 1.0 - accuracy(predict, holdout);
    } catch (const Error& e) {
      errors[k] = e.what();
    }
  });

  std::size_t best = candidates.size();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (std::isnan(selection.holdout_error[k])) {
      std::string name = candidates[k].empty()
                             ? "none"
                             : dataset.schema.features[*candidates[k].feature].name;
      selection.diagnostics.push_back("candidate omega=" + name + " failed: " +
                                      errors[k]);
      continue;
    }
    if (best == candidates.size() ||
        selection.holdout_error[k] < selection.holdout_error[best]) {
      best = k;
    }
  }
  if (best == candidates.size()) {
    throw NumericalError("every context candidate failed to fit" +
                         (selection.diagnostics.empty()
                              ? std::string()
                              : "; first: " + selection.diagnostics.front()));
  }
  double err_best = selection.holdout_error[best];
  double threshold =
      err_best + std::sqrt(std::max(0.0, err_best * (1.0 - err_best)) /
                           static_cast<double>(holdout.records.size()));
  std::size_t picked = best;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (!std::isnan(selection.holdout_error[k]) &&
        selection.holdout_error[k] <= threshold) {
      picked = k;
      break;
    }
  }
  selection.context = candidates[picked];
  selection.model = fit_two_stage(dataset, config, selection.context);
  return selection;
}

}  // namespace pairfact

#endif  // PAIRFACT_FIT_HPP
