#ifndef PAIRFACT_EVAL_HPP
#define PAIRFACT_EVAL_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pairfact/common.hpp"
#include "pairfact/parallel.hpp"
#include "pairfact/rng.hpp"
#include "pairfact/schema.hpp"

namespace pairfact {

using ChoiceFn = std::function<Choice(const Alternative&, const Alternative&)>;
using ProbFn = std::function<double(const Alternative&, const Alternative&)>;

// Mean prediction credit over the dataset: 1 for a match, 0.5 for a tie,
// 0 otherwise. Ties earn the expected credit of an unbiased coin, which keeps
// the metric comparable with the Bayes ceiling of stochastic laws.
inline double accuracy(const ChoiceFn& predict, const ComparisonDataset& ds) {
  if (ds.records.empty()) {
    throw ValidationError("accuracy of an empty dataset is undefined");
  }
  double credit = 0.0;
  for (const auto& rec : ds.records) {
    Choice c = predict(rec.first, rec.second);
    if (c == Choice::tie) {
      credit += 0.5;
    } else if ((c == Choice::first) == (rec.choice == 1)) {
      credit += 1.0;
    }
  }
  return credit / static_cast<double>(ds.records.size());
}

// Mean cross-entropy of a probabilistic predictor, reported as a diagnostic
// alongside accuracy. Probabilities are clamped away from {0,1}.
inline double log_loss(const ProbFn& prob, const ComparisonDataset& ds) {
  if (ds.records.empty()) {
    throw ValidationError("log loss of an empty dataset is undefined");
  }
  double total = 0.0;
  for (const auto& rec : ds.records) {
    double p = std::clamp(prob(rec.first, rec.second), 1e-12, 1.0 - 1e-12);
    total -= rec.choice == 1 ? std::log(p) : std::log1p(-p);
  }
  return total / static_cast<double>(ds.records.size());
}

// A fitter maps a training dataset to a hard pairwise predictor.
using Fitter = std::function<ChoiceFn(const ComparisonDataset&)>;

struct BenchmarkOptions {
  int reps = 20;
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
  unsigned jobs = 0;  // 0 = hardware concurrency
};

struct BenchmarkResult {
  double mean = 0.0;
  double stddev = 0.0;  // sample (n-1) form; 0 for a single repetition
  std::vector<double> per_rep;            // NaN where the repetition failed
  std::vector<std::string> failures;      // "rep <r>: <diagnostic>"
};

// Repeated random-split evaluation. The dataset is first brought to a
// canonical order (sort, then one seeded shuffle) so results depend only on
// the multiset of records, not on their input order; each repetition then
// splits with a seed derived from (seed, rep).
inline BenchmarkResult benchmark(const Fitter& fit, const ComparisonDataset& ds,
                                 const BenchmarkOptions& options) {
  if (options.reps < 1) {
    throw ValidationError("benchmark needs at least one repetition");
  }
  ComparisonDataset canon = ds;
  std::sort(canon.records.begin(), canon.records.end(),
            [](const ComparisonRecord& a, const ComparisonRecord& b) {
              if (a.first.values != b.first.values) return a.first.values < b.first.values;
              if (a.second.values != b.second.values) {
                return a.second.values < b.second.values;
              }
              return a.choice < b.choice;
            });
  Rng rng(derive_seed(options.seed, "bench-canon"));
  shuffle(canon.records, rng);

  const std::size_t reps = static_cast<std::size_t>(options.reps);
  BenchmarkResult result;
  result.per_rep.assign(reps, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> diagnostics(reps);

  parallel_for(reps, options.jobs, [&](std::size_t r) {
    try {
      auto [train, test] =
          split_dataset(canon, options.train_fraction, derive_seed(options.seed, "bench-rep", r));
      ChoiceFn predictor = fit(train);
      result.per_rep[r] = accuracy(predictor, test);
    } catch (const Error& e) {
      diagnostics[r] = e.what();
    }
  });

  double sum = 0.0;
  std::size_t ok = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    if (std::isnan(result.per_rep[r])) {
      result.failures.push_back("rep " + std::to_string(r) + ": " + diagnostics[r]);
    } else {
      sum += result.per_rep[r];
      ++ok;
    }
  }
  if (ok == 0) {
    throw NumericalError("all benchmark repetitions failed: " +
                         (result.failures.empty() ? "" : result.failures.front()));
  }
  result.mean = sum / static_cast<double>(ok);
  if (ok > 1) {
    double ss = 0.0;
    for (double a : result.per_rep) {
      if (!std::isnan(a)) ss += (a - result.mean) * (a - result.mean);
    }
    result.stddev = std::sqrt(ss / static_cast<double>(ok - 1));
  }
  return result;
}

}  // namespace pairfact

#endif  // PAIRFACT_EVAL_HPP
