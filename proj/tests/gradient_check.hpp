#ifndef PAIRFACT_TESTS_GRADIENT_CHECK_HPP
#define PAIRFACT_TESTS_GRADIENT_CHECK_HPP

#include <cmath>
#include <vector>

#include "pairfact/fit.hpp"
#include "pairfact/rng.hpp"

namespace testing_support {

using namespace pairfact;

// Relative disagreement between the analytic gradient and central finite
// differences at step 1e-6, measured in vector norm.
inline double finite_difference_relerr(const FitObjective& objective,
                                       const std::vector<double>& params) {
  std::vector<double> analytic;
  objective.eval(params, &analytic);
  std::vector<double> numeric(params.size());
  const double h = 1e-6;
  std::vector<double> probe = params;
  for (std::size_t i = 0; i < params.size(); ++i) {
    double keep = probe[i];
    probe[i] = keep + h;
    double up = objective.eval(probe, nullptr);
    probe[i] = keep - h;
    double down = objective.eval(probe, nullptr);
    probe[i] = keep;
    numeric[i] = (up - down) / (2.0 * h);
  }
  double diff = 0.0, na = 0.0, nf = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    na += analytic[i] * analytic[i];
    nf += numeric[i] * numeric[i];
  }
  return std::sqrt(diff) / std::max(1.0, std::sqrt(na) + std::sqrt(nf));
}

// Random interior parameters; for hinge objectives they are resampled until
// no record margin sits inside the difference stencil (the subgradient kink
// would poison a two-sided estimate).
inline std::vector<double> safe_random_params(const FitObjective& objective,
                                              Rng& rng, bool hinge) {
  std::vector<double> params(objective.layout().total);
  for (int attempt = 0; attempt < 50; ++attempt) {
    for (double& p : params) p = rng.next_in(0.05, 1.2);
    if (!hinge) return params;
    bool near_kink = false;
    const double h = 2e-4;
    double center = objective.eval(params, nullptr);
    std::vector<double> probe = params;
    for (std::size_t i = 0; i < params.size() && !near_kink; ++i) {
      probe[i] = params[i] + h;
      double up = objective.eval(probe, nullptr);
      probe[i] = params[i] - h;
      double down = objective.eval(probe, nullptr);
      probe[i] = params[i];
      if (std::fabs(up + down - 2.0 * center) > 1e-9) near_kink = true;
    }
    if (!near_kink) return params;
  }
  return params;
}

// 75%-consistent single binary feature; the logistic MLE of the score gap is
// exactly ln 3.
inline ComparisonDataset binary_threequarters(std::size_t n) {
  ComparisonDataset ds;
  FeatureSchema schema;
  schema.features.push_back({"flag", {0, 1}, MonotoneHint::auto_detect});
  ds.schema = schema;
  for (std::size_t i = 0; i < n / 2; ++i) {
    ds.records.push_back({{{1}}, {{0}}, i % 4 != 3 ? 1 : 0});
    ds.records.push_back({{{0}}, {{1}}, i % 4 != 3 ? 0 : 1});
  }
  return ds;
}

}  // namespace testing_support

#endif  // PAIRFACT_TESTS_GRADIENT_CHECK_HPP
