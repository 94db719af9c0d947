#include <catch2/catch.hpp>

#include <cmath>

#include "helpers.hpp"
#include "pairfact/baselines.hpp"
#include "pairfact/model.hpp"

using namespace pairfact;
using testing_support::coin_flip_dataset;

namespace {

FeatureSchema pair_schema(double second_gap = 1.0) {
  FeatureSchema s;
  s.features.push_back({"u", {0, 1}, MonotoneHint::auto_detect});
  s.features.push_back({"v", {0, second_gap}, MonotoneHint::auto_detect});
  return s;
}

}  // namespace

TEST_CASE("predict_linear closed forms and symmetry") {
  LinearModel zero{pair_schema(), {0.0, 0.0}};
  CHECK(zero.prob({{0, 1}}, {{1, 0}}) == 0.5);

  LinearModel unit{pair_schema(), {1.0, 0.0}};
  Alternative hi{{1, 0}}, lo{{0, 0}};
  CHECK(unit.prob(hi, lo) == Approx(1.0 / (1.0 + std::exp(-1.0))).margin(1e-15));
  CHECK(unit.prob(hi, lo) + unit.prob(lo, hi) == Approx(1.0).margin(1e-12));
  CHECK(unit.choose(hi, lo) == Choice::first);
  CHECK(unit.choose(hi, hi) == Choice::tie);

  // w = (1), difference ln 3 gives 0.75
  FeatureSchema s;
  s.features.push_back({"x", {0, std::log(3.0)}, MonotoneHint::auto_detect});
  LinearModel m{s, {1.0}};
  CHECK(m.prob({{std::log(3.0)}}, {{0}}) == Approx(0.75).margin(1e-12));
}

TEST_CASE("coin flips fit to near-zero weights") {
  Rng rng(51);
  ComparisonDataset ds = coin_flip_dataset(pair_schema(2.0), 2000, rng);
  LinearModel m = fit_symmetric_logistic(ds, {1e-6, 1e-9, 300, 0});
  for (double w : m.weights) CHECK(std::fabs(w) < 0.1);
}

TEST_CASE("single-feature 75 percent consistency recovers ln3 over the gap") {
  for (double gap : {1.0, 2.0}) {
    FeatureSchema s;
    s.features.push_back({"x", {0, gap}, MonotoneHint::auto_detect});
    ComparisonDataset ds;
    ds.schema = s;
    for (int i = 0; i < 1000; ++i) {
      ds.records.push_back({{{gap}}, {{0}}, i % 4 != 3 ? 1 : 0});
      ds.records.push_back({{{0}}, {{gap}}, i % 4 != 3 ? 0 : 1});
    }
    LinearModel m = fit_symmetric_logistic(ds, {0.0, 1e-9, 300, 0});
    CHECK(m.weights[0] == Approx(std::log(3.0) / gap).margin(0.02));
  }
}

TEST_CASE("a known linear law is recovered at N=5000") {
  Rng rng(52);
  FeatureSchema s;
  s.features.push_back({"a", {0, 1, 2}, MonotoneHint::auto_detect});
  s.features.push_back({"b", {0, 1, 2, 3}, MonotoneHint::auto_detect});
  s.features.push_back({"c", {0, 1}, MonotoneHint::auto_detect});
  LinearModel truth{s, {0.8, -0.5, 1.2}};
  ComparisonDataset ds;
  ds.schema = s;
  for (int i = 0; i < 5000; ++i) {
    ComparisonRecord rec;
    rec.first = sample_alternative(s, rng);
    rec.second = sample_alternative(s, rng);
    rec.choice = rng.next_bernoulli(truth.prob(rec.first, rec.second)) ? 1 : 0;
    ds.records.push_back(std::move(rec));
  }
  LinearModel fitted = fit_symmetric_logistic(ds, {1e-6, 1e-9, 300, 0});
  for (std::size_t i = 0; i < truth.weights.size(); ++i) {
    CHECK(std::fabs(fitted.weights[i] - truth.weights[i]) < 0.1);
  }
}

TEST_CASE("a two-stage model with linear tables reproduces the linear baseline") {
  Rng rng(53);
  FeatureSchema s = testing_support::random_schema(rng);
  std::vector<double> w;
  for (std::size_t i = 0; i < s.dimension(); ++i) w.push_back(rng.next_in(-1.5, 1.5));
  LinearModel linear{s, w};

  TwoStageModel m;
  m.schema = s;
  m.link.kind = LinkKind::logistic;
  for (std::size_t i = 0; i < s.dimension(); ++i) {
    EditingTable t;
    t.feature = i;
    t.direction = w[i] >= 0 ? +1 : -1;
    std::vector<double> row;
    for (double v : s.features[i].values) row.push_back(w[i] * v);
    t.scores.push_back(std::move(row));
    m.tables.push_back(std::move(t));
  }
  for (int i = 0; i < 200; ++i) {
    Alternative a = sample_alternative(s, rng);
    Alternative b = sample_alternative(s, rng);
    CHECK(std::fabs(m.prob(a, b) - linear.prob(a, b)) <= 1e-12);
  }
}

TEST_CASE("tallying votes by sign with fixed directions") {
  std::vector<int> dirs{+1, +1, +1, -1};
  Alternative a{{2, 6, 4, 2}}, b{{1, 5, 3, 1}};
  CHECK(tallying_choice(dirs, a, b) == Choice::first);   // 3 votes to 1
  CHECK(tallying_choice(dirs, a, a) == Choice::tie);
  Alternative c{{2, 6, 3, 2}}, d{{1, 5, 4, 1}};
  CHECK(tallying_choice(dirs, c, d) == Choice::tie);     // 2-2 split
  CHECK(tallying_choice(dirs, d, c) == Choice::tie);
  CHECK(tallying_choice(dirs, b, a) == Choice::second);  // outcome swap
}

TEST_CASE("tallying directions default to the schema hints") {
  FeatureSchema s;
  s.features.push_back({"up", {0, 1}, MonotoneHint::increasing});
  s.features.push_back({"free", {0, 1}, MonotoneHint::auto_detect});
  s.features.push_back({"down", {0, 1}, MonotoneHint::decreasing});
  CHECK(tallying_directions(s) == std::vector<int>{+1, +1, -1});
}

TEST_CASE("linear model file lists weights by feature name") {
  LinearModel m{pair_schema(), {0.5, -1.25}};
  std::string text = serialize_linear_model(m);
  CHECK(text.find("\"u\": 0.5") != std::string::npos);
  CHECK(text.find("\"v\": -1.25") != std::string::npos);
}
