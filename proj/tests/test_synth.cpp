#include <catch2/catch.hpp>

#include <cmath>
#include <functional>
#include <map>

#include "helpers.hpp"
#include "pairfact/eval.hpp"
#include "pairfact/fit.hpp"
#include "pairfact/synth.hpp"

using namespace pairfact;

namespace {

constexpr double kPhi1 = 0.8413447460685429;
constexpr double kPhi2 = 0.9772498680518208;
constexpr double kPhi3 = 0.9986501019683699;

Alternative patient(double deps, double lyg, double wait, double crimes) {
  return Alternative{{deps, lyg, wait, crimes}};
}

std::vector<Alternative> all_alternatives(const FeatureSchema& schema) {
  std::vector<Alternative> all;
  std::vector<std::size_t> odo(schema.dimension(), 0);
  for (;;) {
    Alternative x;
    for (std::size_t i = 0; i < schema.dimension(); ++i) {
      x.values.push_back(schema.features[i].values[odo[i]]);
    }
    all.push_back(std::move(x));
    std::size_t i = schema.dimension();
    while (i-- > 0) {
      if (++odo[i] < schema.features[i].values.size()) break;
      odo[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  return all;
}

// Brute-force Bayes accuracy: E[max(p, 1-p)] over the full scenario cross
// product. Independent of the stratum enumeration inside bayes_accuracy.
double enumerated_bayes(const std::function<double(const Alternative&,
                                                   const Alternative&)>& prob,
                        const FeatureSchema& schema) {
  auto all = all_alternatives(schema);
  // Kahan summation: ~3M terms would otherwise drift past 1e-11.
  double total = 0.0, carry = 0.0;
  for (const auto& a : all) {
    for (const auto& b : all) {
      double p = prob(a, b);
      double term = std::max(p, 1.0 - p) - carry;
      double next = total + term;
      carry = (next - total) - term;
      total = next;
    }
  }
  return total / (static_cast<double>(all.size()) * static_cast<double>(all.size()));
}

}  // namespace

TEST_CASE("synthetic schema exposes the rule thresholds") {
  FeatureSchema schema = synthetic_schema();
  REQUIRE(schema.dimension() == 4);
  CHECK(schema.features[0].name == "deps");
  CHECK(schema.features[2].name == "wait");
  CHECK(schema.value_index(2, 7.0).has_value());  // DM1's wait > 6 is expressible
  CHECK(schema.value_index(2, 5.0).has_value());  // DM3's wait >= 5 is expressible
  CHECK(schema.features[3].hint == MonotoneHint::decreasing);
  CHECK(validate_schema(schema).empty());
}

TEST_CASE("DM1 law matches the threshold-count normal CDF") {
  SimulatedDm dm{DmId::dm1};
  Alternative same = patient(1, 5, 3, 0);
  CHECK(dm.prob(same, same) == 0.5);
  // higher lyg, dependents 1 vs 0, wait 7 vs 3: k = 3
  CHECK(dm.prob(patient(1, 8, 7, 0), patient(0, 5, 3, 0)) ==
        Approx(kPhi3).margin(1e-12));
  // only lyg differs: k = 1
  CHECK(dm.prob(patient(1, 8, 3, 0), patient(1, 5, 3, 0)) ==
        Approx(kPhi1).margin(1e-12));
  // crimes are ignored entirely
  CHECK(dm.prob(patient(1, 5, 3, 3), patient(1, 5, 3, 0)) == 0.5);
  // wait 7 vs 6 crosses the > 6 threshold: k = 1
  CHECK(dm.prob(patient(1, 5, 7, 0), patient(1, 5, 6, 0)) ==
        Approx(kPhi1).margin(1e-12));
}

TEST_CASE("DM2 is lexicographic in deps indicator, lyg, wait") {
  SimulatedDm dm{DmId::dm2};
  CHECK(dm.prob(patient(2, 1, 0, 0), patient(0, 9, 9, 0)) == 1.0);
  CHECK(dm.prob(patient(1, 3, 0, 0), patient(3, 2, 9, 0)) == 1.0);  // lyg decides
  CHECK(dm.prob(patient(0, 2, 5, 0), patient(0, 2, 3, 0)) == 1.0);  // wait decides
  CHECK(dm.prob(patient(0, 2, 3, 0), patient(0, 2, 3, 2)) == 0.5);  // full tie
}

TEST_CASE("DM3 tallies log-transformed points") {
  SimulatedDm dm{DmId::dm3};
  // floor(ln(lyg)): 1..2 -> 0, 3..7 -> 1, 8..10 -> 2
  CHECK(dm.prob(patient(0, 3, 0, 0), patient(0, 2, 0, 0)) == 1.0);
  CHECK(dm.prob(patient(0, 2, 0, 0), patient(0, 1, 0, 0)) == 0.5);  // same bucket
  CHECK(dm.prob(patient(0, 8, 0, 0), patient(0, 7, 0, 0)) == 1.0);
  // deps enter linearly: 2 deps beat 1 dep + one threshold point tie
  CHECK(dm.prob(patient(2, 1, 0, 0), patient(1, 1, 5, 0)) == 0.5);
  CHECK(dm.prob(patient(0, 1, 5, 0), patient(0, 1, 4, 0)) == 1.0);  // wait >= 5
}

TEST_CASE("DM4 is lexicographic in the log bucket, deps, wait") {
  SimulatedDm dm{DmId::dm4};
  CHECK(dm.prob(patient(0, 8, 0, 0), patient(3, 7, 9, 0)) == 1.0);
  CHECK(dm.prob(patient(2, 4, 0, 0), patient(1, 5, 9, 0)) == 1.0);  // deps decide
  CHECK(dm.prob(patient(1, 4, 3, 0), patient(1, 5, 1, 0)) == 1.0);  // wait decides
  CHECK(dm.prob(patient(1, 4, 3, 0), patient(1, 5, 3, 0)) == 0.5);
}

TEST_CASE("DM5 counts favorable features with crimes reversed") {
  SimulatedDm dm{DmId::dm5};
  CHECK(dm.prob(patient(1, 5, 3, 1), patient(1, 5, 3, 1)) == 0.5);
  // first favored on deps, lyg, wait; second on crimes: 3 to 1
  CHECK(dm.prob(patient(2, 6, 4, 2), patient(1, 5, 3, 1)) == 1.0);
  // two-vs-two split
  CHECK(dm.prob(patient(2, 6, 3, 2), patient(1, 5, 4, 1)) == 0.5);
  // fewer crimes count in favor
  CHECK(dm.prob(patient(1, 5, 3, 0), patient(1, 5, 3, 2)) == 1.0);
}

TEST_CASE("CF1's life-years table applies only at zero dependents") {
  SimulatedDm dm{DmId::cf1};
  Link logistic{LinkKind::logistic};
  CHECK(dm.prob(patient(0, 7, 0, 0), patient(0, 4, 0, 0)) ==
        Approx(logistic.prob(3.0)).margin(1e-15));
  CHECK(dm.prob(patient(1, 7, 0, 0), patient(2, 4, 0, 0)) == 0.5);
  CHECK(dm.prob(patient(0, 7, 0, 0), patient(1, 4, 0, 0)) ==
        Approx(logistic.prob(7.0)).margin(1e-15));
}

TEST_CASE("every DM law is complementary bit for bit") {
  Rng rng(41);
  FeatureSchema schema = synthetic_schema();
  for (DmId id : {DmId::dm1, DmId::dm2, DmId::dm3, DmId::dm4, DmId::dm5, DmId::cf1}) {
    SimulatedDm dm{id};
    for (int i = 0; i < 10000; ++i) {
      Alternative a = sample_alternative(schema, rng);
      Alternative b = sample_alternative(schema, rng);
      CHECK(dm.prob(a, b) + dm.prob(b, a) == 1.0);
    }
  }
}

TEST_CASE("simulate is sized and seed-deterministic") {
  SimulatedDm dm{DmId::dm1};
  ComparisonDataset ds = simulate(dm, 1000, 9);
  CHECK(ds.records.size() == 1000);
  for (const auto& rec : ds.records) {
    validate_alternative(ds.schema, rec.first);
    validate_alternative(ds.schema, rec.second);
  }
  CHECK(serialize_dataset(simulate(dm, 1000, 9)) == serialize_dataset(ds));
  CHECK(serialize_dataset(simulate(dm, 1000, 10)) != serialize_dataset(ds));
}

TEST_CASE("DM1 empirical frequencies concentrate on the exact law") {
  SimulatedDm dm{DmId::dm1};
  ComparisonDataset ds = simulate(dm, 50000, 13);
  auto k_of = [](const ComparisonRecord& rec) {
    auto sgn = [](double a, double b) { return a > b ? 1 : (a < b ? -1 : 0); };
    int k = sgn(rec.first.values[1], rec.second.values[1]);
    k += (rec.first.values[0] >= 1 ? 1 : 0) - (rec.second.values[0] >= 1 ? 1 : 0);
    k += (rec.first.values[2] > 6 ? 1 : 0) - (rec.second.values[2] > 6 ? 1 : 0);
    return k;
  };
  std::map<int, std::pair<std::size_t, std::size_t>> strata;  // k -> (chosen, n)
  for (const auto& rec : ds.records) {
    auto& [chosen, n] = strata[k_of(rec)];
    chosen += rec.choice;
    ++n;
  }
  REQUIRE(strata.count(1) == 1);
  auto [chosen1, n1] = strata[1];
  double freq = static_cast<double>(chosen1) / static_cast<double>(n1);
  CHECK(freq == Approx(kPhi1).margin(0.01));
  // every sizable stratum within 3 binomial sigmas of its exact probability
  for (const auto& [k, counts] : strata) {
    auto [chosen, n] = counts;
    if (n < 50) continue;
    double p = k >= 0 ? (k == 0 ? 0.5 : (k == 1 ? kPhi1 : (k == 2 ? kPhi2 : kPhi3)))
                      : 1.0 - (k == -1 ? kPhi1 : (k == -2 ? kPhi2 : kPhi3));
    double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    CHECK(std::fabs(static_cast<double>(chosen) / static_cast<double>(n) - p) <=
          3.0 * sigma + 1e-9);
  }
}

TEST_CASE("bayes_accuracy matches the brute-force cross product") {
  FeatureSchema schema = synthetic_schema();
  for (DmId id : {DmId::dm1, DmId::dm2, DmId::dm3, DmId::dm4, DmId::dm5, DmId::cf1}) {
    SimulatedDm dm{id};
    double brute = enumerated_bayes(
        [&dm](const Alternative& a, const Alternative& b) { return dm.prob(a, b); },
        schema);
    CHECK(bayes_accuracy(dm) == Approx(brute).margin(1e-9));
  }
}

TEST_CASE("Bayes accuracy limiting cases") {
  FeatureSchema small;
  small.features.push_back({"a", {0, 1}, MonotoneHint::auto_detect});
  small.features.push_back({"b", {0, 1}, MonotoneHint::auto_detect});

  // pure noise earns exactly the coin rate
  CHECK(enumerated_bayes([](const Alternative&, const Alternative&) { return 0.5; },
                         small) == 0.5);

  // a deterministic complementary law is perfectly predictable except on
  // identical pairs, which complementarity forces to a coin
  auto lex = [](const Alternative& x, const Alternative& y) {
    if (x.values < y.values) return 0.0;
    if (y.values < x.values) return 1.0;
    return 0.5;
  };
  CHECK(enumerated_bayes(lex, small) == Approx(1.0 - 0.5 * (4.0 / 16.0)));
}

TEST_CASE("bayes_accuracy closed forms") {
  // DM1: convolve the three comparison statistics, then weight by Phi(|k|).
  // lyg sign: {9/20, 1/10, 9/20}; deps indicator diff: {3/16, 5/8, 3/16};
  // wait indicator diff: {28/121, 65/121, 28/121}.
  double expect_dm1 =
      (31.83125 * 0.5 + 56.675 * kPhi1 + 27.76875 * kPhi2 + 4.725 * kPhi3) / 121.0;
  CHECK(bayes_accuracy({DmId::dm1}) == Approx(expect_dm1).margin(1e-12));

  // DM2 ties need the deps indicator, lyg and wait all equal.
  double p_tie_dm2 = (5.0 / 8.0) * (1.0 / 10.0) * (1.0 / 11.0);
  CHECK(bayes_accuracy({DmId::dm2}) == Approx(1.0 - p_tie_dm2 / 2.0).margin(1e-15));

  // DM4 ties need the log bucket (probabilities .2/.5/.3), deps and wait equal.
  double p_tie_dm4 = 0.38 * (1.0 / 4.0) * (1.0 / 11.0);
  CHECK(bayes_accuracy({DmId::dm4}) == Approx(1.0 - p_tie_dm4 / 2.0).margin(1e-15));

  CHECK(bayes_accuracy({DmId::dm1}) == Approx(0.78888).margin(5e-4));
}

TEST_CASE("DM1 exhibits the transitivity-violation witness") {
  SimulatedDm dm{DmId::dm1};
  Alternative a = patient(2, 7, 0, 0);
  Alternative b = patient(1, 5, 0, 0);
  Alternative c = patient(1, 6, 0, 0);
  CHECK(dm.prob(a, b) == Approx(kPhi1).margin(1e-12));
  CHECK(dm.prob(a, c) == Approx(kPhi1).margin(1e-12));
  // a factored law would force H(b,c) = sigma(-1 + 1) = 0.5
  Link probit{LinkKind::probit};
  double implied = complete_transitive(probit, dm.prob(b, a), dm.prob(a, c));
  CHECK(implied == Approx(0.5).margin(1e-9));
  CHECK(std::fabs(dm.prob(b, c) - implied) >= kPhi1 - 0.5 - 1e-9);
}

TEST_CASE("fitted accuracy stays under the Bayes ceiling") {
  SimulatedDm dm{DmId::dm2};
  ComparisonDataset train = simulate(dm, 1000, 5);
  ComparisonDataset test = simulate(dm, 2000, 6);
  FitConfig cfg;
  cfg.seed = 5;
  TwoStageModel fitted = fit_two_stage(train, cfg, ContextSpec{});
  double acc = accuracy(
      [&fitted](const Alternative& x, const Alternative& y) {
        return fitted.choose(x, y);
      },
      test);
  CHECK(acc <= bayes_accuracy(dm) + 0.02);
}
