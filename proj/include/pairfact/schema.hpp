#ifndef PAIRFACT_SCHEMA_HPP
#define PAIRFACT_SCHEMA_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pairfact/common.hpp"
#include "pairfact/rng.hpp"

namespace pairfact {

enum class MonotoneHint { auto_detect, increasing, decreasing };

inline const char* to_string(MonotoneHint h) {
  switch (h) {
    case MonotoneHint::increasing: return "increasing";
    case MonotoneHint::decreasing: return "decreasing";
    default: return "auto";
  }
}

inline MonotoneHint hint_from_string(const std::string& name) {
  if (name == "auto") return MonotoneHint::auto_detect;
  if (name == "increasing") return MonotoneHint::increasing;
  if (name == "decreasing") return MonotoneHint::decreasing;
  throw ValidationError("unknown monotone_hint '" + name + "'");
}

// One named feature with its ordered discrete value domain.
struct FeatureSpec {
  std::string name;
  std::vector<double> values;  // strictly increasing
  MonotoneHint hint = MonotoneHint::auto_detect;
};

struct FeatureSchema {
  std::vector<FeatureSpec> features;

  std::size_t dimension() const { return features.size(); }

  std::optional<std::size_t> feature_index(const std::string& name) const {
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (features[i].name == name) return i;
    }
    return std::nullopt;
  }

  // Position of `value` in the feature's domain. Membership is literal: the
  // domains here are small discrete grids, so values must match the schema
  // entry bit for bit.
  std::optional<std::size_t> value_index(std::size_t feature, double value) const {
    const auto& vals = features[feature].values;
    auto it = std::lower_bound(vals.begin(), vals.end(), value);
    if (it != vals.end() && *it == value) {
      return static_cast<std::size_t>(it - vals.begin());
    }
    return std::nullopt;
  }

  bool operator==(const FeatureSchema& other) const {
    if (features.size() != other.features.size()) return false;
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (features[i].name != other.features[i].name ||
          features[i].values != other.features[i].values ||
          features[i].hint != other.features[i].hint) {
        return false;
      }
    }
    return true;
  }
};

// Violations are data, not failures: an empty list means the schema is valid.
inline std::vector<std::string> validate_schema(const FeatureSchema& schema) {
  std::vector<std::string> violations;
  if (schema.features.empty()) {
    violations.push_back("schema has no features");
  }
  std::set<std::string> seen;
  for (const auto& f : schema.features) {
    if (f.name.empty()) {
      violations.push_back("empty feature name");
    }
    if (!seen.insert(f.name).second) {
      violations.push_back("duplicate feature name '" + f.name + "'");
    }
    if (f.values.size() < 2) {
      violations.push_back("feature '" + f.name + "' has fewer than 2 values");
    }
    for (double v : f.values) {
      if (!std::isfinite(v)) {
        violations.push_back("feature '" + f.name + "' has a non-finite value");
        break;
      }
    }
    for (std::size_t k = 1; k < f.values.size(); ++k) {
      if (!(f.values[k - 1] < f.values[k])) {
        violations.push_back("feature '" + f.name +
                             "' values not strictly increasing");
        break;
      }
    }
  }
  return violations;
}

inline void require_valid_schema(const FeatureSchema& schema) {
  auto violations = validate_schema(schema);
  if (!violations.empty()) {
    std::string msg = "invalid schema:";
    for (const auto& v : violations) msg += " " + v + ";";
    throw ValidationError(msg);
  }
}

// One option, positionally aligned with the schema features.
struct Alternative {
  std::vector<double> values;

  bool operator==(const Alternative& other) const { return values == other.values; }
  bool operator<(const Alternative& other) const { return values < other.values; }
};

struct ComparisonRecord {
  Alternative first;
  Alternative second;
  int choice = 1;  // 1 = first chosen

  bool operator==(const ComparisonRecord& o) const {
    return first == o.first && second == o.second && choice == o.choice;
  }
};

struct ComparisonDataset {
  FeatureSchema schema;
  std::vector<ComparisonRecord> records;

  std::size_t size() const { return records.size(); }
};

inline void validate_alternative(const FeatureSchema& schema, const Alternative& x,
                                 const char* what = "alternative") {
  if (x.values.size() != schema.dimension()) {
    throw ValidationError(std::string(what) + " has " +
                          std::to_string(x.values.size()) + " values, schema has " +
                          std::to_string(schema.dimension()) + " features");
  }
  for (std::size_t i = 0; i < schema.dimension(); ++i) {
    if (!schema.value_index(i, x.values[i])) {
      throw ValidationError("value " + fmt_double(x.values[i]) +
                            " not in domain of " + schema.features[i].name);
    }
  }
}

inline Alternative sample_alternative(const FeatureSchema& schema, Rng& rng) {
  Alternative x;
  x.values.reserve(schema.dimension());
  for (const auto& f : schema.features) {
    x.values.push_back(f.values[rng.next_below(f.values.size())]);
  }
  return x;
}

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  cells.push_back(trim(cur));
  return cells;
}

}  // namespace detail

// Dataset CSV: header `a_<f1>,...,a_<fd>,b_<f1>,...,b_<fd>,choice` in schema
// order, then one row per comparison. Lines starting with '#' are comments
// and are skipped wherever they appear.
inline ComparisonDataset parse_dataset(const std::string& text,
                                       const FeatureSchema& schema) {
  require_valid_schema(schema);
  const std::size_t d = schema.dimension();

  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  ComparisonDataset ds;
  ds.schema = schema;
  std::size_t row = 0;

  while (std::getline(in, line)) {
    std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto cells = detail::split_csv_line(t);
    if (!header_seen) {
      std::vector<std::string> expected;
      for (const auto& f : schema.features) expected.push_back("a_" + f.name);
      for (const auto& f : schema.features) expected.push_back("b_" + f.name);
      expected.push_back("choice");
      for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i >= cells.size() || cells[i] != expected[i]) {
          throw ValidationError("malformed header: missing column " + expected[i]);
        }
      }
      if (cells.size() != expected.size()) {
        throw ValidationError("malformed header: " +
                              std::to_string(cells.size() - expected.size()) +
                              " unexpected trailing column(s)");
      }
      header_seen = true;
      continue;
    }
    ++row;
    if (cells.size() != 2 * d + 1) {
      throw ValidationError("row " + std::to_string(row) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(2 * d + 1));
    }
    ComparisonRecord rec;
    rec.first.values.resize(d);
    rec.second.values.resize(d);
    for (std::size_t i = 0; i < 2 * d; ++i) {
      const auto& fname = schema.features[i % d].name;
      std::string col = (i < d ? "a_" : "b_") + fname;
      double v = parse_double(cells[i], col.c_str());
      if (!schema.value_index(i % d, v)) {
        throw ValidationError("value " + cells[i] + " not in domain of " + fname +
                              " (row " + std::to_string(row) + ")");
      }
      (i < d ? rec.first : rec.second).values[i % d] = v;
    }
    const std::string& choice_cell = cells[2 * d];
    if (choice_cell == "0") {
      rec.choice = 0;
    } else if (choice_cell == "1") {
      rec.choice = 1;
    } else {
      throw ValidationError("choice must be 0 or 1, got '" + choice_cell +
                            "' (row " + std::to_string(row) + ")");
    }
    ds.records.push_back(std::move(rec));
  }
  if (!header_seen) {
    throw ValidationError("malformed header: missing column a_" +
                          schema.features[0].name);
  }
  return ds;
}

inline std::string serialize_dataset(const ComparisonDataset& ds) {
  std::string out;
  for (const auto& f : ds.schema.features) out += "a_" + f.name + ",";
  for (const auto& f : ds.schema.features) out += "b_" + f.name + ",";
  out += "choice\n";
  for (const auto& rec : ds.records) {
    for (double v : rec.first.values) out += fmt_double(v) + ",";
    for (double v : rec.second.values) out += fmt_double(v) + ",";
    out += rec.choice ? "1\n" : "0\n";
  }
  return out;
}

// Seeded 70/30-style split. A Fisher-Yates permutation of the record indices
// is drawn from the pinned generator; the first floor(fraction*N) permuted
// records form the training set. Identical seed, identical split.
inline std::pair<ComparisonDataset, ComparisonDataset> split_dataset(
    const ComparisonDataset& ds, double train_fraction, std::uint64_t seed) {
  if (ds.records.empty()) {
    throw ValidationError("cannot split an empty dataset");
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ValidationError("train_fraction must lie in (0,1)");
  }
  const std::size_t n = ds.records.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  shuffle(order, rng);

  const std::size_t n_train =
      static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train == n) {
    throw ValidationError("split leaves an empty train or test partition");
  }
  ComparisonDataset train{ds.schema, {}};
  ComparisonDataset test{ds.schema, {}};
  train.records.reserve(n_train);
  test.records.reserve(n - n_train);
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_train ? train : test).records.push_back(ds.records[order[i]]);
  }
  return {std::move(train), std::move(test)};
}

}  // namespace pairfact

#endif  // PAIRFACT_SCHEMA_HPP
