#ifndef PAIRFACT_MODEL_IO_HPP
#define PAIRFACT_MODEL_IO_HPP

#include <algorithm>
#include <string>

#include <json.hpp>

#include "pairfact/model.hpp"

namespace pairfact {

// Model files and schema files are JSON. Numeric table keys are written in
// shortest round-trip form so that serialize -> parse is the identity.

inline nlohmann::json schema_to_json(const FeatureSchema& schema) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : schema.features) {
    features.push_back({{"name", f.name},
                        {"values", f.values},
                        {"monotone_hint", to_string(f.hint)}});
  }
  return {{"features", features}};
}

inline FeatureSchema schema_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("features") || !j["features"].is_array()) {
    throw ValidationError("schema file must contain a 'features' array");
  }
  FeatureSchema schema;
  for (const auto& f : j["features"]) {
    FeatureSpec spec;
    if (!f.contains("name") || !f["name"].is_string()) {
      throw ValidationError("schema feature missing 'name'");
    }
    spec.name = f["name"].get<std::string>();
    if (!f.contains("values") || !f["values"].is_array()) {
      throw ValidationError("schema feature '" + spec.name + "' missing 'values'");
    }
    for (const auto& v : f["values"]) {
      if (!v.is_number()) {
        throw ValidationError("non-numeric value in domain of '" + spec.name + "'");
      }
      spec.values.push_back(v.get<double>());
    }
    if (f.contains("monotone_hint")) {
      spec.hint = hint_from_string(f["monotone_hint"].get<std::string>());
    }
    schema.features.push_back(std::move(spec));
  }
  require_valid_schema(schema);
  return schema;
}

inline std::string serialize_schema(const FeatureSchema& schema) {
  return schema_to_json(schema).dump(2) + "\n";
}

inline FeatureSchema parse_schema(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("schema file is not valid JSON: ") + e.what());
  }
  return schema_from_json(j);
}

inline std::string serialize_model(const TwoStageModel& model) {
  validate_model(model);
  nlohmann::json j;
  j["link"] = to_string(model.link.kind);
  if (model.context.empty()) {
    j["omega"] = nullptr;
  } else {
    j["omega"] = model.schema.features[*model.context.feature].name;
  }
  j["features"] = schema_to_json(model.schema)["features"];

  nlohmann::json tables = nlohmann::json::object();
  for (const auto& table : model.tables) {
    const auto& spec = model.schema.features[table.feature];
    nlohmann::json per_context = nlohmann::json::object();
    for (std::size_t c = 0; c < table.scores.size(); ++c) {
      // "*" is the sentinel context key of unconditional models.
      std::string ctx_key =
          model.context.empty()
              ? "*"
              : fmt_double(model.schema.features[*model.context.feature].values[c]);
      nlohmann::json row = nlohmann::json::object();
      for (std::size_t k = 0; k < spec.values.size(); ++k) {
        row[fmt_double(spec.values[k])] = table.scores[c][k];
      }
      per_context[ctx_key] = std::move(row);
    }
    tables[spec.name] = std::move(per_context);
  }
  j["tables"] = std::move(tables);

  j["metadata"] = {{"loss", model.metadata.loss},
                   {"lambda", model.metadata.lambda},
                   {"seed", model.metadata.seed},
                   {"train_loss", model.metadata.train_loss},
                   {"ftol", model.metadata.ftol},
                   {"max_iter", model.metadata.max_iter},
                   {"cv_fraction", model.metadata.cv_fraction},
                   {"iterations", model.metadata.iterations},
                   {"saturated_records", model.metadata.saturated_records}};
  return j.dump(2) + "\n";
}

namespace detail {

// A stored table must be nondecreasing or nonincreasing in one direction
// shared across its context rows; constant tables default to +1.
inline int infer_direction(const TwoStageModel& model, const EditingTable& table,
                           const std::string& feature_name) {
  std::size_t bad_row = 0;
  for (int dir : {+1, -1}) {
    bool ok = true;
    for (std::size_t c = 0; ok && c < table.scores.size(); ++c) {
      const auto& row = table.scores[c];
      for (std::size_t k = 0; k + 1 < row.size(); ++k) {
        if ((row[k + 1] - row[k]) * dir < 0.0) {
          ok = false;
          bad_row = c;
          break;
        }
      }
    }
    if (ok) return dir;
  }
  std::string where =
      model.context.empty()
          ? std::string("*")
          : fmt_double(model.schema.features[*model.context.feature].values[bad_row]);
  throw ValidationError("non-monotone table for feature " + feature_name +
                        " (context " + where + ")");
}

}  // namespace detail

inline TwoStageModel parse_model(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("model file is not valid JSON: ") + e.what());
  }
  TwoStageModel model;
  if (!j.contains("link") || !j["link"].is_string()) {
    throw ValidationError("model file missing 'link'");
  }
  model.link.kind = link_from_string(j["link"].get<std::string>());
  if (!j.contains("features")) {
    throw ValidationError("model file missing 'features'");
  }
  model.schema = schema_from_json({{"features", j["features"]}});

  if (j.contains("omega") && !j["omega"].is_null()) {
    std::string name = j["omega"].get<std::string>();
    auto idx = model.schema.feature_index(name);
    if (!idx) {
      throw ValidationError("omega feature '" + name + "' not in schema");
    }
    model.context.feature = *idx;
  }

  if (!j.contains("tables") || !j["tables"].is_object()) {
    throw ValidationError("model file missing 'tables'");
  }
  const std::size_t n_ctx = model.context_cardinality();
  for (std::size_t i = 0; i < model.schema.dimension(); ++i) {
    if (!model.context.empty() && *model.context.feature == i) continue;
    const auto& spec = model.schema.features[i];
    if (!j["tables"].contains(spec.name)) {
      throw ValidationError("model file missing table for feature " + spec.name);
    }
    const auto& per_context = j["tables"][spec.name];
    EditingTable table;
    table.feature = i;
    table.scores.assign(n_ctx, std::vector<double>(spec.values.size(), 0.0));
    for (std::size_t c = 0; c < n_ctx; ++c) {
      std::string ctx_key =
          model.context.empty()
              ? "*"
              : fmt_double(model.schema.features[*model.context.feature].values[c]);
      if (!per_context.contains(ctx_key)) {
        throw ValidationError("table for " + spec.name +
                              " missing entries for context " + ctx_key);
      }
      const auto& row = per_context[ctx_key];
      for (std::size_t k = 0; k < spec.values.size(); ++k) {
        std::string val_key = fmt_double(spec.values[k]);
        if (!row.contains(val_key)) {
          throw ValidationError("table for " + spec.name + " missing entry for value " +
                                val_key + " (context " + ctx_key + ")");
        }
        table.scores[c][k] = row[val_key].get<double>();
      }
    }
    table.direction = detail::infer_direction(model, table, spec.name);
    model.tables.push_back(std::move(table));
  }

  if (j.contains("metadata")) {
    const auto& m = j["metadata"];
    if (m.contains("loss")) model.metadata.loss = m["loss"].get<std::string>();
    if (m.contains("lambda")) model.metadata.lambda = m["lambda"].get<double>();
    if (m.contains("seed")) model.metadata.seed = m["seed"].get<std::uint64_t>();
    if (m.contains("train_loss")) {
      model.metadata.train_loss = m["train_loss"].get<double>();
    }
    if (m.contains("ftol")) model.metadata.ftol = m["ftol"].get<double>();
    if (m.contains("max_iter")) model.metadata.max_iter = m["max_iter"].get<int>();
    if (m.contains("cv_fraction")) {
      model.metadata.cv_fraction = m["cv_fraction"].get<double>();
    }
    if (m.contains("iterations")) {
      model.metadata.iterations = m["iterations"].get<int>();
    }
    if (m.contains("saturated_records")) {
      model.metadata.saturated_records = m["saturated_records"].get<int>();
    }
  }

  validate_model(model);
  return model;
}

}  // namespace pairfact

#endif  // PAIRFACT_MODEL_IO_HPP
