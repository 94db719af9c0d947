// Command-line front end: simulate decision makers, fit and evaluate
// two-stage choice models, benchmark fitters, rank items, audit axioms and
// export editing curves. Exit codes: 0 success, 1 usage error, 2 data or
// validation error, 3 numerical failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pairfact/axioms.hpp"
#include "pairfact/baselines.hpp"
#include "pairfact/eval.hpp"
#include "pairfact/fit.hpp"
#include "pairfact/model_io.hpp"
#include "pairfact/synth.hpp"

namespace {

using namespace pairfact;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file '" + path + "'");
  out << content;
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
  } else {
    write_file(path, content);
  }
}

// Fit settings shared by the fit and bench subcommands.
struct FitFlags {
  std::string loss = "ce";
  std::string link;  // empty = derived from loss
  double lambda = 1e-3;
  double ftol = 1e-7;
  int max_iter = 300;
  double cv_fraction = 0.2;
  std::uint64_t seed = 0;
  unsigned jobs = 0;
  std::string context = "none";

  void attach(CLI::App* cmd) {
    cmd->add_option("--loss", loss, "loss kind: ce or hinge")
        ->check(CLI::IsMember({"ce", "cross_entropy", "hinge"}));
    cmd->add_option("--link", link, "link: logistic, probit or identity");
    cmd->add_option("--lambda", lambda, "context-smoothing regularizer weight");
    cmd->add_option("--ftol", ftol, "relative loss-decrease stopping tolerance");
    cmd->add_option("--max-iter", max_iter, "iteration cap");
    cmd->add_option("--cv-fraction", cv_fraction,
                    "holdout fraction for context selection");
    cmd->add_option("--seed", seed, "seed for every random choice");
    cmd->add_option("--jobs", jobs, "worker pool size (0 = hardware)");
    cmd->add_option("--context", context,
                    "context feature: auto, none, or a feature name");
  }

  FitConfig config() const {
    FitConfig cfg;
    cfg.loss = loss_from_string(loss);
    if (link.empty()) {
      cfg.link.kind = cfg.loss == LossKind::hinge ? LinkKind::identity
                                                  : LinkKind::logistic;
    } else {
      cfg.link.kind = link_from_string(link);
    }
    cfg.lambda = lambda;
    cfg.ftol = ftol;
    cfg.max_iter = max_iter;
    cfg.cv_fraction = cv_fraction;
    cfg.seed = seed;
    cfg.jobs = jobs;
    return cfg;
  }

  ContextSpec pinned_context(const FeatureSchema& schema) const {
    if (context == "none") return ContextSpec{};
    auto idx = schema.feature_index(context);
    if (!idx) {
      throw ValidationError("context feature '" + context + "' not in schema");
    }
    return ContextSpec{*idx};
  }
};

ChoiceFn model_choice_fn(std::shared_ptr<const TwoStageModel> model) {
  return [model](const Alternative& a, const Alternative& b) {
    return model->choose(a, b);
  };
}

Fitter make_two_stage_fitter(const FitFlags& flags) {
  return [flags](const ComparisonDataset& train) -> ChoiceFn {
    FitConfig cfg = flags.config();
    TwoStageModel fitted;
    if (flags.context == "auto") {
      fitted = select_context(train, cfg).model;
    } else {
      fitted = fit_two_stage(train, cfg, flags.pinned_context(train.schema));
    }
    return model_choice_fn(std::make_shared<TwoStageModel>(std::move(fitted)));
  };
}

Fitter make_logistic_fitter(double l2, double ftol, int max_iter) {
  return [=](const ComparisonDataset& train) -> ChoiceFn {
    auto model = std::make_shared<LinearModel>(
        fit_symmetric_logistic(train, LinearFitConfig{l2, ftol, max_iter, 0}));
    return [model](const Alternative& a, const Alternative& b) {
      return model->choose(a, b);
    };
  };
}

Fitter make_tally_fitter() {
  return [](const ComparisonDataset& train) -> ChoiceFn {
    auto dirs = std::make_shared<std::vector<int>>(tallying_directions(train.schema));
    return [dirs](const Alternative& a, const Alternative& b) {
      return tallying_choice(*dirs, a, b);
    };
  };
}

nlohmann::json alternative_json(const FeatureSchema& schema, const Alternative& x) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t i = 0; i < schema.dimension(); ++i) {
    j[schema.features[i].name] = x.values[i];
  }
  return j;
}

nlohmann::json axiom_entry(const char* axiom, const FeatureSchema& schema,
                           const AxiomCheck& check, double threshold) {
  nlohmann::json witness = nlohmann::json::array();
  for (const auto& alt : check.witness) {
    witness.push_back(alternative_json(schema, alt));
  }
  return {{"axiom", axiom},
          {"deviation", check.max_deviation},
          {"witness", witness},
          {"samples", check.samples},
          {"clamped_probes", check.clamped},
          {"verdict", check.max_deviation <= threshold ? "pass" : "fail"}};
}

// Items CSV for ranking: header of feature names in schema order, one
// alternative per row, '#' comments skipped.
std::vector<Alternative> parse_items(const std::string& text,
                                     const FeatureSchema& schema) {
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  std::vector<Alternative> items;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto cells = detail::split_csv_line(t);
    if (!header_seen) {
      for (std::size_t i = 0; i < schema.dimension(); ++i) {
        if (i >= cells.size() || cells[i] != schema.features[i].name) {
          throw ValidationError("items header must list the schema features; "
                                "missing column " + schema.features[i].name);
        }
      }
      header_seen = true;
      continue;
    }
    ++row;
    if (cells.size() != schema.dimension()) {
      throw ValidationError("items row " + std::to_string(row) +
                            " has the wrong number of cells");
    }
    Alternative x;
    for (std::size_t i = 0; i < schema.dimension(); ++i) {
      x.values.push_back(parse_double(cells[i], schema.features[i].name.c_str()));
    }
    validate_alternative(schema, x, "item");
    items.push_back(std::move(x));
  }
  return items;
}

int run(int argc, char** argv) {
  CLI::App app{"two-stage pairwise choice models: fit, simulate, audit, benchmark"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate comparisons from a simulated DM");
  std::string sim_dm = "dm1";
  std::size_t sim_n = 1000;
  std::uint64_t sim_seed = 0;
  std::string sim_out, sim_schema_out;
  sim->add_option("--dm", sim_dm, "dm1..dm5 or cf1")->required();
  sim->add_option("--n", sim_n, "number of comparisons");
  sim->add_option("--seed", sim_seed, "generation seed");
  sim->add_option("--out", sim_out, "dataset CSV path")->required();
  sim->add_option("--schema-out", sim_schema_out, "schema JSON path");

  // fit
  auto* fit = app.add_subcommand("fit", "fit a two-stage model");
  FitFlags fit_flags;
  std::string fit_data, fit_schema, fit_out;
  fit->add_option("--data", fit_data, "dataset CSV")->required();
  fit->add_option("--schema", fit_schema, "schema JSON")->required();
  fit->add_option("--out", fit_out, "model JSON path")->required();
  fit_flags.attach(fit);

  // eval
  auto* ev = app.add_subcommand("eval", "accuracy of a model on a dataset");
  std::string eval_model, eval_data;
  ev->add_option("--model", eval_model, "model JSON")->required();
  ev->add_option("--data", eval_data, "dataset CSV")->required();

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "repeated-split benchmark");
  FitFlags bench_flags;
  std::string bench_data, bench_schema, bench_out, bench_summary;
  std::string bench_fitter = "two-stage";
  int bench_reps = 20;
  double bench_split = 0.7;
  double bench_l2 = 1e-6;
  bench_cmd->add_option("--data", bench_data, "dataset CSV")->required();
  bench_cmd->add_option("--schema", bench_schema, "schema JSON")->required();
  bench_cmd->add_option("--fitter", bench_fitter, "two-stage, logistic or tally")
      ->check(CLI::IsMember({"two-stage", "logistic", "tally"}));
  bench_cmd->add_option("--reps", bench_reps, "repetitions");
  bench_cmd->add_option("--train-fraction", bench_split, "train split fraction");
  bench_cmd->add_option("--l2", bench_l2, "ridge weight of the logistic fitter");
  bench_cmd->add_option("--out", bench_out, "per-rep CSV path (default stdout)");
  bench_cmd->add_option("--summary-out", bench_summary, "summary JSON path");
  bench_flags.attach(bench_cmd);

  // rank
  auto* rank = app.add_subcommand("rank", "Luce choice distribution over items");
  std::string rank_model, rank_items, rank_out;
  rank->add_option("--model", rank_model, "model JSON")->required();
  rank->add_option("--items", rank_items, "items CSV")->required();
  rank->add_option("--out", rank_out, "output CSV path (default stdout)");

  // check-axioms
  auto* check = app.add_subcommand("check-axioms", "audit a model or DM law");
  std::string check_model, check_dm, check_link, check_out;
  std::size_t check_samples = 1000;
  std::uint64_t check_seed = 1;
  bool check_exhaustive = false;
  check->add_option("--model", check_model, "model JSON");
  check->add_option("--dm", check_dm, "dm1..dm5 or cf1 (exact law)");
  check->add_option("--link", check_link,
                    "link for the transitivity law (default: model link, probit for DMs)");
  check->add_option("--samples", check_samples, "sampled probes per axiom");
  check->add_option("--seed", check_seed, "sampling seed");
  check->add_flag("--exhaustive", check_exhaustive,
                  "enumerate all pairs for complementarity (small schemas)");
  check->add_option("--out", check_out, "report JSON path (default stdout)");

  // export-curves
  auto* curves = app.add_subcommand("export-curves", "editing curves CSV");
  std::string curves_model, curves_out;
  curves->add_option("--model", curves_model, "model JSON")->required();
  curves->add_option("--out", curves_out, "curves CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (sim->parsed()) {
    SimulatedDm dm{dm_from_string(sim_dm)};
    ComparisonDataset ds = simulate(dm, sim_n, sim_seed);
    std::string header = "# dm=" + std::string(to_string(dm.id)) +
                         " n=" + std::to_string(sim_n) +
                         " seed=" + std::to_string(sim_seed) + "\n";
    write_file(sim_out, header + serialize_dataset(ds));
    if (!sim_schema_out.empty()) {
      write_file(sim_schema_out, serialize_schema(dm.schema));
    }
    return 0;
  }

  if (fit->parsed()) {
    FeatureSchema schema = parse_schema(read_file(fit_schema));
    ComparisonDataset ds = parse_dataset(read_file(fit_data), schema);
    FitConfig cfg = fit_flags.config();
    TwoStageModel model;
    if (fit_flags.context == "auto") {
      ContextSelection sel = select_context(ds, cfg);
      for (const auto& diag : sel.diagnostics) std::cerr << diag << "\n";
      std::cerr << "selected context: "
                << (sel.context.empty()
                        ? std::string("none")
                        : schema.features[*sel.context.feature].name)
                << "\n";
      model = std::move(sel.model);
    } else {
      model = fit_two_stage(ds, cfg, fit_flags.pinned_context(schema));
    }
    write_file(fit_out, serialize_model(model));
    return 0;
  }

  if (ev->parsed()) {
    TwoStageModel model = parse_model(read_file(eval_model));
    ComparisonDataset ds = parse_dataset(read_file(eval_data), model.schema);
    auto shared = std::make_shared<TwoStageModel>(std::move(model));
    std::cout << "accuracy " << fmt_double(accuracy(model_choice_fn(shared), ds))
              << "\n";
    if (shared->link.probabilistic()) {
      ProbFn prob = [shared](const Alternative& a, const Alternative& b) {
        return shared->prob(a, b);
      };
      std::cout << "log_loss " << fmt_double(log_loss(prob, ds)) << "\n";
    }
    return 0;
  }

  if (bench_cmd->parsed()) {
    FeatureSchema schema = parse_schema(read_file(bench_schema));
    ComparisonDataset ds = parse_dataset(read_file(bench_data), schema);
    Fitter fitter;
    if (bench_fitter == "two-stage") {
      fitter = make_two_stage_fitter(bench_flags);
    } else if (bench_fitter == "logistic") {
      fitter = make_logistic_fitter(bench_l2, bench_flags.ftol, bench_flags.max_iter);
    } else {
      fitter = make_tally_fitter();
    }
    BenchmarkOptions opts;
    opts.reps = bench_reps;
    opts.train_fraction = bench_split;
    opts.seed = bench_flags.seed;
    opts.jobs = bench_flags.jobs;
    BenchmarkResult result = benchmark(fitter, ds, opts);

    std::string csv = "rep,accuracy\n";
    for (std::size_t r = 0; r < result.per_rep.size(); ++r) {
      csv += std::to_string(r) + "," +
             (std::isnan(result.per_rep[r]) ? "failed" : fmt_double(result.per_rep[r])) +
             "\n";
    }
    csv += "summary," + fmt_double(result.mean) + "," + fmt_double(result.stddev) + "\n";
    emit(bench_out, csv);
    for (const auto& f : result.failures) std::cerr << f << "\n";

    if (!bench_summary.empty()) {
      nlohmann::json per_rep = nlohmann::json::array();
      for (double a : result.per_rep) {
        if (std::isnan(a)) {
          per_rep.push_back(nullptr);
        } else {
          per_rep.push_back(a);
        }
      }
      nlohmann::json j{{"mean", result.mean},
                       {"stddev", result.stddev},
                       {"reps", bench_reps},
                       {"train_fraction", bench_split},
                       {"seed", bench_flags.seed},
                       {"fitter", bench_fitter},
                       {"per_rep", per_rep},
                       {"failures", result.failures}};
      write_file(bench_summary, j.dump(2) + "\n");
    }
    return 0;
  }

  if (rank->parsed()) {
    TwoStageModel model = parse_model(read_file(rank_model));
    std::vector<Alternative> items = parse_items(read_file(rank_items), model.schema);
    std::vector<double> dist = rank_distribution(model, items);
    std::string csv = "item,probability\n";
    for (std::size_t i = 0; i < dist.size(); ++i) {
      csv += std::to_string(i) + "," + fmt_double(dist[i]) + "\n";
    }
    emit(rank_out, csv);
    return 0;
  }

  if (check->parsed()) {
    if (check_model.empty() == check_dm.empty()) {
      std::cerr << "check-axioms: exactly one of --model or --dm is required\n";
      return 1;
    }
    FeatureSchema schema;
    ProbFn predictor;
    Link link;
    nlohmann::json report;
    const double threshold = 1e-6;
    nlohmann::json checks = nlohmann::json::array();
    std::shared_ptr<TwoStageModel> model;

    if (!check_model.empty()) {
      model = std::make_shared<TwoStageModel>(parse_model(read_file(check_model)));
      schema = model->schema;
      link = model->link;
      if (model->link.probabilistic()) {
        predictor = [model](const Alternative& a, const Alternative& b) {
          return model->prob(a, b);
        };
      }
    } else {
      auto dm = std::make_shared<SimulatedDm>(SimulatedDm{dm_from_string(check_dm)});
      schema = dm->schema;
      link.kind = LinkKind::probit;
      predictor = [dm](const Alternative& a, const Alternative& b) {
        return dm->prob(a, b);
      };
    }
    if (!check_link.empty()) link.kind = link_from_string(check_link);

    if (predictor) {
      AxiomCheck comp =
          check_exhaustive
              ? check_complementarity_exhaustive(predictor, schema)
              : check_complementarity(predictor, schema, check_samples, check_seed);
      checks.push_back(axiom_entry("complementarity", schema, comp, threshold));
      checks.push_back(axiom_entry(
          "sigma_transitivity", schema,
          check_sigma_transitivity(predictor, link, schema, check_samples, check_seed),
          threshold));
      ContextSpec quad_context = model ? model->context : ContextSpec{};
      checks.push_back(axiom_entry(
          "compositionality", schema,
          check_compositionality(predictor, link, schema, quad_context,
                                 check_samples, check_seed),
          threshold));
    } else {
      for (const char* axiom :
           {"complementarity", "sigma_transitivity", "compositionality"}) {
        checks.push_back({{"axiom", axiom},
                          {"verdict", "not_applicable"},
                          {"reason", "identity link defines no probabilities"}});
      }
    }
    // Finite discrete domains realize only finitely many probabilities, so
    // the codomain-span axiom is reported rather than checked.
    checks.push_back(
        {{"axiom", "codomain_span"}, {"verdict", "not_applicable"},
         {"reason", "finite discrete domain"}});
    if (model) {
      auto violations = check_monotonicity(*model);
      nlohmann::json vj = nlohmann::json::array();
      for (const auto& v : violations) {
        vj.push_back({{"feature", schema.features[v.feature].name},
                      {"context_row", v.context_value},
                      {"value_index", v.value_index}});
      }
      checks.push_back({{"axiom", "monotonicity"},
                        {"violations", vj},
                        {"verdict", violations.empty() ? "pass" : "fail"}});
    }
    report["checks"] = checks;
    report["samples"] = check_samples;
    report["seed"] = check_seed;
    report["threshold"] = threshold;
    report["link"] = to_string(link.kind);
    emit(check_out, report.dump(2) + "\n");
    return 0;
  }

  if (curves->parsed()) {
    TwoStageModel model = parse_model(read_file(curves_model));
    emit(curves_out, curves_csv(model));
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const pairfact::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const pairfact::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
