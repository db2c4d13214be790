#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "ugr/bench_harness.hpp"
#include "ugr/error.hpp"
#include "ugr/feature_pipeline.hpp"
#include "ugr/flow_data.hpp"
#include "ugr/metrics.hpp"
#include "ugr/model_registry.hpp"
#include "ugr/parallel.hpp"
#include "ugr/synth.hpp"

namespace ugr::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string data;
  std::uint64_t seed = 42;
  double test_fraction = 0.2;
  int folds = 0;
  std::vector<std::string> models{"all"};
  bool no_scale = false;
  std::string output;
  std::string format = "table";
  int threads = 0;

  void validate() const {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw UsageError("--test-fraction must lie in (0, 1)");
    if (folds == 1 || folds < 0) throw UsageError("--folds must be 0 or >= 2");
    if (threads < 0) throw UsageError("--threads must be >= 0");
  }
};

void add_data_option(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--data", cfg.data, "UGRansome-schema CSV (default: $UGRANSOME_DATA)")->envname("UGRANSOME_DATA");
}

void add_split_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--seed", cfg.seed, "Seed for splits and randomized models")->capture_default_str();
  cmd->add_option("--test-fraction", cfg.test_fraction, "Holdout fraction in (0, 1)")->capture_default_str();
  cmd->add_flag("--no-scale", cfg.no_scale, "Skip standardization for linear, distance and Bayes models");
  cmd->add_option("--threads", cfg.threads, "Worker threads (0 = runtime default)");
}

void add_output_option(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--output,-o", cfg.output, "Output file (default: stdout)");
}

const std::string& require_data(const RunConfig& cfg) {
  if (cfg.data.empty()) throw UsageError("no dataset given: pass --data or set UGRANSOME_DATA");
  return cfg.data;
}

// Writes through `out` unless an output path was given.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw DataError("cannot open '" + path + "' for writing");
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::vector<std::string> resolve_models(const std::vector<std::string>& requested) {
  std::vector<std::string> names;
  for (const auto& m : requested) {
    if (m == "all") {
      for (const auto& n : portfolio_names()) names.push_back(n);
    } else if (is_known_model(m)) {
      names.push_back(m);
    } else {
      throw UsageError("unknown model '" + m + "'");
    }
  }
  std::vector<std::string> unique;
  for (const auto& n : names) {
    if (std::find(unique.begin(), unique.end(), n) == unique.end()) unique.push_back(n);
  }
  if (unique.empty()) throw UsageError("--models selected nothing");
  return unique;
}

void apply_threads(const RunConfig& cfg) {
  if (cfg.threads > 0) set_num_threads(cfg.threads);
}

ModelOptions model_options(const RunConfig& cfg) { return {cfg.seed, !cfg.no_scale}; }

// ---- subcommands ----

void cmd_inspect(const RunConfig& cfg, std::ostream& out) {
  const auto records = parse_dataset_file(require_data(cfg));
  const auto s = summarize(records);
  if (cfg.format == "json") {
    nlohmann::json classes;
    for (int c = 0; c < kThreatClassCount; ++c) {
      classes[std::string(to_string(threat_class_from_code(c)))] = s.class_histogram[static_cast<std::size_t>(c)];
    }
    out << nlohmann::json{{"rows", s.row_count},
                          {"columns", kColumnCount},
                          {"distinct_families", s.distinct_families()},
                          {"distinct_values", s.distinct_values},
                          {"family_histogram", s.family_histogram},
                          {"class_histogram", classes}}
               .dump(2)
        << '\n';
    return;
  }
  if (cfg.format != "table" && cfg.format != "text") throw UsageError("inspect --format must be text or json");
  out << s.row_count << " rows, " << kColumnCount << " columns, " << s.distinct_families() << " families\n";
  out << "classes:";
  for (int c = 0; c < kThreatClassCount; ++c) {
    out << ' ' << to_string(threat_class_from_code(c)) << '=' << s.class_histogram[static_cast<std::size_t>(c)];
  }
  out << "\ndistinct values:\n";
  for (const auto name : kColumnNames) {
    const auto it = s.distinct_values.find(std::string(name));
    if (it != s.distinct_values.end()) out << "  " << name << ": " << it->second << '\n';
  }
  out << "families:\n";
  for (const auto& [family, count] : s.family_histogram) out << "  " << family << ": " << count << '\n';
}

void cmd_correlate(const RunConfig& cfg, std::ostream& out) {
  const auto records = parse_dataset_file(require_data(cfg));
  if (records.size() < 2) throw DataError("correlation needs at least 2 rows");
  auto fm = fit_transform(records, false);
  std::vector<double> labels(fm.labels.begin(), fm.labels.end());
  auto names = fm.column_names;
  names.emplace_back(column_name(Column::Prediction));
  const auto corr = pearson_matrix(fm.rows.with_column(labels), std::move(names));
  Sink sink(cfg.output, out);
  write_correlation_csv(sink.get(), corr);
}

struct Prepared {
  FeatureMatrix data;
  SplitPlan plan;
};

Prepared prepare(const RunConfig& cfg) {
  const auto records = parse_dataset_file(require_data(cfg));
  Prepared p{fit_transform(records, false), {}};
  p.plan = stratified_split(p.data.labels, cfg.test_fraction, cfg.seed);
  return p;
}

void cmd_bench(const RunConfig& cfg, std::ostream& out) {
  const Format format = parse_format(cfg.format);
  BenchOptions options;
  options.models = resolve_models(cfg.models);
  options.model_options = model_options(cfg);
  options.test_fraction = cfg.test_fraction;
  options.folds = cfg.folds;
  apply_threads(cfg);
  const auto prepared = prepare(cfg);
  const auto board = run_benchmark(prepared.data, prepared.plan, options);
  Sink sink(cfg.output, out);
  render(sink.get(), board, format);
}

void cmd_roc(const RunConfig& cfg, const std::string& model_name, std::ostream& out) {
  if (!is_known_model(model_name)) throw UsageError("unknown model '" + model_name + "'");
  apply_threads(cfg);
  const auto prepared = prepare(cfg);
  BenchOptions options;
  options.models = {model_name};
  options.model_options = model_options(cfg);
  options.test_fraction = cfg.test_fraction;
  const auto report = evaluate_model(model_name, prepared.data, prepared.plan, options);
  if (!report.ok()) throw ModelError(model_name + ": " + report.error);
  Sink sink(cfg.output, out);
  write_roc_csv(sink.get(), roc_report(report.truth, report.scores));
}

void cmd_train(const RunConfig& cfg, const std::string& model_name, std::ostream& out) {
  if (!is_known_model(model_name)) throw UsageError("unknown model '" + model_name + "'");
  apply_threads(cfg);
  const auto records = parse_dataset_file(require_data(cfg));
  const auto fm = fit_transform(records, false);
  auto model = make_classifier(model_name, model_options(cfg));
  model->fit(fm.rows, fm.labels);
  Sink sink(cfg.output, out);
  sink.get() << save_model(*model, &fm.encoding).dump() << '\n';
}

bool header_has_prediction(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "': file not found");
  std::string header;
  std::getline(in, header);
  std::stringstream ss(header);
  std::string field;
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    if (field == "Prediction" || field == "\"Prediction\"") return true;
  }
  return false;
}

void cmd_predict(const RunConfig& cfg, const std::string& model_path, std::ostream& out) {
  std::ifstream in(model_path);
  if (!in) throw DataError("cannot open model file '" + model_path + "': file not found");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError("model file is not valid JSON: " + std::string(e.what()));
  }
  auto loaded = load_model(doc);
  if (!loaded.encoding) throw ModelError("model file carries no feature encoding");
  apply_threads(cfg);
  const auto& path = require_data(cfg);
  auto records = parse_dataset_file(path, header_has_prediction(path) ? Schema::canonical() : Schema::unlabeled());
  const auto predicted = loaded.model->predict(transform(*loaded.encoding, records));
  for (std::size_t i = 0; i < records.size(); ++i) records[i].prediction = threat_class_from_code(predicted[i]);
  Sink sink(cfg.output, out);
  write_dataset(sink.get(), records);
}

void cmd_synth(const RunConfig& cfg, const SynthOptions& options, std::ostream& out) {
  const auto records = synthesize(options);
  Sink sink(cfg.output, out);
  write_dataset(sink.get(), records);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-classifier benchmark for UGRansome-schema network flow data", "ugr"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string model_name;
  std::string model_path;
  SynthOptions synth_options;

  auto* inspect = app.add_subcommand("inspect", "Row count, distinct values and family/class histograms");
  add_data_option(inspect, cfg);
  inspect->add_option("--format", cfg.format, "text or json");

  auto* correlate = app.add_subcommand("correlate", "Pearson correlation of encoded features and label (CSV)");
  add_data_option(correlate, cfg);
  add_output_option(correlate, cfg);

  auto* bench = app.add_subcommand("bench", "Train and score the model portfolio, print the leaderboard");
  add_data_option(bench, cfg);
  add_split_options(bench, cfg);
  add_output_option(bench, cfg);
  bench->add_option("--folds", cfg.folds, "Cross-validation folds (0 = holdout only)")->capture_default_str();
  bench->add_option("--models", cfg.models, "Comma-separated model names or 'all'")->delimiter(',');
  bench->add_option("--format", cfg.format, "table, csv or json")->capture_default_str();

  auto* roc = app.add_subcommand("roc", "Per-class ROC curve points of one model on the holdout split (CSV)");
  add_data_option(roc, cfg);
  add_split_options(roc, cfg);
  add_output_option(roc, cfg);
  roc->add_option("--model", model_name, "Model name")->required();

  auto* train = app.add_subcommand("train", "Fit one model on the whole file and save it as JSON");
  add_data_option(train, cfg);
  add_split_options(train, cfg);
  add_output_option(train, cfg);
  train->add_option("--model", model_name, "Model name")->required();

  auto* predict = app.add_subcommand("predict", "Label a file with a saved model (CSV with Prediction column)");
  add_data_option(predict, cfg);
  add_output_option(predict, cfg);
  predict->add_option("--model-file", model_path, "Model JSON written by train")->required();
  predict->add_option("--threads", cfg.threads, "Worker threads (0 = runtime default)");

  auto* synth = app.add_subcommand("synth", "Generate schema-conformant synthetic data");
  synth->add_option("--rows,-n", synth_options.rows, "Number of rows")->capture_default_str();
  synth->add_option("--seed", synth_options.seed, "Generator seed")->capture_default_str();
  synth->add_option("--signal", synth_options.signal_strength, "Signal strength in [0, 1]")->capture_default_str();
  add_output_option(synth, cfg);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    cfg.validate();
    if (*inspect) cmd_inspect(cfg, out);
    else if (*correlate) cmd_correlate(cfg, out);
    else if (*bench) cmd_bench(cfg, out);
    else if (*roc) cmd_roc(cfg, model_name, out);
    else if (*train) cmd_train(cfg, model_name, out);
    else if (*predict) cmd_predict(cfg, model_path, out);
    else if (*synth) cmd_synth(cfg, synth_options, out);
    return kOk;
  } catch (const UsageError& e) {
    err << "ugr: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "ugr: data error: " << e.what() << '\n';
    return kDataError;
  } catch (const ModelError& e) {
    err << "ugr: model error: " << e.what() << '\n';
    return kModelError;
  } catch (const std::invalid_argument& e) {
    err << "ugr: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "ugr: " << e.what() << '\n';
    return kModelError;
  }
}

}  // namespace ugr::cli
