#include "ugr/bench_harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "ugr/error.hpp"
#include "csv.hpp"

namespace ugr {

namespace {

constexpr std::size_t kNumClasses = 3;

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool report_before(const EvalReport& a, const EvalReport& b) {
  if (a.ok() != b.ok()) return a.ok();
  if (a.ok()) {
    if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
    if (a.balanced_accuracy != b.balanced_accuracy) return a.balanced_accuracy > b.balanced_accuracy;
  }
  return a.name < b.name;
}

// Score columns follow the classifier's own class list; widen to one column
// per ThreatClass code so class c always lives in column c.
Matrix widen_scores(const Matrix& scores, const std::vector<int>& classes, std::size_t k) {
  Matrix out(scores.rows(), k);
  for (std::size_t r = 0; r < scores.rows(); ++r) {
    for (std::size_t j = 0; j < classes.size(); ++j) out(r, static_cast<std::size_t>(classes[j])) = scores(r, j);
  }
  return out;
}

nlohmann::json number_or_null(double v, bool ok) { return ok ? nlohmann::json(v) : nlohmann::json(nullptr); }

double number_or_nan(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  return v.is_null() ? std::nan("") : v.get<double>();
}

}  // namespace

nlohmann::json RunMetadata::to_json() const {
  return {{"seed", seed},
          {"test_fraction", test_fraction},
          {"folds", folds},
          {"protocol", folds > 0 ? "holdout+cv" : "holdout"},
          {"dataset", {{"rows", dataset_rows}, {"column_hash", column_hash}}},
          {"train_rows", train_rows},
          {"test_rows", test_rows},
          {"f1_averaging", "weighted"},
          {"roc_auc_averaging", "macro"}};
}

RunMetadata RunMetadata::from_json(const nlohmann::json& j) {
  RunMetadata m;
  m.seed = j.at("seed").get<std::uint64_t>();
  m.test_fraction = j.at("test_fraction").get<double>();
  m.folds = j.at("folds").get<int>();
  m.dataset_rows = j.at("dataset").at("rows").get<std::size_t>();
  m.column_hash = j.at("dataset").at("column_hash").get<std::string>();
  m.train_rows = j.at("train_rows").get<std::size_t>();
  m.test_rows = j.at("test_rows").get<std::size_t>();
  return m;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j = {{"model", name},
                      {"status", status},
                      {"accuracy", number_or_null(accuracy, ok())},
                      {"balanced_accuracy", number_or_null(balanced_accuracy, ok())},
                      {"f1_weighted", number_or_null(f1_weighted, ok())},
                      {"f1_macro", number_or_null(f1_macro, ok())},
                      {"roc_auc_macro", number_or_null(roc_auc_macro, ok())},
                      {"time_taken", time_taken},
                      {"confusion", ok() ? confusion.to_json() : nlohmann::json(nullptr)},
                      {"cv", cv ? cv->to_json() : nlohmann::json(nullptr)}};
  if (!ok()) j["error"] = error;
  return j;
}

EvalReport EvalReport::from_json(const nlohmann::json& j) {
  EvalReport r;
  r.name = j.at("model").get<std::string>();
  r.status = j.at("status").get<std::string>();
  r.error = j.value("error", std::string{});
  r.accuracy = number_or_nan(j, "accuracy");
  r.balanced_accuracy = number_or_nan(j, "balanced_accuracy");
  r.f1_weighted = number_or_nan(j, "f1_weighted");
  r.f1_macro = number_or_nan(j, "f1_macro");
  r.roc_auc_macro = number_or_nan(j, "roc_auc_macro");
  r.time_taken = j.at("time_taken").get<double>();
  if (!j.at("confusion").is_null()) r.confusion = ConfusionMatrix::from_json(j.at("confusion"));
  if (!j.at("cv").is_null()) r.cv = CVResult::from_json(j.at("cv"));
  return r;
}

void Leaderboard::sort() { std::stable_sort(reports.begin(), reports.end(), report_before); }

bool Leaderboard::sorted() const { return std::is_sorted(reports.begin(), reports.end(), report_before); }

nlohmann::json Leaderboard::to_json() const {
  auto rows = nlohmann::json::array();
  for (const auto& r : reports) rows.push_back(r.to_json());
  return {{"schema_version", kLeaderboardSchemaVersion}, {"metadata", metadata.to_json()}, {"reports", rows}};
}

Leaderboard Leaderboard::from_json(const nlohmann::json& j) {
  if (j.at("schema_version").get<int>() != kLeaderboardSchemaVersion) {
    throw std::invalid_argument("unsupported leaderboard schema_version");
  }
  Leaderboard board;
  board.metadata = RunMetadata::from_json(j.at("metadata"));
  for (const auto& r : j.at("reports")) board.reports.push_back(EvalReport::from_json(r));
  return board;
}

std::string column_hash(std::span<const std::string> column_names) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& name : column_names) {
    for (unsigned char ch : name) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;  // separator so {"ab","c"} differs from {"a","bc"}
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

EvalReport evaluate_model(const std::string& name, const FeatureMatrix& data, const SplitPlan& plan,
                          const BenchOptions& options) {
  EvalReport report;
  report.name = name;
  const Matrix x_train = data.rows.select_rows(plan.train_indices);
  const Matrix x_test = data.rows.select_rows(plan.test_indices);
  std::vector<int> y_train;
  for (auto i : plan.train_indices) y_train.push_back(data.labels[i]);
  for (auto i : plan.test_indices) report.truth.push_back(data.labels[i]);

  try {
    auto model = make_classifier(name, options.model_options);
    const auto start = std::chrono::steady_clock::now();
    model->fit(x_train, y_train);
    const Matrix raw_scores = model->predict_scores(x_test);
    const auto stop = std::chrono::steady_clock::now();
    report.time_taken = std::max(std::chrono::duration<double>(stop - start).count(), 1e-9);

    report.scores = widen_scores(raw_scores, model->classes(), kNumClasses);
    std::vector<int> predicted(raw_scores.rows());
    for (std::size_t r = 0; r < raw_scores.rows(); ++r) predicted[r] = model->classes()[argmax(raw_scores.row(r))];

    report.confusion = confusion(report.truth, predicted, kNumClasses);
    report.accuracy = accuracy(report.confusion);
    report.balanced_accuracy = balanced_accuracy(report.confusion);
    report.f1_weighted = f1(report.confusion, Averaging::Weighted);
    report.f1_macro = f1(report.confusion, Averaging::Macro);
    report.roc_auc_macro = roc_report(report.truth, report.scores).macro_auc;

    if (!plan.fold_assignment.empty()) {
      report.cv = cv_evaluate([&] { return make_classifier(name, options.model_options); }, data.rows, data.labels,
                              plan.fold_assignment);
    }
  } catch (const std::exception& e) {
    report.status = "error";
    report.error = e.what();
    report.accuracy = report.balanced_accuracy = report.f1_weighted = report.f1_macro = report.roc_auc_macro =
        std::nan("");
    report.confusion = ConfusionMatrix();
    report.cv.reset();
  }
  return report;
}

Leaderboard run_benchmark(const FeatureMatrix& data, const SplitPlan& plan, const BenchOptions& options) {
  if (options.models.empty()) throw std::invalid_argument("benchmark needs at least one model");
  for (const auto& name : options.models) {
    if (!is_known_model(name)) throw std::invalid_argument("unknown model '" + name + "'");
  }
  SplitPlan effective = plan;
  if (options.folds > 0 && effective.fold_assignment.empty()) {
    effective.fold_assignment = k_folds(data.labels, options.folds, plan.seed);
  }

  Leaderboard board;
  board.metadata.seed = plan.seed;
  board.metadata.test_fraction = options.test_fraction;
  board.metadata.folds = options.folds;
  board.metadata.dataset_rows = data.rows.rows();
  board.metadata.column_hash = column_hash(data.column_names);
  board.metadata.train_rows = plan.train_indices.size();
  board.metadata.test_rows = plan.test_indices.size();
  for (const auto& name : options.models) board.reports.push_back(evaluate_model(name, data, effective, options));
  board.sort();
  return board;
}

Format parse_format(std::string_view text) {
  if (text == "table") return Format::Table;
  if (text == "csv") return Format::Csv;
  if (text == "json") return Format::Json;
  throw std::invalid_argument("unknown format '" + std::string(text) + "' (expected table, csv or json)");
}

void render(std::ostream& out, const Leaderboard& board, Format format) {
  if (format == Format::Json) {
    out << board.to_json().dump(2) << '\n';
    return;
  }
  if (format == Format::Csv) {
    out << "model,status,accuracy,balanced_accuracy,roc_auc,f1_score,f1_macro,time_taken,cv_error,error\n";
    for (const auto& r : board.reports) {
      out << csv::escape(r.name) << ',' << r.status << ',';
      if (r.ok()) {
        out << format_full(r.accuracy) << ',' << format_full(r.balanced_accuracy) << ',' << format_full(r.roc_auc_macro)
            << ',' << format_full(r.f1_weighted) << ',' << format_full(r.f1_macro) << ',';
      } else {
        out << ",,,,,";
      }
      out << format_full(r.time_taken) << ',' << (r.cv ? format_full(r.cv->cv_error) : "") << ','
          << csv::escape(r.error) << '\n';
    }
    return;
  }

  std::size_t width = 5;
  for (const auto& r : board.reports) width = std::max(width, r.name.size());
  char line[256];
  std::snprintf(line, sizeof line, "%-*s  %8s  %17s  %7s  %8s  %10s", static_cast<int>(width), "Model", "Accuracy",
                "Balanced Accuracy", "ROC AUC", "F1 Score", "Time Taken");
  out << line << '\n';
  for (const auto& r : board.reports) {
    if (!r.ok()) {
      std::snprintf(line, sizeof line, "%-*s  error: ", static_cast<int>(width), r.name.c_str());
      out << line << r.error << '\n';
      continue;
    }
    std::snprintf(line, sizeof line, "%-*s  %8s  %17s  %7s  %8s  %10s", static_cast<int>(width), r.name.c_str(),
                  format_fixed(r.accuracy, 2).c_str(), format_fixed(r.balanced_accuracy, 2).c_str(),
                  format_fixed(r.roc_auc_macro, 2).c_str(), format_fixed(r.f1_weighted, 2).c_str(),
                  format_fixed(r.time_taken, 2).c_str());
    out << line << '\n';
  }
}

}  // namespace ugr
