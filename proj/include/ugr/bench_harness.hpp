#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ugr/feature_pipeline.hpp"
#include "ugr/metrics.hpp"
#include "ugr/model_registry.hpp"

namespace ugr {

struct RunMetadata {
  std::uint64_t seed = 0;
  double test_fraction = 0.0;
  int folds = 0;
  std::size_t dataset_rows = 0;
  std::string column_hash;  // FNV-1a over the feature column names, hex
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;

  nlohmann::json to_json() const;
  static RunMetadata from_json(const nlohmann::json& j);
  bool operator==(const RunMetadata&) const = default;
};

struct EvalReport {
  std::string name;
  std::string status = "ok";  // "ok" or "error"
  std::string error;
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;
  double f1_weighted = 0.0;
  double f1_macro = 0.0;
  double roc_auc_macro = 0.0;
  double time_taken = 0.0;  // seconds, fit + test scoring
  ConfusionMatrix confusion;
  std::optional<CVResult> cv;

  // In-memory only: test labels and the score matrix behind the metrics.
  std::vector<int> truth;
  Matrix scores;

  bool ok() const noexcept { return status == "ok"; }
  nlohmann::json to_json() const;
  static EvalReport from_json(const nlohmann::json& j);
};

struct Leaderboard {
  RunMetadata metadata;
  std::vector<EvalReport> reports;

  // Accuracy desc, then balanced accuracy desc, then name asc; error rows last.
  void sort();
  bool sorted() const;

  nlohmann::json to_json() const;
  static Leaderboard from_json(const nlohmann::json& j);
};

inline constexpr int kLeaderboardSchemaVersion = 1;

std::string column_hash(std::span<const std::string> column_names);

struct BenchOptions {
  std::vector<std::string> models;  // empty is an error
  ModelOptions model_options;
  double test_fraction = 0.2;
  int folds = 0;  // 0 = holdout only
};

// Fits every requested model on the plan's train side and scores it on the
// test side. A model that throws becomes an error row. Throws
// std::invalid_argument for an empty model set or an unknown model name.
Leaderboard run_benchmark(const FeatureMatrix& data, const SplitPlan& plan, const BenchOptions& options);

// One model, one report. Exposed for tests.
EvalReport evaluate_model(const std::string& name, const FeatureMatrix& data, const SplitPlan& plan,
                          const BenchOptions& options);

enum class Format { Table, Csv, Json };
Format parse_format(std::string_view text);

void render(std::ostream& out, const Leaderboard& board, Format format);

}  // namespace ugr
