#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "ugr/bench_harness.hpp"
#include "ugr/synth.hpp"

using namespace ugr;

namespace {

struct Fixture {
  FeatureMatrix data;
  SplitPlan plan;
};

Fixture fixture(std::size_t rows, double signal, std::uint64_t seed = 42) {
  Fixture f{fit_transform(synthesize({rows, seed, signal}), false), {}};
  f.plan = stratified_split(f.data.labels, 0.2, seed);
  return f;
}

nlohmann::json without_times(nlohmann::json j) {
  for (auto& r : j["reports"]) r.erase("time_taken");
  return j;
}

std::string rendered(const Leaderboard& board, Format format) {
  std::ostringstream out;
  render(out, board, format);
  return out.str();
}

}  // namespace

TEST_CASE("dummy-only leaderboard scores the test majority prevalence") {
  const auto f = fixture(600, 0.5);
  BenchOptions options;
  options.models = {"dummy"};
  const auto board = run_benchmark(f.data, f.plan, options);
  REQUIRE(board.reports.size() == 1);
  std::array<std::size_t, 3> train{}, test{};
  for (auto i : f.plan.train_indices) ++train[static_cast<std::size_t>(f.data.labels[i])];
  for (auto i : f.plan.test_indices) ++test[static_cast<std::size_t>(f.data.labels[i])];
  const auto majority = static_cast<std::size_t>(std::max_element(train.begin(), train.end()) - train.begin());
  const auto& r = board.reports[0];
  CHECK(r.ok());
  CHECK(r.accuracy == static_cast<double>(test[majority]) / static_cast<double>(f.plan.test_indices.size()));
  CHECK(std::abs(r.balanced_accuracy - 1.0 / 3.0) < 1e-12);
  CHECK(r.time_taken > 0.0);
}

TEST_CASE("empty or unknown model sets are rejected") {
  const auto f = fixture(100, 1.0);
  BenchOptions options;
  CHECK_THROWS_AS(run_benchmark(f.data, f.plan, options), std::invalid_argument);
  options.models = {"svc"};
  CHECK_THROWS_AS(run_benchmark(f.data, f.plan, options), std::invalid_argument);
}

TEST_CASE("full portfolio: ordering, metric consistency, determinism") {
  const auto f = fixture(900, 0.9);
  BenchOptions options;
  options.models = portfolio_names();
  const auto a = run_benchmark(f.data, f.plan, options);
  const auto b = run_benchmark(f.data, f.plan, options);
  REQUIRE(a.reports.size() == portfolio_names().size());
  CHECK(a.sorted());
  CHECK(without_times(a.to_json()) == without_times(b.to_json()));
  CHECK(a.metadata.dataset_rows == 900);
  CHECK(a.metadata.test_rows == f.plan.test_indices.size());

  for (const auto& r : a.reports) {
    CAPTURE(r.name);
    REQUIRE(r.ok());
    for (double v : {r.accuracy, r.balanced_accuracy, r.f1_weighted, r.f1_macro, r.roc_auc_macro}) {
      CHECK((v >= 0.0 && v <= 1.0));
    }
    // recomputed from the stored confusion matrix and scores
    CHECK(std::abs(accuracy(r.confusion) - r.accuracy) <= 1e-12);
    CHECK(std::abs(balanced_accuracy(r.confusion) - r.balanced_accuracy) <= 1e-12);
    CHECK(std::abs(f1(r.confusion, Averaging::Weighted) - r.f1_weighted) <= 1e-12);
    CHECK(std::abs(f1(r.confusion, Averaging::Macro) - r.f1_macro) <= 1e-12);
    CHECK(std::abs(roc_report(r.truth, r.scores).macro_auc - r.roc_auc_macro) <= 1e-12);
    CHECK(r.confusion.total() == f.plan.test_indices.size());
  }
  CHECK(a.reports.back().name == "dummy");
}

TEST_CASE("a failing model becomes an error row") {
  // 6 rows, half in test: 3 training rows, fewer than knn's k = 5
  auto data = fit_transform(synthesize({6, 1, 1.0}), false);
  data.labels = {0, 0, 1, 1, 2, 2};
  const auto plan = stratified_split(data.labels, 0.5, 1);
  BenchOptions options;
  options.models = {"knn", "dummy", "decision_tree"};
  const auto board = run_benchmark(data, plan, options);
  REQUIRE(board.reports.size() == 3);
  CHECK(board.reports.back().name == "knn");
  CHECK(board.reports.back().status == "error");
  CHECK(board.reports.back().error.find("exceeds") != std::string::npos);
  CHECK(board.sorted());
  CHECK(rendered(board, Format::Table).find("knn") != std::string::npos);
  const auto back = Leaderboard::from_json(board.to_json());
  CHECK(back.reports.back().status == "error");
}

TEST_CASE("cross-validation is attached when folds are requested") {
  const auto f = fixture(300, 1.0);
  BenchOptions options;
  options.models = {"decision_tree", "dummy"};
  options.folds = 3;
  const auto board = run_benchmark(f.data, f.plan, options);
  for (const auto& r : board.reports) {
    REQUIRE(r.cv.has_value());
    CHECK(r.cv->k == 3);
    CHECK(r.cv->fold_errors.size() == 3);
  }
  CHECK(board.to_json()["metadata"]["protocol"] == "holdout+cv");
}

TEST_CASE("sort rule: accuracy, then balanced accuracy, then name") {
  Leaderboard board;
  auto row = [](std::string name, double acc, double bal) {
    EvalReport r;
    r.name = std::move(name);
    r.accuracy = acc;
    r.balanced_accuracy = bal;
    r.time_taken = 0.1;
    return r;
  };
  board.reports = {row("b", 0.5, 0.5), row("a", 0.5, 0.5), row("c", 0.5, 0.6), row("d", 0.9, 0.1)};
  EvalReport failed = row("0_failed", 0, 0);
  failed.status = "error";
  board.reports.insert(board.reports.begin(), failed);
  board.sort();
  std::vector<std::string> names;
  for (const auto& r : board.reports) names.push_back(r.name);
  CHECK(names == std::vector<std::string>{"d", "c", "a", "b", "0_failed"});
}

TEST_CASE("render") {
  const std::string header =
      "Model  Accuracy  Balanced Accuracy  ROC AUC  F1 Score  Time Taken\n";
  Leaderboard board;
  CHECK(rendered(board, Format::Table) == header);

  EvalReport r;
  r.name = "dummy";
  r.accuracy = 0.39123;
  r.balanced_accuracy = 1.0 / 3.0;
  r.roc_auc_macro = 0.5;
  r.f1_weighted = 0.2189;
  r.f1_macro = 0.18;
  r.time_taken = 0.016;
  r.confusion = confusion(std::vector<int>{0, 1, 2}, std::vector<int>{1, 1, 1}, 3);
  board.reports.push_back(r);
  CHECK(rendered(board, Format::Table) ==
        "Model  Accuracy  Balanced Accuracy  ROC AUC  F1 Score  Time Taken\n"
        "dummy      0.39               0.33     0.50      0.22        0.02\n");

  const auto csv = rendered(board, Format::Csv);
  CHECK(csv.rfind("model,status,accuracy,balanced_accuracy,roc_auc,f1_score,f1_macro,time_taken,cv_error,error\n", 0) ==
        0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);

  const auto j = nlohmann::json::parse(rendered(board, Format::Json));
  CHECK(j["schema_version"] == 1);
  const auto back = Leaderboard::from_json(j);
  CHECK(back.to_json() == board.to_json());
  CHECK(back.reports[0].confusion == r.confusion);

  CHECK(parse_format("csv") == Format::Csv);
  CHECK_THROWS_AS(parse_format("xml"), std::invalid_argument);
}

TEST_CASE("json round trip of a real run") {
  const auto f = fixture(300, 0.8);
  BenchOptions options;
  options.models = {"random_forest", "ridge", "dummy"};
  options.folds = 2;
  const auto board = run_benchmark(f.data, f.plan, options);
  const auto text = board.to_json().dump();
  CHECK(Leaderboard::from_json(nlohmann::json::parse(text)).to_json().dump() == text);
}

TEST_CASE("a single extra tree fits faster than a 100-tree forest") {
  const auto f = fixture(2000, 0.8);
  auto median = [&](const char* name) {
    std::vector<double> times;
    for (int i = 0; i < 3; ++i) {
      BenchOptions options;
      options.models = {name};
      times.push_back(run_benchmark(f.data, f.plan, options).reports[0].time_taken);
    }
    std::sort(times.begin(), times.end());
    return times[1];
  };
  CHECK(median("extra_tree") < median("random_forest"));
}

TEST_CASE("column hash depends on names and order") {
  const std::vector<std::string> a = {"Time", "Port"}, b = {"Port", "Time"}, c = {"TimeP", "ort"};
  CHECK(column_hash(a) == column_hash(a));
  CHECK(column_hash(a) != column_hash(b));
  CHECK(column_hash(a) != column_hash(c));
  CHECK(column_hash(a).size() == 16);
}
