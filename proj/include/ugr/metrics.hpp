#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "ugr/classifier.hpp"
#include "ugr/matrix.hpp"

namespace ugr {

// (1/n) * sum (y_i - y_hat_i)^2. Throws std::invalid_argument on a length
// mismatch or empty input.
double mse(std::span<const double> y, std::span<const double> y_hat);

// counts(i, j) = samples of true class i predicted as class j.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t num_classes)
      : k_(num_classes), counts_(num_classes * num_classes, 0) {}

  std::size_t num_classes() const noexcept { return k_; }
  std::uint64_t& at(std::size_t truth, std::size_t predicted) { return counts_[truth * k_ + predicted]; }
  std::uint64_t at(std::size_t truth, std::size_t predicted) const { return counts_[truth * k_ + predicted]; }
  std::uint64_t total() const;
  std::uint64_t true_total(std::size_t c) const;       // row sum
  std::uint64_t predicted_total(std::size_t c) const;  // column sum

  nlohmann::json to_json() const;
  static ConfusionMatrix from_json(const nlohmann::json& j);
  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t k_ = 0;
  std::vector<std::uint64_t> counts_;
};

// Throws std::invalid_argument on a length mismatch or a code outside [0, k).
ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted, std::size_t num_classes);

enum class Averaging { Macro, Weighted };

// All three throw std::invalid_argument for an empty matrix. Balanced accuracy
// and macro F1 also throw when a class never occurs in the true labels.
double accuracy(const ConfusionMatrix& cm);
double balanced_accuracy(const ConfusionMatrix& cm);
double f1(const ConfusionMatrix& cm, Averaging averaging);

struct RocClassCurve {
  int class_code = 0;
  std::vector<double> thresholds;  // +inf first, then distinct scores descending
  std::vector<double> fpr;
  std::vector<double> tpr;
  double auc = 0.0;
};

struct RocCurve {
  std::vector<RocClassCurve> classes;
  double macro_auc = 0.0;
};

// One-vs-rest ROC for `positive` against every other label. Tied scores form
// a single step. Throws std::invalid_argument when either side is empty.
RocClassCurve roc_curve(std::span<const int> truth, std::span<const double> scores, int positive);

// Column c of `scores` scores class code c. Macro AUC is the unweighted mean.
RocCurve roc_report(std::span<const int> truth, const Matrix& scores);

// Writes "class,threshold,fpr,tpr" rows.
void write_roc_csv(std::ostream& out, const RocCurve& curve);

struct CVResult {
  std::size_t k = 0;
  std::vector<double> fold_errors;
  double cv_error = 0.0;

  nlohmann::json to_json() const;
  static CVResult from_json(const nlohmann::json& j);
  bool operator==(const CVResult&) const = default;
};

using ClassifierFactory = std::function<std::unique_ptr<Classifier>()>;
// error(truth, predicted) for one validation fold.
using FoldError = std::function<double(std::span<const int>, std::span<const int>)>;

// Misclassification rate, the default fold error.
double error_rate(std::span<const int> truth, std::span<const int> predicted);

// Fold j trains on every row whose fold id differs from j and is scored on
// the rest. Fit errors are rethrown with the fold index in the message
// (ModelError stays ModelError, DataError stays DataError).
CVResult cv_evaluate(const ClassifierFactory& factory, const Matrix& x, std::span<const int> y,
                     std::span<const int> fold_assignment, const FoldError& error = error_rate);

struct CorrelationMatrix {
  std::vector<std::string> names;
  Matrix values;
  std::vector<bool> constant;
};

// Pearson correlation of every column pair. Constant columns correlate 0
// with everything else and are flagged. Throws DataError for fewer than 2 rows.
CorrelationMatrix pearson_matrix(const Matrix& x, std::vector<std::string> names);

// Writes "feature_a,feature_b,correlation,constant_a,constant_b", one row per pair.
void write_correlation_csv(std::ostream& out, const CorrelationMatrix& corr);

}  // namespace ugr
