#include "ugr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ugr/error.hpp"
#include "ugr/kernels.hpp"
#include "csv.hpp"

namespace ugr {

double mse(std::span<const double> y, std::span<const double> y_hat) {
  if (y.size() != y_hat.size()) throw std::invalid_argument("mse: length mismatch");
  if (y.empty()) throw std::invalid_argument("mse: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - y_hat[i];
    sum += d * d;
  }
  return sum / static_cast<double>(y.size());
}

std::uint64_t ConfusionMatrix::total() const { return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0}); }

std::uint64_t ConfusionMatrix::true_total(std::size_t c) const {
  std::uint64_t sum = 0;
  for (std::size_t j = 0; j < k_; ++j) sum += at(c, j);
  return sum;
}

std::uint64_t ConfusionMatrix::predicted_total(std::size_t c) const {
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < k_; ++i) sum += at(i, c);
  return sum;
}

nlohmann::json ConfusionMatrix::to_json() const {
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < k_; ++i) {
    rows.push_back(std::vector<std::uint64_t>(counts_.begin() + static_cast<std::ptrdiff_t>(i * k_),
                                              counts_.begin() + static_cast<std::ptrdiff_t>((i + 1) * k_)));
  }
  return rows;
}

ConfusionMatrix ConfusionMatrix::from_json(const nlohmann::json& j) {
  ConfusionMatrix cm(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].size() != cm.k_) throw std::invalid_argument("confusion matrix must be square");
    for (std::size_t c = 0; c < cm.k_; ++c) cm.at(i, c) = j[i][c].get<std::uint64_t>();
  }
  return cm;
}

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted, std::size_t num_classes) {
  if (truth.size() != predicted.size()) throw std::invalid_argument("confusion: length mismatch");
  ConfusionMatrix cm(num_classes);
  const auto k = static_cast<int>(num_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= k || predicted[i] < 0 || predicted[i] >= k) {
      throw std::invalid_argument("confusion: class code out of range at position " + std::to_string(i));
    }
    ++cm.at(static_cast<std::size_t>(truth[i]), static_cast<std::size_t>(predicted[i]));
  }
  return cm;
}

namespace {

void require_samples(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw std::invalid_argument("metric of an empty confusion matrix");
}

void require_all_classes(const ConfusionMatrix& cm, const char* metric) {
  for (std::size_t c = 0; c < cm.num_classes(); ++c) {
    if (cm.true_total(c) == 0) {
      throw std::invalid_argument(std::string(metric) + ": class " + std::to_string(c) + " has no true samples");
    }
  }
}

double class_f1(const ConfusionMatrix& cm, std::size_t c) {
  const auto tp = static_cast<double>(cm.at(c, c));
  const auto predicted = static_cast<double>(cm.predicted_total(c));
  const auto actual = static_cast<double>(cm.true_total(c));
  // 2PR/(P+R) simplifies to 2tp/(predicted+actual); 0 when undefined
  if (tp == 0.0) return 0.0;
  return 2.0 * tp / (predicted + actual);
}

}  // namespace

double accuracy(const ConfusionMatrix& cm) {
  require_samples(cm);
  std::uint64_t diag = 0;
  for (std::size_t c = 0; c < cm.num_classes(); ++c) diag += cm.at(c, c);
  return static_cast<double>(diag) / static_cast<double>(cm.total());
}

double balanced_accuracy(const ConfusionMatrix& cm) {
  require_samples(cm);
  require_all_classes(cm, "balanced accuracy");
  double sum = 0.0;
  for (std::size_t c = 0; c < cm.num_classes(); ++c) {
    sum += static_cast<double>(cm.at(c, c)) / static_cast<double>(cm.true_total(c));
  }
  return sum / static_cast<double>(cm.num_classes());
}

double f1(const ConfusionMatrix& cm, Averaging averaging) {
  require_samples(cm);
  double sum = 0.0;
  if (averaging == Averaging::Macro) {
    require_all_classes(cm, "macro F1");
    for (std::size_t c = 0; c < cm.num_classes(); ++c) sum += class_f1(cm, c);
    return sum / static_cast<double>(cm.num_classes());
  }
  for (std::size_t c = 0; c < cm.num_classes(); ++c) {
    sum += class_f1(cm, c) * static_cast<double>(cm.true_total(c));
  }
  return sum / static_cast<double>(cm.total());
}

RocClassCurve roc_curve(std::span<const int> truth, std::span<const double> scores, int positive) {
  if (truth.size() != scores.size()) throw std::invalid_argument("roc: length mismatch");
  std::size_t n_pos = 0;
  for (int t : truth) n_pos += t == positive ? 1 : 0;
  const std::size_t n_neg = truth.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw std::invalid_argument("roc: class " + std::to_string(positive) + " needs both positive and negative samples");
  }

  std::vector<std::size_t> order(truth.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocClassCurve curve;
  curve.class_code = positive;
  curve.thresholds.push_back(std::numeric_limits<double>::infinity());
  curve.fpr.push_back(0.0);
  curve.tpr.push_back(0.0);
  std::size_t tp = 0, fp = 0;
  double area = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    const std::size_t tp_before = tp, fp_before = fp;
    while (i < order.size() && scores[order[i]] == s) {
      if (truth[order[i]] == positive) ++tp; else ++fp;
      ++i;
    }
    // trapezoid in count space, normalized once at the end
    area += static_cast<double>(fp - fp_before) * static_cast<double>(tp + tp_before) / 2.0;
    curve.thresholds.push_back(s);
    curve.fpr.push_back(static_cast<double>(fp) / static_cast<double>(n_neg));
    curve.tpr.push_back(static_cast<double>(tp) / static_cast<double>(n_pos));
  }
  curve.auc = area / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
  return curve;
}

RocCurve roc_report(std::span<const int> truth, const Matrix& scores) {
  if (scores.rows() != truth.size()) throw std::invalid_argument("roc: score rows do not match labels");
  RocCurve report;
  if (scores.cols() == 0) throw std::invalid_argument("roc: no score columns");
  double sum = 0.0;
  for (std::size_t c = 0; c < scores.cols(); ++c) {
    const auto column = scores.column(c);
    report.classes.push_back(roc_curve(truth, column, static_cast<int>(c)));
    sum += report.classes.back().auc;
  }
  report.macro_auc = sum / static_cast<double>(scores.cols());
  return report;
}

void write_roc_csv(std::ostream& out, const RocCurve& curve) {
  out << "class,threshold,fpr,tpr\n";
  out.precision(17);
  for (const auto& c : curve.classes) {
    const std::string label = c.class_code >= 0 && c.class_code <= 2
                                  ? std::string(to_string(threat_class_from_code(c.class_code)))
                                  : std::to_string(c.class_code);
    for (std::size_t i = 0; i < c.fpr.size(); ++i) {
      out << label << ',';
      if (std::isinf(c.thresholds[i])) out << "inf"; else out << c.thresholds[i];
      out << ',' << c.fpr[i] << ',' << c.tpr[i] << '\n';
    }
  }
}

nlohmann::json CVResult::to_json() const {
  return {{"k", k}, {"fold_errors", fold_errors}, {"cv_error", cv_error}};
}

CVResult CVResult::from_json(const nlohmann::json& j) {
  CVResult r;
  r.k = j.at("k").get<std::size_t>();
  r.fold_errors = j.at("fold_errors").get<std::vector<double>>();
  r.cv_error = j.at("cv_error").get<double>();
  return r;
}

double error_rate(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw std::invalid_argument("error_rate: length mismatch");
  if (truth.empty()) throw std::invalid_argument("error_rate: empty fold");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) wrong += truth[i] != predicted[i] ? 1 : 0;
  return static_cast<double>(wrong) / static_cast<double>(truth.size());
}

CVResult cv_evaluate(const ClassifierFactory& factory, const Matrix& x, std::span<const int> y,
                     std::span<const int> fold_assignment, const FoldError& error) {
  if (fold_assignment.size() != x.rows() || y.size() != x.rows()) {
    throw std::invalid_argument("cv_evaluate: fold assignment, labels and rows differ in length");
  }
  if (x.rows() == 0) throw std::invalid_argument("cv_evaluate: no rows");
  const int k = *std::max_element(fold_assignment.begin(), fold_assignment.end()) + 1;
  if (*std::min_element(fold_assignment.begin(), fold_assignment.end()) < 0 || k < 2) {
    throw std::invalid_argument("cv_evaluate: fold ids must lie in [0, k) with k >= 2");
  }

  CVResult result;
  result.k = static_cast<std::size_t>(k);
  for (int fold = 0; fold < k; ++fold) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < fold_assignment.size(); ++i) (fold_assignment[i] == fold ? test : train).push_back(i);
    if (test.empty()) throw std::invalid_argument("cv_evaluate: fold " + std::to_string(fold) + " is empty");
    std::vector<int> y_train, y_test;
    for (auto i : train) y_train.push_back(y[i]);
    for (auto i : test) y_test.push_back(y[i]);
    const std::string where = "fold " + std::to_string(fold) + ": ";
    try {
      auto model = factory();
      model->fit(x.select_rows(train), y_train);
      result.fold_errors.push_back(error(y_test, model->predict(x.select_rows(test))));
    } catch (const ModelError& e) {
      throw ModelError(where + e.what());
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
  }
  result.cv_error = std::accumulate(result.fold_errors.begin(), result.fold_errors.end(), 0.0) /
                    static_cast<double>(result.k);
  return result;
}

CorrelationMatrix pearson_matrix(const Matrix& x, std::vector<std::string> names) {
  if (names.size() != x.cols()) throw std::invalid_argument("pearson_matrix: one name per column required");
  CorrelationMatrix corr;
  corr.names = std::move(names);
  corr.values = kernels::column_correlation(x, corr.constant);
  return corr;
}

void write_correlation_csv(std::ostream& out, const CorrelationMatrix& corr) {
  out << "feature_a,feature_b,correlation,constant_a,constant_b\n";
  out.precision(17);
  const std::size_t d = corr.names.size();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      out << csv::escape(corr.names[i]) << ',' << csv::escape(corr.names[j]) << ',' << corr.values(i, j) << ','
          << (corr.constant[i] ? 1 : 0) << ',' << (corr.constant[j] ? 1 : 0) << '\n';
    }
  }
}

}  // namespace ugr
