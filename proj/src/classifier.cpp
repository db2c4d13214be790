#include "ugr/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "ugr/error.hpp"

namespace ugr {

void Classifier::fit(const Matrix& x, std::span<const int> y) {
  if (x.rows() != y.size()) {
    throw ModelError(name() + ": " + std::to_string(x.rows()) + " rows but " + std::to_string(y.size()) + " labels");
  }
  if (x.rows() == 0) throw ModelError(name() + ": cannot fit on zero rows");
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw ModelError(name() + ": non-finite feature value");
  }
  std::vector<int> classes(y.begin(), y.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.front() < 0) throw ModelError(name() + ": negative class code");

  std::vector<int> positions(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    positions[i] = static_cast<int>(std::lower_bound(classes.begin(), classes.end(), y[i]) - classes.begin());
  }

  classes_ = std::move(classes);
  num_features_ = x.cols();
  fitted_ = false;
  if (standardize_) {
    scaler_ = StandardScaler::fit(x);
    do_fit(scaler_->transform(x), positions);
  } else {
    scaler_.reset();
    do_fit(x, positions);
  }
  fitted_ = true;
}

Matrix Classifier::prepare(const Matrix& x) const {
  if (!fitted_) throw ModelError(name() + ": predict called before fit");
  if (x.cols() != num_features_ && x.rows() > 0) {
    throw ModelError(name() + ": fitted on " + std::to_string(num_features_) + " features, got " +
                     std::to_string(x.cols()));
  }
  return scaler_ ? scaler_->transform(x) : x;
}

Matrix Classifier::predict_scores(const Matrix& x) const {
  if (x.rows() == 0) {
    if (!fitted_) throw ModelError(name() + ": predict called before fit");
    return Matrix(0, classes_.size());
  }
  return do_scores(prepare(x));
}

std::vector<int> Classifier::predict(const Matrix& x) const {
  const Matrix scores = predict_scores(x);
  std::vector<int> out(scores.rows());
  for (std::size_t r = 0; r < scores.rows(); ++r) out[r] = classes_[argmax(scores.row(r))];
  return out;
}

nlohmann::json Classifier::state_to_json() const {
  if (!fitted_) throw ModelError(name() + ": cannot save an unfitted model");
  return {{"classes", classes_}, {"num_features", num_features_}, {"model", save_state()}};
}

void Classifier::state_from_json(const nlohmann::json& state, const std::optional<StandardScaler>& scaler) {
  classes_ = state.at("classes").get<std::vector<int>>();
  num_features_ = state.at("num_features").get<std::size_t>();
  if (classes_.empty()) throw ModelError(name() + ": saved model has no classes");
  if (standardize_ != scaler.has_value()) throw ModelError(name() + ": scaler presence does not match model");
  scaler_ = scaler;
  load_state(state.at("model"));
  fitted_ = true;
}

void softmax_in_place(std::span<double> log_scores) {
  if (log_scores.empty()) return;
  const double peak = *std::max_element(log_scores.begin(), log_scores.end());
  double total = 0.0;
  for (double& v : log_scores) {
    v = std::exp(v - peak);
    total += v;
  }
  for (double& v : log_scores) v /= total;
}

}  // namespace ugr
