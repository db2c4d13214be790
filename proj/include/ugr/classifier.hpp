#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "ugr/feature_pipeline.hpp"
#include "ugr/matrix.hpp"

namespace ugr {

// Uniform fit/predict contract shared by every model in the portfolio.
//
// Labels are non-negative class codes. The classes seen during fit are kept
// sorted in classes(); score columns follow that order. predict() is the
// argmax of predict_scores() with ties going to the lowest class code.
//
// Models flagged as needing standardized input carry their own
// StandardScaler, fitted inside fit() on the training rows.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual std::string name() const = 0;
  virtual nlohmann::json hyperparameters() const = 0;

  void fit(const Matrix& x, std::span<const int> y);
  std::vector<int> predict(const Matrix& x) const;
  Matrix predict_scores(const Matrix& x) const;

  bool fitted() const noexcept { return fitted_; }
  const std::vector<int>& classes() const noexcept { return classes_; }
  std::size_t num_features() const noexcept { return num_features_; }
  bool standardizes() const noexcept { return standardize_; }
  const std::optional<StandardScaler>& scaler() const noexcept { return scaler_; }

  // Fitted state (excluding name/hyperparameters/scaler, which model_io
  // stores alongside).
  nlohmann::json state_to_json() const;
  void state_from_json(const nlohmann::json& state, const std::optional<StandardScaler>& scaler);

 protected:
  explicit Classifier(bool standardize) : standardize_(standardize) {}

  // `y` holds positions into classes(), i.e. values in [0, classes().size()).
  virtual void do_fit(const Matrix& x, std::span<const int> y) = 0;
  // One column per entry of classes().
  virtual Matrix do_scores(const Matrix& x) const = 0;

  virtual nlohmann::json save_state() const = 0;
  virtual void load_state(const nlohmann::json& state) = 0;

  std::size_t num_classes() const noexcept { return classes_.size(); }

 private:
  Matrix prepare(const Matrix& x) const;

  bool standardize_;
  bool fitted_ = false;
  std::size_t num_features_ = 0;
  std::vector<int> classes_;
  std::optional<StandardScaler> scaler_;
};

// Shared by the probabilistic models: turns per-class log scores into a
// normalized distribution in place (log-sum-exp).
void softmax_in_place(std::span<double> log_scores);

}  // namespace ugr
