#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "ugr/classifier.hpp"
#include "ugr/matrix.hpp"

namespace ugr {

// One weight row and one bias per class (one-vs-rest).
struct LinearModel {
  Matrix weights;  // k x d
  std::vector<double> bias;

  // Decision values x . w_c + b_c, one column per class.
  Matrix decision(const Matrix& x) const;

  nlohmann::json to_json() const;
  static LinearModel from_json(const nlohmann::json& j);
};

// Geometric margin 2 / ||w|| of the one-vs-rest hyperplane for `class_index`.
// Throws ModelError when that weight vector is zero.
double margin(const LinearModel& model, std::size_t class_index);

enum class SgdLoss { Hinge, Logistic, Perceptron };

struct SgdParams {
  std::size_t max_epochs = 1000;
  double learning_rate = 0.01;  // decays as learning_rate / sqrt(epoch)
  double l2 = 1e-4;             // ignored for the perceptron
  double tolerance = 1e-6;
  std::size_t patience = 5;  // epochs without tolerance-sized improvement before stopping

  nlohmann::json to_json() const;
  static SgdParams from_json(const nlohmann::json& j);
};

// One-vs-rest SGD. Labels are codes in [0, num_classes); with a single class
// the model has zero weights and that class always wins.
LinearModel fit_linear_sgd(const Matrix& x, std::span<const int> y, std::size_t num_classes, SgdLoss loss,
                           const SgdParams& params, std::uint64_t seed);

struct RidgeParams {
  double lambda = 1.0;
  bool fit_intercept = true;
};

// Regularized least squares on +/-1 one-hot targets, solved per class
// through the normal equations (X'X + lambda I) w = X'y. With an intercept
// the columns and targets are centered first. Throws ModelError when the
// system is singular (only possible for lambda = 0).
LinearModel fit_ridge(const Matrix& x, std::span<const int> y, std::size_t num_classes, const RidgeParams& params);

// ||(X'X + lambda I) w_c - X'y_c|| maximized over classes, on the same
// centering fit_ridge used. Used to check solutions.
double ridge_residual(const LinearModel& model, const Matrix& x, std::span<const int> y, std::size_t num_classes,
                      const RidgeParams& params);

class SgdClassifier final : public Classifier {
 public:
  SgdClassifier(SgdLoss loss, std::uint64_t seed = 0, SgdParams params = {}, bool standardize = true);

  std::string name() const override;
  nlohmann::json hyperparameters() const override;
  const LinearModel& model() const noexcept { return model_; }

 protected:
  void do_fit(const Matrix& x, std::span<const int> y) override;
  Matrix do_scores(const Matrix& x) const override;
  nlohmann::json save_state() const override { return model_.to_json(); }
  void load_state(const nlohmann::json& state) override { model_ = LinearModel::from_json(state); }

 private:
  SgdLoss loss_;
  std::uint64_t seed_;
  SgdParams params_;
  LinearModel model_;
};

class RidgeClassifier final : public Classifier {
 public:
  explicit RidgeClassifier(RidgeParams params = {}, bool standardize = true);

  std::string name() const override { return "ridge"; }
  nlohmann::json hyperparameters() const override;
  const LinearModel& model() const noexcept { return model_; }

 protected:
  void do_fit(const Matrix& x, std::span<const int> y) override;
  Matrix do_scores(const Matrix& x) const override { return model_.decision(x); }
  nlohmann::json save_state() const override { return model_.to_json(); }
  void load_state(const nlohmann::json& state) override { model_ = LinearModel::from_json(state); }

 private:
  RidgeParams params_;
  LinearModel model_;
};

}  // namespace ugr
