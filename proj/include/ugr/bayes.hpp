#pragma once

#include <vector>

#include "ugr/classifier.hpp"

namespace ugr {

enum class BayesKind { Gaussian, Bernoulli };

// Per-class sufficient statistics. For the Gaussian model `center` holds
// means and `spread` variances (floored); for the Bernoulli model `center`
// holds smoothed activation rates P(x_j > threshold | class) and `spread` is
// unused.
struct BayesStatistics {
  BayesKind kind = BayesKind::Gaussian;
  std::vector<double> log_prior;  // per class
  Matrix center;                  // k x d
  Matrix spread;                  // k x d
  double variance_floor = 0.0;

  // Unnormalized log posterior per class.
  Matrix joint_log_likelihood(const Matrix& x, double binarize_threshold) const;
};

struct BayesParams {
  double variance_smoothing = 1e-9;  // Gaussian: floor = this * max feature variance
  double alpha = 1.0;                // Bernoulli: Laplace smoothing
  double binarize = 0.0;             // Bernoulli: x > binarize counts as active
};

BayesStatistics fit_bayes(BayesKind kind, const Matrix& x, std::span<const int> y, std::size_t num_classes,
                          const BayesParams& params = {});

class NaiveBayesClassifier final : public Classifier {
 public:
  explicit NaiveBayesClassifier(BayesKind kind, BayesParams params = {}, bool standardize = true);

  std::string name() const override { return kind_ == BayesKind::Gaussian ? "gaussian_nb" : "bernoulli_nb"; }
  nlohmann::json hyperparameters() const override;
  const BayesStatistics& statistics() const noexcept { return stats_; }

 protected:
  void do_fit(const Matrix& x, std::span<const int> y) override;
  // Posterior distribution (softmax of the joint log likelihood).
  Matrix do_scores(const Matrix& x) const override;
  nlohmann::json save_state() const override;
  void load_state(const nlohmann::json& state) override;

 private:
  BayesKind kind_;
  BayesParams params_;
  BayesStatistics stats_;
};

}  // namespace ugr
