#pragma once

#include "ugr/classifier.hpp"

namespace ugr {

// Majority vote of the k Euclidean-nearest training rows. Neighbour ties on
// distance keep the lower training index; vote ties go to the lowest class.
// Scores are vote fractions.
class KNeighborsClassifier final : public Classifier {
 public:
  explicit KNeighborsClassifier(std::size_t k = 5, bool standardize = true);

  std::string name() const override { return "knn"; }
  nlohmann::json hyperparameters() const override;

 protected:
  void do_fit(const Matrix& x, std::span<const int> y) override;
  Matrix do_scores(const Matrix& x) const override;
  nlohmann::json save_state() const override;
  void load_state(const nlohmann::json& state) override;

 private:
  std::size_t k_;
  Matrix train_;
  std::vector<int> labels_;
};

// Predicts the class whose training mean is nearest. Scores are negated
// Euclidean distances.
class NearestCentroidClassifier final : public Classifier {
 public:
  explicit NearestCentroidClassifier(bool standardize = true);

  std::string name() const override { return "nearest_centroid"; }
  nlohmann::json hyperparameters() const override { return {{"standardize", standardizes()}}; }
  const Matrix& centroids() const noexcept { return centroids_; }

 protected:
  void do_fit(const Matrix& x, std::span<const int> y) override;
  Matrix do_scores(const Matrix& x) const override;
  nlohmann::json save_state() const override;
  void load_state(const nlohmann::json& state) override;

 private:
  Matrix centroids_;
};

// Always predicts the most frequent training class (ties: lowest code);
// scores are the training class frequencies.
class DummyClassifier final : public Classifier {
 public:
  DummyClassifier() : Classifier(false) {}

  std::string name() const override { return "dummy"; }
  nlohmann::json hyperparameters() const override { return {{"strategy", "prior"}}; }

 protected:
  void do_fit(const Matrix& x, std::span<const int> y) override;
  Matrix do_scores(const Matrix& x) const override;
  nlohmann::json save_state() const override { return {{"prior", prior_}}; }
  void load_state(const nlohmann::json& state) override;

 private:
  std::vector<double> prior_;
};

}  // namespace ugr
