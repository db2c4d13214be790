#include "ugr/neighbors.hpp"

#include <cmath>

#include "ugr/error.hpp"
#include "ugr/kernels.hpp"

namespace ugr {

namespace {

nlohmann::json rows_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
  return rows;
}

Matrix rows_from_json(const nlohmann::json& j, std::size_t cols) {
  Matrix m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto v = j[r].get<std::vector<double>>();
    if (v.size() != cols) throw ModelError("stored row has the wrong width");
    std::copy(v.begin(), v.end(), m.row(r).begin());
  }
  return m;
}

}  // namespace

KNeighborsClassifier::KNeighborsClassifier(std::size_t k, bool standardize) : Classifier(standardize), k_(k) {
  if (k == 0) throw ModelError("knn: k must be positive");
}

nlohmann::json KNeighborsClassifier::hyperparameters() const {
  return {{"k", k_}, {"metric", "euclidean"}, {"standardize", standardizes()}};
}

void KNeighborsClassifier::do_fit(const Matrix& x, std::span<const int> y) {
  if (k_ > x.rows()) {
    throw ModelError("knn: k = " + std::to_string(k_) + " exceeds " + std::to_string(x.rows()) + " training rows");
  }
  train_ = x;
  labels_.assign(y.begin(), y.end());
}

Matrix KNeighborsClassifier::do_scores(const Matrix& x) const {
  std::vector<std::uint32_t> neighbors(x.rows() * k_);
  kernels::nearest_neighbors(train_, x, k_, neighbors);
  Matrix scores(x.rows(), num_classes());
  const double vote = 1.0 / static_cast<double>(k_);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t i = 0; i < k_; ++i) {
      scores(r, static_cast<std::size_t>(labels_[neighbors[r * k_ + i]])) += vote;
    }
  }
  return scores;
}

nlohmann::json KNeighborsClassifier::save_state() const {
  return {{"rows", rows_json(train_)}, {"labels", labels_}};
}

void KNeighborsClassifier::load_state(const nlohmann::json& state) {
  train_ = rows_from_json(state.at("rows"), num_features());
  labels_ = state.at("labels").get<std::vector<int>>();
  if (labels_.size() != train_.rows()) throw ModelError("knn: stored rows and labels differ in length");
  if (k_ > train_.rows()) throw ModelError("knn: k exceeds stored rows");
}

NearestCentroidClassifier::NearestCentroidClassifier(bool standardize) : Classifier(standardize) {}

void NearestCentroidClassifier::do_fit(const Matrix& x, std::span<const int> y) {
  centroids_ = Matrix(num_classes(), x.cols());
  std::vector<double> counts(num_classes(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto c = static_cast<std::size_t>(y[r]);
    counts[c] += 1.0;
    for (std::size_t j = 0; j < x.cols(); ++j) centroids_(c, j) += x(r, j);
  }
  for (std::size_t c = 0; c < num_classes(); ++c) {
    for (double& v : centroids_.row(c)) v /= counts[c];
  }
}

Matrix NearestCentroidClassifier::do_scores(const Matrix& x) const {
  Matrix scores(x.rows(), num_classes());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < num_classes(); ++c) {
      double sq = 0.0;
      for (std::size_t j = 0; j < x.cols(); ++j) {
        const double delta = x(r, j) - centroids_(c, j);
        sq += delta * delta;
      }
      scores(r, c) = -std::sqrt(sq);
    }
  }
  return scores;
}

nlohmann::json NearestCentroidClassifier::save_state() const { return {{"centroids", rows_json(centroids_)}}; }

void NearestCentroidClassifier::load_state(const nlohmann::json& state) {
  centroids_ = rows_from_json(state.at("centroids"), num_features());
  if (centroids_.rows() != num_classes()) throw ModelError("nearest centroid: wrong number of centroids");
}

void DummyClassifier::do_fit(const Matrix& x, std::span<const int> y) {
  prior_.assign(num_classes(), 0.0);
  for (int label : y) prior_[static_cast<std::size_t>(label)] += 1.0;
  for (double& p : prior_) p /= static_cast<double>(x.rows());
}

Matrix DummyClassifier::do_scores(const Matrix& x) const {
  Matrix scores(x.rows(), prior_.size());
  for (std::size_t r = 0; r < x.rows(); ++r) std::copy(prior_.begin(), prior_.end(), scores.row(r).begin());
  return scores;
}

void DummyClassifier::load_state(const nlohmann::json& state) {
  prior_ = state.at("prior").get<std::vector<double>>();
  if (prior_.size() != num_classes()) throw ModelError("dummy: prior length does not match classes");
}

}  // namespace ugr
