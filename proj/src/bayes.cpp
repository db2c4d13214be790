#include "ugr/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ugr/error.hpp"

namespace ugr {

Matrix BayesStatistics::joint_log_likelihood(const Matrix& x, double binarize_threshold) const {
  const std::size_t k = log_prior.size();
  const std::size_t d = center.cols();
  Matrix out(x.rows(), k);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    for (std::size_t c = 0; c < k; ++c) {
      double ll = log_prior[c];
      if (kind == BayesKind::Gaussian) {
        for (std::size_t j = 0; j < d; ++j) {
          const double var = spread(c, j);
          const double delta = row[j] - center(c, j);
          ll -= 0.5 * (std::log(2.0 * std::numbers::pi * var) + delta * delta / var);
        }
      } else {
        for (std::size_t j = 0; j < d; ++j) {
          const double p = center(c, j);
          ll += row[j] > binarize_threshold ? std::log(p) : std::log1p(-p);
        }
      }
      out(r, c) = ll;
    }
  }
  return out;
}

BayesStatistics fit_bayes(BayesKind kind, const Matrix& x, std::span<const int> y, std::size_t num_classes,
                          const BayesParams& params) {
  if (x.rows() != y.size()) throw ModelError("naive bayes: row/label count mismatch");
  if (x.rows() == 0) throw ModelError("naive bayes: cannot fit on zero rows");
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  const std::size_t k = num_classes;

  BayesStatistics s;
  s.kind = kind;
  s.center = Matrix(k, d);
  s.spread = Matrix(k, d);
  std::vector<double> counts(k, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const auto c = static_cast<std::size_t>(y[r]);
    counts.at(c) += 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      s.center(c, j) += kind == BayesKind::Gaussian ? x(r, j) : (x(r, j) > params.binarize ? 1.0 : 0.0);
    }
  }
  s.log_prior.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0.0) throw ModelError("naive bayes: class " + std::to_string(c) + " has no samples");
    s.log_prior[c] = std::log(counts[c] / static_cast<double>(n));
  }

  if (kind == BayesKind::Bernoulli) {
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t j = 0; j < d; ++j) {
        s.center(c, j) = (s.center(c, j) + params.alpha) / (counts[c] + 2.0 * params.alpha);
      }
    }
    return s;
  }

  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t j = 0; j < d; ++j) s.center(c, j) /= counts[c];
  }
  for (std::size_t r = 0; r < n; ++r) {
    const auto c = static_cast<std::size_t>(y[r]);
    for (std::size_t j = 0; j < d; ++j) {
      const double delta = x(r, j) - s.center(c, j);
      s.spread(c, j) += delta * delta;
    }
  }
  // floor relative to the largest overall feature variance
  double max_var = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += x(r, j);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) ss += (x(r, j) - mean) * (x(r, j) - mean);
    max_var = std::max(max_var, ss / static_cast<double>(n));
  }
  s.variance_floor = params.variance_smoothing * max_var;
  if (s.variance_floor <= 0.0) s.variance_floor = params.variance_smoothing;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t j = 0; j < d; ++j) s.spread(c, j) = s.spread(c, j) / counts[c] + s.variance_floor;
  }
  return s;
}

NaiveBayesClassifier::NaiveBayesClassifier(BayesKind kind, BayesParams params, bool standardize)
    : Classifier(standardize), kind_(kind), params_(params) {}

nlohmann::json NaiveBayesClassifier::hyperparameters() const {
  if (kind_ == BayesKind::Gaussian) {
    return {{"variance_smoothing", params_.variance_smoothing}, {"standardize", standardizes()}};
  }
  return {{"alpha", params_.alpha}, {"binarize", params_.binarize}, {"standardize", standardizes()}};
}

void NaiveBayesClassifier::do_fit(const Matrix& x, std::span<const int> y) {
  stats_ = fit_bayes(kind_, x, y, num_classes(), params_);
}

Matrix NaiveBayesClassifier::do_scores(const Matrix& x) const {
  Matrix scores = stats_.joint_log_likelihood(x, params_.binarize);
  for (std::size_t r = 0; r < scores.rows(); ++r) softmax_in_place(scores.row(r));
  return scores;
}

namespace {

nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  const std::size_t cols = j.empty() ? 0 : j.front().size();
  Matrix m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto v = j[r].get<std::vector<double>>();
    if (v.size() != cols) throw ModelError("naive bayes: ragged statistics matrix");
    std::copy(v.begin(), v.end(), m.row(r).begin());
  }
  return m;
}

}  // namespace

nlohmann::json NaiveBayesClassifier::save_state() const {
  return {{"log_prior", stats_.log_prior},
          {"center", matrix_json(stats_.center)},
          {"spread", matrix_json(stats_.spread)},
          {"variance_floor", stats_.variance_floor}};
}

void NaiveBayesClassifier::load_state(const nlohmann::json& state) {
  stats_.kind = kind_;
  stats_.log_prior = state.at("log_prior").get<std::vector<double>>();
  stats_.center = matrix_from_json(state.at("center"));
  stats_.spread = matrix_from_json(state.at("spread"));
  stats_.variance_floor = state.at("variance_floor").get<double>();
  if (stats_.center.rows() != stats_.log_prior.size()) throw ModelError("naive bayes: statistics shape mismatch");
}

}  // namespace ugr
