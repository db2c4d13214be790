#include "ugr/linear.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

#include "ugr/error.hpp"
#include "ugr/random.hpp"

namespace ugr {

Matrix LinearModel::decision(const Matrix& x) const {
  const std::size_t k = weights.rows();
  Matrix out(x.rows(), k);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    for (std::size_t c = 0; c < k; ++c) {
      const auto w = weights.row(c);
      double z = bias[c];
      for (std::size_t j = 0; j < row.size(); ++j) z += w[j] * row[j];
      out(r, c) = z;
    }
  }
  return out;
}

nlohmann::json LinearModel::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t c = 0; c < weights.rows(); ++c) {
    const auto w = weights.row(c);
    rows.push_back(std::vector<double>(w.begin(), w.end()));
  }
  return {{"weights", std::move(rows)}, {"bias", bias}};
}

LinearModel LinearModel::from_json(const nlohmann::json& j) {
  LinearModel m;
  const auto& rows = j.at("weights");
  m.bias = j.at("bias").get<std::vector<double>>();
  if (rows.size() != m.bias.size()) throw ModelError("linear model: weight/bias row mismatch");
  const std::size_t d = rows.empty() ? 0 : rows.front().size();
  m.weights = Matrix(rows.size(), d);
  for (std::size_t c = 0; c < rows.size(); ++c) {
    const auto w = rows[c].get<std::vector<double>>();
    if (w.size() != d) throw ModelError("linear model: ragged weight matrix");
    std::copy(w.begin(), w.end(), m.weights.row(c).begin());
  }
  return m;
}

double margin(const LinearModel& model, std::size_t class_index) {
  if (class_index >= model.weights.rows()) throw ModelError("margin: class index out of range");
  double sq = 0.0;
  for (double w : model.weights.row(class_index)) sq += w * w;
  if (sq == 0.0) throw ModelError("margin undefined for a zero weight vector");
  return 2.0 / std::sqrt(sq);
}

nlohmann::json SgdParams::to_json() const {
  return {{"max_epochs", max_epochs}, {"learning_rate", learning_rate}, {"l2", l2},
          {"tolerance", tolerance},   {"patience", patience}};
}

SgdParams SgdParams::from_json(const nlohmann::json& j) {
  SgdParams p;
  p.max_epochs = j.value("max_epochs", p.max_epochs);
  p.learning_rate = j.value("learning_rate", p.learning_rate);
  p.l2 = j.value("l2", p.l2);
  p.tolerance = j.value("tolerance", p.tolerance);
  p.patience = j.value("patience", p.patience);
  return p;
}

namespace {

double softplus(double u) { return u > 0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u)); }

double sigmoid(double u) {
  if (u >= 0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

// Binary one-vs-rest problem for class `positive`; writes the weight row and bias.
void sgd_binary(const Matrix& x, std::span<const int> y, int positive, SgdLoss loss, const SgdParams& params,
                std::uint64_t seed, std::span<double> w, double& b) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  std::fill(w.begin(), w.end(), 0.0);
  b = 0.0;
  Rng rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const double l2 = loss == SgdLoss::Perceptron ? 0.0 : params.l2;

  double best = std::numeric_limits<double>::infinity();
  std::size_t stall = 0;
  for (std::size_t epoch = 1; epoch <= params.max_epochs; ++epoch) {
    const double eta = params.learning_rate / std::sqrt(static_cast<double>(epoch));
    rng.shuffle(std::span<std::size_t>(order));
    double total = 0.0;
    for (std::size_t i : order) {
      const auto row = x.row(i);
      const double t = y[i] == positive ? 1.0 : -1.0;
      double z = b;
      for (std::size_t j = 0; j < d; ++j) z += w[j] * row[j];
      const double tz = t * z;

      // gradient of the loss w.r.t. z, times -t
      double step = 0.0;
      switch (loss) {
        case SgdLoss::Hinge:
          total += std::max(0.0, 1.0 - tz);
          if (tz < 1.0) step = t;
          break;
        case SgdLoss::Logistic:
          total += softplus(-tz);
          step = t * sigmoid(-tz);
          break;
        case SgdLoss::Perceptron:
          total += std::max(0.0, -tz);
          if (tz <= 0.0) step = t;
          break;
      }
      if (l2 > 0.0) {
        const double shrink = 1.0 - eta * l2;
        for (double& v : w) v *= shrink;
      }
      if (step != 0.0) {
        for (std::size_t j = 0; j < d; ++j) w[j] += eta * step * row[j];
        b += eta * step;
      }
    }
    double objective = total / static_cast<double>(n);
    if (l2 > 0.0) {
      double sq = 0.0;
      for (double v : w) sq += v * v;
      objective += 0.5 * l2 * sq;
    }
    if (objective > best - params.tolerance) {
      if (++stall >= params.patience) break;
    } else {
      stall = 0;
    }
    best = std::min(best, objective);
  }
}

}  // namespace

LinearModel fit_linear_sgd(const Matrix& x, std::span<const int> y, std::size_t num_classes, SgdLoss loss,
                           const SgdParams& params, std::uint64_t seed) {
  if (x.rows() != y.size()) throw ModelError("sgd: row/label count mismatch");
  if (x.rows() == 0) throw ModelError("sgd: cannot fit on zero rows");
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw ModelError("sgd: non-finite feature value");
  }
  LinearModel model;
  model.weights = Matrix(num_classes, x.cols());
  model.bias.assign(num_classes, 0.0);
  if (num_classes < 2) return model;

  std::vector<std::exception_ptr> errors(num_classes);
  const auto k = static_cast<std::ptrdiff_t>(num_classes);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t c = 0; c < k; ++c) {
    try {
      const auto cls = static_cast<std::size_t>(c);
      sgd_binary(x, y, static_cast<int>(c), loss, params, derive_seed(seed, cls), model.weights.row(cls),
                 model.bias[cls]);
    } catch (...) {
      errors[static_cast<std::size_t>(c)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (double v : model.weights.data()) {
    if (!std::isfinite(v)) throw ModelError("sgd: diverged to non-finite weights");
  }
  return model;
}

namespace {

struct NormalEquations {
  Matrix gram;     // d x d, X'X + lambda I
  Matrix rhs;      // d x k, X'Y
  std::vector<double> x_mean;
  std::vector<double> y_mean;
};

NormalEquations normal_equations(const Matrix& x, std::span<const int> y, std::size_t k, const RidgeParams& p) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  NormalEquations ne;
  ne.x_mean.assign(d, 0.0);
  ne.y_mean.assign(k, 0.0);
  if (p.fit_intercept) {
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t j = 0; j < d; ++j) ne.x_mean[j] += x(r, j);
      for (std::size_t c = 0; c < k; ++c) ne.y_mean[c] += y[r] == static_cast<int>(c) ? 1.0 : -1.0;
    }
    for (double& v : ne.x_mean) v /= static_cast<double>(n);
    for (double& v : ne.y_mean) v /= static_cast<double>(n);
  }
  ne.gram = Matrix(d, d);
  ne.rhs = Matrix(d, k);
  std::vector<double> xc(d);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < d; ++j) xc[j] = x(r, j) - ne.x_mean[j];
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = a; b < d; ++b) ne.gram(a, b) += xc[a] * xc[b];
      for (std::size_t c = 0; c < k; ++c) {
        const double target = (y[r] == static_cast<int>(c) ? 1.0 : -1.0) - ne.y_mean[c];
        ne.rhs(a, c) += xc[a] * target;
      }
    }
  }
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < a; ++b) ne.gram(a, b) = ne.gram(b, a);
    ne.gram(a, a) += p.lambda;
  }
  return ne;
}

}  // namespace

LinearModel fit_ridge(const Matrix& x, std::span<const int> y, std::size_t num_classes, const RidgeParams& params) {
  if (params.lambda < 0.0) throw ModelError("ridge: lambda must be non-negative");
  if (x.rows() != y.size()) throw ModelError("ridge: row/label count mismatch");
  if (x.rows() == 0) throw ModelError("ridge: cannot fit on zero rows");
  const std::size_t d = x.cols();
  const std::size_t k = num_classes;
  LinearModel model;
  model.weights = Matrix(k, d);
  model.bias.assign(k, 0.0);
  if (k < 2) return model;

  const NormalEquations ne = normal_equations(x, y, k, params);

  // Cholesky factor L (lower) of the Gram matrix
  Matrix l(d, d);
  double max_diag = 0.0;
  for (std::size_t i = 0; i < d; ++i) max_diag = std::max(max_diag, ne.gram(i, i));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = ne.gram(i, j);
      for (std::size_t m = 0; m < j; ++m) sum -= l(i, m) * l(j, m);
      if (i == j) {
        if (!(sum > 1e-12 * std::max(max_diag, 1.0))) {
          throw ModelError(params.lambda == 0.0
                               ? "ridge: normal equations are singular at lambda = 0; use lambda > 0"
                               : "ridge: normal equations are numerically singular");
        }
        l(i, i) = std::sqrt(sum);
      } else {
        l(i, j) = sum / l(j, j);
      }
    }
  }

  std::vector<double> z(d);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < d; ++i) {
      double sum = ne.rhs(i, c);
      for (std::size_t m = 0; m < i; ++m) sum -= l(i, m) * z[m];
      z[i] = sum / l(i, i);
    }
    auto w = model.weights.row(c);
    for (std::size_t ii = d; ii-- > 0;) {
      double sum = z[ii];
      for (std::size_t m = ii + 1; m < d; ++m) sum -= l(m, ii) * w[m];
      w[ii] = sum / l(ii, ii);
    }
    double offset = ne.y_mean[c];
    for (std::size_t j = 0; j < d; ++j) offset -= ne.x_mean[j] * w[j];
    model.bias[c] = params.fit_intercept ? offset : 0.0;
  }
  return model;
}

double ridge_residual(const LinearModel& model, const Matrix& x, std::span<const int> y, std::size_t num_classes,
                      const RidgeParams& params) {
  const NormalEquations ne = normal_equations(x, y, num_classes, params);
  const std::size_t d = x.cols();
  double worst = 0.0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    double sq = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      double v = -ne.rhs(i, c);
      for (std::size_t j = 0; j < d; ++j) v += ne.gram(i, j) * model.weights(c, j);
      sq += v * v;
    }
    worst = std::max(worst, std::sqrt(sq));
  }
  return worst;
}

SgdClassifier::SgdClassifier(SgdLoss loss, std::uint64_t seed, SgdParams params, bool standardize)
    : Classifier(standardize), loss_(loss), seed_(seed), params_(params) {}

std::string SgdClassifier::name() const {
  switch (loss_) {
    case SgdLoss::Hinge: return "linear_svm_sgd";
    case SgdLoss::Logistic: return "logistic_regression";
    case SgdLoss::Perceptron: return "perceptron";
  }
  return "sgd";
}

nlohmann::json SgdClassifier::hyperparameters() const {
  auto j = params_.to_json();
  j["seed"] = seed_;
  j["standardize"] = standardizes();
  return j;
}

void SgdClassifier::do_fit(const Matrix& x, std::span<const int> y) {
  model_ = fit_linear_sgd(x, y, num_classes(), loss_, params_, seed_);
}

Matrix SgdClassifier::do_scores(const Matrix& x) const {
  Matrix scores = model_.decision(x);
  if (loss_ == SgdLoss::Logistic && scores.cols() > 1) {
    // one-vs-rest probabilities sigmoid(z_c), renormalized across classes
    for (std::size_t r = 0; r < scores.rows(); ++r) {
      auto row = scores.row(r);
      for (double& z : row) z = -softplus(-z);
      softmax_in_place(row);
    }
  }
  return scores;
}

RidgeClassifier::RidgeClassifier(RidgeParams params, bool standardize)
    : Classifier(standardize), params_(params) {}

nlohmann::json RidgeClassifier::hyperparameters() const {
  return {{"lambda", params_.lambda}, {"fit_intercept", params_.fit_intercept}, {"standardize", standardizes()}};
}

void RidgeClassifier::do_fit(const Matrix& x, std::span<const int> y) {
  model_ = fit_ridge(x, y, num_classes(), params_);
}

}  // namespace ugr
