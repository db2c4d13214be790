#include "ugr/model_registry.hpp"

#include <algorithm>

#include "ugr/bayes.hpp"
#include "ugr/ensemble.hpp"
#include "ugr/error.hpp"
#include "ugr/linear.hpp"
#include "ugr/neighbors.hpp"
#include "ugr/tree.hpp"

namespace ugr {

const std::vector<std::string>& portfolio_names() {
  static const std::vector<std::string> names = {
      "decision_tree", "extra_tree",   "bagging",          "random_forest", "extra_trees",
      "knn",           "gaussian_nb",  "bernoulli_nb",     "nearest_centroid",
      "ridge",         "linear_svm_sgd", "logistic_regression", "perceptron", "dummy",
  };
  return names;
}

bool is_known_model(std::string_view name) {
  const auto& names = portfolio_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

bool is_tree_family(std::string_view name) {
  return name == "decision_tree" || name == "extra_tree" || name == "bagging" || name == "random_forest" ||
         name == "extra_trees";
}

std::unique_ptr<Classifier> make_classifier(std::string_view name, const ModelOptions& options) {
  const auto seed = options.seed;
  const bool scale = options.scale;
  if (name == "decision_tree") return std::make_unique<DecisionTreeClassifier>(TreeParams{}, seed);
  if (name == "extra_tree") return make_extra_tree(seed);
  if (name == "bagging") return std::make_unique<ForestClassifier>(EnsembleKind::Bagging, seed);
  if (name == "random_forest") return std::make_unique<ForestClassifier>(EnsembleKind::RandomForest, seed);
  if (name == "extra_trees") return std::make_unique<ForestClassifier>(EnsembleKind::ExtraTrees, seed);
  if (name == "knn") return std::make_unique<KNeighborsClassifier>(5, scale);
  if (name == "gaussian_nb") return std::make_unique<NaiveBayesClassifier>(BayesKind::Gaussian, BayesParams{}, scale);
  if (name == "bernoulli_nb") return std::make_unique<NaiveBayesClassifier>(BayesKind::Bernoulli, BayesParams{}, scale);
  if (name == "nearest_centroid") return std::make_unique<NearestCentroidClassifier>(scale);
  if (name == "ridge") return std::make_unique<RidgeClassifier>(RidgeParams{}, scale);
  if (name == "linear_svm_sgd") return std::make_unique<SgdClassifier>(SgdLoss::Hinge, seed, SgdParams{}, scale);
  if (name == "logistic_regression") {
    return std::make_unique<SgdClassifier>(SgdLoss::Logistic, seed, SgdParams{}, scale);
  }
  if (name == "perceptron") return std::make_unique<SgdClassifier>(SgdLoss::Perceptron, seed, SgdParams{}, scale);
  if (name == "dummy") return std::make_unique<DummyClassifier>();
  throw ModelError("unknown model '" + std::string(name) + "'");
}

std::unique_ptr<Classifier> make_classifier(std::string_view name, const nlohmann::json& h) {
  const auto seed = h.value("seed", std::uint64_t{0});
  const bool scale = h.value("standardize", true);
  if (name == "decision_tree" || name == "extra_tree") {
    TreeParams p;
    p.max_depth = h.value("max_depth", p.max_depth);
    p.min_samples_split = h.value("min_samples_split", p.min_samples_split);
    p.min_impurity_decrease = h.value("min_impurity_decrease", p.min_impurity_decrease);
    p.max_features = h.value("max_features", p.max_features);
    p.random_thresholds = h.value("random_thresholds", name == "extra_tree");
    return std::make_unique<DecisionTreeClassifier>(p, seed);
  }
  if (name == "bagging" || name == "random_forest" || name == "extra_trees") {
    const EnsembleKind kind = name == "bagging"         ? EnsembleKind::Bagging
                              : name == "random_forest" ? EnsembleKind::RandomForest
                                                        : EnsembleKind::ExtraTrees;
    std::optional<bool> bootstrap;
    if (h.contains("bootstrap")) bootstrap = h.at("bootstrap").get<bool>();
    return std::make_unique<ForestClassifier>(kind, seed, h.value("n_trees", std::size_t{100}), bootstrap);
  }
  if (name == "knn") return std::make_unique<KNeighborsClassifier>(h.value("k", std::size_t{5}), scale);
  if (name == "gaussian_nb" || name == "bernoulli_nb") {
    BayesParams p;
    p.variance_smoothing = h.value("variance_smoothing", p.variance_smoothing);
    p.alpha = h.value("alpha", p.alpha);
    p.binarize = h.value("binarize", p.binarize);
    return std::make_unique<NaiveBayesClassifier>(name == "gaussian_nb" ? BayesKind::Gaussian : BayesKind::Bernoulli,
                                                  p, scale);
  }
  if (name == "nearest_centroid") return std::make_unique<NearestCentroidClassifier>(scale);
  if (name == "ridge") {
    RidgeParams p;
    p.lambda = h.value("lambda", p.lambda);
    p.fit_intercept = h.value("fit_intercept", p.fit_intercept);
    return std::make_unique<RidgeClassifier>(p, scale);
  }
  if (name == "linear_svm_sgd" || name == "logistic_regression" || name == "perceptron") {
    const SgdLoss loss = name == "linear_svm_sgd"        ? SgdLoss::Hinge
                         : name == "logistic_regression" ? SgdLoss::Logistic
                                                         : SgdLoss::Perceptron;
    return std::make_unique<SgdClassifier>(loss, seed, SgdParams::from_json(h), scale);
  }
  if (name == "dummy") return std::make_unique<DummyClassifier>();
  throw ModelError("unknown model '" + std::string(name) + "'");
}

nlohmann::json save_model(const Classifier& model, const FeatureEncoding* encoding) {
  nlohmann::json doc = {
      {"format_version", kModelFormatVersion},
      {"model", model.name()},
      {"hyperparameters", model.hyperparameters()},
      {"scaler", model.scaler() ? model.scaler()->to_json() : nlohmann::json(nullptr)},
      {"state", model.state_to_json()},
  };
  if (encoding) doc["encoding"] = encoding->to_json();
  return doc;
}

LoadedModel load_model(const nlohmann::json& document) {
  try {
    const int version = document.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw ModelError("unsupported model format_version " + std::to_string(version) + " (expected " +
                       std::to_string(kModelFormatVersion) + ")");
    }
    const auto name = document.at("model").get<std::string>();
    LoadedModel loaded;
    loaded.model = make_classifier(name, document.at("hyperparameters"));
    std::optional<StandardScaler> scaler;
    if (!document.at("scaler").is_null()) scaler = StandardScaler::from_json(document.at("scaler"));
    loaded.model->state_from_json(document.at("state"), scaler);
    if (document.contains("encoding")) loaded.encoding = FeatureEncoding::from_json(document.at("encoding"));
    return loaded;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("malformed model document: ") + e.what());
  }
}

}  // namespace ugr
