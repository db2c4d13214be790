#include "ugr/ensemble.hpp"

#include <cmath>

#include "ugr/error.hpp"

namespace ugr {

std::string ensemble_name(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::Bagging: return "bagging";
    case EnsembleKind::RandomForest: return "random_forest";
    case EnsembleKind::ExtraTrees: return "extra_trees";
  }
  return "unknown";
}

ForestSpec ensemble_spec(EnsembleKind kind, std::size_t num_features, std::size_t n_trees) {
  ForestSpec spec;
  spec.n_trees = n_trees;
  const auto subset = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(num_features))));
  switch (kind) {
    case EnsembleKind::Bagging:
      spec.bootstrap = true;
      break;
    case EnsembleKind::RandomForest:
      spec.bootstrap = true;
      spec.tree.max_features = subset;
      break;
    case EnsembleKind::ExtraTrees:
      spec.bootstrap = false;
      spec.tree.max_features = subset;
      spec.tree.random_thresholds = true;
      break;
  }
  return spec;
}

namespace {

Forest assemble(std::vector<Tree> trees, std::size_t num_features, std::size_t num_classes) {
  Forest forest;
  forest.num_classes = num_classes;
  forest.trees = std::move(trees);
  for (const auto& tree : forest.trees) forest.feature_masks.push_back(tree.feature_mask(num_features));
  return forest;
}

}  // namespace

Forest fit_ensemble(EnsembleKind kind, const Matrix& x, std::span<const int> y, std::size_t num_classes,
                    std::uint64_t seed, std::size_t n_trees) {
  if (x.rows() == 0) throw ModelError(ensemble_name(kind) + ": cannot fit on zero rows");
  const ForestSpec spec = ensemble_spec(kind, x.cols(), n_trees);
  return assemble(kernels::grow_forest(x, y, num_classes, spec, seed), x.cols(), num_classes);
}

ForestClassifier::ForestClassifier(EnsembleKind kind, std::uint64_t seed, std::size_t n_trees,
                                   std::optional<bool> bootstrap)
    : Classifier(false), kind_(kind), seed_(seed), n_trees_(n_trees) {
  if (n_trees == 0) throw ModelError(ensemble_name(kind) + ": n_trees must be positive");
  bootstrap_ = bootstrap.value_or(ensemble_spec(kind, 1).bootstrap);
}

nlohmann::json ForestClassifier::hyperparameters() const {
  return {{"n_trees", n_trees_}, {"bootstrap", bootstrap_}, {"max_features", kind_ == EnsembleKind::Bagging ? "all" : "sqrt"}, {"seed", seed_}};
}

void ForestClassifier::do_fit(const Matrix& x, std::span<const int> y) {
  ForestSpec spec = ensemble_spec(kind_, x.cols(), n_trees_);
  spec.bootstrap = bootstrap_;
  forest_ = assemble(kernels::grow_forest(x, y, num_classes(), spec, seed_), x.cols(), num_classes());
}

Matrix ForestClassifier::do_scores(const Matrix& x) const {
  return kernels::forest_average(forest_.trees, x, forest_.num_classes);
}

nlohmann::json ForestClassifier::save_state() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : forest_.trees) trees.push_back(t.to_json());
  return {{"trees", std::move(trees)}};
}

void ForestClassifier::load_state(const nlohmann::json& state) {
  std::vector<Tree> trees;
  for (const auto& t : state.at("trees")) trees.push_back(Tree::from_json(t, num_classes()));
  if (trees.empty()) throw ModelError(name() + ": saved forest has no trees");
  forest_ = assemble(std::move(trees), num_features(), num_classes());
}

}  // namespace ugr
