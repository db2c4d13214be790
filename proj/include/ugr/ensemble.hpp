#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ugr/classifier.hpp"
#include "ugr/kernels.hpp"
#include "ugr/tree.hpp"

namespace ugr {

enum class EnsembleKind { Bagging, RandomForest, ExtraTrees };

std::string ensemble_name(EnsembleKind kind);

// bagging: bootstrap + full-feature CART; random_forest: bootstrap +
// ceil(sqrt(d)) features per split; extra_trees: no bootstrap, random feature
// subsets and random thresholds.
ForestSpec ensemble_spec(EnsembleKind kind, std::size_t num_features, std::size_t n_trees = 100);

struct Forest {
  std::vector<Tree> trees;
  std::vector<std::vector<bool>> feature_masks;  // features split on, per tree
  std::size_t num_classes = 0;
};

Forest fit_ensemble(EnsembleKind kind, const Matrix& x, std::span<const int> y, std::size_t num_classes,
                    std::uint64_t seed, std::size_t n_trees = 100);

class ForestClassifier final : public Classifier {
 public:
  // `bootstrap` overrides the kind's default resampling.
  explicit ForestClassifier(EnsembleKind kind, std::uint64_t seed = 0, std::size_t n_trees = 100,
                            std::optional<bool> bootstrap = std::nullopt);

  std::string name() const override { return ensemble_name(kind_); }
  nlohmann::json hyperparameters() const override;
  const Forest& forest() const noexcept { return forest_; }

 protected:
  void do_fit(const Matrix& x, std::span<const int> y) override;
  Matrix do_scores(const Matrix& x) const override;
  nlohmann::json save_state() const override;
  void load_state(const nlohmann::json& state) override;

 private:
  EnsembleKind kind_;
  std::uint64_t seed_;
  std::size_t n_trees_;
  bool bootstrap_;
  Forest forest_;
};

}  // namespace ugr
