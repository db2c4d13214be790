#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "ugr/classifier.hpp"
#include "ugr/matrix.hpp"

namespace ugr {

// 1 - sum(p_i^2). Expects a probability vector.
double gini(std::span<const double> distribution);

struct TreeParams {
  std::size_t max_depth = 0;  // 0 = unlimited
  std::size_t min_samples_split = 2;
  double min_impurity_decrease = 0.0;
  std::size_t max_features = 0;  // features examined per split; 0 = all
  bool random_thresholds = false;  // one uniform threshold per feature (extra trees)

  nlohmann::json to_json() const;
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 for a leaf
  double threshold = 0.0;     // rows with value <= threshold go left
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::uint32_t value = 0;  // leaf: offset of its class distribution

  bool is_leaf() const noexcept { return feature < 0; }
};

struct SplitCandidate {
  std::size_t feature = 0;
  double threshold = 0.0;
  double weighted_gini = 0.0;  // (n_left * gini_left + n_right * gini_right) / n
};

// Exhaustive CART search over every midpoint between consecutive distinct
// values of every feature, restricted to the rows in `samples`. Ties keep
// the lowest feature, then the lowest threshold. Empty when every feature is
// constant on `samples`.
std::optional<SplitCandidate> best_split(const Matrix& x, std::span<const int> y, std::size_t num_classes,
                                         std::span<const std::size_t> samples);

// Binary classification tree stored as a flat node array; node 0 is the root.
class Tree {
 public:
  // Grows a tree on the rows listed in `samples` (duplicates allowed, e.g.
  // bootstrap draws). Labels are codes in [0, num_classes).
  static Tree fit(const Matrix& x, std::span<const int> y, std::size_t num_classes,
                  std::span<const std::size_t> samples, const TreeParams& params, std::uint64_t seed);
  static Tree fit(const Matrix& x, std::span<const int> y, std::size_t num_classes, const TreeParams& params,
                  std::uint64_t seed);

  std::size_t leaf_for(std::span<const double> row) const;
  std::span<const double> distribution(std::span<const double> row) const;
  std::span<const double> leaf_distribution(std::size_t node) const;

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::size_t num_classes() const noexcept { return num_classes_; }
  std::size_t depth() const;
  std::size_t leaf_count() const;
  // Features used by at least one split.
  std::vector<bool> feature_mask(std::size_t num_features) const;

  // Nested {"feature","threshold","left","right"} / {"value"} document.
  nlohmann::json to_json() const;
  static Tree from_json(const nlohmann::json& j, std::size_t num_classes);

  bool operator==(const Tree&) const;

 private:
  friend class TreeBuilder;

  std::vector<TreeNode> nodes_;
  std::vector<double> values_;
  std::size_t num_classes_ = 0;
};

// Greedy CART with Gini splits, unlimited depth by default.
class DecisionTreeClassifier final : public Classifier {
 public:
  explicit DecisionTreeClassifier(TreeParams params = {}, std::uint64_t seed = 0);

  std::string name() const override { return params_.random_thresholds ? "extra_tree" : "decision_tree"; }
  nlohmann::json hyperparameters() const override;
  const Tree& tree() const noexcept { return tree_; }

 protected:
  void do_fit(const Matrix& x, std::span<const int> y) override;
  Matrix do_scores(const Matrix& x) const override;
  nlohmann::json save_state() const override;
  void load_state(const nlohmann::json& state) override;

 private:
  TreeParams params_;
  std::uint64_t seed_;
  Tree tree_;
};

// Single extremely randomized tree: one random threshold per feature per node.
std::unique_ptr<DecisionTreeClassifier> make_extra_tree(std::uint64_t seed);

}  // namespace ugr
