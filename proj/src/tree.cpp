#include "ugr/tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "ugr/error.hpp"
#include "ugr/random.hpp"

namespace ugr {

double gini(std::span<const double> distribution) {
  double sum_sq = 0.0;
  for (double p : distribution) sum_sq += p * p;
  return 1.0 - sum_sq;
}

nlohmann::json TreeParams::to_json() const {
  return {{"max_depth", max_depth},
          {"min_samples_split", min_samples_split},
          {"min_impurity_decrease", min_impurity_decrease},
          {"max_features", max_features},
          {"random_thresholds", random_thresholds}};
}

namespace {

// Sum over children of n_child - sum(c^2)/n_child, i.e. n times the weighted
// child Gini. Computed from integer counts so the value depends only on the
// class counts on each side.
double split_score(std::int64_t n_left, std::int64_t sq_left, std::int64_t n_right, std::int64_t sq_right) {
  return (static_cast<double>(n_left) - static_cast<double>(sq_left) / static_cast<double>(n_left)) +
         (static_cast<double>(n_right) - static_cast<double>(sq_right) / static_cast<double>(n_right));
}

double midpoint(double lo, double hi) {
  double t = lo / 2.0 + hi / 2.0;
  if (t >= hi || t < lo) t = lo;
  return t;
}

bool better(double score, std::size_t feature, double threshold, const std::optional<SplitCandidate>& best) {
  if (!best) return true;
  if (score != best->weighted_gini) return score < best->weighted_gini;
  if (feature != best->feature) return feature < best->feature;
  return threshold < best->threshold;
}

}  // namespace

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const int> y, std::size_t num_classes, const TreeParams& params,
              std::uint64_t seed)
      : x_(x), y_(y), k_(num_classes), params_(params), rng_(seed) {
    for (int label : y) {
      if (label < 0 || static_cast<std::size_t>(label) >= k_) throw ModelError("tree: label out of range");
    }
  }

  std::optional<SplitCandidate> root_split(std::span<const std::size_t> samples) {
    idx_.assign(samples.begin(), samples.end());
    std::vector<std::int64_t> counts(k_, 0);
    for (std::size_t s : idx_) ++counts[static_cast<std::size_t>(y_[s])];
    return find_split(0, idx_.size(), counts);
  }

  Tree build(std::span<const std::size_t> samples) {
    Tree tree;
    tree.num_classes_ = k_;
    if (samples.empty()) throw ModelError("tree: cannot grow on zero samples");
    idx_.assign(samples.begin(), samples.end());
    root_size_ = static_cast<double>(idx_.size());

    struct Work {
      std::size_t node, begin, end, depth;
    };
    std::vector<Work> stack;
    tree.nodes_.emplace_back();
    stack.push_back({0, 0, idx_.size(), 0});
    std::vector<std::int64_t> counts(k_);

    while (!stack.empty()) {
      const Work w = stack.back();
      stack.pop_back();
      std::fill(counts.begin(), counts.end(), 0);
      for (std::size_t i = w.begin; i < w.end; ++i) ++counts[static_cast<std::size_t>(y_[idx_[i]])];

      const std::size_t n = w.end - w.begin;
      const auto occupied = std::count_if(counts.begin(), counts.end(), [](std::int64_t c) { return c > 0; });
      const bool stop = occupied <= 1 || n < params_.min_samples_split ||
                        (params_.max_depth > 0 && w.depth >= params_.max_depth);

      std::optional<SplitCandidate> split;
      if (!stop) split = find_split(w.begin, w.end, counts);
      if (split) {
        std::int64_t sq = 0;
        for (auto c : counts) sq += c * c;
        const double parent = static_cast<double>(n) - static_cast<double>(sq) / static_cast<double>(n);
        const double decrease = (parent - split->weighted_gini * static_cast<double>(n)) / root_size_;
        if (decrease < params_.min_impurity_decrease - 1e-12) split.reset();
      }

      if (!split) {
        TreeNode& leaf = tree.nodes_[w.node];
        leaf.value = static_cast<std::uint32_t>(tree.values_.size());
        for (auto c : counts) tree.values_.push_back(static_cast<double>(c) / static_cast<double>(n));
        continue;
      }

      const auto f = split->feature;
      const double t = split->threshold;
      const auto mid_it = std::partition(idx_.begin() + static_cast<std::ptrdiff_t>(w.begin),
                                         idx_.begin() + static_cast<std::ptrdiff_t>(w.end),
                                         [&](std::size_t i) { return x_(i, f) <= t; });
      const auto mid = static_cast<std::size_t>(mid_it - idx_.begin());

      const auto left = static_cast<std::int32_t>(tree.nodes_.size());
      tree.nodes_.emplace_back();
      tree.nodes_.emplace_back();
      TreeNode& node = tree.nodes_[w.node];
      node.feature = static_cast<std::int32_t>(f);
      node.threshold = t;
      node.left = left;
      node.right = left + 1;
      stack.push_back({static_cast<std::size_t>(left + 1), mid, w.end, w.depth + 1});
      stack.push_back({static_cast<std::size_t>(left), w.begin, mid, w.depth + 1});
    }
    return tree;
  }

 private:
  std::optional<SplitCandidate> find_split(std::size_t begin, std::size_t end, std::span<const std::int64_t> counts) {
    const std::size_t d = x_.cols();
    const std::size_t quota = params_.max_features == 0 ? d : std::min(params_.max_features, d);
    std::optional<SplitCandidate> best;

    if (quota == d) {
      for (std::size_t f = 0; f < d; ++f) evaluate_feature(f, begin, end, counts, best);
      return best;
    }
    // Visit features in random order until `quota` non-constant ones were
    // examined; keep going past constant ones.
    order_.resize(d);
    for (std::size_t f = 0; f < d; ++f) order_[f] = f;
    std::size_t visited = 0;
    for (std::size_t i = 0; i < d && visited < quota; ++i) {
      std::swap(order_[i], order_[i + rng_.uniform_index(d - i)]);
      if (evaluate_feature(order_[i], begin, end, counts, best)) ++visited;
    }
    return best;
  }

  // Returns false when the feature is constant on the node.
  bool evaluate_feature(std::size_t f, std::size_t begin, std::size_t end, std::span<const std::int64_t> counts,
                        std::optional<SplitCandidate>& best) {
    const std::size_t n = end - begin;
    if (params_.random_thresholds) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t i = begin; i < end; ++i) {
        const double v = x_(idx_[i], f);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (!(lo < hi)) return false;
      double t = lo + rng_.uniform01() * (hi - lo);
      if (t >= hi) t = lo;
      left_counts_.assign(k_, 0);
      std::int64_t n_left = 0;
      for (std::size_t i = begin; i < end; ++i) {
        if (x_(idx_[i], f) <= t) {
          ++left_counts_[static_cast<std::size_t>(y_[idx_[i]])];
          ++n_left;
        }
      }
      std::int64_t sq_left = 0, sq_right = 0;
      for (std::size_t c = 0; c < k_; ++c) {
        const auto r = counts[c] - left_counts_[c];
        sq_left += left_counts_[c] * left_counts_[c];
        sq_right += r * r;
      }
      const double score =
          split_score(n_left, sq_left, static_cast<std::int64_t>(n) - n_left, sq_right) / static_cast<double>(n);
      if (better(score, f, t, best)) best = SplitCandidate{f, t, score};
      return true;
    }

    pairs_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t row = idx_[begin + i];
      pairs_[i] = {x_(row, f), y_[row]};
    }
    std::sort(pairs_.begin(), pairs_.end());
    if (!(pairs_.front().first < pairs_.back().first)) return false;

    left_counts_.assign(k_, 0);
    std::int64_t sq_left = 0;
    std::int64_t sq_right = 0;
    for (auto c : counts) sq_right += c * c;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto c = static_cast<std::size_t>(pairs_[i].second);
      const std::int64_t right_c = counts[c] - left_counts_[c];
      sq_left += 2 * left_counts_[c] + 1;
      sq_right -= 2 * right_c - 1;
      ++left_counts_[c];
      if (pairs_[i].first < pairs_[i + 1].first) {
        const auto n_left = static_cast<std::int64_t>(i + 1);
        const double score =
            split_score(n_left, sq_left, static_cast<std::int64_t>(n) - n_left, sq_right) / static_cast<double>(n);
        const double t = midpoint(pairs_[i].first, pairs_[i + 1].first);
        if (better(score, f, t, best)) best = SplitCandidate{f, t, score};
      }
    }
    return true;
  }

  const Matrix& x_;
  std::span<const int> y_;
  std::size_t k_;
  TreeParams params_;
  Rng rng_;
  double root_size_ = 0.0;
  std::vector<std::size_t> idx_;
  std::vector<std::size_t> order_;
  std::vector<std::pair<double, int>> pairs_;
  std::vector<std::int64_t> left_counts_;
};

std::optional<SplitCandidate> best_split(const Matrix& x, std::span<const int> y, std::size_t num_classes,
                                         std::span<const std::size_t> samples) {
  if (x.rows() != y.size()) throw ModelError("tree: row/label count mismatch");
  if (samples.empty()) return std::nullopt;
  TreeBuilder builder(x, y, num_classes, TreeParams{}, 0);
  return builder.root_split(samples);
}

Tree Tree::fit(const Matrix& x, std::span<const int> y, std::size_t num_classes,
               std::span<const std::size_t> samples, const TreeParams& params, std::uint64_t seed) {
  if (x.rows() != y.size()) throw ModelError("tree: row/label count mismatch");
  TreeBuilder builder(x, y, num_classes, params, seed);
  return builder.build(samples);
}

Tree Tree::fit(const Matrix& x, std::span<const int> y, std::size_t num_classes, const TreeParams& params,
               std::uint64_t seed) {
  std::vector<std::size_t> all(x.rows());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return fit(x, y, num_classes, all, params, seed);
}

std::size_t Tree::leaf_for(std::span<const double> row) const {
  std::size_t node = 0;
  while (!nodes_[node].is_leaf()) {
    const TreeNode& n = nodes_[node];
    node = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return node;
}

std::span<const double> Tree::leaf_distribution(std::size_t node) const {
  return {values_.data() + nodes_.at(node).value, num_classes_};
}

std::span<const double> Tree::distribution(std::span<const double> row) const {
  return leaf_distribution(leaf_for(row));
}

std::size_t Tree::depth() const {
  std::size_t deepest = 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [node, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!nodes_[node].is_leaf()) {
      stack.emplace_back(static_cast<std::size_t>(nodes_[node].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes_[node].right), d + 1);
    }
  }
  return deepest;
}

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::vector<bool> Tree::feature_mask(std::size_t num_features) const {
  std::vector<bool> mask(num_features, false);
  for (const auto& n : nodes_) {
    if (!n.is_leaf()) mask.at(static_cast<std::size_t>(n.feature)) = true;
  }
  return mask;
}

nlohmann::json Tree::to_json() const {
  std::function<nlohmann::json(std::size_t)> emit = [&](std::size_t node) -> nlohmann::json {
    const TreeNode& n = nodes_[node];
    if (n.is_leaf()) {
      const auto dist = leaf_distribution(node);
      return {{"value", std::vector<double>(dist.begin(), dist.end())}};
    }
    return {{"feature", n.feature},
            {"threshold", n.threshold},
            {"left", emit(static_cast<std::size_t>(n.left))},
            {"right", emit(static_cast<std::size_t>(n.right))}};
  };
  return emit(0);
}

Tree Tree::from_json(const nlohmann::json& j, std::size_t num_classes) {
  Tree tree;
  tree.num_classes_ = num_classes;
  std::function<void(const nlohmann::json&, std::size_t)> load = [&](const nlohmann::json& doc, std::size_t node) {
    if (doc.contains("value")) {
      const auto value = doc.at("value").get<std::vector<double>>();
      if (value.size() != num_classes) throw ModelError("tree leaf has wrong distribution length");
      tree.nodes_[node].value = static_cast<std::uint32_t>(tree.values_.size());
      tree.values_.insert(tree.values_.end(), value.begin(), value.end());
      return;
    }
    const auto left = static_cast<std::int32_t>(tree.nodes_.size());
    tree.nodes_.emplace_back();
    tree.nodes_.emplace_back();
    tree.nodes_[node].feature = doc.at("feature").get<std::int32_t>();
    tree.nodes_[node].threshold = doc.at("threshold").get<double>();
    tree.nodes_[node].left = left;
    tree.nodes_[node].right = left + 1;
    if (tree.nodes_[node].feature < 0) throw ModelError("tree node has a negative feature index");
    load(doc.at("left"), static_cast<std::size_t>(left));
    load(doc.at("right"), static_cast<std::size_t>(left + 1));
  };
  tree.nodes_.emplace_back();
  load(j, 0);
  return tree;
}

bool Tree::operator==(const Tree& other) const {
  if (num_classes_ != other.num_classes_ || nodes_.size() != other.nodes_.size()) return false;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& a = nodes_[i];
    const auto& b = other.nodes_[i];
    if (a.feature != b.feature || a.left != b.left || a.right != b.right) return false;
    if (a.is_leaf()) {
      const auto da = leaf_distribution(i);
      const auto db = other.leaf_distribution(i);
      if (!std::equal(da.begin(), da.end(), db.begin())) return false;
    } else if (a.threshold != b.threshold) {
      return false;
    }
  }
  return true;
}

DecisionTreeClassifier::DecisionTreeClassifier(TreeParams params, std::uint64_t seed)
    : Classifier(false), params_(params), seed_(seed) {}

nlohmann::json DecisionTreeClassifier::hyperparameters() const {
  auto j = params_.to_json();
  j["seed"] = seed_;
  return j;
}

void DecisionTreeClassifier::do_fit(const Matrix& x, std::span<const int> y) {
  tree_ = Tree::fit(x, y, num_classes(), params_, seed_);
}

Matrix DecisionTreeClassifier::do_scores(const Matrix& x) const {
  Matrix scores(x.rows(), num_classes());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto dist = tree_.distribution(x.row(r));
    std::copy(dist.begin(), dist.end(), scores.row(r).begin());
  }
  return scores;
}

nlohmann::json DecisionTreeClassifier::save_state() const { return {{"tree", tree_.to_json()}}; }

void DecisionTreeClassifier::load_state(const nlohmann::json& state) {
  tree_ = Tree::from_json(state.at("tree"), num_classes());
}

std::unique_ptr<DecisionTreeClassifier> make_extra_tree(std::uint64_t seed) {
  TreeParams params;
  params.random_thresholds = true;
  return std::make_unique<DecisionTreeClassifier>(params, seed);
}

}  // namespace ugr
