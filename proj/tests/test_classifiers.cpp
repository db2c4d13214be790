#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"
#include "ugr/bayes.hpp"
#include "ugr/ensemble.hpp"
#include "ugr/error.hpp"
#include "ugr/linear.hpp"
#include "ugr/metrics.hpp"
#include "ugr/model_registry.hpp"
#include "ugr/neighbors.hpp"
#include "ugr/parallel.hpp"
#include "ugr/tree.hpp"

using namespace ugr;
using testing::column_matrix;

namespace {

const Matrix kToyX = column_matrix({1, 2, 3, 4});
const std::vector<int> kToyY = {0, 0, 1, 1};

double training_accuracy(const Classifier& model, const Matrix& x, std::span<const int> y) {
  const auto predicted = model.predict(x);
  std::size_t right = 0;
  for (std::size_t i = 0; i < y.size(); ++i) right += predicted[i] == y[i] ? 1 : 0;
  return static_cast<double>(right) / static_cast<double>(y.size());
}

std::vector<std::unique_ptr<Classifier>> portfolio(std::uint64_t seed) {
  std::vector<std::unique_ptr<Classifier>> models;
  for (const auto& name : portfolio_names()) models.push_back(make_classifier(name, ModelOptions{seed, true}));
  return models;
}

}  // namespace

TEST_CASE("gini values and bounds") {
  const std::vector<double> pure = {1, 0, 0}, half = {0.5, 0.5}, third = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  CHECK(gini(pure) == 0.0);
  CHECK(gini(half) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(gini(third) - 2.0 / 3.0) < 1e-12);

  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t k = 2 + t % 4;
    std::vector<double> p(k);
    for (auto& v : p) v = u(gen);
    const double s = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& v : p) v /= s;
    const double g = gini(p);
    CHECK(g >= 0.0);
    CHECK(g <= 1.0 - 1.0 / static_cast<double>(k) + 1e-12);
  }
}

TEST_CASE("decision tree on the 1-D toy set splits at 2.5") {
  DecisionTreeClassifier tree;
  tree.fit(kToyX, kToyY);
  const auto& root = tree.tree().nodes().at(0);
  CHECK(root.feature == 0);
  CHECK(root.threshold == 2.5);
  CHECK(training_accuracy(tree, kToyX, kToyY) == 1.0);

  // routing by hand: 2 goes left, 3 goes right; predictions follow the leaves
  const auto& nodes = tree.tree().nodes();
  const auto left_leaf = tree.tree().leaf_distribution(static_cast<std::size_t>(root.left));
  const auto right_leaf = tree.tree().leaf_distribution(static_cast<std::size_t>(root.right));
  CHECK(nodes[static_cast<std::size_t>(root.left)].is_leaf());
  CHECK(argmax(left_leaf) == 0);
  CHECK(argmax(right_leaf) == 1);
  CHECK(tree.predict(column_matrix({2.0, 2.5, 2.6, 100})) == std::vector<int>{0, 0, 1, 1});
}

TEST_CASE("single-class data gives a lone leaf") {
  DecisionTreeClassifier tree;
  tree.fit(kToyX, std::vector<int>{2, 2, 2, 2});
  CHECK(tree.tree().nodes().size() == 1);
  CHECK(tree.predict(column_matrix({-5, 50})) == std::vector<int>{2, 2});
}

TEST_CASE("CART root split matches exhaustive search") {
  std::mt19937_64 gen(2024);
  for (int instance = 0; instance < 100; ++instance) {
    const std::size_t n = 2 + gen() % 29;
    const std::size_t d = 1 + gen() % 3;
    const auto data = testing::random_data(gen, n, d, 3, 5);
    std::vector<std::size_t> samples(n);
    std::iota(samples.begin(), samples.end(), 0);
    const auto split = best_split(data.x, data.y, 3, samples);
    const auto oracle = oracles::brute_force_split(data.x, data.y, 3);
    CAPTURE(instance);
    REQUIRE(split.has_value() == oracle.found);
    if (!split) continue;
    CHECK(std::abs(split->weighted_gini - oracle.score) < 1e-12);
    CHECK(std::abs(oracles::split_score(data.x, data.y, 3, split->feature, split->threshold) - oracle.score) < 1e-12);
  }
}

TEST_CASE("unlimited-depth tree reproduces a lookup table on conflict-free data") {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 40; ++trial) {
    const auto data = testing::conflict_free(testing::random_data(gen, 60, 3, 3, 4));
    std::map<std::vector<double>, int> table;
    for (std::size_t r = 0; r < data.x.rows(); ++r) {
      table[{data.x.row(r).begin(), data.x.row(r).end()}] = data.y[r];
    }
    std::vector<std::unique_ptr<Classifier>> models;
    models.push_back(std::make_unique<DecisionTreeClassifier>());
    models.push_back(make_extra_tree(static_cast<std::uint64_t>(trial)));
    for (auto& model : models) {
      model->fit(data.x, data.y);
      const auto predicted = model->predict(data.x);
      for (std::size_t r = 0; r < data.x.rows(); ++r) {
        CHECK(predicted[r] == table.at({data.x.row(r).begin(), data.x.row(r).end()}));
      }
    }
  }
}

TEST_CASE("permuting training rows leaves tree predictions unchanged") {
  std::mt19937_64 gen(8);
  const auto data = testing::random_data(gen, 80, 3, 3, 6);
  const auto probe = testing::random_data(gen, 50, 3, 3, 8).x;
  DecisionTreeClassifier a;
  a.fit(data.x, data.y);
  std::vector<std::size_t> order(80);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), gen);
  std::vector<int> y;
  for (auto i : order) y.push_back(data.y[i]);
  DecisionTreeClassifier b;
  b.fit(data.x.select_rows(order), y);
  CHECK(a.predict(probe) == b.predict(probe));
  CHECK(a.predict(data.x) == b.predict(data.x));
}

TEST_CASE("extra tree") {
  SUBCASE("pure data is a lone leaf for any seed") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto t = make_extra_tree(seed);
      t->fit(kToyX, std::vector<int>{1, 1, 1, 1});
      CHECK(t->tree().nodes().size() == 1);
    }
  }
  SUBCASE("deterministic for a seed") {
    std::mt19937_64 gen(3);
    const auto data = testing::random_data(gen, 100, 3, 3);
    auto a = make_extra_tree(11), b = make_extra_tree(11);
    a->fit(data.x, data.y);
    b->fit(data.x, data.y);
    CHECK(a->tree() == b->tree());
  }
  SUBCASE("separable 1-D data is fitted exactly") {
    std::vector<double> xs;
    std::vector<int> ys;
    for (int i = 0; i < 40; ++i) {
      xs.push_back(i);
      ys.push_back(i < 13 ? 0 : (i < 29 ? 1 : 2));
    }
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto t = make_extra_tree(seed);
      t->fit(column_matrix(xs), ys);
      CHECK(training_accuracy(*t, column_matrix(xs), ys) == 1.0);
    }
  }
}

TEST_CASE("ensembles") {
  std::mt19937_64 gen(21);
  const auto data = testing::random_data(gen, 120, 4, 3);
  const auto probe = testing::random_data(gen, 60, 4, 3, 8).x;

  SUBCASE("one tree without bootstrap equals the single tree") {
    ForestClassifier forest(EnsembleKind::Bagging, 5, 1, false);
    DecisionTreeClassifier tree;
    forest.fit(data.x, data.y);
    tree.fit(data.x, data.y);
    CHECK(forest.predict(probe) == tree.predict(probe));
    CHECK(forest.predict_scores(probe) == tree.predict_scores(probe));
  }
  SUBCASE("same seed, same predictions") {
    for (auto kind : {EnsembleKind::Bagging, EnsembleKind::RandomForest, EnsembleKind::ExtraTrees}) {
      ForestClassifier a(kind, 9, 20), b(kind, 9, 20);
      a.fit(data.x, data.y);
      b.fit(data.x, data.y);
      CHECK(a.predict_scores(probe) == b.predict_scores(probe));
    }
  }
  SUBCASE("training accuracy on the toy set is no worse than the single tree") {
    DecisionTreeClassifier tree;
    tree.fit(kToyX, kToyY);
    for (auto kind : {EnsembleKind::Bagging, EnsembleKind::RandomForest, EnsembleKind::ExtraTrees}) {
      ForestClassifier forest(kind, 42);
      forest.fit(kToyX, kToyY);
      CHECK(training_accuracy(forest, kToyX, kToyY) >= training_accuracy(tree, kToyX, kToyY));
    }
  }
  SUBCASE("random forest examines ceil(sqrt(d)) features per split") {
    CHECK(ensemble_spec(EnsembleKind::RandomForest, 13).tree.max_features == 4);
    CHECK(ensemble_spec(EnsembleKind::ExtraTrees, 4).tree.max_features == 2);
    CHECK(ensemble_spec(EnsembleKind::Bagging, 13).tree.max_features == 0);
    CHECK(ensemble_spec(EnsembleKind::RandomForest, 13).bootstrap);
    CHECK_FALSE(ensemble_spec(EnsembleKind::ExtraTrees, 13).bootstrap);
    const auto forest = fit_ensemble(EnsembleKind::RandomForest, data.x, data.y, 3, 1, 10);
    CHECK(forest.trees.size() == 10);
    CHECK(forest.feature_masks.size() == 10);
  }
}

TEST_CASE("margin = 2 / ||w||") {
  LinearModel m;
  m.weights = Matrix{{2, 0}, {1, 0}, {0, 0}};
  m.bias = {0, 0, 0};
  CHECK(margin(m, 0) == 1.0);
  CHECK(margin(m, 1) == 2.0);
  CHECK_THROWS_AS(margin(m, 2), ModelError);
  LinearModel scaled = m;
  const double c = 3.7;
  for (double& w : scaled.weights.data()) w *= c;
  CHECK(std::abs(margin(scaled, 0) - margin(m, 0) / c) < 1e-12);
}

TEST_CASE("linear SGD models") {
  // two separable blobs in 2-D
  Matrix x(40, 2);
  std::vector<int> y(40);
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t i = 0; i < 40; ++i) {
    const bool positive = i % 2 == 1;
    x(i, 0) = (positive ? 3.0 : -3.0) + u(gen);
    x(i, 1) = (positive ? 2.0 : -2.0) + u(gen);
    y[i] = positive ? 1 : 0;
  }
  SUBCASE("separable data is fitted exactly") {
    for (auto loss : {SgdLoss::Perceptron, SgdLoss::Hinge, SgdLoss::Logistic}) {
      SgdClassifier model(loss, 1);
      model.fit(x, y);
      CHECK(training_accuracy(model, x, y) == 1.0);
    }
  }
  SUBCASE("svm margin is positive") {
    SgdClassifier svm(SgdLoss::Hinge, 1);
    svm.fit(x, y);
    CHECK(margin(svm.model(), 0) > 0.0);
    CHECK(margin(svm.model(), 1) > 0.0);
  }
  SUBCASE("one label everywhere") {
    for (auto loss : {SgdLoss::Perceptron, SgdLoss::Hinge, SgdLoss::Logistic}) {
      SgdClassifier model(loss, 1);
      model.fit(x, std::vector<int>(40, 2));
      CHECK(model.predict(x) == std::vector<int>(40, 2));
    }
  }
  SUBCASE("non-finite features are rejected") {
    Matrix bad = x;
    bad(3, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(fit_linear_sgd(bad, y, 2, SgdLoss::Hinge, {}, 1), ModelError);
  }
}

TEST_CASE("ridge") {
  SUBCASE("lambda 0 interpolates an invertible square system") {
    const Matrix x{{2, 1, 0}, {0, 1, 3}, {1, 0, 1}};
    const std::vector<int> y = {0, 1, 2};
    const auto model = fit_ridge(x, y, 3, {0.0, false});
    const Matrix scores = model.decision(x);
    std::vector<double> predicted, target;
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t c = 0; c < 3; ++c) {
        predicted.push_back(scores(r, c));
        target.push_back(static_cast<std::size_t>(y[r]) == c ? 1.0 : -1.0);
      }
    }
    CHECK(mse(target, predicted) < 1e-20);
  }
  SUBCASE("normal equations hold and weights shrink with lambda") {
    std::mt19937_64 gen(6);
    std::normal_distribution<double> nd;
    Matrix x(50, 4);
    std::vector<int> y(50);
    for (std::size_t r = 0; r < 50; ++r) {
      for (std::size_t c = 0; c < 4; ++c) x(r, c) = nd(gen);
      y[r] = static_cast<int>(r % 3);
    }
    double previous = std::numeric_limits<double>::infinity();
    for (double lambda : {1.0, 10.0, 1000.0}) {
      const RidgeParams p{lambda, true};
      const auto model = fit_ridge(x, y, 3, p);
      CHECK(ridge_residual(model, x, y, 3, p) < 1e-6);
      double norm = 0.0;
      for (double w : model.weights.data()) norm += w * w;
      CHECK(norm < previous);
      previous = norm;
    }
  }
  SUBCASE("singular system at lambda 0") {
    const Matrix x{{1, 2}, {2, 4}, {3, 6}};
    CHECK_THROWS_AS(fit_ridge(x, std::vector<int>{0, 1, 0}, 2, {0.0, false}), ModelError);
  }
}

TEST_CASE("naive Bayes") {
  SUBCASE("well separated Gaussians") {
    std::mt19937_64 gen(10);
    std::normal_distribution<double> nd;
    std::vector<double> xs;
    std::vector<int> ys;
    for (int i = 0; i < 200; ++i) {
      const bool pos = i % 2 == 0;
      xs.push_back((pos ? 5.0 : -5.0) + nd(gen));
      ys.push_back(pos ? 1 : 0);
    }
    NaiveBayesClassifier nb(BayesKind::Gaussian);
    nb.fit(column_matrix(xs), ys);
    CHECK(training_accuracy(nb, column_matrix(xs), ys) >= 0.99);
  }
  SUBCASE("symmetric classes give a uniform posterior") {
    const Matrix x{{1, 0}, {0, 1}, {1, 0}, {0, 1}, {1, 0}, {0, 1}};
    const std::vector<int> y = {0, 0, 1, 1, 2, 2};
    for (auto kind : {BayesKind::Gaussian, BayesKind::Bernoulli}) {
      NaiveBayesClassifier nb(kind, {}, false);
      nb.fit(x, y);
      const auto s = nb.predict_scores(Matrix{{0.3, 0.8}});
      for (std::size_t c = 0; c < 3; ++c) CHECK(std::abs(s(0, c) - 1.0 / 3.0) < 1e-12);
    }
  }
  SUBCASE("posterior rows sum to one") {
    std::mt19937_64 gen(12);
    const auto data = testing::random_data(gen, 90, 4, 3);
    for (auto kind : {BayesKind::Gaussian, BayesKind::Bernoulli}) {
      NaiveBayesClassifier nb(kind);
      nb.fit(data.x, data.y);
      const auto s = nb.predict_scores(data.x);
      for (std::size_t r = 0; r < s.rows(); ++r) {
        CHECK(std::abs(std::accumulate(s.row(r).begin(), s.row(r).end(), 0.0) - 1.0) < 1e-9);
      }
    }
  }
}

TEST_CASE("neighbours and centroids") {
  SUBCASE("1-NN fits conflict-free data exactly") {
    std::mt19937_64 gen(13);
    const auto data = testing::conflict_free(testing::random_data(gen, 80, 3, 3));
    KNeighborsClassifier knn(1);
    knn.fit(data.x, data.y);
    CHECK(training_accuracy(knn, data.x, data.y) == 1.0);
  }
  SUBCASE("nearest centroid by hand") {
    const Matrix x{{-1, 0}, {1, 0}, {0, -1}, {0, 1}, {9, 10}, {11, 10}, {10, 9}, {10, 11}};
    const std::vector<int> y = {0, 0, 0, 0, 1, 1, 1, 1};
    NearestCentroidClassifier nc(false);
    nc.fit(x, y);
    CHECK(nc.centroids() == Matrix{{0, 0}, {10, 10}});
    CHECK(nc.predict(Matrix{{1, 1}}) == std::vector<int>{0});
  }
  SUBCASE("k = n on balanced binary data votes class 0 everywhere") {
    KNeighborsClassifier knn(4, false);
    knn.fit(kToyX, kToyY);
    CHECK(knn.predict(column_matrix({-10, 1, 4, 100})) == std::vector<int>{0, 0, 0, 0});
  }
  SUBCASE("k larger than the training set") {
    KNeighborsClassifier knn(5, false);
    CHECK_THROWS_AS(knn.fit(kToyX, kToyY), ModelError);
  }
}

TEST_CASE("dummy predicts the majority class") {
  DummyClassifier dummy;
  dummy.fit(column_matrix({1, 2, 3}), std::vector<int>{0, 0, 1});
  CHECK(dummy.predict(column_matrix({7, 8})) == std::vector<int>{0, 0});

  DummyClassifier tie;
  tie.fit(column_matrix({1, 2, 3, 4}), std::vector<int>{2, 1, 2, 1});
  CHECK(tie.predict(column_matrix({0})) == std::vector<int>{1});

  // 3-class test set: one recall is 1, the others 0
  const std::vector<int> truth = {0, 1, 1, 2, 2, 2};
  const auto predicted = dummy.predict(Matrix(truth.size(), 1));
  CHECK(balanced_accuracy(confusion(truth, predicted, 3)) == 1.0 / 3.0);
}

TEST_CASE("predict contract across the portfolio") {
  std::mt19937_64 gen(31);
  const auto data = testing::random_data(gen, 150, 4, 3, 7);
  const auto probe = testing::random_data(gen, 80, 4, 3, 9).x;
  for (auto& model : portfolio(42)) {
    CAPTURE(model->name());
    CHECK_THROWS_AS(model->predict(probe), ModelError);
    model->fit(data.x, data.y);
    CHECK(model->classes() == std::vector<int>{0, 1, 2});

    const auto empty = model->predict(Matrix(0, 4));
    CHECK(empty.empty());
    CHECK(model->predict_scores(Matrix(0, 4)).rows() == 0);
    CHECK_THROWS_AS(model->predict(Matrix(3, 5)), ModelError);

    const auto scores = model->predict_scores(probe);
    const auto predicted = model->predict(probe);
    REQUIRE(scores.rows() == probe.rows());
    REQUIRE(scores.cols() == 3);
    for (std::size_t r = 0; r < probe.rows(); ++r) {
      CHECK(predicted[r] == static_cast<int>(argmax(scores.row(r))));
    }
  }
}

TEST_CASE("probabilistic scores are distributions") {
  std::mt19937_64 gen(32);
  const auto data = testing::random_data(gen, 120, 3, 3);
  for (const char* name : {"decision_tree", "extra_tree", "bagging", "random_forest", "extra_trees", "knn",
                           "gaussian_nb", "bernoulli_nb", "logistic_regression", "dummy"}) {
    CAPTURE(name);
    auto model = make_classifier(name);
    model->fit(data.x, data.y);
    const auto s = model->predict_scores(data.x);
    for (std::size_t r = 0; r < s.rows(); ++r) {
      for (double p : s.row(r)) CHECK((p >= 0.0 && p <= 1.0));
      CHECK(std::abs(std::accumulate(s.row(r).begin(), s.row(r).end(), 0.0) - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("non-contiguous class codes map back to the original codes") {
  const std::vector<int> y = {2, 2, 0, 0};
  for (auto& model : portfolio(1)) {
    if (model->name() == "knn") continue;  // k = 5 > 4 rows
    CAPTURE(model->name());
    model->fit(kToyX, y);
    CHECK(model->classes() == std::vector<int>{0, 2});
    for (int p : model->predict(kToyX)) CHECK((p == 0 || p == 2));
  }
}

TEST_CASE("fits are identical at one and many threads") {
  std::mt19937_64 gen(33);
  const auto data = testing::random_data(gen, 200, 4, 3, 10);
  const int many = std::max(4, max_threads());
  for (const auto& name : portfolio_names()) {
    CAPTURE(name);
    set_num_threads(1);
    auto a = make_classifier(name);
    a->fit(data.x, data.y);
    const auto sa = a->predict_scores(data.x);
    set_num_threads(many);
    auto b = make_classifier(name);
    b->fit(data.x, data.y);
    CHECK(b->predict_scores(data.x) == sa);
  }
  set_num_threads(1);
}

TEST_CASE("save and load reproduce predictions for every model") {
  std::mt19937_64 gen(34);
  const auto data = testing::random_data(gen, 150, 4, 3, 10);
  const auto probe = testing::random_data(gen, 100, 4, 3, 12).x;
  for (const auto& name : portfolio_names()) {
    CAPTURE(name);
    auto model = make_classifier(name, ModelOptions{7, true});
    model->fit(data.x, data.y);
    const auto text = save_model(*model).dump();
    const auto loaded = load_model(nlohmann::json::parse(text));
    CHECK(loaded.model->name() == name);
    CHECK(loaded.model->hyperparameters() == model->hyperparameters());
    CHECK(loaded.model->predict_scores(probe) == model->predict_scores(probe));
    CHECK(loaded.model->predict(probe) == model->predict(probe));
  }
}

TEST_CASE("model documents with another format version are rejected") {
  auto model = make_classifier("dummy");
  model->fit(kToyX, kToyY);
  auto doc = save_model(*model);
  doc["format_version"] = 2;
  CHECK_THROWS_AS(load_model(doc), ModelError);
  doc.erase("format_version");
  CHECK_THROWS_AS(load_model(doc), ModelError);
  CHECK_THROWS_AS(make_classifier("svc"), ModelError);
}
