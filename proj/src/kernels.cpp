#include "ugr/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <queue>
#include <utility>

#include "ugr/error.hpp"
#include "ugr/random.hpp"

namespace ugr {

Tree grow_forest_member(const Matrix& x, std::span<const int> y, std::size_t num_classes, const ForestSpec& spec,
                        std::uint64_t seed, std::size_t index) {
  Rng rng(derive_seed(seed, index));
  const std::size_t n = x.rows();
  std::vector<std::size_t> samples(n);
  if (spec.bootstrap) {
    for (auto& s : samples) s = rng.uniform_index(n);
  } else {
    for (std::size_t i = 0; i < n; ++i) samples[i] = i;
  }
  return Tree::fit(x, y, num_classes, samples, spec.tree, rng.next());
}

namespace {

void check_knn_inputs(const Matrix& train, const Matrix& queries, std::size_t k, std::span<std::uint32_t> out) {
  if (k == 0 || k > train.rows()) throw ModelError("knn: k must lie in [1, training rows]");
  if (queries.rows() > 0 && queries.cols() != train.cols()) throw ModelError("knn: column count mismatch");
  if (out.size() != queries.rows() * k) throw ModelError("knn: output buffer has the wrong size");
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double delta = a[i] - b[i];
    sum += delta * delta;
  }
  return sum;
}

// Population Pearson coefficient from centered sums, clamped to [-1, 1].
double pearson_from_sums(double sxy, double sxx, double syy) {
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

bool is_constant_column(const Matrix& x, std::size_t c) {
  for (std::size_t r = 1; r < x.rows(); ++r) {
    if (x(r, c) != x(0, c)) return false;
  }
  return true;
}

void check_correlation_inputs(const Matrix& x) {
  if (x.rows() < 2) throw DataError("correlation needs at least 2 rows");
}

}  // namespace

namespace kernels {

void nearest_neighbors(const Matrix& train, const Matrix& queries, std::size_t k, std::span<std::uint32_t> out) {
  check_knn_inputs(train, queries, k, out);
  const auto n_queries = static_cast<std::ptrdiff_t>(queries.rows());
  const std::size_t n_train = train.rows();

#pragma omp parallel
  {
    // max-heap on (distance, index): top() is the current worst neighbour
    std::vector<std::pair<double, std::uint32_t>> heap;
    heap.reserve(k + 1);
#pragma omp for schedule(static)
    for (std::ptrdiff_t q = 0; q < n_queries; ++q) {
      heap.clear();
      const auto query = queries.row(static_cast<std::size_t>(q));
      for (std::size_t t = 0; t < n_train; ++t) {
        const std::pair<double, std::uint32_t> candidate{squared_distance(query, train.row(t)),
                                                         static_cast<std::uint32_t>(t)};
        if (heap.size() < k) {
          heap.push_back(candidate);
          std::push_heap(heap.begin(), heap.end());
        } else if (candidate < heap.front()) {
          std::pop_heap(heap.begin(), heap.end());
          heap.back() = candidate;
          std::push_heap(heap.begin(), heap.end());
        }
      }
      std::sort_heap(heap.begin(), heap.end());
      auto* dst = out.data() + static_cast<std::size_t>(q) * k;
      for (std::size_t i = 0; i < k; ++i) dst[i] = heap[i].second;
    }
  }
}

Matrix forest_average(std::span<const Tree> trees, const Matrix& x, std::size_t num_classes) {
  Matrix out(x.rows(), num_classes);
  if (trees.empty()) return out;
  const auto n = static_cast<std::ptrdiff_t>(x.rows());
  const double inv = 1.0 / static_cast<double>(trees.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    const auto row = x.row(static_cast<std::size_t>(r));
    auto dst = out.row(static_cast<std::size_t>(r));
    for (const Tree& tree : trees) {
      const auto dist = tree.distribution(row);
      for (std::size_t c = 0; c < num_classes; ++c) dst[c] += dist[c];
    }
    for (double& v : dst) v *= inv;
  }
  return out;
}

std::vector<Tree> grow_forest(const Matrix& x, std::span<const int> y, std::size_t num_classes,
                              const ForestSpec& spec, std::uint64_t seed) {
  std::vector<Tree> trees(spec.n_trees);
  std::vector<std::exception_ptr> errors(spec.n_trees);
  const auto n_trees = static_cast<std::ptrdiff_t>(spec.n_trees);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t t = 0; t < n_trees; ++t) {
    try {
      trees[static_cast<std::size_t>(t)] =
          grow_forest_member(x, y, num_classes, spec, seed, static_cast<std::size_t>(t));
    } catch (...) {
      errors[static_cast<std::size_t>(t)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return trees;
}

Matrix column_correlation(const Matrix& x, std::vector<bool>& constant) {
  check_correlation_inputs(x);
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  // centered copy, column-major
  std::vector<double> centered(n * d);
  std::vector<double> sum_sq(d, 0.0);
  constant.assign(d, false);
  std::vector<char> flags(d, 0);
  const auto cols = static_cast<std::ptrdiff_t>(d);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t cc = 0; cc < cols; ++cc) {
    const auto c = static_cast<std::size_t>(cc);
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += x(r, c);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double v = x(r, c) - mean;
      centered[c * n + r] = v;
      ss += v * v;
    }
    sum_sq[c] = ss;
    flags[c] = is_constant_column(x, c) ? 1 : 0;
  }
  for (std::size_t c = 0; c < d; ++c) constant[c] = flags[c] != 0;

  Matrix out(d, d);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t ii = 0; ii < cols; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    out(i, i) = 1.0;
    for (std::size_t j = i + 1; j < d; ++j) {
      double r = 0.0;
      if (!flags[i] && !flags[j]) {
        double sxy = 0.0;
        const double* a = centered.data() + i * n;
        const double* b = centered.data() + j * n;
        for (std::size_t k = 0; k < n; ++k) sxy += a[k] * b[k];
        r = pearson_from_sums(sxy, sum_sq[i], sum_sq[j]);
      }
      out(i, j) = r;
      out(j, i) = r;
    }
  }
  return out;
}

}  // namespace kernels

namespace serial {

void nearest_neighbors(const Matrix& train, const Matrix& queries, std::size_t k, std::span<std::uint32_t> out) {
  check_knn_inputs(train, queries, k, out);
  std::vector<std::pair<double, std::uint32_t>> all(train.rows());
  for (std::size_t q = 0; q < queries.rows(); ++q) {
    for (std::size_t t = 0; t < train.rows(); ++t) {
      all[t] = {squared_distance(queries.row(q), train.row(t)), static_cast<std::uint32_t>(t)};
    }
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < k; ++i) out[q * k + i] = all[i].second;
  }
}

Matrix forest_average(std::span<const Tree> trees, const Matrix& x, std::size_t num_classes) {
  Matrix out(x.rows(), num_classes);
  if (trees.empty()) return out;
  const double inv = 1.0 / static_cast<double>(trees.size());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (const Tree& tree : trees) {
      const auto dist = tree.distribution(x.row(r));
      for (std::size_t c = 0; c < num_classes; ++c) out(r, c) += dist[c];
    }
    for (std::size_t c = 0; c < num_classes; ++c) out(r, c) *= inv;
  }
  return out;
}

std::vector<Tree> grow_forest(const Matrix& x, std::span<const int> y, std::size_t num_classes,
                              const ForestSpec& spec, std::uint64_t seed) {
  std::vector<Tree> trees;
  trees.reserve(spec.n_trees);
  for (std::size_t t = 0; t < spec.n_trees; ++t) trees.push_back(grow_forest_member(x, y, num_classes, spec, seed, t));
  return trees;
}

Matrix column_correlation(const Matrix& x, std::vector<bool>& constant) {
  check_correlation_inputs(x);
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  constant.assign(d, false);
  for (std::size_t c = 0; c < d; ++c) constant[c] = is_constant_column(x, c);
  Matrix out(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (i == j) {
        out(i, j) = 1.0;
        continue;
      }
      if (constant[i] || constant[j]) continue;
      double mi = 0.0, mj = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        mi += x(r, i);
        mj += x(r, j);
      }
      mi /= static_cast<double>(n);
      mj /= static_cast<double>(n);
      double sxy = 0.0, sxx = 0.0, syy = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        const double a = x(r, i) - mi;
        const double b = x(r, j) - mj;
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
      }
      out(i, j) = pearson_from_sums(sxy, sxx, syy);
    }
  }
  return out;
}

}  // namespace serial

}  // namespace ugr
