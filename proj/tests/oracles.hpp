#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "ugr/matrix.hpp"

namespace oracles {

// Weighted child Gini of splitting on (feature, threshold), from class
// proportions.
inline double split_score(const ugr::Matrix& x, std::span<const int> y, std::size_t k, std::size_t feature,
                          double threshold) {
  std::vector<double> left(k, 0.0), right(k, 0.0);
  double nl = 0, nr = 0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    if (x(r, feature) <= threshold) {
      left[static_cast<std::size_t>(y[r])] += 1;
      nl += 1;
    } else {
      right[static_cast<std::size_t>(y[r])] += 1;
      nr += 1;
    }
  }
  auto g = [](const std::vector<double>& counts, double n) {
    double s = 0;
    for (double c : counts) s += (c / n) * (c / n);
    return 1.0 - s;
  };
  const double n = nl + nr;
  return (nl > 0 ? nl / n * g(left, nl) : 0.0) + (nr > 0 ? nr / n * g(right, nr) : 0.0);
}

struct BruteSplit {
  bool found = false;
  double score = std::numeric_limits<double>::infinity();
};

// Every midpoint between consecutive distinct values of every feature.
inline BruteSplit brute_force_split(const ugr::Matrix& x, std::span<const int> y, std::size_t k) {
  BruteSplit best;
  for (std::size_t f = 0; f < x.cols(); ++f) {
    auto values = x.column(f);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      const double s = split_score(x, y, k, f, (values[i] + values[i + 1]) / 2.0);
      best.found = true;
      best.score = std::min(best.score, s);
    }
  }
  return best;
}

// Fraction of (positive, negative) pairs ranked correctly, ties counting 1/2.
inline double mann_whitney(std::span<const int> truth, std::span<const double> scores, int positive) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] != positive) continue;
    for (std::size_t j = 0; j < truth.size(); ++j) {
      if (truth[j] == positive) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

}  // namespace oracles
