#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ugr/flow_data.hpp"
#include "ugr/matrix.hpp"

namespace ugr {

// Ordinal encoder: codes are the lexicographic rank of each value in the
// fitted vocabulary. Values outside the vocabulary encode to kUnseenCode.
class CategoryEncoder {
 public:
  static constexpr int kUnseenCode = -1;

  CategoryEncoder() = default;
  explicit CategoryEncoder(std::vector<std::string> vocabulary);

  static CategoryEncoder fit(std::span<const std::string_view> values);

  int encode(std::string_view value) const;
  const std::string& decode(int code) const;
  const std::vector<std::string>& vocabulary() const noexcept { return vocabulary_; }

  bool operator==(const CategoryEncoder&) const = default;

 private:
  std::vector<std::string> vocabulary_;  // sorted, unique
};

// Per-column z-score standardization. Constant columns (zero deviation) are
// only centered, so they come out as zeros on the fitted data.
class StandardScaler {
 public:
  static StandardScaler fit(const Matrix& x);

  Matrix transform(const Matrix& x) const;
  void transform_in_place(Matrix& x) const;

  const std::vector<double>& means() const noexcept { return means_; }
  const std::vector<double>& deviations() const noexcept { return deviations_; }
  bool constant(std::size_t column) const { return deviations_.at(column) == 0.0; }

  nlohmann::json to_json() const;
  static StandardScaler from_json(const nlohmann::json& j);

  bool operator==(const StandardScaler&) const = default;

 private:
  std::vector<double> means_;
  std::vector<double> deviations_;
};

// Fitted state that turns FlowRecords into feature rows.
struct FeatureEncoding {
  std::vector<Column> columns;                        // feature columns, canonical order
  std::vector<std::optional<CategoryEncoder>> encoders;  // parallel to columns; set for categorical
  std::optional<StandardScaler> scaler;

  std::vector<std::string> column_names() const;

  nlohmann::json to_json() const;
  static FeatureEncoding from_json(const nlohmann::json& j);

  bool operator==(const FeatureEncoding&) const = default;
};

struct FeatureMatrix {
  Matrix rows;
  std::vector<int> labels;  // ThreatClass codes
  std::vector<std::string> column_names;
  FeatureEncoding encoding;
};

// Fits encoders (and the scaler when `scale` is set) on `records` and returns
// the encoded matrix. The Prediction column becomes `labels`, never a feature.
// Throws DataError if `records` is empty or a record is unlabeled.
FeatureMatrix fit_transform(std::span<const FlowRecord> records, bool scale);

// Encodes records with previously fitted state. Labels are not required.
Matrix transform(const FeatureEncoding& encoding, std::span<const FlowRecord> records);

std::vector<int> label_codes(std::span<const FlowRecord> records);

struct SplitPlan {
  std::uint64_t seed = 0;
  std::vector<std::size_t> train_indices;  // ascending
  std::vector<std::size_t> test_indices;   // ascending
  std::vector<int> fold_assignment;        // empty unless k-folds were requested
};

// Per-class shuffled holdout split. Each class contributes
// round(test_fraction * class_size) rows to the test side, clamped so both
// sides keep at least one member. Throws DataError for a class with fewer
// than two members, std::invalid_argument for a fraction outside (0, 1).
SplitPlan stratified_split(std::span<const int> labels, double test_fraction, std::uint64_t seed);

// Stratified fold ids in [0, k): classes are shuffled independently and dealt
// round-robin with the deal position carried across classes, so fold sizes
// differ by at most one. Throws DataError when a class has fewer than k members.
std::vector<int> k_folds(std::span<const int> labels, int k, std::uint64_t seed);

}  // namespace ugr
