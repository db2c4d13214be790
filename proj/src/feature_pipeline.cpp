#include "ugr/feature_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ugr/error.hpp"
#include "ugr/random.hpp"

namespace ugr {

CategoryEncoder::CategoryEncoder(std::vector<std::string> vocabulary) : vocabulary_(std::move(vocabulary)) {
  std::sort(vocabulary_.begin(), vocabulary_.end());
  vocabulary_.erase(std::unique(vocabulary_.begin(), vocabulary_.end()), vocabulary_.end());
}

CategoryEncoder CategoryEncoder::fit(std::span<const std::string_view> values) {
  std::vector<std::string> vocabulary(values.begin(), values.end());
  return CategoryEncoder(std::move(vocabulary));
}

int CategoryEncoder::encode(std::string_view value) const {
  const auto it = std::lower_bound(vocabulary_.begin(), vocabulary_.end(), value,
                                   [](const std::string& a, std::string_view b) { return a < b; });
  if (it == vocabulary_.end() || *it != value) return kUnseenCode;
  return static_cast<int>(it - vocabulary_.begin());
}

const std::string& CategoryEncoder::decode(int code) const {
  if (code < 0 || static_cast<std::size_t>(code) >= vocabulary_.size()) {
    throw std::out_of_range("category code " + std::to_string(code) + " not in vocabulary");
  }
  return vocabulary_[static_cast<std::size_t>(code)];
}

StandardScaler StandardScaler::fit(const Matrix& x) {
  StandardScaler s;
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  s.means_.assign(d, 0.0);
  s.deviations_.assign(d, 0.0);
  if (n == 0) return s;
  for (std::size_t c = 0; c < d; ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) sum += x(r, c);
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    bool constant = true;
    for (std::size_t r = 0; r < n; ++r) {
      const double delta = x(r, c) - mean;
      ss += delta * delta;
      constant = constant && x(r, c) == x(0, c);
    }
    s.means_[c] = mean;
    s.deviations_[c] = constant ? 0.0 : std::sqrt(ss / static_cast<double>(n));
  }
  return s;
}

void StandardScaler::transform_in_place(Matrix& x) const {
  if (x.cols() != means_.size()) throw ModelError("scaler fitted on " + std::to_string(means_.size()) +
                                                  " columns, got " + std::to_string(x.cols()));
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      row[c] -= means_[c];
      if (deviations_[c] > 0.0) row[c] /= deviations_[c];
    }
  }
}

Matrix StandardScaler::transform(const Matrix& x) const {
  Matrix out = x;
  transform_in_place(out);
  return out;
}

nlohmann::json StandardScaler::to_json() const { return {{"mean", means_}, {"deviation", deviations_}}; }

StandardScaler StandardScaler::from_json(const nlohmann::json& j) {
  StandardScaler s;
  s.means_ = j.at("mean").get<std::vector<double>>();
  s.deviations_ = j.at("deviation").get<std::vector<double>>();
  if (s.means_.size() != s.deviations_.size()) throw ModelError("scaler mean/deviation length mismatch");
  return s;
}

std::vector<std::string> FeatureEncoding::column_names() const {
  std::vector<std::string> names;
  for (Column c : columns) names.emplace_back(column_name(c));
  return names;
}

nlohmann::json FeatureEncoding::to_json() const {
  nlohmann::json cols = nlohmann::json::array();
  for (std::size_t i = 0; i < columns.size(); ++i) {
    nlohmann::json entry = {{"name", column_name(columns[i])}};
    if (encoders[i]) entry["vocabulary"] = encoders[i]->vocabulary();
    cols.push_back(std::move(entry));
  }
  nlohmann::json j = {{"columns", std::move(cols)}};
  j["scaler"] = scaler ? scaler->to_json() : nlohmann::json(nullptr);
  return j;
}

FeatureEncoding FeatureEncoding::from_json(const nlohmann::json& j) {
  FeatureEncoding e;
  for (const auto& entry : j.at("columns")) {
    const auto name = entry.at("name").get<std::string>();
    const auto it = std::find(kColumnNames.begin(), kColumnNames.end(), name);
    if (it == kColumnNames.end()) throw ModelError("unknown feature column '" + name + "' in encoding");
    const auto column = static_cast<Column>(it - kColumnNames.begin());
    e.columns.push_back(column);
    if (entry.contains("vocabulary")) {
      e.encoders.emplace_back(CategoryEncoder(entry.at("vocabulary").get<std::vector<std::string>>()));
    } else {
      e.encoders.emplace_back(std::nullopt);
    }
  }
  if (j.contains("scaler") && !j.at("scaler").is_null()) e.scaler = StandardScaler::from_json(j.at("scaler"));
  return e;
}

namespace {

Matrix encode_rows(const FeatureEncoding& encoding, std::span<const FlowRecord> records) {
  Matrix x(records.size(), encoding.columns.size());
  for (std::size_t r = 0; r < records.size(); ++r) {
    for (std::size_t c = 0; c < encoding.columns.size(); ++c) {
      const Column column = encoding.columns[c];
      x(r, c) = encoding.encoders[c]
                    ? static_cast<double>(encoding.encoders[c]->encode(categorical_field(records[r], column)))
                    : static_cast<double>(numeric_field(records[r], column));
    }
  }
  return x;
}

}  // namespace

std::vector<int> label_codes(std::span<const FlowRecord> records) {
  std::vector<int> labels;
  labels.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].prediction) throw DataError("row " + std::to_string(i + 1) + " has no Prediction label");
    labels.push_back(static_cast<int>(*records[i].prediction));
  }
  return labels;
}

FeatureMatrix fit_transform(std::span<const FlowRecord> records, bool scale) {
  if (records.empty()) throw DataError("cannot fit features on an empty dataset");
  FeatureMatrix m;
  m.labels = label_codes(records);
  for (std::size_t i = 0; i + 1 < kColumnCount; ++i) {
    const auto column = static_cast<Column>(i);
    m.encoding.columns.push_back(column);
    if (is_categorical(column)) {
      std::vector<std::string_view> values;
      values.reserve(records.size());
      for (const auto& r : records) values.push_back(categorical_field(r, column));
      m.encoding.encoders.emplace_back(CategoryEncoder::fit(values));
    } else {
      m.encoding.encoders.emplace_back(std::nullopt);
    }
  }
  m.rows = encode_rows(m.encoding, records);
  if (scale) {
    m.encoding.scaler = StandardScaler::fit(m.rows);
    m.encoding.scaler->transform_in_place(m.rows);
  }
  m.column_names = m.encoding.column_names();
  return m;
}

Matrix transform(const FeatureEncoding& encoding, std::span<const FlowRecord> records) {
  Matrix x = encode_rows(encoding, records);
  if (encoding.scaler) encoding.scaler->transform_in_place(x);
  return x;
}

namespace {

// Row indices grouped by class code, each group ascending.
std::vector<std::vector<std::size_t>> group_by_class(std::span<const int> labels) {
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) throw DataError("negative class code at index " + std::to_string(i));
    const auto c = static_cast<std::size_t>(labels[i]);
    if (c >= groups.size()) groups.resize(c + 1);
    groups[c].push_back(i);
  }
  return groups;
}

}  // namespace

SplitPlan stratified_split(std::span<const int> labels, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("test fraction must lie in (0, 1)");
  }
  auto groups = group_by_class(labels);
  for (std::size_t c = 0; c < groups.size(); ++c) {
    if (!groups[c].empty() && groups[c].size() < 2) {
      throw DataError("class " + std::to_string(c) + " has fewer than 2 members; cannot stratify");
    }
  }
  SplitPlan plan;
  plan.seed = seed;
  Rng rng(seed);
  for (auto& group : groups) {
    if (group.empty()) continue;
    rng.shuffle(std::span<std::size_t>(group));
    const auto n = static_cast<double>(group.size());
    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * n));
    n_test = std::clamp<std::size_t>(n_test, 1, group.size() - 1);
    plan.test_indices.insert(plan.test_indices.end(), group.begin(), group.begin() + n_test);
    plan.train_indices.insert(plan.train_indices.end(), group.begin() + n_test, group.end());
  }
  std::sort(plan.train_indices.begin(), plan.train_indices.end());
  std::sort(plan.test_indices.begin(), plan.test_indices.end());
  return plan;
}

std::vector<int> k_folds(std::span<const int> labels, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  auto groups = group_by_class(labels);
  for (std::size_t c = 0; c < groups.size(); ++c) {
    if (!groups[c].empty() && groups[c].size() < static_cast<std::size_t>(k)) {
      throw DataError("class " + std::to_string(c) + " has " + std::to_string(groups[c].size()) +
                      " members, fewer than k = " + std::to_string(k));
    }
  }
  std::vector<int> folds(labels.size(), -1);
  Rng rng(seed);
  std::size_t position = 0;
  for (auto& group : groups) {
    rng.shuffle(std::span<std::size_t>(group));
    for (std::size_t index : group) {
      folds[index] = static_cast<int>(position % static_cast<std::size_t>(k));
      ++position;
    }
  }
  return folds;
}

}  // namespace ugr
