#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ugr/classifier.hpp"
#include "ugr/feature_pipeline.hpp"

namespace ugr {

// Stable snake_case names of the benchmarked portfolio, tree family first.
const std::vector<std::string>& portfolio_names();
bool is_known_model(std::string_view name);

// Tree and distance/linear groupings used when ranking results.
bool is_tree_family(std::string_view name);

struct ModelOptions {
  std::uint64_t seed = 42;
  // When false, models that normally standardize their input use raw
  // encoded features instead.
  bool scale = true;
};

// Builds a model with its default hyperparameters. Throws ModelError for an
// unknown name.
std::unique_ptr<Classifier> make_classifier(std::string_view name, const ModelOptions& options = {});

// Rebuilds a model from a saved hyperparameter block.
std::unique_ptr<Classifier> make_classifier(std::string_view name, const nlohmann::json& hyperparameters);

inline constexpr int kModelFormatVersion = 1;

// Versioned model document:
//   {format_version, model, hyperparameters, scaler, state, encoding?}
nlohmann::json save_model(const Classifier& model, const FeatureEncoding* encoding = nullptr);

struct LoadedModel {
  std::unique_ptr<Classifier> model;
  std::optional<FeatureEncoding> encoding;
};

// Throws ModelError for an unknown format_version or malformed document.
LoadedModel load_model(const nlohmann::json& document);

}  // namespace ugr
