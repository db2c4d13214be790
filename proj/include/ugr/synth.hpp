#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "ugr/flow_data.hpp"

namespace ugr {

// Class priors of generated labels, indexed by ThreatClass code.
inline constexpr std::array<double, 3> kSynthPriors = {0.32, 0.35, 0.33};

extern const std::array<std::string_view, 17> kSynthFamilies;

struct SynthOptions {
  std::size_t rows = 1000;
  std::uint64_t seed = 42;
  // Probability that a row's features are drawn from its own class profile.
  // Otherwise the profile is an independent draw from the priors, so 0 makes
  // labels independent of features and 1 gives disjoint netflow ranges.
  double signal_strength = 1.0;
};

// Schema-conformant labeled records. Throws std::invalid_argument for
// rows == 0 or a signal strength outside [0, 1].
std::vector<FlowRecord> synthesize(const SynthOptions& options);

}  // namespace ugr
