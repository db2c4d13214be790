#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ugr/flow_data.hpp"
#include "ugr/matrix.hpp"

namespace testing {

inline const std::string kHeader =
    "Time,Protocol,Flag,Family,Clusters,SeedAddress,ExpAddress,BTC,USD,Netflow_Bytes,IPaddress,Threats,Port,"
    "Prediction";

inline std::vector<ugr::FlowRecord> parse(const std::string& text) {
  std::istringstream in(text);
  return ugr::parse_dataset(in);
}

inline ugr::Matrix column_matrix(const std::vector<double>& values) {
  ugr::Matrix m(values.size(), 1);
  for (std::size_t i = 0; i < values.size(); ++i) m(i, 0) = values[i];
  return m;
}

// Small integer-valued features so repeats and ties are common.
struct RandomData {
  ugr::Matrix x;
  std::vector<int> y;
};

inline RandomData random_data(std::mt19937_64& gen, std::size_t n, std::size_t d, int k, int levels = 6) {
  std::uniform_int_distribution<int> value(0, levels - 1);
  std::uniform_int_distribution<int> label(0, k - 1);
  RandomData data{ugr::Matrix(n, d), std::vector<int>(n)};
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) data.x(r, c) = value(gen);
    data.y[r] = label(gen);
  }
  return data;
}

// Keeps the first occurrence of each distinct feature row, so the result has
// no conflicting duplicates.
inline RandomData conflict_free(const RandomData& in) {
  std::set<std::vector<double>> seen;
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < in.x.rows(); ++r) {
    std::vector<double> row(in.x.row(r).begin(), in.x.row(r).end());
    if (seen.insert(row).second) keep.push_back(r);
  }
  RandomData out{in.x.select_rows(keep), {}};
  for (auto r : keep) out.y.push_back(in.y[r]);
  return out;
}

}  // namespace testing
