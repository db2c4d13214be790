#pragma once

// Data-parallel hot loops. Each kernel in ugr::kernels runs under OpenMP and
// has a plain single-threaded counterpart in ugr::serial that the tests use
// as a reference and the benchmark uses as the baseline. Results never depend
// on the number of threads: work is split per output row (or per tree) and
// every output element is computed by exactly one iteration.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ugr/matrix.hpp"
#include "ugr/tree.hpp"

namespace ugr {

struct ForestSpec {
  std::size_t n_trees = 100;
  bool bootstrap = true;
  TreeParams tree;
};

// Tree `index` of a forest: its own generator seeded from (seed, index), a
// bootstrap draw when requested, then a tree grown on the drawn rows.
Tree grow_forest_member(const Matrix& x, std::span<const int> y, std::size_t num_classes, const ForestSpec& spec,
                        std::uint64_t seed, std::size_t index);

namespace kernels {

// k nearest training rows of every query row by Euclidean distance, ordered
// by (distance, training index). Output is queries.rows() x k, row-major.
void nearest_neighbors(const Matrix& train, const Matrix& queries, std::size_t k, std::span<std::uint32_t> out);

// Mean of the trees' leaf distributions for every row.
Matrix forest_average(std::span<const Tree> trees, const Matrix& x, std::size_t num_classes);

std::vector<Tree> grow_forest(const Matrix& x, std::span<const int> y, std::size_t num_classes,
                              const ForestSpec& spec, std::uint64_t seed);

// Pearson correlation of every column pair. constant[c] is set for columns
// with zero variance; their off-diagonal entries are 0.
Matrix column_correlation(const Matrix& x, std::vector<bool>& constant);

}  // namespace kernels

namespace serial {

void nearest_neighbors(const Matrix& train, const Matrix& queries, std::size_t k, std::span<std::uint32_t> out);
Matrix forest_average(std::span<const Tree> trees, const Matrix& x, std::size_t num_classes);
std::vector<Tree> grow_forest(const Matrix& x, std::span<const int> y, std::size_t num_classes,
                              const ForestSpec& spec, std::uint64_t seed);
Matrix column_correlation(const Matrix& x, std::vector<bool>& constant);

}  // namespace serial

}  // namespace ugr
