#pragma once

namespace ugr {

// Thin wrappers over the OpenMP runtime; without OpenMP everything runs on
// one thread and set_num_threads is a no-op.
int max_threads() noexcept;
void set_num_threads(int threads) noexcept;
bool openmp_enabled() noexcept;

}  // namespace ugr
