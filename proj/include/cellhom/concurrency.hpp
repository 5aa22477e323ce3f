#pragma once

#include <cstddef>
#include <functional>

namespace cellhom {

// Parallelism degree from CELLHOM_THREADS; unset or invalid means 1.
int env_parallelism();

// Runs fn(0..n-1) on the given number of threads. Tasks must write only to
// their own slots; results are then reduced sequentially by the caller, so
// the outcome is independent of the degree.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace cellhom
