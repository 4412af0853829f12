#pragma once

#include <cstddef>
#include <functional>

namespace elect {

// Number of workers for a requested job count (0 = hardware concurrency).
std::size_t resolve_jobs(std::size_t jobs);

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Each index is handled
// exactly once; callers write results into pre-sized slots so the gathered
// output does not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace elect
