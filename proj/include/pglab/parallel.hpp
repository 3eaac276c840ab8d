#pragma once

#include <cstdint>
#include <functional>

namespace pglab {

// Process-wide worker count used by the embarrassingly parallel loops
// (estimator samples, sweep repeats, grid searches). Defaults to 1.
int worker_count();
void set_worker_count(int n);

// Runs fn(i) for i in [0, n). Each index writes its own output slot, and
// callers aggregate in index order afterwards, so the result is identical
// for any worker count.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

}  // namespace pglab
