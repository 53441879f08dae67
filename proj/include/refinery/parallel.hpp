#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace refinery {

// Worker count: REFINERY_THREADS caps parallelism, 0 or unset means auto.
std::size_t effective_threads(std::size_t n_items);

// Fills out[i] = fn(i) for i in [0, n). Work is index-partitioned across
// threads; because each slot is written exactly once, the result vector is
// identical for any worker count.
void parallel_fill(std::size_t n, std::vector<double>& out,
                   const std::function<double(std::size_t)>& fn);

}  // namespace refinery
