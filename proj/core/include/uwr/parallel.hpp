#pragma once

#include <cstddef>
#include <functional>

namespace uwr {

// Process-wide worker count used by the internal loops. 0 selects
// std::thread::hardware_concurrency().
void set_num_threads(unsigned n);
unsigned num_threads();

// Calls body(begin_i, end_i) on disjoint chunks covering [0, n). The chunk
// partition depends only on n and grain, never on the thread count, so any
// per-chunk reduction combined in chunk order is deterministic.
void parallel_for(std::size_t n, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& body);

// Deterministic parallel sum of term(begin, end) over fixed chunks.
double parallel_sum(std::size_t n, std::size_t grain,
                    const std::function<double(std::size_t, std::size_t)>& term);

}  // namespace uwr
