#pragma once

#include <cstddef>
#include <functional>

namespace weakcorr {

/// Worker count from WEAKCORR_THREADS, else the hardware concurrency.
std::size_t thread_count();

/// Splits [0, n) into contiguous blocks and runs body(begin, end) on each.
/// Results must not depend on the split; callers write disjoint outputs.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace weakcorr
