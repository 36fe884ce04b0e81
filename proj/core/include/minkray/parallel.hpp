#pragma once

#include <cstddef>
#include <functional>

namespace minkray {

// Worker count for parallel loops; 0 restores the automatic choice.
void set_threads(int k);
int threads();

// Runs body(begin, end) over a static partition of [0, n). Each index must write
// only its own outputs so results do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace minkray
