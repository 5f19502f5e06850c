#pragma once

#include <cstddef>
#include <functional>

namespace decdm {

/// Worker cap for per-sample parallel loops. 0 means one per logical core.
void set_max_threads(unsigned n);
unsigned max_threads();

/// Runs body(begin, end) over [0, count) in fixed chunks of `chunk` items.
/// The chunk boundaries never depend on the thread count, so results are
/// identical however many workers run.
void parallel_chunks(std::size_t count, std::size_t chunk, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace decdm
