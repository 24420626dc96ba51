// Index-parallel loop with deterministic results: each index writes only its
// own output slot, and the exception of the lowest failing index is rethrown.
#ifndef YDYN_PARALLEL_HPP
#define YDYN_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace ydyn {

/// 0 means: YDYN_THREADS if set, else the hardware concurrency.
std::size_t resolve_threads(std::size_t requested);

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace ydyn

#endif
