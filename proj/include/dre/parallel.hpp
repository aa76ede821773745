#ifndef DRE_PARALLEL_HPP
#define DRE_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <functional>

namespace dre {

/// Worker count from DRE_WORKERS (default 1, capped at the hardware count).
unsigned worker_count();

/// Calls fn(i) for i in [0, n), spread over worker_count() threads. Each index
/// must write only its own output slot; the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace dre

#endif  // DRE_PARALLEL_HPP
