#ifndef VCTRL_PARALLEL_HPP
#define VCTRL_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace vctrl {

/// Worker count: VCTRL_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t default_thread_count();

/**
 * Calls fn(i) for i in [0, n) on up to `threads` workers (0 means
 * default_thread_count()). Results must be written by index so the outcome
 * does not depend on scheduling. If any call throws, the exception of the
 * lowest failing index is rethrown after all workers finish.
 */
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

} // namespace vctrl

#endif
