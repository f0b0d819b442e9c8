#pragma once

#include <functional>

namespace debias {

/// Worker count: DEBIAS_THREADS env var when set, otherwise hardware
/// concurrency (at least 1).
int default_thread_count();

/// Runs fn(0..count-1) on up to `threads` workers. Work items must be
/// independent; any thrown exception is rethrown (lowest index first) after
/// all workers finish. threads <= 1 runs inline.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace debias
