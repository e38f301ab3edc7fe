#pragma once

#include <functional>

namespace fcc {

/// Runs body(0), ..., body(count - 1) on up to `threads` workers pulling from
/// a shared atomic counter. Each index must write only its own output slot;
/// under that contract results are identical for any thread count. The first
/// exception thrown by a body is rethrown on the caller after all workers
/// join. threads <= 1 runs the plain serial loop.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

}  // namespace fcc
