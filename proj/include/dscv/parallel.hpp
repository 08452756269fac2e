#pragma once

#include <functional>

namespace dscv {

/// Runs body(i) for i in [0, count) on up to `threads` workers.
///
/// Work is split into contiguous static chunks. Each index is processed by
/// exactly one worker, so any body that only writes to index-owned output is
/// deterministic regardless of the thread count.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

/// Resolves a requested parallelism degree: values < 1 mean "one thread".
int clamp_threads(int requested, int work_items);

}  // namespace dscv
