#pragma once

#include <cstddef>
#include <functional>

namespace levymix {

/// Runs fn(0..count-1) on up to `workers` threads.
///
/// Tasks must be pure up to writing their own output slot; results are then
/// identical for any worker count, and reductions over the slots stay in
/// index order. workers <= 1 runs inline.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace levymix
