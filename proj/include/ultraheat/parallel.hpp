#pragma once

#include <cstddef>
#include <functional>

namespace ultraheat {

/// Worker count: hardware concurrency, capped by ULTRAHEAT_THREADS when set.
unsigned worker_count();

/// Calls body(i) for i in [0, count) on up to worker_count() threads. Work is
/// handed out by index so results keyed by i do not depend on scheduling. The
/// first exception thrown by a body is rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace ultraheat
