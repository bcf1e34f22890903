#pragma once

#include <cstddef>
#include <functional>

namespace rwre {

/// Runs body(i) for i in [0, n) over `workers` threads (0 or 1 runs inline).
/// Work items are claimed dynamically; callers write results by index so the
/// outcome does not depend on the schedule. The first exception is rethrown.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

}  // namespace rwre
