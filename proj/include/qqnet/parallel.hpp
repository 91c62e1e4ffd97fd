#pragma once

#include <cstddef>
#include <functional>

namespace qqnet {

/// Worker count used by parallel_for; 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(i) for i in [0, n). Items are independent and each writes its
/// own output, so results do not depend on scheduling. The first exception
/// thrown by any item is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace qqnet
