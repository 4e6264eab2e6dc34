#pragma once

#include <cstddef>
#include <functional>

namespace fmca {

/// Upper bound on worker threads used by the geodesic and cross-validation stages.
/// 0 restores the default (hardware concurrency). Results never depend on it.
void set_max_threads(std::size_t n);
std::size_t max_threads();

/// Runs body(i) for i in [0, count). Each index must write only its own output slot.
/// The exception thrown for the smallest failing index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace fmca
