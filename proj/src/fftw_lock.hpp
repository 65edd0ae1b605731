#pragma once

#include <mutex>

namespace gfio::detail {

/// FFTW plan creation and destruction are not thread-safe.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace gfio::detail
