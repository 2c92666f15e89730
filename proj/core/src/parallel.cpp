#include "afcsim/parallel.hpp"

#include <cstdlib>
#include <string>

namespace afcsim {

std::size_t worker_limit() {
  if (const char* env = std::getenv("AFCSIM_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
      // fall through to the hardware default
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace afcsim
