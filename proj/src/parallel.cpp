#include "cvmw/parallel.hpp"

#include <cstdlib>
#include <string>

namespace cvmw {

int configured_threads() {
  if (const char* env = std::getenv("CVMW_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (...) {
      // fall through to the hardware default
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace cvmw
