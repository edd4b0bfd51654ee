#include "morreylab/parallel.hpp"

#include <cstdlib>
#include <string>

namespace morreylab {

namespace {
int g_override = 0;
}

void set_thread_override(int n) { g_override = n < 0 ? 0 : n; }

int thread_count() {
  if (g_override > 0) return g_override;
  if (const char* env = std::getenv("MORREYLAB_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
      // fall through to hardware default
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace morreylab
