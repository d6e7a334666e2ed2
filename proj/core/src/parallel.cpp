#include "mfeg/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>

namespace mfeg {
namespace {

std::atomic<int> g_override{0};

int env_cap() {
  const char* raw = std::getenv(kThreadCapEnv);
  if (raw == nullptr) {
    return 0;
  }
  const int value = std::atoi(raw);
  return value > 0 ? value : 0;
}

}  // namespace

int thread_count() {
  if (const int forced = g_override.load(); forced > 0) {
    return forced;
  }
  if (const int cap = env_cap(); cap > 0) {
    return cap;
  }
  return std::max(1, omp_get_num_procs());
}

void set_thread_cap(int threads) { g_override.store(std::max(0, threads)); }

}  // namespace mfeg
