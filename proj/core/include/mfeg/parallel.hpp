#pragma once

namespace mfeg {

/// Name of the environment variable capping solver threads.
inline constexpr const char* kThreadCapEnv = "MFEG_MAX_THREADS";

/// Threads used by data-parallel loops: the process override if set, else
/// $MFEG_MAX_THREADS if set, else the number of processors.
int thread_count();

/// Forces the thread count for the current process; 0 restores the default.
void set_thread_cap(int threads);

}  // namespace mfeg
