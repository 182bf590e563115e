#pragma once

namespace jnlab {

/// Caps the OpenMP team size used by the kernels; 0 restores the runtime default.
void set_thread_limit(int threads);

/// Current cap (the OpenMP default when no cap was set); 1 when built without OpenMP.
int thread_limit();

/// Reads JNLAB_THREADS (0 = auto) and applies it. Returns the value applied.
int configure_threads_from_env();

}  // namespace jnlab
