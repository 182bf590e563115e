#include "jnlab/parallel.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace jnlab {

namespace {
#ifdef _OPENMP
const int kRuntimeDefault = omp_get_max_threads();
#endif
}  // namespace

void set_thread_limit(int threads) {
  if (threads < 0) throw std::invalid_argument("thread limit must be >= 0");
#ifdef _OPENMP
  omp_set_num_threads(threads == 0 ? kRuntimeDefault : threads);
#else
  (void)threads;
#endif
}

int thread_limit() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

int configure_threads_from_env() {
  const char* raw = std::getenv("JNLAB_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  int threads = 0;
  try {
    threads = std::stoi(raw);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("JNLAB_THREADS is not an integer: ") + raw);
  }
  set_thread_limit(threads);
  return threads;
}

}  // namespace jnlab
