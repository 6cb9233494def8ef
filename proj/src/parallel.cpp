#include "otto/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace otto {

void configure_threads_from_env() {
  const char* env = std::getenv("OTTO_THREADS");
  if (env == nullptr) return;
  try {
    int cap = std::stoi(env);
    if (cap > 0 && cap < omp_get_max_threads()) omp_set_num_threads(cap);
  } catch (...) {
    // ignore malformed values, keep the OpenMP default
  }
}

int worker_count() { return omp_get_max_threads(); }

}  // namespace otto
