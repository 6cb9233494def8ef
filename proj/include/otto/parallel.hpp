#pragma once

namespace otto {

// Applies the OTTO_THREADS cap (if set) to all OpenMP regions. Call once at startup.
void configure_threads_from_env();

int worker_count();

}  // namespace otto
