#pragma once

#include <cstddef>
#include <cstdint>

#include <omp.h>

namespace frameflow {

// Every ensemble kernel exists in two forms: a plain loop kept as the
// reference, and an OpenMP fan-out. Work items own their random streams and
// write to disjoint slots, so both produce identical results.
enum class Execution { serial, parallel };

template <class Body>
void for_each_index(Execution mode, std::int64_t count, Body&& body) {
  if (mode == Execution::serial) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < count; ++i) body(i);
}

inline int available_threads() { return omp_get_max_threads(); }
inline void set_thread_count(int jobs) {
  if (jobs > 0) omp_set_num_threads(jobs);
}

}  // namespace frameflow
