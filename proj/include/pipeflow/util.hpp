// Shared helpers: worker-count control, deterministic parallel loops,
// locale-independent numeric formatting.
#pragma once

#include <functional>
#include <string>

namespace pipeflow {

// Global worker-count hint for mode/frequency sweeps. 0 = hardware concurrency.
void set_thread_count(int n);
int thread_count();

// Runs fn(i) for i in [0, n), split into contiguous chunks, one per worker.
// fn must write only to disjoint preallocated slots; runs are deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Shortest round-trip decimal representation (for byte-stable CSV/JSON).
std::string format_double(double v);

}  // namespace pipeflow
