#pragma once

namespace emis {

// Thread count used by the parallel loops in the core library. Without OpenMP
// these are no-ops and everything runs on the calling thread.
void set_thread_count(int threads);
int thread_count();

}  // namespace emis
