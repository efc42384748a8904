#include "branchlab/parallel.hpp"

namespace branchlab {

namespace {
std::atomic<int> g_worker_cap{0};
}

void set_worker_cap(int workers) { g_worker_cap.store(workers < 0 ? 0 : workers); }
int worker_cap() { return g_worker_cap.load(); }

}  // namespace branchlab
