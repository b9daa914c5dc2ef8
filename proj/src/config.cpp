#include "meadowprob/config.hpp"

#include <atomic>

namespace meadowprob::config {

namespace {
std::atomic<int> g_max_generators{16};
}

int max_generators() { return g_max_generators.load(std::memory_order_relaxed); }

void set_max_generators(int cap) { g_max_generators.store(cap, std::memory_order_relaxed); }

} // namespace meadowprob::config
