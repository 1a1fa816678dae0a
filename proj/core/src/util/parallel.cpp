#include "adapt/util/parallel.hpp"

#include <atomic>

namespace adapt {

namespace {
std::atomic<unsigned> g_thread_cap{1};
}

void set_thread_cap(unsigned cap) noexcept {
  g_thread_cap = cap == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cap;
}

unsigned thread_cap() noexcept { return g_thread_cap; }

}  // namespace adapt
