#include "widom/parallel.hpp"

namespace widom {
namespace {
std::atomic<int> g_threads{0};
}

void set_thread_count(int count) { g_threads = std::max(0, count); }

int thread_count() {
  const int n = g_threads.load();
  if (n > 0) return n;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace widom
