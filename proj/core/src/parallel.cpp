#include "minkray/parallel.hpp"

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/partitioner.h>
#include <tbb/task_arena.h>

#include <memory>
#include <mutex>

namespace minkray {

namespace {
std::mutex g_mutex;
int g_threads = 0;
std::unique_ptr<tbb::task_arena> g_arena;

tbb::task_arena& arena() {
    std::lock_guard<std::mutex> lock(g_mutex);
    if (!g_arena) {
        int k = g_threads > 0 ? g_threads : tbb::this_task_arena::max_concurrency();
        g_arena = std::make_unique<tbb::task_arena>(k);
    }
    return *g_arena;
}
}  // namespace

void set_threads(int k) {
    std::lock_guard<std::mutex> lock(g_mutex);
    g_threads = k < 0 ? 0 : k;
    g_arena.reset();
}

int threads() {
    return arena().max_concurrency();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    auto& a = arena();
    if (a.max_concurrency() == 1 || n == 1) {
        body(0, n);
        return;
    }
    a.execute([&] {
        tbb::parallel_for(
            tbb::blocked_range<std::size_t>(0, n),
            [&](const tbb::blocked_range<std::size_t>& r) { body(r.begin(), r.end()); },
            tbb::static_partitioner());
    });
}

}  // namespace minkray
