#include "qcs/parallel.hpp"

#include <atomic>

namespace qcs {

namespace {

unsigned default_workers() noexcept {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

std::atomic<unsigned>& workers() noexcept {
    static std::atomic<unsigned> value{default_workers()};
    return value;
}

}  // namespace

unsigned worker_count() noexcept { return workers().load(); }

void set_worker_count(unsigned count) noexcept {
    workers().store(count == 0 ? default_workers() : count);
}

}  // namespace qcs
