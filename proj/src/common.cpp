#include "mmsgeo/common.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <thread>
#include <vector>

namespace mmsgeo {

namespace {
std::atomic<unsigned> g_workers{0};
}

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid-argument";
        case ErrorCode::MetricViolation: return "metric-violation";
        case ErrorCode::BindingMismatch: return "binding-mismatch";
        case ErrorCode::ResolutionTooCoarse: return "resolution-too-coarse";
        case ErrorCode::EmptySet: return "empty-set";
        case ErrorCode::EmptyFamily: return "empty-family";
        case ErrorCode::WindowTooNarrow: return "window-too-narrow";
        case ErrorCode::Divergence: return "divergence";
        case ErrorCode::WrongSpaceKind: return "wrong-space-kind";
        case ErrorCode::Config: return "config";
    }
    return "unknown";
}

void set_workers(unsigned n) { g_workers.store(n); }

unsigned workers() {
    unsigned n = g_workers.load();
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

void parallel_blocks(std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
    const std::size_t blocks = (n + kBlockSize - 1) / kBlockSize;
    const unsigned w = static_cast<unsigned>(std::min<std::size_t>(workers(), blocks));
    if (w <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) {
            body(b, b * kBlockSize, std::min(n, (b + 1) * kBlockSize));
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (std::size_t b = next.fetch_add(1); b < blocks; b = next.fetch_add(1)) {
            body(b, b * kBlockSize, std::min(n, (b + 1) * kBlockSize));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(w - 1);
    for (unsigned t = 1; t < w; ++t) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
}

double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& term) {
    const std::size_t blocks = (n + kBlockSize - 1) / kBlockSize;
    std::vector<double> partial(blocks, 0.0);
    parallel_blocks(n, [&](std::size_t b, std::size_t begin, std::size_t end) {
        double acc = 0.0;
        for (std::size_t i = begin; i < end; ++i) acc += term(i);
        partial[b] = acc;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

double parallel_max(std::size_t n, const std::function<double(std::size_t)>& term) {
    const std::size_t blocks = (n + kBlockSize - 1) / kBlockSize;
    std::vector<double> partial(blocks, std::numeric_limits<double>::lowest());
    parallel_blocks(n, [&](std::size_t b, std::size_t begin, std::size_t end) {
        double acc = std::numeric_limits<double>::lowest();
        for (std::size_t i = begin; i < end; ++i) acc = std::max(acc, term(i));
        partial[b] = acc;
    });
    double best = std::numeric_limits<double>::lowest();
    for (double p : partial) best = std::max(best, p);
    return best;
}

}  // namespace mmsgeo
