#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace mmsgeo {

enum class ErrorCode {
    InvalidArgument,
    MetricViolation,
    BindingMismatch,
    ResolutionTooCoarse,
    EmptySet,
    EmptyFamily,
    WindowTooNarrow,
    Divergence,
    WrongSpaceKind,
    Config,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Worker cap shared by all parallel loops. 0 means hardware concurrency.
void set_workers(unsigned n);
unsigned workers();

// Runs body(begin, end) over fixed-size blocks of [0, n). Block boundaries do
// not depend on the worker count, so per-block partial results reduced in
// block order are identical for any number of workers.
inline constexpr std::size_t kBlockSize = 4096;

void parallel_blocks(std::size_t n, const std::function<void(std::size_t block, std::size_t begin, std::size_t end)>& body);

// Deterministic sum of term(i) over [0, n).
double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& term);

// Deterministic max of term(i) over [0, n); returns lowest() when n == 0.
double parallel_max(std::size_t n, const std::function<double(std::size_t)>& term);

}  // namespace mmsgeo
