#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lakeschema {

/// Unrecoverable input/config error. The CLI maps this to exit code 2.
class FatalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string trim(std::string_view s);

/// ASCII case-fold; bytes >= 0x80 pass through untouched.
std::string casefold(std::string_view s);

/// trim + casefold, the normalization used for distinct-value sets.
std::string normalize_cell(std::string_view s);

/// Strict decimal parse (optional sign, fraction, exponent). Whole input
/// must be consumed.
bool parse_number(std::string_view s, double& out);

int resolve_threads(int requested);

/// Runs fn(0..n-1) across `threads` workers. Serial when threads <= 1 or n
/// is small. Exceptions from workers are rethrown on the calling thread.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

} // namespace lakeschema
