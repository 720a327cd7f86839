#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

namespace sdc {

/// Worker count from SDC_SENTINEL_THREADS, else hardware concurrency (min 1).
unsigned worker_threads();

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Exceptions are
/// rethrown on the calling thread (first by index).
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Shortest decimal that round-trips to the same double. Non-finite values
/// render as "inf", "-inf", "nan".
std::string format_real(double value);
std::string format_real(float value);

/// Parses a value written by format_real; throws ValidationError otherwise.
double parse_real(std::string_view text);

/// Writes to a sibling temp file and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace sdc
