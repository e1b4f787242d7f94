#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mlar {

// Error with a stable machine-readable code ("empty skill", "unknown
// department", "no text", ...) plus a human message.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

using UtcSeconds = std::chrono::sys_seconds;

std::string format_rfc3339(UtcSeconds t);
UtcSeconds parse_rfc3339(const std::string& text);
UtcSeconds now_utc();

std::string to_lower_ascii(std::string_view s);
std::string trim(std::string_view s);

// Splits on a separator, trims each piece, drops empties.
std::vector<std::string> split_trimmed(std::string_view s, char sep);

// Splits text into lines; \n, \r\n, lone \r and form feeds all end a line.
std::vector<std::string> split_lines(std::string_view text);

// Whitespace-separated tokens of an already normalized string.
std::vector<std::string> tokens_of(std::string_view s);

std::string sha256_hex(std::string_view bytes);

std::string read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::string_view bytes);

// Runs fn(0..count-1) on up to `workers` threads. The first exception thrown
// by fn is rethrown on the calling thread after all workers join.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace mlar
