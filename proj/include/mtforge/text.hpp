#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mtforge::text {

// Splits on every occurrence of `sep`, keeping empty fields.
std::vector<std::string_view> split(std::string_view s, char sep);

// Whitespace-separated words (runs of ASCII whitespace collapse).
std::vector<std::string_view> words(std::string_view s);

std::string_view trim(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Decodes one UTF-8 code point starting at `pos`. Returns the code point and
// advances `pos`; returns -1 and advances by one byte on invalid input.
std::int32_t decode_utf8(std::string_view s, std::size_t& pos);

void append_utf8(std::string& out, std::uint32_t cp);

// Combining marks attach to the preceding code point when segmenting.
bool is_combining_mark(std::int32_t cp);

// Strips a trailing '\r' so CRLF input reads like LF input.
inline void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace mtforge::text
