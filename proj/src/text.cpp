#include "mtforge/text.hpp"

#include <algorithm>

#include "mtforge/error.hpp"
#include "mtforge/rng.hpp"

namespace mtforge {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::MissingFile: return "MissingFile";
    case Errc::Io: return "IoError";
    case Errc::InsufficientScratchSpace: return "InsufficientScratchSpace";
    case Errc::MalformedManifest: return "MalformedManifest";
    case Errc::DuplicateShardPath: return "DuplicateShardPath";
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::MalformedFile: return "MalformedFile";
    case Errc::InvalidLangCode: return "InvalidLangCode";
    case Errc::InvalidDirection: return "InvalidDirection";
    case Errc::UnknownShard: return "UnknownShard";
    case Errc::AlreadyTagged: return "AlreadyTagged";
    case Errc::EmptyStats: return "EmptyStats";
    case Errc::NonPositiveTemperature: return "NonPositiveTemperature";
    case Errc::InvalidWeights: return "InvalidWeights";
    case Errc::EmptyPoolWithPositiveWeight: return "EmptyPoolWithPositiveWeight";
    case Errc::UnsupportedDirection: return "UnsupportedDirection";
    case Errc::DuplicateLanguage: return "DuplicateLanguage";
    case Errc::EmptyMonolingual: return "EmptyMonolingual";
    case Errc::EnglishInPair: return "EnglishInPair";
    case Errc::NothingToDo: return "NothingToDo";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::DirectionSetMismatch: return "DirectionSetMismatch";
    case Errc::UnknownDirection: return "UnknownDirection";
    case Errc::EmptyList: return "EmptyList";
    case Errc::InvalidStage: return "InvalidStage";
    case Errc::InvalidSchedule: return "InvalidSchedule";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

std::size_t sample_cumulative(Rng& rng, std::span<const double> cumulative) {
  const double u = uniform01(rng) * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it != cumulative.end()) return static_cast<std::size_t>(it - cumulative.begin());
  // u rounded up to the total: take the last entry with positive mass
  std::size_t idx = cumulative.size() - 1;
  while (idx > 0 && cumulative[idx] == cumulative[idx - 1]) --idx;
  return idx;
}

namespace text {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

namespace {
bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
}  // namespace

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::int32_t decode_utf8(std::string_view s, std::size_t& pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  int len;
  std::int32_t cp;
  std::int32_t min;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2, cp = b0 & 0x1F, min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3, cp = b0 & 0x0F, min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4, cp = b0 & 0x07, min = 0x10000;
  } else {
    ++pos;
    return -1;
  }
  if (pos + len > s.size()) {
    ++pos;
    return -1;
  }
  for (int k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[pos + k]);
    if ((b & 0xC0) != 0x80) {
      ++pos;
      return -1;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    ++pos;
    return -1;
  }
  pos += len;
  return cp;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool is_combining_mark(std::int32_t cp) {
  return (cp >= 0x0300 && cp <= 0x036F) || (cp >= 0x0483 && cp <= 0x0489) ||
         (cp >= 0x0591 && cp <= 0x05BD) || (cp >= 0x0610 && cp <= 0x061A) ||
         (cp >= 0x064B && cp <= 0x065F) || (cp >= 0x0900 && cp <= 0x0903) ||
         (cp >= 0x093A && cp <= 0x094F) || (cp >= 0x0B82 && cp <= 0x0B83) ||
         (cp >= 0x0BBE && cp <= 0x0BCD) || cp == 0x0BD7 ||
         (cp >= 0x1AB0 && cp <= 0x1AFF) || (cp >= 0x1DC0 && cp <= 0x1DFF) ||
         (cp >= 0x200C && cp <= 0x200D) || (cp >= 0x20D0 && cp <= 0x20FF) ||
         (cp >= 0xFE00 && cp <= 0xFE0F) || (cp >= 0xFE20 && cp <= 0xFE2F);
}

}  // namespace text
}  // namespace mtforge
