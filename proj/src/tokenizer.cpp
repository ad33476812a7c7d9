#include "mtforge/tokenizer.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "mtforge/error.hpp"
#include "mtforge/lexicon.hpp"
#include "mtforge/text.hpp"

namespace mtforge {

namespace {

constexpr std::uint32_t kMetaCodePoint = 0x2581;

bool is_byte_escape(std::string_view t) {
  auto hex = [](char c) { return (c >= '0' && c <= '9') || (c >= 'A' && c <= 'F'); };
  return t.size() == 6 && t.substr(0, 3) == "<0x" && hex(t[3]) && hex(t[4]) && t[5] == '>';
}

bool is_escape(std::string_view t) { return t == kLiteralMetaPiece || is_byte_escape(t); }

std::string byte_escape(unsigned char b) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  return std::string{'<', '0', 'x', kHex[b >> 4], kHex[b & 0xF], '>'};
}

// A segmentation unit: one code point plus trailing combining marks, or an
// escape that always stands alone as a token.
struct Unit {
  std::string bytes;
  bool escape = false;
};

std::vector<Unit> segment(std::string_view text) {
  std::vector<Unit> units;
  units.push_back({std::string(kMetaSpace), false});
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = pos;
    const std::int32_t cp = text::decode_utf8(text, pos);
    if (cp < 0) {
      units.push_back({byte_escape(static_cast<unsigned char>(text[start])), true});
    } else if (cp == static_cast<std::int32_t>(kMetaCodePoint)) {
      units.push_back({std::string(kLiteralMetaPiece), true});
    } else if (cp == ' ') {
      units.push_back({std::string(kMetaSpace), false});
    } else if (text::is_combining_mark(cp) && !units.back().escape) {
      units.back().bytes.append(text.substr(start, pos - start));
    } else {
      units.push_back({std::string(text.substr(start, pos - start)), false});
    }
  }
  return units;
}

}  // namespace

SubwordTokenizer::SubwordTokenizer(std::vector<std::pair<std::string, double>> scored_pieces) {
  for (auto& [piece, score] : scored_pieces) {
    if (piece.empty() || is_escape(piece))
      throw Error(Errc::InvalidArgument, "reserved or empty vocabulary piece '" + piece + "'");
    max_piece_bytes_ = std::max(max_piece_bytes_, piece.size());
    scores_.emplace(std::move(piece), score);
  }
}

SubwordTokenizer SubwordTokenizer::builtin() {
  std::vector<std::pair<std::string, double>> pieces;
  for (std::string_view w : core_lexicon()) {
    pieces.emplace_back(std::string(kMetaSpace) + std::string(w), -1.0);
    pieces.emplace_back(std::string(w), -2.0);
  }
  for (std::string_view suffix : {"s", "es", "ed", "ing", "er", "est", "ly", "tion", "ment", "ness"})
    pieces.emplace_back(std::string(suffix), -3.0);
  for (std::string_view punct : {".", ",", "!", "?", ":", ";"})
    pieces.emplace_back(std::string(punct), -4.0);
  return SubwordTokenizer(std::move(pieces));
}

SubwordTokenizer SubwordTokenizer::from_words(const std::vector<std::string>& words) {
  std::vector<std::pair<std::string, double>> pieces;
  pieces.reserve(words.size());
  for (const auto& w : words) pieces.emplace_back(std::string(kMetaSpace) + w, -1.0);
  return SubwordTokenizer(std::move(pieces));
}

SubwordTokenizer SubwordTokenizer::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) throw Error(Errc::MissingFile, path.string());
    throw Error(Errc::Io, "cannot open " + path.string());
  }
  std::vector<std::pair<std::string, double>> pieces;
  std::string line;
  std::uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    text::chomp(line);
    if (line.empty()) continue;
    const auto fields = text::split(line, '\t');
    double score = 0.0;
    if (fields.size() >= 2) {
      const auto* end = fields[1].data() + fields[1].size();
      auto [ptr, ec] = std::from_chars(fields[1].data(), end, score);
      if (ec != std::errc{} || ptr != end)
        throw Error(Errc::MalformedFile, path.string() + ":" + std::to_string(line_no) + ": bad score");
    }
    pieces.emplace_back(std::string(fields[0]), score);
  }
  return SubwordTokenizer(std::move(pieces));
}

std::vector<std::string> SubwordTokenizer::tokenize(std::string_view text) const {
  std::vector<std::string> tokens;
  if (text.empty()) return tokens;
  const auto units = segment(text);
  std::size_t i = 0;
  while (i < units.size()) {
    if (units[i].escape) {
      tokens.push_back(units[i].bytes);
      ++i;
      continue;
    }
    // longest vocabulary piece spanning units [i, end)
    std::size_t best_end = i + 1;
    std::string candidate;
    for (std::size_t j = i; j < units.size() && !units[j].escape; ++j) {
      candidate += units[j].bytes;
      if (candidate.size() > max_piece_bytes_) break;
      if (scores_.count(candidate)) best_end = j + 1;
    }
    std::string piece;
    for (std::size_t j = i; j < best_end; ++j) piece += units[j].bytes;
    tokens.push_back(std::move(piece));
    i = best_end;
  }
  return tokens;
}

std::string SubwordTokenizer::detokenize(const std::vector<std::string>& tokens) const {
  std::string out;
  for (const auto& t : tokens) {
    if (t == kLiteralMetaPiece) {
      out += kMetaSpace;
    } else if (is_byte_escape(t)) {
      unsigned value = 0;
      std::from_chars(t.data() + 3, t.data() + 5, value, 16);
      out += static_cast<char>(value);
    } else {
      std::size_t pos = 0;
      while (true) {
        const auto hit = t.find(kMetaSpace, pos);
        out.append(t, pos, hit == std::string::npos ? std::string::npos : hit - pos);
        if (hit == std::string::npos) break;
        out += ' ';
        pos = hit + kMetaSpace.size();
      }
    }
  }
  // drop the boundary marker added in front of the first word
  if (!tokens.empty() && !tokens.front().empty() && !is_escape(tokens.front()) &&
      std::string_view(tokens.front()).substr(0, kMetaSpace.size()) == kMetaSpace)
    out.erase(0, 1);
  return out;
}

std::string truncate_tokens(std::string_view text, const SubwordTokenizer& tok, std::size_t max_tokens) {
  if (max_tokens == 0) throw Error(Errc::InvalidArgument, "max_tokens must be >= 1");
  auto tokens = tok.tokenize(text);
  if (tokens.size() <= max_tokens) return std::string(text);
  tokens.resize(max_tokens);
  return tok.detokenize(tokens);
}

}  // namespace mtforge
