#include "mtforge/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "mtforge/error.hpp"
#include "mtforge/text.hpp"

namespace fs = std::filesystem;

namespace mtforge {

LangCode::LangCode(std::string code) : code_(std::move(code)) {
  const bool ok = code_.size() >= 2 && code_.size() <= 8 &&
                  std::all_of(code_.begin(), code_.end(), [](char c) { return c >= 'a' && c <= 'z'; });
  if (!ok) throw Error(Errc::InvalidLangCode, "'" + code_ + "' is not 2-8 lowercase ASCII letters");
}

Direction::Direction(LangCode src, LangCode tgt) : src_(std::move(src)), tgt_(std::move(tgt)) {
  if (src_ == tgt_) throw Error(Errc::InvalidDirection, "source equals target (" + src_.str() + ")");
}

Direction Direction::parse(std::string_view text) {
  constexpr std::string_view kArrow = "\xE2\x86\x92";  // U+2192
  std::size_t pos = text.find(kArrow);
  std::size_t sep_len = kArrow.size();
  if (pos == std::string_view::npos) {
    pos = text.find('-');
    sep_len = 1;
  }
  if (pos == std::string_view::npos)
    throw Error(Errc::InvalidDirection, "expected src-tgt, got '" + std::string(text) + "'");
  return Direction(LangCode(std::string(text.substr(0, pos))),
                   LangCode(std::string(text.substr(pos + sep_len))));
}

std::string_view to_string(OriginPool pool) {
  switch (pool) {
    case OriginPool::Bitext: return "bitext";
    case OriginPool::BackTranslation: return "back-translation";
    case OriginPool::DualPseudo: return "dual-pseudo";
  }
  return "?";
}

std::optional<OriginPool> parse_origin(std::string_view text) {
  if (text == "bitext") return OriginPool::Bitext;
  if (text == "back-translation" || text == "bt") return OriginPool::BackTranslation;
  if (text == "dual-pseudo" || text == "dual") return OriginPool::DualPseudo;
  return std::nullopt;
}

const ShardEntry& CorpusManifest::shard(std::string_view shard_id) const {
  for (const auto& s : shards)
    if (s.id() == shard_id) return s;
  throw Error(Errc::UnknownShard, std::string(shard_id));
}

CorpusManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    if (!fs::exists(path)) throw Error(Errc::MissingFile, path.string());
    throw Error(Errc::Io, "cannot open " + path.string());
  }
  const fs::path base = path.parent_path();
  CorpusManifest manifest;
  std::set<fs::path> seen;
  std::string line;
  std::uint64_t line_no = 0;
  auto malformed = [&](const std::string& reason) {
    return Error(Errc::MalformedManifest,
                 path.string() + ":" + std::to_string(line_no) + ": " + reason);
  };
  while (std::getline(in, line)) {
    ++line_no;
    text::chomp(line);
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = text::split(line, '\t');
    if (fields.size() != 5) throw malformed("expected 5 tab-separated fields, got " + std::to_string(fields.size()));
    if (fields[0].empty()) throw malformed("empty path");

    std::optional<Direction> direction;
    try {
      direction.emplace(LangCode(std::string(fields[1])), LangCode(std::string(fields[2])));
    } catch (const Error& e) {
      throw malformed(e.what());
    }
    const auto origin = parse_origin(fields[3]);
    if (!origin) throw malformed("unknown origin '" + std::string(fields[3]) + "'");
    std::uint64_t count = 0;
    const auto* end = fields[4].data() + fields[4].size();
    auto [ptr, ec] = std::from_chars(fields[4].data(), end, count);
    if (ec != std::errc{} || ptr != end) throw malformed("bad line count '" + std::string(fields[4]) + "'");

    fs::path shard_path{std::string(fields[0])};
    if (shard_path.is_relative()) shard_path = base / shard_path;
    shard_path = shard_path.lexically_normal();
    if (!seen.insert(shard_path).second)
      throw Error(Errc::DuplicateShardPath, shard_path.string());
    manifest.shards.push_back(ShardEntry{shard_path, *direction, *origin, count});
  }
  if (in.bad()) throw Error(Errc::Io, "read failed: " + path.string());
  return manifest;
}

std::string portable_path(const fs::path& p, const fs::path& base) {
  const fs::path norm = p.lexically_normal();
  const fs::path b = base.empty() ? fs::path(".") : base.lexically_normal();
  // compare like with like: both absolute or both relative
  const fs::path lhs = norm.is_absolute() == b.is_absolute() ? norm : fs::absolute(norm);
  const fs::path rhs = norm.is_absolute() == b.is_absolute() ? b : fs::absolute(b);
  const fs::path rel = lhs.lexically_relative(rhs);
  if (!rel.empty()) return rel.generic_string();
  return norm.generic_string();
}

void write_manifest(const CorpusManifest& manifest, const fs::path& path) {
  auto out = open_for_writing(path);
  out << "# path\tsrc\ttgt\torigin\tcount\n";
  for (const auto& s : manifest.shards) {
    out << portable_path(s.path, path.parent_path()) << '\t' << s.direction.src().str() << '\t' << s.direction.tgt().str()
        << '\t' << to_string(s.origin) << '\t' << s.declared_line_count << '\n';
  }
  if (!out) throw Error(Errc::Io, "write failed: " + path.string());
}

PairReader::PairReader(const ShardEntry& shard) : shard_(shard), in_(shard.path, std::ios::binary) {
  if (!in_) {
    if (!fs::exists(shard.path)) throw Error(Errc::MissingFile, shard.path.string());
    throw Error(Errc::Io, "cannot open " + shard.path.string());
  }
}

std::pair<std::string_view, std::string_view> split_pair_line(std::string_view line,
                                                              std::uint64_t line_no) {
  const auto tab = line.find('\t');
  if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos)
    throw Error(Errc::MalformedLine, "line " + std::to_string(line_no) + " needs exactly one tab");
  return {line.substr(0, tab), line.substr(tab + 1)};
}

std::ofstream open_for_writing(const fs::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  return out;
}

std::optional<SentencePair> PairReader::next() {
  if (!std::getline(in_, line_)) {
    if (in_.bad()) throw Error(Errc::Io, "read failed: " + shard_.path.string());
    return std::nullopt;
  }
  ++line_no_;
  text::chomp(line_);
  try {
    auto [src, tgt] = split_pair_line(line_, line_no_);
    return SentencePair{std::string(src), std::string(tgt), shard_.direction, shard_.origin,
                        shard_.id(), line_no_};
  } catch (const Error&) {
    throw Error(Errc::MalformedLine, shard_.path.string() + ": line " + std::to_string(line_no_) +
                                         " needs exactly one tab");
  }
}

PairReader read_pairs(const CorpusManifest& manifest, std::string_view shard_id) {
  return PairReader(manifest.shard(shard_id));
}

std::uint64_t LanguageStats::language_count(const LangCode& lang) const {
  auto it = per_language.find(lang);
  return it == per_language.end() ? 0 : it->second;
}

std::uint64_t LanguageStats::direction_count(const Direction& dir) const {
  auto it = per_direction.find(dir);
  return it == per_direction.end() ? 0 : it->second;
}

std::uint64_t count_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!fs::exists(path)) throw Error(Errc::MissingFile, path.string());
    throw Error(Errc::Io, "cannot open " + path.string());
  }
  std::uint64_t lines = 0;
  char buf[1 << 16];
  char last = '\n';
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const auto n = in.gcount();
    lines += static_cast<std::uint64_t>(std::count(buf, buf + n, '\n'));
    last = buf[n - 1];
  }
  if (in.bad()) throw Error(Errc::Io, "read failed: " + path.string());
  if (last != '\n') ++lines;  // unterminated final line
  return lines;
}

LanguageStats corpus_stats(const CorpusManifest& manifest) {
  LanguageStats stats;
  for (const auto& shard : manifest.shards) {
    std::uint64_t n;
    try {
      n = count_lines(shard.path);
    } catch (const Error& e) {
      throw Error(e.code(), "shard " + shard.id() + ": " + e.what());
    }
    stats.per_direction[shard.direction] += n;
  }
  for (const auto& [dir, n] : stats.per_direction) {
    stats.per_language[dir.src()] += n;
    stats.per_language[dir.tgt()] += n;
  }
  return stats;
}

std::vector<CountMismatch> verify_manifest(const CorpusManifest& manifest) {
  std::vector<CountMismatch> out;
  for (const auto& shard : manifest.shards) {
    const auto actual = count_lines(shard.path);
    if (actual != shard.declared_line_count) out.push_back({shard.id(), shard.declared_line_count, actual});
  }
  return out;
}

}  // namespace mtforge
