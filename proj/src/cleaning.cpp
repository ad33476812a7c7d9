#include "mtforge/cleaning.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <vector>

#include "mtforge/error.hpp"
#include "mtforge/rng.hpp"
#include "mtforge/text.hpp"

namespace fs = std::filesystem;

namespace mtforge {

std::optional<Script> parse_script(std::string_view code) {
  if (code == "Latn") return Script::Latin;
  if (code == "Cyrl") return Script::Cyrillic;
  if (code == "Grek") return Script::Greek;
  if (code == "Arab") return Script::Arabic;
  if (code == "Hebr") return Script::Hebrew;
  if (code == "Deva") return Script::Devanagari;
  if (code == "Taml") return Script::Tamil;
  if (code == "Hani") return Script::Han;
  return std::nullopt;
}

std::string_view to_string(Script script) {
  switch (script) {
    case Script::Latin: return "Latn";
    case Script::Cyrillic: return "Cyrl";
    case Script::Greek: return "Grek";
    case Script::Arabic: return "Arab";
    case Script::Hebrew: return "Hebr";
    case Script::Devanagari: return "Deva";
    case Script::Tamil: return "Taml";
    case Script::Han: return "Hani";
  }
  return "?";
}

std::optional<Script> letter_script(std::int32_t cp) {
  auto in = [cp](std::int32_t lo, std::int32_t hi) { return cp >= lo && cp <= hi; };
  if (in(0x41, 0x5A) || in(0x61, 0x7A) || cp == 0xAA || cp == 0xBA || in(0xC0, 0xD6) ||
      in(0xD8, 0xF6) || in(0xF8, 0x24F) || in(0x1E00, 0x1EFF))
    return Script::Latin;
  if (in(0x400, 0x481) || in(0x48A, 0x52F)) return Script::Cyrillic;
  if (cp == 0x386 || in(0x388, 0x3FF)) return Script::Greek;
  if (in(0x5D0, 0x5EA)) return Script::Hebrew;
  if (in(0x620, 0x64A) || in(0x66E, 0x6D3)) return Script::Arabic;
  if (in(0x904, 0x939) || in(0x958, 0x961)) return Script::Devanagari;
  if (in(0xB85, 0xBB9)) return Script::Tamil;
  if (in(0x4E00, 0x9FFF)) return Script::Han;
  return std::nullopt;
}

double foreign_letter_fraction(std::string_view text, Script required) {
  std::size_t letters = 0, foreign = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto script = letter_script(text::decode_utf8(text, pos));
    if (!script) continue;
    ++letters;
    if (*script != required) ++foreign;
  }
  return letters == 0 ? 0.0 : static_cast<double>(foreign) / static_cast<double>(letters);
}

void FilterConfig::validate() const {
  if (std::find(std::begin(kRatioLadder), std::end(kRatioLadder), length_ratio_limit) == std::end(kRatioLadder))
    throw Error(Errc::InvalidArgument, "length ratio limit must be one of 1.5, 2.0, 2.5, 3.0");
  if (max_words == 0 || max_tokens == 0) throw Error(Errc::InvalidArgument, "size limits must be positive");
  if (unk_token.empty()) throw Error(Errc::InvalidArgument, "empty unk token");
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::Empty: return "Empty";
    case RejectReason::BadLangId: return "BadLangId";
    case RejectReason::TooLong: return "TooLong";
    case RejectReason::ContainsUnk: return "ContainsUnk";
    case RejectReason::WrongScript: return "WrongScript";
    case RejectReason::RatioExceeded: return "RatioExceeded";
  }
  return "?";
}

namespace {

bool has_token(std::string_view s, std::string_view token) {
  const auto ws = text::words(s);
  return std::find(ws.begin(), ws.end(), token) != ws.end();
}

// Majority rule: more than half of the classified letters outside the script.
bool wrong_script(std::string_view s, const LangCode& lang, const FilterConfig& cfg) {
  const auto rule = cfg.script_rules.find(lang);
  return rule != cfg.script_rules.end() && foreign_letter_fraction(s, rule->second) > 0.5;
}

std::optional<RejectReason> first_failure(const SentencePair& p, const FilterConfig& cfg,
                                          const SubwordTokenizer& tok,
                                          const std::optional<LangIdVerdict>& langid) {
  if (text::trim(p.source).empty() || text::trim(p.target).empty()) return RejectReason::Empty;
  if (langid ? (langid->first != p.direction.src() || langid->second != p.direction.tgt())
             : cfg.langid_required)
    return RejectReason::BadLangId;
  if (text::words(p.source).size() > cfg.max_words || text::words(p.target).size() > cfg.max_words)
    return RejectReason::TooLong;
  if (has_token(p.source, cfg.unk_token) || has_token(p.target, cfg.unk_token))
    return RejectReason::ContainsUnk;
  if (wrong_script(p.source, p.direction.src(), cfg) || wrong_script(p.target, p.direction.tgt(), cfg))
    return RejectReason::WrongScript;
  const auto ls = static_cast<double>(tok.tokenize(p.source).size());
  const auto lt = static_cast<double>(tok.tokenize(p.target).size());
  if (std::max(ls, lt) / std::min(ls, lt) > cfg.length_ratio_limit) return RejectReason::RatioExceeded;
  return std::nullopt;
}

}  // namespace

FilterVerdict apply_filters(const SentencePair& pair, const FilterConfig& cfg, const SubwordTokenizer& tok,
                            const std::optional<LangIdVerdict>& langid) {
  if (auto reason = first_failure(pair, cfg, tok, langid)) return FilterVerdict{reason, std::nullopt};
  SentencePair out = pair;
  out.source = truncate_tokens(pair.source, tok, cfg.max_tokens);
  out.target = truncate_tokens(pair.target, tok, cfg.max_tokens);
  if (cfg.add_language_tag) out = prefix_language_tag(out);
  return FilterVerdict{std::nullopt, std::move(out)};
}

std::string language_tag(const LangCode& lang) { return "__" + lang.str() + "__"; }

bool has_language_tag(std::string_view source) {
  const auto ws = text::words(source);
  if (ws.empty()) return false;
  const auto w = ws.front();
  if (w.size() < 6 || w.substr(0, 2) != "__" || w.substr(w.size() - 2) != "__") return false;
  const auto code = w.substr(2, w.size() - 4);
  return code.size() >= 2 && code.size() <= 8 &&
         std::all_of(code.begin(), code.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

SentencePair prefix_language_tag(const SentencePair& pair) {
  if (has_language_tag(pair.source))
    throw Error(Errc::AlreadyTagged, pair.shard_id + ":" + std::to_string(pair.line_no));
  SentencePair out = pair;
  out.source = language_tag(pair.direction.tgt()) + " " + pair.source;
  return out;
}

FilterRunReport filter_manifest(const CorpusManifest& manifest, const FilterConfig& cfg, const SubwordTokenizer& tok,
                                const fs::path& out_dir, const fs::path& rejects_dir) {
  cfg.validate();
  fs::create_directories(out_dir);
  fs::create_directories(rejects_dir);
  FilterRunReport report;
  std::set<std::string> used_names;
  for (std::size_t i = 0; i < manifest.shards.size(); ++i) {
    const auto& shard = manifest.shards[i];
    std::string name = shard.path.filename().string();
    if (!used_names.insert(name).second) {
      name = std::to_string(i) + "." + name;
      used_names.insert(name);
    }
    const fs::path kept_path = out_dir / name;
    std::ofstream kept(kept_path, std::ios::binary | std::ios::trunc);
    std::ofstream rejects(rejects_dir / (name + ".rejects.tsv"), std::ios::binary | std::ios::trunc);
    if (!kept || !rejects) throw Error(Errc::Io, "cannot write filter output for " + name);

    std::ifstream langid_in;
    fs::path sidecar = shard.path;
    sidecar += ".langid";
    if (fs::exists(sidecar)) langid_in.open(sidecar, std::ios::binary);

    PairReader reader(shard);
    std::uint64_t n_kept = 0;
    std::string langid_line;
    while (auto pair = reader.next()) {
      std::optional<LangIdVerdict> langid;
      if (langid_in.is_open() && std::getline(langid_in, langid_line)) {
        text::chomp(langid_line);
        const auto f = text::split(langid_line, '\t');
        if (f.size() == 2) {
          try {
            langid.emplace(LangCode(std::string(f[0])), LangCode(std::string(f[1])));
          } catch (const Error&) {
            // unparseable verdict counts as a mismatch below
            langid.emplace(LangCode("und"), LangCode("und"));
          }
        }
      }
      const auto verdict = apply_filters(*pair, cfg, tok, langid);
      if (verdict.kept()) {
        kept << verdict.transformed->source << '\t' << verdict.transformed->target << '\n';
        ++n_kept;
      } else {
        rejects << pair->line_no << '\t' << to_string(*verdict.reason) << '\t' << pair->source << '\t'
                << pair->target << '\n';
        ++report.rejected[*verdict.reason];
      }
    }
    kept.flush();
    rejects.flush();
    if (!kept || !rejects) throw Error(Errc::Io, "write failed for " + name);
    report.kept_pairs += n_kept;
    report.kept.shards.push_back(ShardEntry{kept_path.lexically_normal(), shard.direction, shard.origin, n_kept});
  }
  write_manifest(report.kept, out_dir / "manifest.tsv");
  return report;
}

namespace {

std::uintmax_t total_input_bytes(const CorpusManifest& manifest) {
  std::uintmax_t total = 0;
  for (const auto& s : manifest.shards) {
    std::error_code ec;
    const auto size = fs::file_size(s.path, ec);
    if (ec) {
      if (!fs::exists(s.path)) throw Error(Errc::MissingFile, s.path.string());
      throw Error(Errc::Io, s.path.string() + ": " + ec.message());
    }
    total += size;
  }
  return total;
}

template <typename Fn>
void for_each_line(const CorpusManifest& manifest, Fn&& fn) {
  std::string line;
  for (const auto& s : manifest.shards) {
    std::ifstream in(s.path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open " + s.path.string());
    while (std::getline(in, line)) fn(line);
    if (in.bad()) throw Error(Errc::Io, "read failed: " + s.path.string());
  }
}

void shuffle_in_memory(std::vector<std::string>& lines, Rng& rng) {
  for (std::size_t i = lines.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(lines[i - 1], lines[j]);
  }
}

// Removes the scratch directory on every exit path.
class ScratchDir {
 public:
  explicit ScratchDir(fs::path p) : path_(std::move(p)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

constexpr std::size_t kMaxBuckets = 256;

}  // namespace

ShuffleReport shuffle_dataset(const CorpusManifest& manifest, std::uint64_t seed, const fs::path& out_path,
                              const ShuffleOptions& opts) {
  if (opts.memory_budget_bytes == 0) throw Error(Errc::InvalidArgument, "memory budget must be positive");
  const auto total = total_input_bytes(manifest);
  fs::path out_dir = out_path.parent_path();
  if (out_dir.empty()) out_dir = ".";
  const fs::path scratch_base = opts.scratch_dir.value_or(out_dir);

  std::error_code ec;
  const auto space = fs::space(scratch_base, ec);
  if (ec) throw Error(Errc::Io, scratch_base.string() + ": " + ec.message());
  // bucket files plus the output itself
  if (space.available < 2 * total)
    throw Error(Errc::InsufficientScratchSpace, "need " + std::to_string(2 * total) + " bytes in " +
                                                    scratch_base.string());

  const std::size_t buckets = static_cast<std::size_t>(std::clamp<std::uintmax_t>(
      (total + opts.memory_budget_bytes - 1) / opts.memory_budget_bytes, 1, kMaxBuckets));
  Rng rng(seed);
  ShuffleReport report{0, buckets};

  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write " + out_path.string());

  if (buckets == 1) {
    std::vector<std::string> lines;
    for_each_line(manifest, [&](const std::string& l) { lines.push_back(l); });
    shuffle_in_memory(lines, rng);
    for (const auto& l : lines) out << l << '\n';
    report.lines = lines.size();
  } else {
    ScratchDir scratch(scratch_base / (out_path.filename().string() + ".shuffle-scratch"));
    {
      std::vector<std::ofstream> files;
      files.reserve(buckets);
      for (std::size_t b = 0; b < buckets; ++b) {
        files.emplace_back(scratch.path() / ("bucket-" + std::to_string(b)), std::ios::binary);
        if (!files.back()) throw Error(Errc::Io, "cannot create scratch bucket in " + scratch.path().string());
      }
      for_each_line(manifest, [&](const std::string& l) { files[uniform_below(rng, buckets)] << l << '\n'; });
      for (auto& f : files) {
        f.flush();
        if (!f) throw Error(Errc::Io, "scratch write failed in " + scratch.path().string());
      }
    }
    std::vector<std::string> lines;
    std::string line;
    for (std::size_t b = 0; b < buckets; ++b) {
      lines.clear();
      std::ifstream in(scratch.path() / ("bucket-" + std::to_string(b)), std::ios::binary);
      while (std::getline(in, line)) lines.push_back(line);
      shuffle_in_memory(lines, rng);
      for (const auto& l : lines) out << l << '\n';
      report.lines += lines.size();
    }
  }
  out.flush();
  if (!out) throw Error(Errc::Io, "write failed: " + out_path.string());
  return report;
}

}  // namespace mtforge
