#include "mtforge/augmentation.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "mtforge/error.hpp"
#include "mtforge/text.hpp"

namespace fs = std::filesystem;

namespace mtforge {

std::string_view to_string(AugmentKind kind) {
  switch (kind) {
    case AugmentKind::BackTranslation: return "bt";
    case AugmentKind::DualPseudo: return "dual";
    case AugmentKind::Triangulation: return "tri";
  }
  return "?";
}

std::vector<Direction> AugmentationPlan::needed_directions() const {
  std::set<Direction> dirs;
  for (const auto& t : tasks) dirs.insert(t.needs.begin(), t.needs.end());
  return {dirs.begin(), dirs.end()};
}

namespace {

void require_english_monolingual(const CorpusRef& mono) {
  if (mono.is_bitext() || mono.lang != english())
    throw Error(Errc::InvalidArgument, mono.path.string() + " must be an English monolingual corpus");
  if (count_lines(mono.path) == 0) throw Error(Errc::EmptyMonolingual, mono.path.string());
}

}  // namespace

AugmentationPlan plan_backtranslation(const CorpusRef& mono_en, const std::vector<LangCode>& langs) {
  require_english_monolingual(mono_en);
  AugmentationPlan plan;
  std::set<LangCode> seen;
  for (const auto& x : langs) {
    if (x == english()) throw Error(Errc::EnglishInPair, "back-translation target list contains en");
    if (!seen.insert(x).second) throw Error(Errc::DuplicateLanguage, x.str());
    const Direction en_x(english(), x);
    const Column authentic{0, std::nullopt};
    const Column synthetic{0, en_x};
    plan.tasks.push_back(AugmentationTask{
        AugmentKind::BackTranslation,
        mono_en,
        {en_x},
        {TaskOutput{Direction(x, english()), OriginPool::BackTranslation, synthetic, authentic},
         TaskOutput{en_x, OriginPool::BackTranslation, authentic, synthetic}}});
  }
  return plan;
}

AugmentationPlan plan_dual_pseudo(const CorpusRef& mono_en, const std::vector<Direction>& pairs) {
  for (const auto& d : pairs)
    if (d.involves(english())) throw Error(Errc::EnglishInPair, d.str());
  require_english_monolingual(mono_en);
  AugmentationPlan plan;
  for (const auto& d : pairs) {
    const Direction en_x(english(), d.src()), en_y(english(), d.tgt());
    plan.tasks.push_back(AugmentationTask{AugmentKind::DualPseudo,
                                          mono_en,
                                          {en_x, en_y},
                                          {TaskOutput{d, OriginPool::DualPseudo, Column{0, en_x}, Column{0, en_y}}}});
  }
  return plan;
}

std::vector<Direction> all_ordered_pairs(const std::vector<LangCode>& langs) {
  std::vector<Direction> out;
  for (const auto& a : langs)
    for (const auto& b : langs)
      if (a != b) out.emplace_back(a, b);
  return out;
}

AugmentationPlan plan_triangulation(const CorpusRef& bitext, const std::optional<LangCode>& new_src,
                                    const std::optional<LangCode>& new_tgt) {
  if (!new_src && !new_tgt) throw Error(Errc::NothingToDo, "triangulation needs a new source or target language");
  if (!bitext.is_bitext()) throw Error(Errc::InvalidArgument, bitext.path.string() + " is not a bitext");
  const Direction& d = *bitext.direction;
  AugmentationTask task{AugmentKind::Triangulation, bitext, {}, {}};
  if (new_tgt) {
    // (X1, Y2): keep the source side, translate Y1 -> Y2
    const Direction y1_y2(d.tgt(), *new_tgt);
    task.needs.push_back(y1_y2);
    task.outputs.push_back(
        TaskOutput{Direction(d.src(), *new_tgt), OriginPool::DualPseudo, Column{0, std::nullopt}, Column{1, y1_y2}});
  }
  if (new_src) {
    // (X2, Y1): translate X1 -> X2, keep the target side
    const Direction x1_x2(d.src(), *new_src);
    task.needs.push_back(x1_x2);
    task.outputs.push_back(
        TaskOutput{Direction(*new_src, d.tgt()), OriginPool::DualPseudo, Column{0, x1_x2}, Column{1, std::nullopt}});
  }
  AugmentationPlan plan;
  plan.tasks.push_back(std::move(task));
  return plan;
}

AugmentationPlan merge_plans(std::vector<AugmentationPlan> plans) {
  AugmentationPlan merged;
  if (plans.empty()) return merged;
  merged.round = plans.front().round;
  for (auto& p : plans) {
    if (p.round != merged.round) throw Error(Errc::InvalidArgument, "cannot merge plans from different rounds");
    for (auto& t : p.tasks) merged.tasks.push_back(std::move(t));
  }
  return merged;
}

// ---------------------------------------------------------------------------

namespace {

// Streams one field of a corpus: whole lines of a monolingual file, or one
// side of a bitext.
class FieldReader {
 public:
  FieldReader(const fs::path& path, bool bitext, int field)
      : path_(path), in_(path, std::ios::binary), bitext_(bitext), field_(field) {
    if (!in_) {
      if (!fs::exists(path)) throw Error(Errc::MissingFile, path.string());
      throw Error(Errc::Io, "cannot open " + path.string());
    }
  }

  bool next(std::string& out) {
    if (!std::getline(in_, line_)) {
      if (in_.bad()) throw Error(Errc::Io, "read failed: " + path_.string());
      return false;
    }
    ++line_no_;
    if (bitext_) {
      auto [src, tgt] = split_pair_line(line_, line_no_);
      out.assign(field_ == 0 ? src : tgt);
    } else {
      if (line_.find('\t') != std::string::npos)
        throw Error(Errc::MalformedLine, path_.string() + ": line " + std::to_string(line_no_) +
                                             " of a monolingual corpus contains a tab");
      out = line_;
    }
    return true;
  }

 private:
  fs::path path_;
  std::ifstream in_;
  bool bitext_;
  int field_;
  std::string line_;
  std::uint64_t line_no_ = 0;
};

constexpr std::size_t kChunkLines = 2048;

void sanitize(std::string& s) {
  std::replace(s.begin(), s.end(), '\t', ' ');
  std::replace(s.begin(), s.end(), '\n', ' ');
}

struct PassKey {
  fs::path input;
  int field;
  Direction dir;
  friend auto operator<=>(const PassKey&, const PassKey&) = default;
};

void run_pass(const PassKey& key, bool bitext, const Translator& t, const DecodingConfig& cfg, const fs::path& out) {
  FieldReader reader(key.input, bitext, key.field);
  std::ofstream os(out, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(Errc::Io, "cannot write " + out.string());
  std::vector<std::string> chunk;
  std::string line;
  auto flush = [&] {
    auto translated = t.translate(chunk, key.dir, cfg);
    for (auto& s : translated) {
      sanitize(s);
      os << s << '\n';
    }
    chunk.clear();
  };
  while (reader.next(line)) {
    chunk.push_back(line);
    if (chunk.size() == kChunkLines) flush();
  }
  if (!chunk.empty()) flush();
  if (!os) throw Error(Errc::Io, "write failed: " + out.string());
}

}  // namespace

CorpusManifest run_plan(const AugmentationPlan& plan, const Translator& t, const DecodingConfig& cfg,
                        const fs::path& out_dir) {
  for (const auto& dir : plan.needed_directions())
    if (!t.supports(dir)) throw Error(Errc::UnsupportedDirection, dir.str());
  cfg.validate();

  fs::create_directories(out_dir);
  const fs::path pass_dir = out_dir / "passes";
  std::map<PassKey, fs::path> passes;

  auto column_reader = [&](const AugmentationTask& task, const Column& col) {
    if (!col.via) return FieldReader(task.input.path, task.input.is_bitext(), col.field);
    const PassKey key{task.input.path, col.field, *col.via};
    auto it = passes.find(key);
    if (it == passes.end()) {
      fs::create_directories(pass_dir);
      const fs::path p = pass_dir / ("pass-" + std::to_string(passes.size()) + "." + col.via->str() + ".txt");
      run_pass(key, task.input.is_bitext(), t, cfg, p);
      it = passes.emplace(key, p).first;
    }
    return FieldReader(it->second, false, 0);
  };

  CorpusManifest manifest;
  for (std::size_t ti = 0; ti < plan.tasks.size(); ++ti) {
    const auto& task = plan.tasks[ti];
    for (const auto& output : task.outputs) {
      const fs::path shard = out_dir / (std::string(to_string(task.kind)) + "-" + std::to_string(ti) + "." +
                                        output.direction.str() + ".r" + std::to_string(plan.round) + ".tsv");
      FieldReader src = column_reader(task, output.source);
      FieldReader tgt = column_reader(task, output.target);
      std::ofstream os(shard, std::ios::binary | std::ios::trunc);
      if (!os) throw Error(Errc::Io, "cannot write " + shard.string());
      std::string a, b;
      std::uint64_t n = 0;
      while (true) {
        const bool has_a = src.next(a), has_b = tgt.next(b);
        if (has_a != has_b) throw Error(Errc::LengthMismatch, shard.string() + ": columns are not line-aligned");
        if (!has_a) break;
        os << a << '\t' << b << '\n';
        ++n;
      }
      if (!os) throw Error(Errc::Io, "write failed: " + shard.string());
      manifest.shards.push_back(ShardEntry{shard.lexically_normal(), output.direction, output.origin, n});
    }
  }
  write_manifest(manifest, out_dir / "manifest.tsv");
  return manifest;
}

// ---------------------------------------------------------------------------

void write_plan(const AugmentationPlan& plan, const fs::path& path) {
  auto out = open_for_writing(path);
  out << "round\t" << plan.round << '\n';
  for (const auto& task : plan.tasks) {
    const auto input = portable_path(task.input.path, path.parent_path());
    switch (task.kind) {
      case AugmentKind::BackTranslation:
        out << "bt\t" << input << '\t' << task.input.lang.str() << '\t' << task.needs.front().tgt().str() << '\n';
        break;
      case AugmentKind::DualPseudo:
        out << "dual\t" << input << '\t' << task.input.lang.str() << '\t' << task.outputs.front().direction.str()
            << '\n';
        break;
      case AugmentKind::Triangulation: {
        const Direction& d = *task.input.direction;
        std::string x2 = "-", y2 = "-";
        for (const auto& need : task.needs) (need.src() == d.src() ? x2 : y2) = need.tgt().str();
        out << "tri\t" << input << '\t' << d.str() << '\t' << x2 << '\t' << y2 << '\n';
        break;
      }
    }
  }
  if (!out) throw Error(Errc::Io, "write failed: " + path.string());
}

AugmentationPlan read_plan(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!fs::exists(path)) throw Error(Errc::MissingFile, path.string());
    throw Error(Errc::Io, "cannot open " + path.string());
  }
  const fs::path base = path.parent_path();
  auto resolve = [&](std::string_view p) {
    fs::path r{std::string(p)};
    return (r.is_relative() ? base / r : r).lexically_normal();
  };
  AugmentationPlan plan;
  std::string line;
  std::uint64_t line_no = 0;
  auto bad = [&](const std::string& why) {
    return Error(Errc::MalformedFile, path.string() + ":" + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    text::chomp(line);
    if (text::trim(line).empty() || line.front() == '#') continue;
    const auto f = text::split(line, '\t');
    AugmentationPlan part;
    if (f[0] == "round" && f.size() == 2) {
      try {
        plan.round = std::stoi(std::string(f[1]));
      } catch (const std::exception&) {
        throw bad("bad round number");
      }
      continue;
    } else if (f[0] == "bt" && f.size() == 4) {
      part = plan_backtranslation(CorpusRef::monolingual(resolve(f[1]), LangCode(std::string(f[2]))),
                                  {LangCode(std::string(f[3]))});
    } else if (f[0] == "dual" && f.size() == 4) {
      part = plan_dual_pseudo(CorpusRef::monolingual(resolve(f[1]), LangCode(std::string(f[2]))),
                              {Direction::parse(f[3])});
    } else if (f[0] == "tri" && f.size() == 5) {
      auto opt = [](std::string_view v) {
        return v == "-" ? std::nullopt : std::optional<LangCode>(LangCode(std::string(v)));
      };
      part = plan_triangulation(CorpusRef::bitext(resolve(f[1]), Direction::parse(f[2])), opt(f[3]), opt(f[4]));
    } else {
      throw bad("unrecognized task record");
    }
    for (auto& t : part.tasks) plan.tasks.push_back(std::move(t));
  }
  return plan;
}

}  // namespace mtforge
