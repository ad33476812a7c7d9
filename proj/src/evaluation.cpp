#include "mtforge/evaluation.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "mtforge/error.hpp"
#include "mtforge/text.hpp"

namespace fs = std::filesystem;

namespace mtforge {

BleuStats& BleuStats::operator+=(const BleuStats& o) {
  for (int n = 0; n < kBleuOrder; ++n) {
    matches[n] += o.matches[n];
    totals[n] += o.totals[n];
  }
  hyp_len += o.hyp_len;
  ref_len += o.ref_len;
  return *this;
}

namespace {

// n-gram keys joined with a separator that cannot occur inside a token.
std::unordered_map<std::string, std::uint64_t> ngram_counts(const std::vector<std::string>& toks, std::size_t n) {
  std::unordered_map<std::string, std::uint64_t> counts;
  if (toks.size() < n) return counts;
  std::string key;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    key.clear();
    for (std::size_t k = 0; k < n; ++k) {
      if (k) key += '\0';
      key += toks[i + k];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

BleuStats segment_stats(const std::vector<std::string>& hyp, const std::vector<std::string>& ref) {
  BleuStats s;
  s.hyp_len = hyp.size();
  s.ref_len = ref.size();
  for (int n = 1; n <= kBleuOrder; ++n) {
    const auto h = ngram_counts(hyp, n);
    const auto r = ngram_counts(ref, n);
    std::uint64_t m = 0;
    for (const auto& [gram, c] : h) {
      auto it = r.find(gram);
      if (it != r.end()) m += std::min(c, it->second);
    }
    s.matches[n - 1] = m;
    s.totals[n - 1] = hyp.size() >= static_cast<std::size_t>(n) ? hyp.size() - n + 1 : 0;
  }
  return s;
}

BleuScore bleu_from_stats(const BleuStats& st) {
  BleuScore out;
  out.hyp_len = st.hyp_len;
  out.ref_len = st.ref_len;
  if (st.hyp_len == 0) {
    if (st.ref_len == 0) {
      out.score = 100.0;
      out.precisions.fill(1.0);
      return out;
    }
    out.brevity_penalty = 0.0;  // limit of exp(1 - r/h) as h -> 0
    return out;
  }
  out.brevity_penalty =
      st.hyp_len < st.ref_len ? std::exp(1.0 - static_cast<double>(st.ref_len) / static_cast<double>(st.hyp_len))
                              : 1.0;
  double log_sum = 0.0;
  for (int n = 0; n < kBleuOrder; ++n) {
    double p;
    if (st.matches[n] > 0) {
      p = static_cast<double>(st.matches[n]) / static_cast<double>(st.totals[n]);
    } else if (n == 0) {
      p = 0.0;
    } else {
      p = 1.0 / static_cast<double>(st.totals[n] + 1);
    }
    out.precisions[n] = p;
    log_sum += p > 0.0 ? std::log(p) : -INFINITY;
  }
  out.score = out.precisions[0] > 0.0 ? 100.0 * out.brevity_penalty * std::exp(log_sum / kBleuOrder) : 0.0;
  return out;
}

BleuScore corpus_bleu_tokens(const std::vector<std::vector<std::string>>& hyps,
                             const std::vector<std::vector<std::string>>& refs) {
  if (hyps.size() != refs.size())
    throw Error(Errc::LengthMismatch,
                std::to_string(hyps.size()) + " hypotheses vs " + std::to_string(refs.size()) + " references");
  if (hyps.empty()) throw Error(Errc::EmptyCorpus, "no segments");
  BleuStats total;
  for (std::size_t i = 0; i < hyps.size(); ++i) total += segment_stats(hyps[i], refs[i]);
  return bleu_from_stats(total);
}

BleuScore corpus_bleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
                      const SubwordTokenizer& tok) {
  if (hyps.size() != refs.size())
    throw Error(Errc::LengthMismatch,
                std::to_string(hyps.size()) + " hypotheses vs " + std::to_string(refs.size()) + " references");
  if (hyps.empty()) throw Error(Errc::EmptyCorpus, "no segments");
  BleuStats total;
  for (std::size_t i = 0; i < hyps.size(); ++i) total += segment_stats(tok.tokenize(hyps[i]), tok.tokenize(refs[i]));
  return bleu_from_stats(total);
}

std::string format_bleu_line(const BleuScore& s) {
  return fmt::format("{:.2f}\t{:.2f}\t{:.2f}\t{:.2f}\t{:.2f}\t{:.6f}\t{}\t{}", s.score, 100.0 * s.precisions[0],
                     100.0 * s.precisions[1], 100.0 * s.precisions[2], 100.0 * s.precisions[3], s.brevity_penalty,
                     s.hyp_len, s.ref_len);
}

// ---------------------------------------------------------------------------

namespace {

template <typename Pred>
std::optional<double> mean_where(const std::map<Direction, BleuScore>& scores, Pred&& pred) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& [dir, s] : scores) {
    if (!pred(dir)) continue;
    sum += s.score;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace

std::optional<double> ScoreMatrix::avg_x_to_hub() const {
  return mean_where(scores, [&](const Direction& d) { return d.tgt() == hub; });
}
std::optional<double> ScoreMatrix::avg_hub_to_y() const {
  return mean_where(scores, [&](const Direction& d) { return d.src() == hub; });
}
std::optional<double> ScoreMatrix::avg_x_to_y() const {
  return mean_where(scores, [&](const Direction& d) { return !d.involves(hub); });
}
std::optional<double> ScoreMatrix::avg_all() const {
  return mean_where(scores, [](const Direction&) { return true; });
}

void write_score_matrix(const ScoreMatrix& m, const fs::path& path) {
  auto out = open_for_writing(path);
  out << "# src\ttgt\tscore\tp1\tp2\tp3\tp4\tbp\thyp_len\tref_len\n";
  for (const auto& [dir, s] : m.scores) {
    out << fmt::format("{}\t{}\t{:.6f}\t{:.6f}\t{:.6f}\t{:.6f}\t{:.6f}\t{:.6f}\t{}\t{}\n", dir.src().str(),
                       dir.tgt().str(), s.score, s.precisions[0], s.precisions[1], s.precisions[2], s.precisions[3],
                       s.brevity_penalty, s.hyp_len, s.ref_len);
  }
  auto agg = [&](std::string_view name, std::optional<double> v) {
    out << "#avg\t" << name << '\t' << (v ? fmt::format("{:.6f}", *v) : std::string("-")) << '\n';
  };
  agg("x2" + m.hub.str(), m.avg_x_to_hub());
  agg(m.hub.str() + "2y", m.avg_hub_to_y());
  agg("x2y", m.avg_x_to_y());
  agg("all", m.avg_all());
  if (!out) throw Error(Errc::Io, "write failed: " + path.string());
}

namespace {

template <typename T>
T parse_number(std::string_view field, const fs::path& path, std::uint64_t line_no) {
  T value{};
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end)
    throw Error(Errc::MalformedFile, path.string() + ":" + std::to_string(line_no) + ": bad number '" +
                                         std::string(field) + "'");
  return value;
}

}  // namespace

ScoreMatrix read_score_matrix(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!fs::exists(path)) throw Error(Errc::MissingFile, path.string());
    throw Error(Errc::Io, "cannot open " + path.string());
  }
  ScoreMatrix m;
  std::string line;
  std::uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    text::chomp(line);
    if (line.rfind("#avg\tx2", 0) == 0) {
      // the x->hub aggregate row names the hub
      const auto f = text::split(line, '\t');
      if (f.size() == 3 && f[1] != "x2y") m.hub = LangCode(std::string(f[1].substr(2)));
      continue;
    }
    if (line.empty() || line.front() == '#') continue;
    const auto f = text::split(line, '\t');
    if (f.size() != 10)
      throw Error(Errc::MalformedFile, path.string() + ":" + std::to_string(line_no) + ": expected 10 fields");
    Direction dir{LangCode{std::string(f[0])}, LangCode{std::string(f[1])}};
    BleuScore s;
    s.score = parse_number<double>(f[2], path, line_no);
    for (int n = 0; n < kBleuOrder; ++n) s.precisions[n] = parse_number<double>(f[3 + n], path, line_no);
    s.brevity_penalty = parse_number<double>(f[7], path, line_no);
    s.hyp_len = parse_number<std::uint64_t>(f[8], path, line_no);
    s.ref_len = parse_number<std::uint64_t>(f[9], path, line_no);
    m.scores.insert_or_assign(dir, s);
  }
  return m;
}

DevSetMap load_devsets(const CorpusManifest& manifest) {
  DevSetMap out;
  for (const auto& shard : manifest.shards) {
    auto& dev = out[shard.direction];
    PairReader reader(shard);
    while (auto p = reader.next()) {
      dev.sources.push_back(std::move(p->source));
      dev.references.push_back(std::move(p->target));
    }
  }
  return out;
}

ScoreMatrix evaluate_directions(const Translator& t, const DevSetMap& devset, const DecodingConfig& cfg,
                                const DecodeStrategy& strategy, const SubwordTokenizer& tok) {
  const auto* pivot = std::get_if<PivotVia>(&strategy);
  // fail before decoding anything
  for (const auto& [dir, dev] : devset) {
    if (pivot && !dir.involves(pivot->pivot)) {
      if (!t.supports(Direction(dir.src(), pivot->pivot)))
        throw Error(Errc::UnsupportedDirection, Direction(dir.src(), pivot->pivot).str());
      if (!t.supports(Direction(pivot->pivot, dir.tgt())))
        throw Error(Errc::UnsupportedDirection, Direction(pivot->pivot, dir.tgt()).str());
    } else if (!t.supports(dir)) {
      throw Error(Errc::UnsupportedDirection, dir.str());
    }
  }
  ScoreMatrix m;
  if (pivot) m.hub = pivot->pivot;
  for (const auto& [dir, dev] : devset) {
    std::vector<std::string> hyps =
        (pivot && !dir.involves(pivot->pivot))
            ? pivot_translate(t, dev.sources, dir.src(), dir.tgt(), pivot->pivot, cfg).output
            : t.translate(dev.sources, dir, cfg);
    m.scores.emplace(dir, corpus_bleu(hyps, dev.references, tok));
  }
  return m;
}

}  // namespace mtforge
