#include "mtforge/demo.hpp"

#include <fmt/format.h>

#include <fstream>

#include "mtforge/augmentation.hpp"
#include "mtforge/cleaning.hpp"
#include "mtforge/curriculum.hpp"
#include "mtforge/error.hpp"
#include "mtforge/lexicon.hpp"
#include "mtforge/rng.hpp"
#include "mtforge/sampling.hpp"
#include "mtforge/text.hpp"

namespace fs = std::filesystem;

namespace mtforge {

namespace {

const std::vector<LangCode>& demo_languages() {
  static const std::vector<LangCode> langs{LangCode("hr"), LangCode("hu"), LangCode("mk")};
  return langs;
}

std::string english_sentence(Rng& rng) {
  const auto lexicon = core_lexicon();
  const std::size_t n = 4 + uniform_below(rng, 9);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += lexicon[uniform_below(rng, lexicon.size())];
  }
  return s;
}

std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  return out;
}

void close_out(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error(Errc::Io, "write failed: " + path.string());
}

std::string fixed(double v, int digits = 6) { return fmt::format("{:.{}f}", v, digits); }

// Dev-style manifest: one shard per direction, sources and references both
// produced by the exact ciphers from shared English lines.
DevSetMap write_eval_split(const fs::path& split_dir, const std::vector<CipherLanguage>& ciphers, Rng& rng,
                           std::size_t lines) {
  auto encode = [&](const LangCode& lang, const std::string& en) {
    for (const auto& c : ciphers)
      if (c.lang() == lang) return c.encode(en);
    return en;
  };
  std::vector<LangCode> all{english()};
  for (const auto& c : ciphers) all.push_back(c.lang());
  CorpusManifest manifest;
  DevSetMap sets;
  for (const auto& a : all) {
    for (const auto& b : all) {
      if (a == b) continue;
      const Direction dir(a, b);
      const fs::path path = split_dir / (dir.str() + ".tsv");
      auto out = open_out(path);
      DevSet set;
      for (std::size_t i = 0; i < lines; ++i) {
        const auto en = english_sentence(rng);
        set.sources.push_back(encode(a, en));
        set.references.push_back(encode(b, en));
        out << set.sources.back() << '\t' << set.references.back() << '\n';
      }
      close_out(out, path);
      manifest.shards.push_back(ShardEntry{path, dir, OriginPool::Bitext, lines});
      sets.emplace(dir, std::move(set));
    }
  }
  write_manifest(manifest, split_dir / "manifest.tsv");
  return sets;
}

}  // namespace

DemoReport pipeline_demo(const fs::path& out_dir, std::uint64_t seed, const DemoOptions& opts) {
  if (opts.mono_lines == 0 || opts.bitext_lines == 0 || opts.dev_lines == 0)
    throw Error(Errc::InvalidArgument, "demo sizes must be positive");
  fs::create_directories(out_dir);
  DemoReport report;
  auto& summary = report.summary;
  summary.emplace_back("seed", std::to_string(seed));
  summary.emplace_back("direct_noise", fixed(opts.direct_noise, 3));

  const auto& langs = demo_languages();
  std::vector<CipherLanguage> ciphers;
  std::set<LangCode> lang_set{english()};
  for (const auto& l : langs) {
    ciphers.emplace_back(l, cipher_seed(seed, l));
    lang_set.insert(l);
  }
  const TranslatorPtr perfect = make_cipher_translator(ciphers);
  const DecodingConfig decoding;
  const auto tok = SubwordTokenizer::builtin();

  // 1. synthetic English monolingual text and X->en bitext with planted defects
  Rng data_rng(hash_mix(seed, 1));
  const fs::path mono_path = out_dir / "data" / "mono.en.txt";
  {
    auto out = open_out(mono_path);
    for (std::size_t i = 0; i < opts.mono_lines; ++i) out << english_sentence(data_rng) << '\n';
    close_out(out, mono_path);
  }
  CorpusManifest raw;
  for (const auto& c : ciphers) {
    const Direction dir(c.lang(), english());
    const fs::path path = out_dir / "data" / ("bitext." + dir.str() + ".tsv");
    auto out = open_out(path);
    for (std::size_t i = 0; i < opts.bitext_lines; ++i) {
      const auto en = english_sentence(data_rng);
      std::string src = c.encode(en);
      std::string tgt = en;
      if (i % 25 == 7) src += " [UNK]";
      if (i % 40 == 13) tgt = en + " " + en + " " + en + " " + en;
      if (i % 60 == 29) tgt.clear();
      out << src << '\t' << tgt << '\n';
    }
    close_out(out, path);
    raw.shards.push_back(ShardEntry{path, dir, OriginPool::Bitext, opts.bitext_lines});
  }
  write_manifest(raw, out_dir / "data" / "manifest.tsv");
  summary.emplace_back("bitext_pairs", std::to_string(opts.bitext_lines * langs.size()));

  // 2. filtering and shuffling
  FilterConfig filter_cfg;
  const auto filtered = filter_manifest(raw, filter_cfg, tok, out_dir / "filtered", out_dir / "rejects");
  summary.emplace_back("filter_kept", std::to_string(filtered.kept_pairs));
  for (const auto& [reason, n] : filtered.rejected)
    summary.emplace_back(fmt::format("filter_rejected_{}", to_string(reason)), std::to_string(n));
  ShuffleOptions shuffle_opts;
  shuffle_opts.memory_budget_bytes = 4096;
  const auto shuffled = shuffle_dataset(filtered.kept, hash_mix(seed, 2), out_dir / "shuffled.tsv", shuffle_opts);
  summary.emplace_back("shuffled_lines", std::to_string(shuffled.lines));
  summary.emplace_back("shuffle_buckets", std::to_string(shuffled.buckets));

  // 3. augmentation: back-translation, dual-pseudo over every pair, triangulation
  const auto mono = CorpusRef::monolingual(mono_path, english());
  const auto& first_bitext = filtered.kept.shards.front();
  auto plan = merge_plans({plan_backtranslation(mono, langs), plan_dual_pseudo(mono, all_ordered_pairs(langs)),
                           plan_triangulation(CorpusRef::bitext(first_bitext.path, first_bitext.direction),
                                              langs.back(), langs[1])});
  fs::create_directories(out_dir / "augment");
  write_plan(plan, out_dir / "augment" / "plan.tsv");
  const auto augmented = run_plan(plan, *perfect, decoding, out_dir / "augment");
  std::uint64_t aug_pairs = 0;
  for (const auto& s : augmented.shards) aug_pairs += s.declared_line_count;
  summary.emplace_back("augment_shards", std::to_string(augmented.shards.size()));
  summary.emplace_back("augment_pairs", std::to_string(aug_pairs));
  const auto aug_clean =
      filter_manifest(augmented, filter_cfg, tok, out_dir / "augment-clean", out_dir / "augment-rejects");
  summary.emplace_back("augment_kept", std::to_string(aug_clean.kept_pairs));

  // 4. temperature sampling and pool mixing
  CorpusManifest train = filtered.kept;
  for (const auto& s : aug_clean.kept.shards) train.shards.push_back(s);
  write_manifest(train, out_dir / "train.manifest.tsv");
  const auto stats = corpus_stats(train);
  const auto dist = language_distribution(stats, 5.0);
  for (const auto& [lang, q] : dist.probabilities()) summary.emplace_back("q_" + lang.str(), fixed(q, 9));
  {
    const fs::path path = out_dir / "composition.tsv";
    auto out = open_out(path);
    out << "batch\tweights\tlang\tpool\tcount\n";
    auto scheduler = make_scheduler(train, stats, dist, MixtureWeights::normalized(0.33, 0.33, 0.33), 64,
                                    hash_mix(seed, 3));
    for (int b = 0; b < 8; ++b) {
      if (b == 4) scheduler.set_weights(MixtureWeights(0.6, 0.2, 0.2));
      const auto batch = scheduler.next_batch();
      const char* label = b < 4 ? "equal" : "0.6,0.2,0.2";
      for (const auto& [key, n] : batch.composition)
        out << b << '\t' << label << '\t' << key.first.str() << '\t' << to_string(key.second) << '\t' << n << '\n';
    }
    close_out(out, path);
  }

  // 5. curriculum over the X->Y directions
  std::set<Direction> selected;
  for (const auto& d : all_ordered_pairs(langs)) selected.insert(d);
  const auto ladder = stage_schedule(progressive_ladder(selected));
  write_schedule(ladder, out_dir / "schedule.tsv");
  auto shape = ModelShape::initial(ladder.front().encoder_layers, ladder.front().decoder_layers, "init");
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (ladder[i].encoder_layers > shape.encoder_layers)
      shape = grow_encoder(shape, ladder[i].encoder_layers - shape.encoder_layers, ladder[i].stage_id);
  summary.emplace_back("curriculum_stages", std::to_string(ladder.size()));
  summary.emplace_back("model_encoder_layers", std::to_string(shape.encoder_layers));
  summary.emplace_back("model_fresh_layers", std::to_string(shape.count(LayerProvenance::Kind::FreshRandom)));

  // 6. routing on dev, evaluation on devtest
  Rng eval_rng(hash_mix(seed, 4));
  const auto dev = write_eval_split(out_dir / "dev", ciphers, eval_rng, opts.dev_lines);
  const auto devtest = write_eval_split(out_dir / "devtest", ciphers, eval_rng, opts.dev_lines);
  const TranslatorPtr system = with_noise(perfect, opts.direct_noise, hash_mix(seed, 5), selected);
  const auto dev_direct = evaluate_directions(*system, dev, decoding, Direct{}, tok);
  const auto dev_pivot = evaluate_directions(*system, dev, decoding, PivotVia{english()}, tok);
  write_score_matrix(dev_direct, out_dir / "dev.direct.tsv");
  write_score_matrix(dev_pivot, out_dir / "dev.pivot.tsv");
  report.routing = build_routing_table(dev_direct, dev_pivot, english());
  write_routing_table(report.routing, out_dir / "routing.tsv");

  report.devtest_direct = evaluate_directions(*system, devtest, decoding, Direct{}, tok);
  for (const auto& [dir, set] : devtest) {
    const auto hyps = route_translate(*system, report.routing, set.sources, dir, decoding);
    report.devtest_routed.scores.emplace(dir, corpus_bleu(hyps, set.references, tok));
  }
  write_score_matrix(report.devtest_direct, out_dir / "devtest.direct.tsv");
  write_score_matrix(report.devtest_routed, out_dir / "devtest.routed.tsv");

  std::size_t pivoted = 0;
  for (const auto& [dir, entry] : report.routing.entries) pivoted += entry.is_direct() ? 0 : 1;
  summary.emplace_back("routes_pivot", std::to_string(pivoted));
  summary.emplace_back("routes_direct", std::to_string(report.routing.entries.size() - pivoted));
  double min_routed = 100.0;
  for (const auto& [dir, s] : report.devtest_routed.scores) min_routed = std::min(min_routed, s.score);
  summary.emplace_back("devtest_direct_avg_all", fixed(report.devtest_direct.avg_all().value_or(0.0)));
  summary.emplace_back("devtest_routed_avg_all", fixed(report.devtest_routed.avg_all().value_or(0.0)));
  summary.emplace_back("devtest_routed_min", fixed(min_routed));

  const fs::path summary_path = out_dir / "summary.tsv";
  auto out = open_out(summary_path);
  for (const auto& [k, v] : summary) out << k << '\t' << v << '\n';
  close_out(out, summary_path);
  return report;
}

}  // namespace mtforge
