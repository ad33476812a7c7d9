// mtforge command-line front end. Exit codes: 0 success, 1 usage or
// validation error, 2 I/O error.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "mtforge/augmentation.hpp"
#include "mtforge/cleaning.hpp"
#include "mtforge/corpus.hpp"
#include "mtforge/curriculum.hpp"
#include "mtforge/demo.hpp"
#include "mtforge/error.hpp"
#include "mtforge/evaluation.hpp"
#include "mtforge/routing.hpp"
#include "mtforge/sampling.hpp"
#include "mtforge/text.hpp"
#include "mtforge/translator.hpp"

namespace fs = std::filesystem;
using namespace mtforge;

namespace {

constexpr std::uint64_t kDefaultSeed = 1;

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!fs::exists(path)) throw Error(Errc::MissingFile, path.string());
    throw Error(Errc::Io, "cannot open " + path.string());
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    text::chomp(line);
    lines.push_back(line);
  }
  return lines;
}

SubwordTokenizer tokenizer_from(const std::string& vocab) {
  return vocab.empty() ? SubwordTokenizer::builtin() : SubwordTokenizer::load(vocab);
}

// "cipher:SEED" or "exec:COMMAND"
TranslatorPtr make_translator(const std::string& spec, const std::set<LangCode>& langs) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "cipher") {
    try {
      std::size_t used = 0;
      const auto seed = std::stoull(arg, &used);
      if (used != arg.size()) throw std::invalid_argument(arg);
      return make_cipher_translator(seed, langs);
    } catch (const std::logic_error&) {
      throw Error(Errc::InvalidArgument, "cipher translator needs a numeric seed: " + spec);
    }
  }
  if (kind == "exec") return make_exec_translator(arg, langs);
  throw Error(Errc::InvalidArgument, "unknown translator spec '" + spec + "' (use cipher:SEED or exec:CMD)");
}

std::set<LangCode> languages_of(const std::vector<Direction>& dirs) {
  std::set<LangCode> langs{english()};
  for (const auto& d : dirs) {
    langs.insert(d.src());
    langs.insert(d.tgt());
  }
  return langs;
}

std::vector<LangCode> parse_langs(const std::vector<std::string>& codes) {
  std::vector<LangCode> out;
  for (const auto& c : codes) out.emplace_back(c);
  return out;
}

// Paper-style weights such as 0.33,0.33,0.33 are rescaled; anything further
// than 0.05 from summing to one is rejected.
MixtureWeights parse_lambda(const std::vector<double>& lambda) {
  if (lambda.size() != 3) throw Error(Errc::InvalidWeights, "--lambda takes three comma-separated weights");
  const double sum = lambda[0] + lambda[1] + lambda[2];
  if (std::abs(sum - 1.0) > 0.05) throw Error(Errc::InvalidWeights, fmt::format("weights sum to {}", sum));
  return MixtureWeights::normalized(lambda[0], lambda[1], lambda[2]);
}

void note_seed(std::uint64_t seed, bool explicit_seed) {
  if (!explicit_seed) std::cerr << "seed\t" << seed << " (default)\n";
}

// ---------------------------------------------------------------------------

struct StatsArgs {
  std::string manifest;
  bool verify = false;
};

int run_stats(const StatsArgs& a) {
  const auto manifest = load_manifest(a.manifest);
  if (a.verify) {
    const auto mismatches = verify_manifest(manifest);
    for (const auto& m : mismatches)
      std::cout << "mismatch\t" << m.shard_id << "\tdeclared=" << m.declared << "\tactual=" << m.actual << '\n';
    if (!mismatches.empty()) return 1;
  }
  const auto stats = corpus_stats(manifest);
  for (const auto& [lang, n] : stats.per_language) std::cout << "language\t" << lang.str() << '\t' << n << '\n';
  for (const auto& [dir, n] : stats.per_direction) std::cout << "direction\t" << dir.str() << '\t' << n << '\n';
  return 0;
}

struct FilterArgs {
  std::string manifest, out, rejects, vocab;
  double ratio = 3.0;
  std::size_t max_words = 1024, max_tokens = 512;
  std::vector<std::string> scripts;
  bool tag = false, langid_required = false;
};

int run_filter(const FilterArgs& a) {
  FilterConfig cfg;
  cfg.length_ratio_limit = a.ratio;
  cfg.max_words = a.max_words;
  cfg.max_tokens = a.max_tokens;
  cfg.add_language_tag = a.tag;
  cfg.langid_required = a.langid_required;
  for (const auto& rule : a.scripts) {
    const auto eq = rule.find('=');
    if (eq == std::string::npos) throw Error(Errc::InvalidArgument, "--script expects LANG=Script, got " + rule);
    const auto script = parse_script(std::string_view(rule).substr(eq + 1));
    if (!script) throw Error(Errc::InvalidArgument, "unknown script in " + rule);
    cfg.script_rules[LangCode(rule.substr(0, eq))] = *script;
  }
  cfg.validate();
  const auto manifest = load_manifest(a.manifest);
  const auto tok = tokenizer_from(a.vocab);
  const fs::path rejects = a.rejects.empty() ? fs::path(a.out) / "rejects" : fs::path(a.rejects);
  const auto report = filter_manifest(manifest, cfg, tok, a.out, rejects);
  std::cout << "kept\t" << report.kept_pairs << '\n';
  for (const auto& [reason, n] : report.rejected) std::cout << "rejected\t" << to_string(reason) << '\t' << n << '\n';
  return 0;
}

struct ShuffleArgs {
  std::string manifest, out, scratch;
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t budget = 64ull << 20;
};

int run_shuffle(const ShuffleArgs& a, bool explicit_seed) {
  note_seed(a.seed, explicit_seed);
  const auto manifest = load_manifest(a.manifest);
  ShuffleOptions opts;
  opts.memory_budget_bytes = a.budget;
  if (!a.scratch.empty()) opts.scratch_dir = a.scratch;
  const auto report = shuffle_dataset(manifest, a.seed, a.out, opts);
  std::cout << "lines\t" << report.lines << "\nbuckets\t" << report.buckets << '\n';
  return 0;
}

struct SampleArgs {
  std::string manifest, report;
  double temperature = 5.0;
  std::vector<double> lambda{0.6, 0.2, 0.2};
  std::size_t batch_size = 64, batches = 10;
  std::uint64_t seed = kDefaultSeed;
};

int run_sample(const SampleArgs& a, bool explicit_seed) {
  note_seed(a.seed, explicit_seed);
  const auto weights = parse_lambda(a.lambda);
  const auto manifest = load_manifest(a.manifest);
  const auto stats = corpus_stats(manifest);
  const auto dist = language_distribution(stats, a.temperature);
  for (const auto& [lang, q] : dist.probabilities()) std::cout << "q\t" << lang.str() << '\t' << fmt::format("{:.9f}", q) << '\n';
  auto scheduler = make_scheduler(manifest, stats, dist, weights, a.batch_size, a.seed);
  std::ofstream report;
  if (!a.report.empty()) {
    report.open(a.report, std::ios::binary | std::ios::trunc);
    if (!report) throw Error(Errc::Io, "cannot write " + a.report);
    report << "batch\tlang\tpool\tcount\n";
  }
  std::map<OriginPool, std::uint64_t> pool_totals;
  for (std::size_t b = 0; b < a.batches; ++b) {
    const auto batch = scheduler.next_batch();
    for (const auto& p : batch.pairs) ++pool_totals[p.origin];
    if (report.is_open())
      for (const auto& [key, n] : batch.composition)
        report << b << '\t' << key.first.str() << '\t' << to_string(key.second) << '\t' << n << '\n';
  }
  for (const auto& [pool, n] : pool_totals) std::cout << "pool\t" << to_string(pool) << '\t' << n << '\n';
  if (report.is_open()) {
    report.flush();
    if (!report) throw Error(Errc::Io, "write failed: " + a.report);
  }
  return 0;
}

struct AugmentPlanArgs {
  std::string kind, mono, bitext, direction, new_src, new_tgt, out;
  std::vector<std::string> langs, pairs;
  int round = 1;
};

int run_augment_plan(const AugmentPlanArgs& a) {
  AugmentationPlan plan;
  if (a.kind == "bt" || a.kind == "dual") {
    if (a.mono.empty()) throw Error(Errc::InvalidArgument, "--mono is required for " + a.kind);
    const auto mono = CorpusRef::monolingual(a.mono, english());
    const auto langs = parse_langs(a.langs);
    if (a.kind == "bt") {
      plan = plan_backtranslation(mono, langs);
    } else {
      std::vector<Direction> pairs;
      for (const auto& p : a.pairs) pairs.push_back(Direction::parse(p));
      if (pairs.empty()) pairs = all_ordered_pairs(langs);
      plan = plan_dual_pseudo(mono, pairs);
    }
  } else if (a.kind == "tri") {
    if (a.bitext.empty() || a.direction.empty())
      throw Error(Errc::InvalidArgument, "--bitext and --direction are required for tri");
    std::optional<LangCode> new_src, new_tgt;
    if (!a.new_src.empty()) new_src.emplace(a.new_src);
    if (!a.new_tgt.empty()) new_tgt.emplace(a.new_tgt);
    plan = plan_triangulation(CorpusRef::bitext(a.bitext, Direction::parse(a.direction)), new_src, new_tgt);
  } else {
    throw Error(Errc::InvalidArgument, "--kind must be bt, dual or tri");
  }
  if (a.round < 1) throw Error(Errc::InvalidArgument, "--round must be >= 1");
  plan.round = a.round;
  write_plan(plan, a.out);
  std::cout << "tasks\t" << plan.tasks.size() << '\n';
  for (const auto& d : plan.needed_directions()) std::cout << "needs\t" << d.str() << '\n';
  return 0;
}

struct AugmentRunArgs {
  std::string plan, translator, out;
  int beam = 4;
};

int run_augment_run(const AugmentRunArgs& a) {
  const auto plan = read_plan(a.plan);
  const auto translator = make_translator(a.translator, languages_of(plan.needed_directions()));
  DecodingConfig cfg;
  cfg.beam_size = a.beam;
  const auto manifest = run_plan(plan, *translator, cfg, a.out);
  for (const auto& s : manifest.shards)
    std::cout << "shard\t" << s.path.filename().string() << '\t' << s.direction.str() << '\t' << to_string(s.origin)
              << '\t' << s.declared_line_count << '\n';
  return 0;
}

struct BleuArgs {
  std::string hyp, ref, vocab;
};

int run_bleu(const BleuArgs& a) {
  const auto hyps = read_lines(a.hyp);
  const auto refs = read_lines(a.ref);
  std::cout << format_bleu_line(corpus_bleu(hyps, refs, tokenizer_from(a.vocab))) << '\n';
  return 0;
}

struct RouteBuildArgs {
  std::string direct_scores, pivot_scores, translator, devset, vocab, out, scores_dir;
  std::string pivot = "en";
  double direct_noise = 0.0;
  std::uint64_t seed = kDefaultSeed;
};

int run_route_build(const RouteBuildArgs& a) {
  const LangCode pivot(a.pivot);
  ScoreMatrix direct, pivoted;
  if (!a.direct_scores.empty() || !a.pivot_scores.empty()) {
    if (a.direct_scores.empty() || a.pivot_scores.empty())
      throw Error(Errc::InvalidArgument, "--direct-scores and --pivot-scores go together");
    direct = read_score_matrix(a.direct_scores);
    pivoted = read_score_matrix(a.pivot_scores);
  } else {
    if (a.translator.empty() || a.devset.empty())
      throw Error(Errc::InvalidArgument, "give --translator and --devset, or --direct-scores and --pivot-scores");
    const auto devsets = load_devsets(load_manifest(a.devset));
    std::vector<Direction> dirs;
    std::set<Direction> non_pivot;
    for (const auto& [dir, set] : devsets) {
      dirs.push_back(dir);
      if (!dir.involves(pivot)) non_pivot.insert(dir);
    }
    auto langs = languages_of(dirs);
    langs.insert(pivot);
    TranslatorPtr t = make_translator(a.translator, langs);
    if (a.direct_noise > 0.0) t = with_noise(t, a.direct_noise, a.seed, non_pivot);
    const auto tok = tokenizer_from(a.vocab);
    direct = evaluate_directions(*t, devsets, {}, Direct{}, tok);
    pivoted = evaluate_directions(*t, devsets, {}, PivotVia{pivot}, tok);
    if (!a.scores_dir.empty()) {
      fs::create_directories(a.scores_dir);
      write_score_matrix(direct, fs::path(a.scores_dir) / "direct.tsv");
      write_score_matrix(pivoted, fs::path(a.scores_dir) / "pivot.tsv");
    }
  }
  const auto table = build_routing_table(direct, pivoted, pivot);
  write_routing_table(table, a.out);
  for (const auto& [dir, e] : table.entries)
    std::cout << dir.str() << '\t' << (e.is_direct() ? "direct" : "pivot") << '\n';
  return 0;
}

struct RouteTranslateArgs {
  std::string table, translator, direction, input, out;
};

int run_route_translate(const RouteTranslateArgs& a) {
  const auto table = read_routing_table(a.table);
  std::vector<Direction> dirs;
  for (const auto& [dir, e] : table.entries) {
    dirs.push_back(dir);
    if (e.pivot) dirs.emplace_back(dir.src(), *e.pivot);
  }
  const auto t = make_translator(a.translator, languages_of(dirs));
  const auto input = read_lines(a.input);
  const auto output = route_translate(*t, table, input, Direction::parse(a.direction));
  if (a.out.empty()) {
    for (const auto& line : output) std::cout << line << '\n';
    return 0;
  }
  std::ofstream out(a.out, std::ios::binary | std::ios::trunc);
  for (const auto& line : output) out << line << '\n';
  out.flush();
  if (!out) throw Error(Errc::Io, "cannot write " + a.out);
  return 0;
}

int run_curriculum_check(const std::string& schedule) {
  const auto stages = stage_schedule(load_schedule(schedule));
  for (const auto& s : stages)
    std::cout << "stage\t" << s.stage_id << "\t"
              << (s.data_tier.is_noisy() ? std::string("noisy") : fmt::format("clean:{}", *s.data_tier.ratio_limit))
              << '\t' << (s.directions.is_all() ? "all" : fmt::format("{} directions", s.directions.selected->size()))
              << '\t' << s.encoder_layers << '\t' << s.decoder_layers << '\n';
  std::cout << "ok\n";
  return 0;
}

struct DemoArgs {
  std::string out;
  std::uint64_t seed = 42;
  double direct_noise = 0.0;
};

int run_demo(const DemoArgs& a) {
  DemoOptions opts;
  opts.direct_noise = a.direct_noise;
  const auto report = pipeline_demo(a.out, a.seed, opts);
  for (const auto& [k, v] : report.summary) std::cout << k << '\t' << v << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mtforge: multilingual MT corpus toolkit"};
  app.require_subcommand(1);
  int code = 0;

  StatsArgs stats;
  auto* c_stats = app.add_subcommand("stats", "Per-language and per-direction sentence counts");
  c_stats->add_option("--manifest", stats.manifest, "Corpus manifest")->required();
  c_stats->add_flag("--verify", stats.verify, "Recount shards against declared line counts");
  c_stats->callback([&] { code = run_stats(stats); });

  FilterArgs filter;
  auto* c_filter = app.add_subcommand("filter", "Filter a corpus into kept and rejected pairs");
  c_filter->add_option("--manifest", filter.manifest)->required();
  c_filter->add_option("--out", filter.out, "Output directory for kept shards")->required();
  c_filter->add_option("--rejects", filter.rejects, "Directory for rejected pairs (default OUT/rejects)");
  c_filter->add_option("--ratio", filter.ratio, "Length-ratio limit (1.5, 2.0, 2.5 or 3.0)");
  c_filter->add_option("--max-words", filter.max_words);
  c_filter->add_option("--max-tokens", filter.max_tokens);
  c_filter->add_option("--script", filter.scripts, "Script rule LANG=ISO15924, e.g. sr=Cyrl");
  c_filter->add_option("--vocab", filter.vocab, "Tokenizer vocabulary (piece<TAB>score)");
  c_filter->add_flag("--tag", filter.tag, "Prefix kept sources with the target-language tag");
  c_filter->add_flag("--langid-required", filter.langid_required, "Reject pairs without a .langid verdict");
  c_filter->callback([&] { code = run_filter(filter); });

  ShuffleArgs shuffle;
  auto* c_shuffle = app.add_subcommand("shuffle", "Shuffle all shards of a manifest into one file");
  c_shuffle->add_option("--manifest", shuffle.manifest)->required();
  c_shuffle->add_option("--out", shuffle.out)->required();
  auto* shuffle_seed = c_shuffle->add_option("--seed", shuffle.seed);
  c_shuffle->add_option("--memory-budget", shuffle.budget, "Bytes per in-memory bucket");
  c_shuffle->add_option("--scratch", shuffle.scratch, "Scratch directory");
  c_shuffle->callback([&] { code = run_shuffle(shuffle, shuffle_seed->count() > 0); });

  SampleArgs sample;
  auto* c_sample = app.add_subcommand("sample", "Draw temperature-balanced mixed batches");
  c_sample->add_option("--manifest", sample.manifest)->required();
  c_sample->add_option("--temperature", sample.temperature);
  c_sample->add_option("--lambda", sample.lambda, "Pool weights bitext,bt,dual")->delimiter(',')->expected(3);
  c_sample->add_option("--batch-size", sample.batch_size);
  c_sample->add_option("--batches", sample.batches);
  auto* sample_seed = c_sample->add_option("--seed", sample.seed);
  c_sample->add_option("--report", sample.report, "Per-batch composition TSV");
  c_sample->callback([&] { code = run_sample(sample, sample_seed->count() > 0); });

  auto* c_augment = app.add_subcommand("augment", "Plan and run synthetic-data generation");
  c_augment->require_subcommand(1);
  AugmentPlanArgs aplan;
  auto* c_aplan = c_augment->add_subcommand("plan", "Write an augmentation plan");
  c_aplan->add_option("--kind", aplan.kind)->required()->check(CLI::IsMember({"bt", "dual", "tri"}));
  c_aplan->add_option("--mono", aplan.mono, "English monolingual corpus (bt, dual)");
  c_aplan->add_option("--langs", aplan.langs, "Target languages (bt, dual)")->delimiter(',');
  c_aplan->add_option("--pairs", aplan.pairs, "X-Y pairs for dual (default: all ordered pairs)")->delimiter(',');
  c_aplan->add_option("--bitext", aplan.bitext, "Bitext shard (tri)");
  c_aplan->add_option("--direction", aplan.direction, "Bitext direction X1-Y1 (tri)");
  c_aplan->add_option("--new-src", aplan.new_src, "X2 for (X2, Y1) (tri)");
  c_aplan->add_option("--new-tgt", aplan.new_tgt, "Y2 for (X1, Y2) (tri)");
  c_aplan->add_option("--round", aplan.round);
  c_aplan->add_option("--out", aplan.out)->required();
  c_aplan->callback([&] { code = run_augment_plan(aplan); });
  AugmentRunArgs arun;
  auto* c_arun = c_augment->add_subcommand("run", "Execute a plan");
  c_arun->add_option("--plan", arun.plan)->required();
  c_arun->add_option("--translator", arun.translator, "cipher:SEED or exec:CMD")->required();
  c_arun->add_option("--beam", arun.beam);
  c_arun->add_option("--out", arun.out)->required();
  c_arun->callback([&] { code = run_augment_run(arun); });

  BleuArgs bleu;
  auto* c_bleu = app.add_subcommand("bleu", "Corpus BLEU on subword tokens");
  c_bleu->add_option("--hyp", bleu.hyp)->required();
  c_bleu->add_option("--ref", bleu.ref)->required();
  c_bleu->add_option("--vocab", bleu.vocab);
  c_bleu->callback([&] { code = run_bleu(bleu); });

  auto* c_route = app.add_subcommand("route", "Hybrid direct/pivot routing");
  c_route->require_subcommand(1);
  RouteBuildArgs rbuild;
  auto* c_rbuild = c_route->add_subcommand("build", "Build a routing table from dev scores");
  c_rbuild->add_option("--direct-scores", rbuild.direct_scores);
  c_rbuild->add_option("--pivot-scores", rbuild.pivot_scores);
  c_rbuild->add_option("--translator", rbuild.translator, "cipher:SEED or exec:CMD");
  c_rbuild->add_option("--devset", rbuild.devset, "Dev manifest, one shard per direction");
  c_rbuild->add_option("--pivot", rbuild.pivot);
  c_rbuild->add_option("--direct-noise", rbuild.direct_noise, "Noise rate on non-pivot direct decoding");
  c_rbuild->add_option("--seed", rbuild.seed);
  c_rbuild->add_option("--vocab", rbuild.vocab);
  c_rbuild->add_option("--scores-out", rbuild.scores_dir, "Directory for the dev score matrices");
  c_rbuild->add_option("--out", rbuild.out)->required();
  c_rbuild->callback([&] { code = run_route_build(rbuild); });
  RouteTranslateArgs rtrans;
  auto* c_rtrans = c_route->add_subcommand("translate", "Translate with a routing table");
  c_rtrans->add_option("--table", rtrans.table)->required();
  c_rtrans->add_option("--translator", rtrans.translator)->required();
  c_rtrans->add_option("--direction", rtrans.direction)->required();
  c_rtrans->add_option("--input", rtrans.input)->required();
  c_rtrans->add_option("--out", rtrans.out, "Output file (default stdout)");
  c_rtrans->callback([&] { code = run_route_translate(rtrans); });

  auto* c_curriculum = app.add_subcommand("curriculum", "Training-schedule tools");
  c_curriculum->require_subcommand(1);
  std::string schedule;
  auto* c_check = c_curriculum->add_subcommand("check", "Validate a stage schedule");
  c_check->add_option("--schedule", schedule)->required();
  c_check->callback([&] { code = run_curriculum_check(schedule); });

  DemoArgs demo;
  auto* c_demo = app.add_subcommand("demo", "Run the whole pipeline on cipher languages");
  c_demo->add_option("--seed", demo.seed);
  c_demo->add_option("--out", demo.out)->required();
  c_demo->add_option("--direct-noise", demo.direct_noise);
  c_demo->callback([&] { code = run_demo(demo); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.is_io() ? 2 : 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return code;
}
