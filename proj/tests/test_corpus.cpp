#include <doctest.h>

#include <algorithm>

#include "mtforge/corpus.hpp"
#include "mtforge/error.hpp"
#include "support.hpp"

using namespace mtforge;
using testing::code_of;
using testing::TempDir;
using testing::write_text;

namespace {

std::string pairs_text(int n, const std::string& prefix = "s") {
  std::string out;
  for (int i = 1; i <= n; ++i) out += prefix + std::to_string(i) + "\tt" + std::to_string(i) + "\n";
  return out;
}

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("LangCode accepts 2-8 lowercase letters only") {
  CHECK(LangCode("en").str() == "en");
  CHECK(LangCode("abcdefgh").str() == "abcdefgh");
  for (const char* bad : {"", "e", "EN", "e1", "abcdefghi", "h r", "sr-Cyrl"})
    CHECK(code_of([&] { LangCode{bad}; }) == Errc::InvalidLangCode);
}

TEST_CASE("Direction rejects src == tgt and parses both arrow forms") {
  CHECK(code_of([] { Direction(LangCode("en"), LangCode("en")); }) == Errc::InvalidDirection);
  const auto d = Direction::parse("hr-en");
  CHECK(d.src().str() == "hr");
  CHECK(d.tgt().str() == "en");
  CHECK(Direction::parse("hr→en") == d);
  CHECK(d.str() == "hr-en");
  CHECK(d.involves(english()));
  CHECK_FALSE(d.involves(LangCode("hu")));
  CHECK(code_of([] { Direction::parse("hren"); }) == Errc::InvalidDirection);
  CHECK(code_of([] { Direction::parse("en-en"); }) == Errc::InvalidDirection);
}

TEST_CASE("origin pools round-trip through their names") {
  for (OriginPool p : kAllPools) CHECK(parse_origin(to_string(p)) == p);
  CHECK(parse_origin("bt") == OriginPool::BackTranslation);
  CHECK(parse_origin("dual") == OriginPool::DualPseudo);
  CHECK_FALSE(parse_origin("mono").has_value());
}

TEST_CASE("load_manifest keeps order and resolves relative paths") {
  TempDir dir;
  write_text(dir / "m.tsv",
             "# path\tsrc\ttgt\torigin\tcount\n"
             "a.tsv\thr\ten\tbitext\t3\n"
             "\n"
             "sub/b.tsv\ten\thr\tback-translation\t2\n");
  const auto m = load_manifest(dir / "m.tsv");
  REQUIRE(m.shards.size() == 2);
  CHECK(m.shards[0].path == dir / "a.tsv");
  CHECK(m.shards[0].direction == Direction::parse("hr-en"));
  CHECK(m.shards[0].origin == OriginPool::Bitext);
  CHECK(m.shards[0].declared_line_count == 3);
  CHECK(m.shards[1].path == dir / "sub/b.tsv");
  CHECK(m.shards[1].origin == OriginPool::BackTranslation);
  CHECK(m.shard(m.shards[1].id()).declared_line_count == 2);
  CHECK(code_of([&] { m.shard("nope"); }) == Errc::UnknownShard);
}

TEST_CASE("load_manifest errors") {
  TempDir dir;
  CHECK(code_of([&] { load_manifest(dir / "missing.tsv"); }) == Errc::MissingFile);

  write_text(dir / "dup.tsv", "a.tsv\thr\ten\tbitext\t1\na.tsv\ten\thr\tbitext\t1\n");
  CHECK(code_of([&] { load_manifest(dir / "dup.tsv"); }) == Errc::DuplicateShardPath);

  write_text(dir / "same.tsv", "a.tsv\ten\ten\tbitext\t1\n");
  CHECK(code_of([&] { load_manifest(dir / "same.tsv"); }) == Errc::MalformedManifest);

  for (const char* body : {"a.tsv\thr\ten\tbitext\n", "a.tsv\thr\ten\tmono\t1\n", "a.tsv\tHR\ten\tbitext\t1\n",
                           "a.tsv\thr\ten\tbitext\t-1\n", "a.tsv\thr\ten\tbitext\tx\n"}) {
    write_text(dir / "bad.tsv", body);
    CHECK(code_of([&] { load_manifest(dir / "bad.tsv"); }) == Errc::MalformedManifest);
  }

  write_text(dir / "line.tsv", "# header\na.tsv\thr\ten\tbitext\t1\nb.tsv\thr\ten\tnope\t1\n");
  try {
    load_manifest(dir / "line.tsv");
    FAIL("expected MalformedManifest");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
}

TEST_CASE("write_manifest round-trips with relative paths") {
  TempDir dir;
  CorpusManifest m;
  m.shards.push_back({dir / "x" / "a.tsv", Direction::parse("hr-en"), OriginPool::Bitext, 4});
  m.shards.push_back({dir / "b.tsv", Direction::parse("en-hu"), OriginPool::DualPseudo, 0});
  write_manifest(m, dir / "m.tsv");
  const auto text = testing::read_text(dir / "m.tsv");
  CHECK(text.find(dir.path().string()) == std::string::npos);
  CHECK(text.find("x/a.tsv\thr\ten\tbitext\t4\n") != std::string::npos);
  const auto back = load_manifest(dir / "m.tsv");
  REQUIRE(back.shards.size() == 2);
  CHECK(back.shards[0].path == m.shards[0].path);
  CHECK(back.shards[1].direction == m.shards[1].direction);
  CHECK(back.shards[1].origin == OriginPool::DualPseudo);
}

TEST_CASE("read_pairs enumerates lines in order") {
  TempDir dir;
  write_text(dir / "a.tsv", "one\tuno\ntwo\tdos\nthree\ttres\n");
  write_text(dir / "m.tsv", "a.tsv\ten\tes\tbitext\t3\n");
  const auto m = load_manifest(dir / "m.tsv");
  auto reader = read_pairs(m, m.shards[0].id());
  std::vector<SentencePair> got;
  while (auto p = reader.next()) got.push_back(*p);
  REQUIRE(got.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(got[i].line_no == i + 1);
  CHECK(got[2].source == "three");
  CHECK(got[2].target == "tres");
  CHECK(got[0].direction == Direction::parse("en-es"));
  CHECK(got[0].shard_id == m.shards[0].id());
}

TEST_CASE("read_pairs edge cases") {
  TempDir dir;
  write_text(dir / "empty.tsv", "");
  write_text(dir / "notab.tsv", "hello world\n");
  write_text(dir / "twotabs.tsv", "a\tb\n" "a\tb\tc\n");
  write_text(dir / "crlf.tsv", "a\tb\r\nc\td");
  write_text(dir / "m.tsv",
             "empty.tsv\thr\ten\tbitext\t0\nnotab.tsv\thr\ten\tbitext\t1\n"
             "twotabs.tsv\thr\ten\tbitext\t2\ncrlf.tsv\thr\ten\tbitext\t2\n");
  const auto m = load_manifest(dir / "m.tsv");

  auto empty = PairReader(m.shards[0]);
  CHECK_FALSE(empty.next().has_value());

  auto notab = PairReader(m.shards[1]);
  try {
    notab.next();
    FAIL("expected MalformedLine");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MalformedLine);
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }

  auto twotabs = PairReader(m.shards[2]);
  CHECK(twotabs.next().has_value());
  CHECK(code_of([&] { twotabs.next(); }) == Errc::MalformedLine);

  auto crlf = PairReader(m.shards[3]);
  CHECK(crlf.next()->target == "b");
  const auto last = crlf.next();
  REQUIRE(last.has_value());
  CHECK(last->source == "c");
  CHECK(last->target == "d");
  CHECK_FALSE(crlf.next().has_value());

  ShardEntry gone{dir / "gone.tsv", Direction::parse("hr-en"), OriginPool::Bitext, 0};
  CHECK(code_of([&] { PairReader r(gone); }) == Errc::MissingFile);
}

TEST_CASE("corpus_stats counts both sides") {
  TempDir dir;
  write_text(dir / "a.tsv", pairs_text(10));
  write_text(dir / "b.tsv", pairs_text(5));

  write_text(dir / "one.tsv", "a.tsv\thr\ten\tbitext\t10\n");
  const auto one = corpus_stats(load_manifest(dir / "one.tsv"));
  CHECK(one.language_count(LangCode("hr")) == 10);
  CHECK(one.language_count(english()) == 10);
  CHECK(one.direction_count(Direction::parse("hr-en")) == 10);

  write_text(dir / "two.tsv", "a.tsv\thr\ten\tbitext\t10\nb.tsv\ten\thu\tbitext\t5\n");
  const auto two = corpus_stats(load_manifest(dir / "two.tsv"));
  CHECK(two.language_count(english()) == 15);
  CHECK(two.language_count(LangCode("hr")) == 10);
  CHECK(two.language_count(LangCode("hu")) == 5);
  CHECK(two.language_count(LangCode("mk")) == 0);

  const auto none = corpus_stats(CorpusManifest{});
  CHECK(none.per_language.empty());
  CHECK(none.per_direction.empty());
}

TEST_CASE("corpus_stats is order-invariant and sums to twice the pairs") {
  TempDir dir;
  CorpusManifest m;
  const char* dirs[] = {"hr-en", "en-hu", "hu-mk", "mk-hr", "hr-en"};
  for (int i = 0; i < 5; ++i) {
    const auto path = dir / ("s" + std::to_string(i) + ".tsv");
    write_text(path, pairs_text(3 + 7 * i));
    m.shards.push_back({path, Direction::parse(dirs[i]), OriginPool::Bitext, 0});
  }
  const auto base = corpus_stats(m);
  std::uint64_t sum_lang = 0, sum_dir = 0;
  for (const auto& [l, n] : base.per_language) sum_lang += n;
  for (const auto& [d, n] : base.per_direction) sum_dir += n;
  CHECK(sum_lang == 2 * sum_dir);
  CHECK(base.direction_count(Direction::parse("hr-en")) == 3 + 31);

  auto shuffled = m;
  std::reverse(shuffled.shards.begin(), shuffled.shards.end());
  std::rotate(shuffled.shards.begin(), shuffled.shards.begin() + 2, shuffled.shards.end());
  const auto other = corpus_stats(shuffled);
  CHECK(other.per_language == base.per_language);
  CHECK(other.per_direction == base.per_direction);
}

TEST_CASE("count_lines and verify_manifest") {
  TempDir dir;
  write_text(dir / "a.tsv", "a\tb\nc\td");
  write_text(dir / "b.tsv", "");
  CHECK(count_lines(dir / "a.tsv") == 2);
  CHECK(count_lines(dir / "b.tsv") == 0);
  CorpusManifest m;
  m.shards.push_back({dir / "a.tsv", Direction::parse("hr-en"), OriginPool::Bitext, 2});
  m.shards.push_back({dir / "b.tsv", Direction::parse("hu-en"), OriginPool::Bitext, 4});
  const auto mismatches = verify_manifest(m);
  REQUIRE(mismatches.size() == 1);
  CHECK(mismatches[0].shard_id == m.shards[1].id());
  CHECK(mismatches[0].declared == 4);
  CHECK(mismatches[0].actual == 0);
  CHECK(code_of([&] { count_lines(dir / "nope"); }) == Errc::MissingFile);
}

}  // TEST_SUITE
