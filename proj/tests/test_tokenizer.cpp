#include <doctest.h>

#include "mtforge/error.hpp"
#include "mtforge/rng.hpp"
#include "mtforge/text.hpp"
#include "mtforge/tokenizer.hpp"
#include "support.hpp"

using namespace mtforge;
using Tokens = std::vector<std::string>;

namespace {

const std::string M(kMetaSpace);

// Random strings mixing ASCII, spaces, multi-byte letters from several
// scripts, combining marks, the meta symbol itself and raw invalid bytes.
std::string random_text(Rng& rng) {
  static const std::uint32_t pool[] = {'a',    'b',    'z',     ' ',    ' ',    '.',    '\t',   0xE9,
                                       0x301,  0x416,  0x439,   0x3B1,  0x5D0,  0x627,  0x64E,  0x915,
                                       0x94D,  0xB95,  0xBCD,   0x4E2D, 0x2581, 0x200D, 0xFE0F, 0x1F600,
                                       0x10FFFF, 0x7F, 0x1};
  std::string s;
  const auto n = uniform_below(rng, 24);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto r = uniform_below(rng, 20);
    if (r == 0) {
      s += static_cast<char>(0x80 + uniform_below(rng, 0x80));  // stray byte
    } else if (r == 1) {
      text::append_utf8(s, static_cast<std::uint32_t>(0x20 + uniform_below(rng, 0xD7FF - 0x20)));
    } else {
      text::append_utf8(s, pool[uniform_below(rng, std::size(pool))]);
    }
  }
  return s;
}

}  // namespace

TEST_SUITE("tokenizer") {

TEST_CASE("in-vocabulary words come out whole") {
  const auto tok = SubwordTokenizer::from_words({"the", "cat", "sat"});
  CHECK(tok.tokenize("the cat sat") == Tokens{M + "the", M + "cat", M + "sat"});
  CHECK(tok.detokenize(tok.tokenize("the cat sat")) == "the cat sat");
}

TEST_CASE("unseen words fall back to characters and round-trip") {
  const auto tok = SubwordTokenizer::from_words({"the"});
  CHECK(tok.tokenize("the dog") == Tokens{M + "the", M, "d", "o", "g"});
  CHECK(tok.detokenize(tok.tokenize("the dog")) == "the dog");
  const SubwordTokenizer chars;
  CHECK(chars.tokenize("ab") == Tokens{M, "a", "b"});
}

TEST_CASE("empty string gives no tokens") {
  const auto tok = SubwordTokenizer::builtin();
  CHECK(tok.tokenize("").empty());
  CHECK(tok.detokenize({}).empty());
}

TEST_CASE("longest match wins") {
  const SubwordTokenizer tok({{M + "un", -1}, {M + "unit", -1}, {"s", -1}});
  CHECK(tok.tokenize("units") == Tokens{M + "unit", "s"});
  CHECK(tok.tokenize("uno") == Tokens{M + "un", "o"});
}

TEST_CASE("combining marks stay with their base") {
  const SubwordTokenizer chars;
  const std::string e_acute = "e\xCC\x81";
  CHECK(chars.tokenize(e_acute) == Tokens{M, e_acute});
  // a mark at the very start attaches to the boundary marker
  CHECK(chars.tokenize("\xCC\x81x") == Tokens{M + "\xCC\x81", "x"});
  CHECK(chars.detokenize(chars.tokenize("\xCC\x81x")) == "\xCC\x81x");
}

TEST_CASE("literal meta symbols and invalid bytes are escaped") {
  const SubwordTokenizer chars;
  CHECK(chars.tokenize(M) == Tokens{M, std::string(kLiteralMetaPiece)});
  CHECK(chars.tokenize("\xFF") == Tokens{M, "<0xFF>"});
  CHECK(chars.detokenize(chars.tokenize(" \xFF" + M + " ")) == " \xFF" + M + " ");
}

TEST_CASE("reserved or empty vocabulary pieces are rejected") {
  using V = std::vector<std::pair<std::string, double>>;
  CHECK(testing::code_of([] { SubwordTokenizer(V{{"", 0}}); }) == Errc::InvalidArgument);
  CHECK(testing::code_of([] { SubwordTokenizer(V{{"<0x41>", 0}}); }) == Errc::InvalidArgument);
  CHECK(testing::code_of([] { SubwordTokenizer(V{{std::string(kLiteralMetaPiece), 0}}); }) == Errc::InvalidArgument);
}

TEST_CASE("vocabulary files load") {
  testing::TempDir dir;
  testing::write_text(dir / "v.vocab", M + "hello\t-1.5\nlo\t-2\n\nx\n");
  const auto tok = SubwordTokenizer::load(dir / "v.vocab");
  CHECK(tok.vocab_size() == 3);
  CHECK(tok.contains(M + "hello"));
  CHECK(tok.tokenize("hello") == Tokens{M + "hello"});
  testing::write_text(dir / "bad.vocab", "a\tnot-a-number\n");
  CHECK(testing::code_of([&] { SubwordTokenizer::load(dir / "bad.vocab"); }) == Errc::MalformedFile);
  CHECK(testing::code_of([&] { SubwordTokenizer::load(dir / "none.vocab"); }) == Errc::MissingFile);
}

TEST_CASE("round-trip on 10^4 random Unicode strings") {
  const SubwordTokenizer chars;
  const auto builtin = SubwordTokenizer::builtin();
  Rng rng(2024);
  int failures = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto s = random_text(rng);
    if (chars.detokenize(chars.tokenize(s)) != s) ++failures;
    if (builtin.detokenize(builtin.tokenize(s)) != s) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("truncate_tokens") {
  const auto tok = SubwordTokenizer::builtin();
  CHECK(truncate_tokens("the cat sat", tok, 512) == "the cat sat");
  CHECK(truncate_tokens("the cat sat", tok, 1) == "the");
  CHECK(truncate_tokens("the cat sat", tok, 2) == "the cat");
  CHECK(testing::code_of([&] { truncate_tokens("x", tok, 0); }) == Errc::InvalidArgument);

  std::string long_text;
  for (int i = 0; i < 600; ++i) long_text += (i ? " " : "") + std::string("the");
  REQUIRE(tok.tokenize(long_text).size() == 600);
  const auto cut = truncate_tokens(long_text, tok, 512);
  const auto cut_tokens = tok.tokenize(cut);
  CHECK(cut_tokens.size() == 512);
  const auto all_tokens = tok.tokenize(long_text);
  CHECK(cut_tokens == Tokens(all_tokens.begin(), all_tokens.begin() + 512));
}

TEST_CASE("truncation never increases the token count") {
  const auto tok = SubwordTokenizer::builtin();
  Rng rng(99);
  for (int i = 0; i < 2000; ++i) {
    const auto s = random_text(rng);
    const auto limit = 1 + uniform_below(rng, 10);
    const auto tokens = tok.tokenize(s);
    const auto before = tokens.size();
    const auto after = tok.tokenize(truncate_tokens(s, tok, limit)).size();
    CHECK(after <= std::min<std::size_t>(before, limit));
    // a bare leading boundary marker detokenizes to nothing
    if (before > 0 && tokens.front() != kMetaSpace) CHECK(after == std::min<std::size_t>(before, limit));
  }
}

}  // TEST_SUITE
