#include "mtforge/translator.hpp"

#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <fstream>

#include "mtforge/error.hpp"
#include "mtforge/lexicon.hpp"
#include "mtforge/rng.hpp"
#include "mtforge/text.hpp"

namespace fs = std::filesystem;

namespace mtforge {

void DecodingConfig::validate() const {
  if (beam_size < 1) throw Error(Errc::InvalidArgument, "beam size must be >= 1");
}

std::vector<std::string> Translator::translate(std::span<const std::string> sentences, const Direction& dir,
                                               const DecodingConfig& cfg) const {
  if (!supports(dir)) throw Error(Errc::UnsupportedDirection, dir.str());
  cfg.validate();
  if (sentences.empty()) return {};
  auto out = do_translate(sentences, dir, cfg);
  if (out.size() != sentences.size())
    throw Error(Errc::LengthMismatch, dir.str() + ": translator returned " + std::to_string(out.size()) +
                                          " lines for " + std::to_string(sentences.size()));
  return out;
}

std::vector<std::string> translate(const Translator& t, std::span<const std::string> sentences,
                                   const Direction& dir, const DecodingConfig& cfg) {
  return t.translate(sentences, dir, cfg);
}

PivotResult pivot_translate(const Translator& t, std::span<const std::string> sentences, const LangCode& src,
                            const LangCode& tgt, const LangCode& pivot, const DecodingConfig& cfg) {
  if (src == pivot || tgt == pivot || src == tgt)
    throw Error(Errc::UnsupportedDirection,
                "pivot route " + src.str() + "->" + pivot.str() + "->" + tgt.str() + " has a degenerate hop");
  const Direction first(src, pivot), second(pivot, tgt);
  // check both hops before doing any work
  if (!t.supports(first)) throw Error(Errc::UnsupportedDirection, first.str());
  if (!t.supports(second)) throw Error(Errc::UnsupportedDirection, second.str());
  PivotResult result;
  result.pivot_text = t.translate(sentences, first, cfg);
  result.output = t.translate(result.pivot_text, second, cfg);
  return result;
}

// ---------------------------------------------------------------------------

namespace {

template <typename Fn>
std::string map_tokens(std::string_view sentence, Fn&& fn) {
  std::string out;
  out.reserve(sentence.size());
  bool first = true;
  for (auto tok : text::split(sentence, ' ')) {
    if (!first) out += ' ';
    first = false;
    out += fn(tok);
  }
  return out;
}

}  // namespace

CipherLanguage::CipherLanguage(LangCode lang, std::uint64_t seed) : lang_(std::move(lang)), seed_(seed) {
  const auto lexicon = core_lexicon();
  std::vector<std::size_t> perm(lexicon.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  Rng rng(seed);
  for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[uniform_below(rng, i)]);
  for (std::size_t i = 0; i < lexicon.size(); ++i) {
    forward_.emplace(lexicon[i], lexicon[perm[i]]);
    backward_.emplace(lexicon[perm[i]], lexicon[i]);
  }
}

std::string_view CipherLanguage::encode_token(std::string_view token) const {
  auto it = forward_.find(token);
  return it == forward_.end() ? token : it->second;
}

std::string_view CipherLanguage::decode_token(std::string_view token) const {
  auto it = backward_.find(token);
  return it == backward_.end() ? token : it->second;
}

std::string CipherLanguage::encode(std::string_view sentence) const {
  return map_tokens(sentence, [this](std::string_view t) { return encode_token(t); });
}

std::string CipherLanguage::decode(std::string_view sentence) const {
  return map_tokens(sentence, [this](std::string_view t) { return decode_token(t); });
}

std::uint64_t cipher_seed(std::uint64_t run_seed, const LangCode& lang) {
  return hash_mix(run_seed, stable_hash(lang.str()));
}

namespace {

class CipherTranslator final : public Translator {
 public:
  explicit CipherTranslator(std::vector<CipherLanguage> langs) : langs_(std::move(langs)) {
    std::vector<LangCode> all{english()};
    for (const auto& c : langs_) all.push_back(c.lang());
    for (const auto& a : all)
      for (const auto& b : all)
        if (a != b) directions_.emplace(a, b);
  }

  std::set<Direction> supported_directions() const override { return directions_; }

 protected:
  std::vector<std::string> do_translate(std::span<const std::string> sentences, const Direction& dir,
                                        const DecodingConfig&) const override {
    const CipherLanguage* from = find(dir.src());
    const CipherLanguage* to = find(dir.tgt());
    std::vector<std::string> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) {
      out.push_back(map_tokens(s, [&](std::string_view t) {
        std::string_view en = from ? from->decode_token(t) : t;
        return to ? to->encode_token(en) : en;
      }));
    }
    return out;
  }

 private:
  const CipherLanguage* find(const LangCode& lang) const {
    for (const auto& c : langs_)
      if (c.lang() == lang) return &c;
    return nullptr;  // English
  }

  std::vector<CipherLanguage> langs_;
  std::set<Direction> directions_;
};

class NoisyTranslator final : public Translator {
 public:
  NoisyTranslator(TranslatorPtr inner, double rate, std::uint64_t seed, std::optional<std::set<Direction>> scope)
      : inner_(std::move(inner)), rate_(rate), seed_(seed), scope_(std::move(scope)) {}

  std::set<Direction> supported_directions() const override { return inner_->supported_directions(); }

 protected:
  std::vector<std::string> do_translate(std::span<const std::string> sentences, const Direction& dir,
                                        const DecodingConfig& cfg) const override {
    auto out = inner_->translate(sentences, dir, cfg);
    if (scope_ && !scope_->count(dir)) return out;
    const std::uint64_t dir_key = hash_mix(seed_, stable_hash(dir.str()));
    for (std::size_t i = 0; i < out.size(); ++i) {
      std::uint64_t j = 0;
      const std::uint64_t sent_key = hash_mix(dir_key, i);
      out[i] = map_tokens(out[i], [&](std::string_view t) -> std::string_view {
        if (t.empty()) return t;
        const bool corrupt = uniform01_from(hash_mix(sent_key, j++)) < rate_;
        return corrupt ? kNoiseMarker : t;
      });
    }
    return out;
  }

 private:
  TranslatorPtr inner_;
  double rate_;
  std::uint64_t seed_;
  std::optional<std::set<Direction>> scope_;
};

class ExecTranslator final : public Translator {
 public:
  ExecTranslator(std::string command, const std::set<LangCode>& langs) : command_(std::move(command)) {
    for (const auto& a : langs)
      for (const auto& b : langs)
        if (a != b) directions_.emplace(a, b);
  }

  std::set<Direction> supported_directions() const override { return directions_; }

 protected:
  std::vector<std::string> do_translate(std::span<const std::string> sentences, const Direction& dir,
                                        const DecodingConfig& cfg) const override {
    static std::atomic<std::uint64_t> counter{0};
    const auto stem = "mtforge-exec-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
    const fs::path in_path = fs::temp_directory_path() / (stem + ".in");
    const fs::path out_path = fs::temp_directory_path() / (stem + ".out");
    struct Cleanup {
      fs::path a, b;
      ~Cleanup() {
        std::error_code ec;
        fs::remove(a, ec);
        fs::remove(b, ec);
      }
    } cleanup{in_path, out_path};

    {
      std::ofstream in(in_path, std::ios::binary);
      for (const auto& s : sentences) {
        if (s.find('\n') != std::string::npos)
          throw Error(Errc::InvalidArgument, "sentence contains a newline");
        in << s << '\n';
      }
      if (!in) throw Error(Errc::Io, "cannot write " + in_path.string());
    }
    std::string cmd = substitute(dir, cfg);
    cmd = "(" + cmd + ") < '" + in_path.string() + "' > '" + out_path.string() + "'";
    const int status = std::system(cmd.c_str());
    if (status != 0) throw Error(Errc::Io, "translator command failed (" + std::to_string(status) + "): " + command_);

    std::ifstream out(out_path, std::ios::binary);
    std::vector<std::string> result;
    std::string line;
    while (std::getline(out, line)) result.push_back(line);
    return result;
  }

 private:
  std::string substitute(const Direction& dir, const DecodingConfig& cfg) const {
    std::string cmd = command_;
    auto replace_all = [&cmd](std::string_view key, const std::string& value) {
      for (auto pos = cmd.find(key); pos != std::string::npos; pos = cmd.find(key, pos + value.size()))
        cmd.replace(pos, key.size(), value);
    };
    replace_all("{src}", dir.src().str());
    replace_all("{tgt}", dir.tgt().str());
    replace_all("{beam}", std::to_string(cfg.beam_size));
    return cmd;
  }

  std::string command_;
  std::set<Direction> directions_;
};

}  // namespace

TranslatorPtr make_cipher_translator(std::vector<CipherLanguage> languages) {
  std::set<LangCode> seen{english()};
  for (const auto& c : languages)
    if (!seen.insert(c.lang()).second) throw Error(Errc::DuplicateLanguage, c.lang().str());
  return std::make_shared<CipherTranslator>(std::move(languages));
}

TranslatorPtr make_cipher_translator(std::uint64_t run_seed, const std::set<LangCode>& langs) {
  std::vector<CipherLanguage> ciphers;
  for (const auto& l : langs)
    if (l != english()) ciphers.emplace_back(l, cipher_seed(run_seed, l));
  return make_cipher_translator(std::move(ciphers));
}

TranslatorPtr with_noise(TranslatorPtr inner, double noise_rate, std::uint64_t seed,
                         std::optional<std::set<Direction>> scope) {
  if (!(noise_rate >= 0.0 && noise_rate <= 1.0)) throw Error(Errc::InvalidArgument, "noise rate must lie in [0, 1]");
  return std::make_shared<NoisyTranslator>(std::move(inner), noise_rate, seed, std::move(scope));
}

TranslatorPtr make_exec_translator(std::string command_template, const std::set<LangCode>& langs) {
  if (command_template.empty()) throw Error(Errc::InvalidArgument, "empty translator command");
  return std::make_shared<ExecTranslator>(std::move(command_template), langs);
}

}  // namespace mtforge
