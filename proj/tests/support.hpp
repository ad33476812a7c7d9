#pragma once

#include <stdlib.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mtforge/error.hpp"
#include "mtforge/translator.hpp"

namespace testing {

namespace fs = std::filesystem;

// Runs `fn` and returns the code of the mtforge::Error it throws; nullopt if
// it returns normally.
template <typename Fn>
std::optional<mtforge::Errc> code_of(Fn&& fn) {
  try {
    fn();
  } catch (const mtforge::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "mtforge-test-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_text(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

// Forwards to another translator and records how many passes each direction
// received.
class CountingTranslator final : public mtforge::Translator {
 public:
  explicit CountingTranslator(mtforge::TranslatorPtr inner) : inner_(std::move(inner)) {}

  std::set<mtforge::Direction> supported_directions() const override { return inner_->supported_directions(); }

  std::size_t calls(const mtforge::Direction& dir) const {
    std::lock_guard lock(mu_);
    auto it = calls_.find(dir);
    return it == calls_.end() ? 0 : it->second;
  }
  std::size_t total_calls() const {
    std::lock_guard lock(mu_);
    std::size_t n = 0;
    for (const auto& [d, c] : calls_) n += c;
    return n;
  }
  std::size_t distinct_directions() const {
    std::lock_guard lock(mu_);
    return calls_.size();
  }

 protected:
  std::vector<std::string> do_translate(std::span<const std::string> sentences, const mtforge::Direction& dir,
                                        const mtforge::DecodingConfig& cfg) const override {
    {
      std::lock_guard lock(mu_);
      ++calls_[dir];
    }
    return inner_->translate(sentences, dir, cfg);
  }

 private:
  mtforge::TranslatorPtr inner_;
  mutable std::mutex mu_;
  mutable std::map<mtforge::Direction, std::size_t> calls_;
};

}  // namespace testing
