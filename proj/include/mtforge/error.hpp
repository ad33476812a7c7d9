#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mtforge {

enum class Errc {
  // I/O class (CLI exit code 2)
  MissingFile,
  Io,
  InsufficientScratchSpace,
  // validation class (CLI exit code 1)
  MalformedManifest,
  DuplicateShardPath,
  MalformedLine,
  MalformedFile,
  InvalidLangCode,
  InvalidDirection,
  UnknownShard,
  AlreadyTagged,
  EmptyStats,
  NonPositiveTemperature,
  InvalidWeights,
  EmptyPoolWithPositiveWeight,
  UnsupportedDirection,
  DuplicateLanguage,
  EmptyMonolingual,
  EnglishInPair,
  NothingToDo,
  LengthMismatch,
  EmptyCorpus,
  DirectionSetMismatch,
  UnknownDirection,
  EmptyList,
  InvalidStage,
  InvalidSchedule,
  InvalidArgument,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

  bool is_io() const noexcept {
    return code_ == Errc::MissingFile || code_ == Errc::Io ||
           code_ == Errc::InsufficientScratchSpace;
  }

 private:
  Errc code_;
};

}  // namespace mtforge
