#pragma once

#include <span>
#include <string_view>

namespace mtforge {

/// Fixed English word list shared by the cipher languages, the built-in
/// tokenizer vocabulary and the synthetic demo corpora.
std::span<const std::string_view> core_lexicon();

}  // namespace mtforge
