#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace afroasr::textnorm {

struct NormOptions {
  bool lowercase = true;
  bool unicode_nfc = true;
  bool collapse_whitespace = true;
  /// Off by default: appendix-style WERs count "notified." as one token.
  bool strip_punctuation = false;
};

struct TokenSeq {
  std::vector<std::string> tokens;
  /// Byte range [first, second) of each token in the normalized text.
  std::vector<std::pair<std::size_t, std::size_t>> char_offsets;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
};

/// Deterministic, locale-independent. Invalid UTF-8 is replaced by U+FFFD.
std::string normalize(std::string_view raw, const NormOptions& opts = {});

/// Splits on Unicode whitespace only; punctuation stays attached.
TokenSeq tokenize(std::string_view normalized);

/// normalize + tokenize.
TokenSeq normalize_and_tokenize(std::string_view raw, const NormOptions& opts = {});

/// Code points of a UTF-8 string (for character error rates).
std::vector<char32_t> code_points(std::string_view utf8);

/// Simple Unicode case folding, nothing else.
std::string fold_case(std::string_view utf8);

/// Removes Unicode punctuation characters.
std::string strip_punctuation(std::string_view utf8);

}  // namespace afroasr::textnorm
