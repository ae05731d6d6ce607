#include "afroasr/textnorm.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <stdexcept>

namespace afroasr::textnorm {

namespace {

constexpr UChar32 kReplacement = 0xFFFD;

template <typename Fn>
void for_each_code_point(std::string_view s, Fn&& fn) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
  const auto length = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c = 0;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) c = kReplacement;
    fn(c, static_cast<std::size_t>(start), static_cast<std::size_t>(i));
  }
}

void append_utf8(std::string& out, UChar32 c) {
  char buf[U8_MAX_LENGTH];
  int32_t n = 0;
  UBool error = false;
  U8_APPEND(reinterpret_cast<uint8_t*>(buf), n, U8_MAX_LENGTH, c, error);
  if (error) {
    n = 0;
    U8_APPEND_UNSAFE(reinterpret_cast<uint8_t*>(buf), n, kReplacement);
  }
  out.append(buf, static_cast<std::size_t>(n));
}

const icu::Normalizer2& nfc() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || n == nullptr) throw std::runtime_error("ICU NFC normalizer unavailable");
  return *n;
}

std::string to_nfc(std::string_view s) {
  auto text = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  UErrorCode status = U_ZERO_ERROR;
  auto normalized = nfc().normalize(text, status);
  if (U_FAILURE(status)) throw std::runtime_error("NFC normalization failed");
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

bool is_punct(UChar32 c) { return u_ispunct(c) != 0; }
bool is_space(UChar32 c) { return u_isUWhiteSpace(c) != 0; }

std::string collapse_ws(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for_each_code_point(s, [&](UChar32 c, std::size_t, std::size_t) {
    if (is_space(c)) {
      pending_space = !out.empty();
      return;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    append_utf8(out, c);
  });
  return out;
}

std::string one_pass(std::string_view raw, const NormOptions& opts) {
  std::string text = opts.unicode_nfc ? to_nfc(raw) : std::string(raw);
  if (opts.lowercase || opts.strip_punctuation) {
    std::string mapped;
    mapped.reserve(text.size());
    for_each_code_point(text, [&](UChar32 c, std::size_t, std::size_t) {
      if (opts.strip_punctuation && is_punct(c)) return;
      append_utf8(mapped, opts.lowercase ? u_foldCase(c, U_FOLD_CASE_DEFAULT) : c);
    });
    text = opts.unicode_nfc ? to_nfc(mapped) : std::move(mapped);
  } else if (!opts.unicode_nfc) {
    // Still route through the decoder so invalid bytes become U+FFFD.
    std::string repaired;
    repaired.reserve(text.size());
    for_each_code_point(text, [&](UChar32 c, std::size_t, std::size_t) { append_utf8(repaired, c); });
    text = std::move(repaired);
  }
  if (opts.collapse_whitespace) text = collapse_ws(text);
  return text;
}

}  // namespace

std::string normalize(std::string_view raw, const NormOptions& opts) {
  // Folding can expose new NFC compositions (and vice versa); iterate to a
  // fixed point so the result is idempotent. Converges in 1-2 passes.
  std::string current = one_pass(raw, opts);
  for (int i = 0; i < 4; ++i) {
    std::string next = one_pass(current, opts);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

TokenSeq tokenize(std::string_view normalized) {
  TokenSeq seq;
  std::size_t token_start = 0;
  bool in_token = false;
  for_each_code_point(normalized, [&](UChar32 c, std::size_t begin, std::size_t) {
    if (is_space(c)) {
      if (in_token) {
        seq.tokens.emplace_back(normalized.substr(token_start, begin - token_start));
        seq.char_offsets.emplace_back(token_start, begin);
        in_token = false;
      }
    } else if (!in_token) {
      token_start = begin;
      in_token = true;
    }
  });
  if (in_token) {
    seq.tokens.emplace_back(normalized.substr(token_start));
    seq.char_offsets.emplace_back(token_start, normalized.size());
  }
  return seq;
}

TokenSeq normalize_and_tokenize(std::string_view raw, const NormOptions& opts) {
  return tokenize(normalize(raw, opts));
}

std::vector<char32_t> code_points(std::string_view utf8) {
  std::vector<char32_t> out;
  out.reserve(utf8.size());
  for_each_code_point(utf8, [&](UChar32 c, std::size_t, std::size_t) {
    out.push_back(static_cast<char32_t>(c));
  });
  return out;
}

std::string fold_case(std::string_view utf8) {
  std::string out;
  out.reserve(utf8.size());
  for_each_code_point(utf8, [&](UChar32 c, std::size_t, std::size_t) {
    append_utf8(out, u_foldCase(c, U_FOLD_CASE_DEFAULT));
  });
  return out;
}

std::string strip_punctuation(std::string_view utf8) {
  std::string out;
  out.reserve(utf8.size());
  for_each_code_point(utf8, [&](UChar32 c, std::size_t, std::size_t) {
    if (!is_punct(c)) append_utf8(out, c);
  });
  return out;
}

}  // namespace afroasr::textnorm
