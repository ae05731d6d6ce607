#pragma once

// Unit-cost Levenshtein alignment over arbitrary sequences, and the word /
// character error rates built on it.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "afroasr/error.hpp"
#include "afroasr/textnorm.hpp"

namespace afroasr::align {

enum class EditKind { kMatch, kSubstitute, kDelete, kInsert };

std::string_view to_string(EditKind kind);

struct EditOp {
  EditKind kind;
  std::optional<std::size_t> ref_index;  // absent for insertions
  std::optional<std::size_t> hyp_index;  // absent for deletions

  bool operator==(const EditOp&) const = default;
};

struct Alignment {
  std::vector<EditOp> ops;
  std::size_t matches = 0;
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;

  std::size_t distance() const noexcept { return substitutions + deletions + insertions; }
  std::size_t ref_length() const noexcept { return substitutions + deletions + matches; }
  std::size_t hyp_length() const noexcept { return substitutions + insertions + matches; }
};

struct EditResult {
  std::size_t distance = 0;
  Alignment alignment;
};

/// Distance only; O(min) memory via a single DP row.
template <typename T>
std::size_t edit_distance_only(std::span<const T> ref, std::span<const T> hyp) {
  std::vector<std::size_t> row(hyp.size() + 1);
  for (std::size_t j = 0; j <= hyp.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= ref.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= hyp.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      row[j] = std::min({sub, up + 1, row[j - 1] + 1});
      diag = up;
    }
  }
  return row[hyp.size()];
}

/// Full alignment. Backtrace from the end prefers match, then substitution,
/// then deletion, then insertion when costs tie.
template <typename T>
EditResult edit_distance(std::span<const T> ref, std::span<const T> hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  const std::size_t width = m + 1;
  std::vector<std::uint32_t> cost((n + 1) * width);
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return cost[i * width + j]; };
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    at(i, 0) = static_cast<std::uint32_t>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const std::uint32_t sub = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0u : 1u);
      at(i, j) = std::min({sub, at(i - 1, j) + 1u, at(i, j - 1) + 1u});
    }
  }

  EditResult result;
  result.distance = at(n, m);
  auto& a = result.alignment;
  a.ops.reserve(std::max(n, m));
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    const std::uint32_t here = at(i, j);
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && at(i - 1, j - 1) == here) {
      a.ops.push_back({EditKind::kMatch, i - 1, j - 1});
      ++a.matches;
      --i, --j;
    } else if (i > 0 && j > 0 && at(i - 1, j - 1) + 1 == here) {
      a.ops.push_back({EditKind::kSubstitute, i - 1, j - 1});
      ++a.substitutions;
      --i, --j;
    } else if (i > 0 && at(i - 1, j) + 1 == here) {
      a.ops.push_back({EditKind::kDelete, i - 1, std::nullopt});
      ++a.deletions;
      --i;
    } else {
      a.ops.push_back({EditKind::kInsert, std::nullopt, j - 1});
      ++a.insertions;
      --j;
    }
  }
  std::reverse(a.ops.begin(), a.ops.end());
  return result;
}

template <typename T>
EditResult edit_distance(const std::vector<T>& ref, const std::vector<T>& hyp) {
  return edit_distance(std::span<const T>(ref), std::span<const T>(hyp));
}

template <typename T>
std::size_t edit_distance_only(const std::vector<T>& ref, const std::vector<T>& hyp) {
  return edit_distance_only(std::span<const T>(ref), std::span<const T>(hyp));
}

/// Exact ratio; `value()` is never clipped at 1.
class ErrorRate {
 public:
  ErrorRate(std::size_t numerator, std::size_t denominator);

  std::size_t numerator() const noexcept { return numerator_; }
  std::size_t denominator() const noexcept { return denominator_; }
  double value() const noexcept {
    return static_cast<double>(numerator_) / static_cast<double>(denominator_);
  }

  bool operator==(const ErrorRate&) const = default;

 private:
  std::size_t numerator_;
  std::size_t denominator_;
};

class EmptyReferenceError : public DataError {
 public:
  using DataError::DataError;
};

/// Word error rate over whitespace tokens of the normalized texts.
ErrorRate wer(std::string_view reference, std::string_view hypothesis,
              const textnorm::NormOptions& opts = {});

/// Character error rate over code points of the normalized texts, spaces included.
ErrorRate cer(std::string_view reference, std::string_view hypothesis,
              const textnorm::NormOptions& opts = {});

/// Word alignment for diff display.
EditResult align_words(std::string_view reference, std::string_view hypothesis,
                       const textnorm::NormOptions& opts = {});

}  // namespace afroasr::align
