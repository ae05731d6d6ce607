#include "afroasr/align.hpp"

namespace afroasr::align {

std::string_view to_string(EditKind kind) {
  switch (kind) {
    case EditKind::kMatch: return "match";
    case EditKind::kSubstitute: return "substitute";
    case EditKind::kDelete: return "delete";
    case EditKind::kInsert: return "insert";
  }
  return "match";
}

ErrorRate::ErrorRate(std::size_t numerator, std::size_t denominator)
    : numerator_(numerator), denominator_(denominator) {
  if (denominator_ == 0) throw EmptyReferenceError("error rate with an empty reference is undefined");
}

ErrorRate wer(std::string_view reference, std::string_view hypothesis,
              const textnorm::NormOptions& opts) {
  const auto ref = textnorm::normalize_and_tokenize(reference, opts);
  if (ref.empty()) throw EmptyReferenceError("reference is empty after normalization");
  const auto hyp = textnorm::normalize_and_tokenize(hypothesis, opts);
  return {edit_distance_only(ref.tokens, hyp.tokens), ref.size()};
}

ErrorRate cer(std::string_view reference, std::string_view hypothesis,
              const textnorm::NormOptions& opts) {
  const auto ref = textnorm::code_points(textnorm::normalize(reference, opts));
  if (ref.empty()) throw EmptyReferenceError("reference is empty after normalization");
  const auto hyp = textnorm::code_points(textnorm::normalize(hypothesis, opts));
  return {edit_distance_only(ref, hyp), ref.size()};
}

EditResult align_words(std::string_view reference, std::string_view hypothesis,
                       const textnorm::NormOptions& opts) {
  const auto ref = textnorm::normalize_and_tokenize(reference, opts);
  const auto hyp = textnorm::normalize_and_tokenize(hypothesis, opts);
  return edit_distance(ref.tokens, hyp.tokens);
}

}  // namespace afroasr::align
