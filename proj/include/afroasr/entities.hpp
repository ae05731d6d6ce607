#pragma once

// Entity lexicons, gazetteer tagging, NER annotation ingestion, confidence
// filtering, and the No-NER / AfriNER / AfriVal subset split.

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "afroasr/corpus.hpp"
#include "afroasr/textnorm.hpp"

namespace afroasr::entities {

enum class Label { kPer, kLoc, kOrg };
inline constexpr std::array<Label, 3> kAllLabels = {Label::kPer, Label::kLoc, Label::kOrg};

std::string_view to_string(Label label);
/// Throws DataError for anything but PER, LOC, ORG.
Label parse_label(std::string_view s);

enum class SpanSource { kNer, kGazetteer };
std::string_view to_string(SpanSource source);

/// Half-open token range [token_start, token_end) over the default
/// textnorm tokenization of the text it annotates.
struct EntitySpan {
  Label label = Label::kPer;
  std::size_t token_start = 0;
  std::size_t token_end = 0;
  double score = 1.0;
  SpanSource source = SpanSource::kNer;

  bool operator==(const EntitySpan&) const = default;
};

/// Throws DataError unless start < end and score is in [0,1] (and exactly 1
/// for gazetteer spans).
void validate_span(const EntitySpan& span);

/// Throws DataError naming `id` if any span reaches past `token_count`.
void check_span_range(std::span<const EntitySpan> spans, std::size_t token_count,
                      std::string_view id);

using SurfaceForm = std::vector<std::string>;

class EntityLexicon {
 public:
  /// Normalizes `raw` with textnorm defaults and tokenizes it. Returns false
  /// for duplicates and for forms that normalize to nothing.
  bool add(Label label, std::string_view raw);

  const std::set<SurfaceForm>& forms(Label label) const { return forms_[index(label)]; }
  /// Space-joined forms in sorted order.
  std::vector<std::string> surface_texts(Label label) const;
  std::size_t size(Label label) const { return forms_[index(label)].size(); }
  bool empty() const;

  void set_source_tag(Label label, std::string tag) { source_tags_[index(label)] = std::move(tag); }
  const std::string& source_tag(Label label) const { return source_tags_[index(label)]; }

 private:
  static std::size_t index(Label label) { return static_cast<std::size_t>(label); }

  std::array<std::set<SurfaceForm>, 3> forms_;
  std::array<std::string, 3> source_tags_;
};

struct LexiconLoadReport {
  std::map<Label, std::size_t> counts;
  std::map<Label, std::size_t> duplicates;
  std::vector<std::string> warnings;
};

/// One surface form per line; blank lines are skipped. Missing categories
/// are simply empty.
EntityLexicon load_lexicon(const std::map<Label, std::filesystem::path>& paths,
                           LexiconLoadReport* report = nullptr);

struct MatchOptions {
  /// Match with punctuation stripped from tokens and forms ("kaduna," hits "kaduna").
  bool strip_punct_for_matching = false;
};

/// Token trie over a lexicon; greedy left-to-right longest match.
class Gazetteer {
 public:
  explicit Gazetteer(const EntityLexicon& lexicon, MatchOptions opts = {});
  ~Gazetteer();
  Gazetteer(Gazetteer&&) noexcept;
  Gazetteer& operator=(Gazetteer&&) noexcept;

  std::vector<EntitySpan> tag(std::span<const std::string> tokens) const;
  std::vector<EntitySpan> tag(const textnorm::TokenSeq& tokens) const { return tag(tokens.tokens); }

 private:
  struct Trie;
  std::unique_ptr<Trie> trie_;
  MatchOptions opts_;
};

std::vector<EntitySpan> gazetteer_tag(const textnorm::TokenSeq& tokens, const EntityLexicon& lexicon,
                                      MatchOptions opts = {});

/// Spans keyed by utterance id.
using SpanMap = std::map<std::string, std::vector<EntitySpan>>;

/// JSONL {id, spans:[{label, start, end, score[, source]}]}. Token ranges are
/// checked later against the text they annotate (check_span_range).
SpanMap import_ner(const std::filesystem::path& path);

/// Lines in the order given.
std::string serialize_spans(std::span<const std::pair<std::string, std::vector<EntitySpan>>> rows);

/// Keeps spans with score strictly greater than `threshold`.
std::vector<EntitySpan> filter_spans(std::span<const EntitySpan> spans, double threshold);

/// Throws DataError unless 0 <= threshold <= 1.
void check_threshold(double threshold);

struct SubsetFlags {
  std::string id;
  bool no_ner = false;
  bool afriner = false;
  bool afrival = false;

  bool operator==(const SubsetFlags&) const = default;
};

struct SubsetAssignment {
  std::vector<SubsetFlags> flags;  // corpus order
  std::size_t no_ner = 0;
  std::size_t afriner = 0;
  std::size_t afrival = 0;
  /// Utterances in both AfriNER and AfriVal.
  std::size_t afriner_afrival_overlap = 0;
  std::vector<std::string> warnings;

  const SubsetFlags* find(std::string_view id) const;
};

/// AfriNER: at least one NER span above threshold. No-NER: none. AfriVal:
/// the gazetteer finds something in the reference (threshold-independent).
SubsetAssignment build_subsets(const corpus::Corpus& corpus, const SpanMap& ner,
                               const EntityLexicon& lexicon, double threshold,
                               MatchOptions opts = {});

std::string serialize_subsets(const SubsetAssignment& subsets);
SubsetAssignment load_subsets(const std::filesystem::path& path);

}  // namespace afroasr::entities
