#pragma once

// Per-utterance scoring, subset aggregation, and table rendering.

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "afroasr/align.hpp"
#include "afroasr/corpus.hpp"
#include "afroasr/entities.hpp"
#include "afroasr/textnorm.hpp"

namespace afroasr::report {

using align::ErrorRate;

struct MetricsRow {
  std::string id;
  std::string model_name;
  ErrorRate wer;
  ErrorRate cer;
  /// Present iff the reference has at least one qualifying entity token.
  std::optional<ErrorRate> ne_cer;

  bool operator==(const MetricsRow&) const = default;
};

struct RowError {
  std::string id;
  std::string model_name;
  std::string message;
};

struct ScoreResult {
  std::vector<MetricsRow> rows;
  std::vector<RowError> errors;
};

/// Supplies entity spans for concatenated-entity CER. Spans index the
/// default textnorm tokenization of the text passed in.
class EntitySource {
 public:
  virtual ~EntitySource() = default;
  virtual std::vector<entities::EntitySpan> reference_spans(const corpus::EvalPair& pair,
                                                            const textnorm::TokenSeq& tokens) const = 0;
  virtual std::vector<entities::EntitySpan> hypothesis_spans(const corpus::EvalPair& pair,
                                                             const textnorm::TokenSeq& tokens) const = 0;
};

/// NER annotation files: one for references, one per model for hypotheses.
/// Both sides are filtered at the same threshold. Missing ids mean no spans.
class AnnotationEntitySource final : public EntitySource {
 public:
  AnnotationEntitySource(entities::SpanMap reference, std::map<std::string, entities::SpanMap> hypotheses,
                         double threshold);

  std::vector<entities::EntitySpan> reference_spans(const corpus::EvalPair& pair,
                                                    const textnorm::TokenSeq& tokens) const override;
  std::vector<entities::EntitySpan> hypothesis_spans(const corpus::EvalPair& pair,
                                                     const textnorm::TokenSeq& tokens) const override;

 private:
  entities::SpanMap reference_;
  std::map<std::string, entities::SpanMap> hypotheses_;
  double threshold_;
};

/// Gazetteer run over both reference and hypothesis.
class GazetteerEntitySource final : public EntitySource {
 public:
  explicit GazetteerEntitySource(const entities::EntityLexicon& lexicon, entities::MatchOptions opts = {});

  std::vector<entities::EntitySpan> reference_spans(const corpus::EvalPair& pair,
                                                    const textnorm::TokenSeq& tokens) const override;
  std::vector<entities::EntitySpan> hypothesis_spans(const corpus::EvalPair& pair,
                                                     const textnorm::TokenSeq& tokens) const override;

 private:
  entities::Gazetteer gazetteer_;
};

/// Union of several sources. A span from a later source is dropped when it
/// overlaps one already taken.
class CombinedEntitySource final : public EntitySource {
 public:
  explicit CombinedEntitySource(std::vector<std::unique_ptr<EntitySource>> sources);

  std::vector<entities::EntitySpan> reference_spans(const corpus::EvalPair& pair,
                                                    const textnorm::TokenSeq& tokens) const override;
  std::vector<entities::EntitySpan> hypothesis_spans(const corpus::EvalPair& pair,
                                                     const textnorm::TokenSeq& tokens) const override;

 private:
  std::vector<std::unique_ptr<EntitySource>> sources_;
};

/// Spans of `base` plus the spans of `extra` that overlap none of them, in
/// token order.
std::vector<entities::EntitySpan> merge_spans(std::vector<entities::EntitySpan> base,
                                              std::span<const entities::EntitySpan> extra);

/// Entity tokens of each side, in order of appearance, concatenated with all
/// spaces removed and case folded; CER of hypothesis against reference.
/// Absent when the reference concatenation is empty. Texts are raw; they are
/// normalized with textnorm defaults to match the span indices.
std::optional<ErrorRate> ne_concat_cer(std::span<const entities::EntitySpan> reference_spans,
                                       std::span<const entities::EntitySpan> hypothesis_spans,
                                       std::string_view reference_text, std::string_view hypothesis_text);

ScoreResult score_pairs(std::span<const corpus::EvalPair> pairs, const textnorm::NormOptions& opts = {},
                        const EntitySource* entity_source = nullptr, std::size_t jobs = 1);

/// `{id, model, wer_num, wer_den, wer, cer_num, cer_den, cer[, ne_cer_num, ne_cer_den, ne_cer]}`
std::string serialize_rows(std::span<const MetricsRow> rows);
std::vector<MetricsRow> load_rows(const std::filesystem::path& path);

enum class AggregationMode { kMacro, kMicro };
std::string_view to_string(AggregationMode mode);
AggregationMode parse_mode(std::string_view s);

enum class Column { kAll, kNoNer, kAfriNer, kAfriVal, kCharAfriNer, kCharAfriVal };
inline constexpr std::array<Column, 6> kAllColumns = {Column::kAll,     Column::kNoNer,
                                                      Column::kAfriNer, Column::kAfriVal,
                                                      Column::kCharAfriNer, Column::kCharAfriVal};
std::string_view to_string(Column column);

struct Cell {
  std::optional<double> value;  // absent iff count == 0
  std::size_t count = 0;

  bool operator==(const Cell&) const = default;
};

struct ModelRow {
  std::string model_name;
  std::array<Cell, 6> cells;

  const Cell& at(Column c) const { return cells[static_cast<std::size_t>(c)]; }
};

struct ReportTable {
  AggregationMode mode = AggregationMode::kMacro;
  std::vector<ModelRow> rows;  // models in order of first appearance
};

/// WER columns average `wer`; char columns average `ne_cer` over rows of the
/// subset that have one. Throws DataError for a row id missing from `subsets`.
ReportTable aggregate(std::span<const MetricsRow> rows, const entities::SubsetAssignment& subsets,
                      AggregationMode mode = AggregationMode::kMacro);

/// (baseline - comparison) / baseline; positive means improvement.
double relative_change(double baseline, double comparison);

enum class Format { kMarkdown, kCsv, kJson };
Format parse_format(std::string_view s);

/// Half-up to 3 decimals, exact for integer ratios.
std::string format_rate(const ErrorRate& rate);
/// Half-up to 3 decimals; ties within 1e-9 round up.
std::string format_fixed3(double value);

std::string render(const ReportTable& table, Format format);

/// Relative change of every subset column against the model's All column.
std::string render_deltas(const ReportTable& table, Format format);

struct EntityDistribution {
  std::map<entities::Label, std::size_t> totals;
  /// entities per utterance -> number of utterances
  std::map<std::size_t, std::size_t> per_utterance;
  std::size_t utterances = 0;
};

EntityDistribution entity_distribution(const entities::SpanMap& spans);
std::string render_distribution(const EntityDistribution& dist, Format format);

}  // namespace afroasr::report
