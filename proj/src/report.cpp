#include "afroasr/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "afroasr/error.hpp"
#include "afroasr/io.hpp"
#include "afroasr/parallel.hpp"

namespace afroasr::report {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;
using entities::EntitySpan;

// ---------------------------------------------------------------------------
// Entity sources

AnnotationEntitySource::AnnotationEntitySource(entities::SpanMap reference,
                                               std::map<std::string, entities::SpanMap> hypotheses,
                                               double threshold)
    : reference_(std::move(reference)), hypotheses_(std::move(hypotheses)), threshold_(threshold) {
  entities::check_threshold(threshold_);
}

std::vector<EntitySpan> AnnotationEntitySource::reference_spans(const corpus::EvalPair& pair,
                                                                const textnorm::TokenSeq& tokens) const {
  auto it = reference_.find(pair.id);
  if (it == reference_.end()) return {};
  entities::check_span_range(it->second, tokens.size(), pair.id);
  return entities::filter_spans(it->second, threshold_);
}

std::vector<EntitySpan> AnnotationEntitySource::hypothesis_spans(const corpus::EvalPair& pair,
                                                                 const textnorm::TokenSeq& tokens) const {
  auto model = hypotheses_.find(pair.model_name);
  if (model == hypotheses_.end()) return {};
  auto it = model->second.find(pair.id);
  if (it == model->second.end()) return {};
  entities::check_span_range(it->second, tokens.size(), pair.id + " (" + pair.model_name + " hypothesis)");
  return entities::filter_spans(it->second, threshold_);
}

GazetteerEntitySource::GazetteerEntitySource(const entities::EntityLexicon& lexicon,
                                             entities::MatchOptions opts)
    : gazetteer_(lexicon, opts) {}

std::vector<EntitySpan> GazetteerEntitySource::reference_spans(const corpus::EvalPair&,
                                                               const textnorm::TokenSeq& tokens) const {
  return gazetteer_.tag(tokens);
}

std::vector<EntitySpan> GazetteerEntitySource::hypothesis_spans(const corpus::EvalPair&,
                                                                const textnorm::TokenSeq& tokens) const {
  return gazetteer_.tag(tokens);
}

CombinedEntitySource::CombinedEntitySource(std::vector<std::unique_ptr<EntitySource>> sources)
    : sources_(std::move(sources)) {}

std::vector<EntitySpan> CombinedEntitySource::reference_spans(const corpus::EvalPair& pair,
                                                              const textnorm::TokenSeq& tokens) const {
  std::vector<EntitySpan> out;
  for (const auto& s : sources_) out = merge_spans(std::move(out), s->reference_spans(pair, tokens));
  return out;
}

std::vector<EntitySpan> CombinedEntitySource::hypothesis_spans(const corpus::EvalPair& pair,
                                                               const textnorm::TokenSeq& tokens) const {
  std::vector<EntitySpan> out;
  for (const auto& s : sources_) out = merge_spans(std::move(out), s->hypothesis_spans(pair, tokens));
  return out;
}

std::vector<EntitySpan> merge_spans(std::vector<EntitySpan> base, std::span<const EntitySpan> extra) {
  const std::size_t taken = base.size();
  for (const auto& e : extra) {
    bool overlaps = false;
    for (std::size_t i = 0; i < taken && !overlaps; ++i)
      overlaps = e.token_start < base[i].token_end && base[i].token_start < e.token_end;
    if (!overlaps) base.push_back(e);
  }
  std::stable_sort(base.begin(), base.end(),
                   [](const EntitySpan& a, const EntitySpan& b) { return a.token_start < b.token_start; });
  return base;
}

// ---------------------------------------------------------------------------
// Scoring

namespace {

std::vector<char32_t> concat_entities(std::span<const EntitySpan> spans, const textnorm::TokenSeq& tokens) {
  std::vector<EntitySpan> sorted(spans.begin(), spans.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const EntitySpan& a, const EntitySpan& b) { return a.token_start < b.token_start; });
  std::string joined;
  for (const auto& s : sorted)
    for (std::size_t t = s.token_start; t < s.token_end; ++t) joined += tokens.tokens[t];
  std::vector<char32_t> out;
  for (char32_t c : textnorm::code_points(textnorm::fold_case(joined)))
    if (c != U' ') out.push_back(c);
  return out;
}

std::optional<ErrorRate> ne_cer_tokens(std::span<const EntitySpan> ref_spans,
                                       std::span<const EntitySpan> hyp_spans,
                                       const textnorm::TokenSeq& ref_tokens,
                                       const textnorm::TokenSeq& hyp_tokens) {
  entities::check_span_range(ref_spans, ref_tokens.size(), "reference");
  entities::check_span_range(hyp_spans, hyp_tokens.size(), "hypothesis");
  const auto ref = concat_entities(ref_spans, ref_tokens);
  if (ref.empty()) return std::nullopt;
  const auto hyp = concat_entities(hyp_spans, hyp_tokens);
  return ErrorRate(align::edit_distance_only(ref, hyp), ref.size());
}

}  // namespace

std::optional<ErrorRate> ne_concat_cer(std::span<const EntitySpan> reference_spans,
                                       std::span<const EntitySpan> hypothesis_spans,
                                       std::string_view reference_text, std::string_view hypothesis_text) {
  return ne_cer_tokens(reference_spans, hypothesis_spans, textnorm::normalize_and_tokenize(reference_text),
                       textnorm::normalize_and_tokenize(hypothesis_text));
}

ScoreResult score_pairs(std::span<const corpus::EvalPair> pairs, const textnorm::NormOptions& opts,
                        const EntitySource* entity_source, std::size_t jobs) {
  std::vector<std::optional<MetricsRow>> rows(pairs.size());
  std::vector<std::string> errors(pairs.size());
  parallel_for(pairs.size(), jobs, [&](std::size_t i) {
    const auto& p = pairs[i];
    try {
      MetricsRow row{p.id, p.model_name, align::wer(p.reference, p.hypothesis, opts),
                     align::cer(p.reference, p.hypothesis, opts), std::nullopt};
      if (entity_source) {
        const auto ref_tokens = textnorm::normalize_and_tokenize(p.reference);
        const auto hyp_tokens = textnorm::normalize_and_tokenize(p.hypothesis);
        row.ne_cer = ne_cer_tokens(entity_source->reference_spans(p, ref_tokens),
                                   entity_source->hypothesis_spans(p, hyp_tokens), ref_tokens, hyp_tokens);
      }
      rows[i] = std::move(row);
    } catch (const DataError& e) {
      errors[i] = e.what();
    }
  });
  ScoreResult result;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (rows[i])
      result.rows.push_back(std::move(*rows[i]));
    else
      result.errors.push_back({pairs[i].id, pairs[i].model_name, std::move(errors[i])});
  }
  return result;
}

std::string serialize_rows(std::span<const MetricsRow> rows) {
  std::string out;
  for (const auto& r : rows) {
    ordered_json obj;
    obj["id"] = r.id;
    obj["model"] = r.model_name;
    obj["wer_num"] = r.wer.numerator();
    obj["wer_den"] = r.wer.denominator();
    obj["wer"] = r.wer.value();
    obj["cer_num"] = r.cer.numerator();
    obj["cer_den"] = r.cer.denominator();
    obj["cer"] = r.cer.value();
    if (r.ne_cer) {
      obj["ne_cer_num"] = r.ne_cer->numerator();
      obj["ne_cer_den"] = r.ne_cer->denominator();
      obj["ne_cer"] = r.ne_cer->value();
    }
    out += obj.dump();
    out += '\n';
  }
  return out;
}

std::vector<MetricsRow> load_rows(const std::filesystem::path& path) {
  using Kind = RecordError::Kind;
  std::vector<MetricsRow> rows;
  const std::string source = path.string();
  io::for_each_line(path, [&](std::size_t number, std::string_view line) {
    if (io::is_blank(line)) return;
    try {
      const json obj = json::parse(line);
      auto rate = [&](const char* num, const char* den) {
        return ErrorRate(obj.at(num).get<std::size_t>(), obj.at(den).get<std::size_t>());
      };
      MetricsRow row{obj.at("id").get<std::string>(), obj.at("model").get<std::string>(),
                     rate("wer_num", "wer_den"), rate("cer_num", "cer_den"), std::nullopt};
      if (obj.contains("ne_cer_num")) row.ne_cer = rate("ne_cer_num", "ne_cer_den");
      rows.push_back(std::move(row));
    } catch (const json::exception& e) {
      throw RecordError(Kind::kMalformed, source, number, e.what());
    } catch (const DataError& e) {
      throw RecordError(Kind::kInvalidValue, source, number, e.what());
    }
  });
  return rows;
}

// ---------------------------------------------------------------------------
// Aggregation

std::string_view to_string(AggregationMode mode) { return mode == AggregationMode::kMicro ? "micro" : "macro"; }

AggregationMode parse_mode(std::string_view s) {
  if (s == "macro") return AggregationMode::kMacro;
  if (s == "micro") return AggregationMode::kMicro;
  throw DataError("aggregation mode must be macro or micro");
}

std::string_view to_string(Column column) {
  switch (column) {
    case Column::kAll: return "All";
    case Column::kNoNer: return "No-NER";
    case Column::kAfriNer: return "AfriNER";
    case Column::kAfriVal: return "AfriVal";
    case Column::kCharAfriNer: return "char-AfriNER";
    case Column::kCharAfriVal: return "char-AfriVal";
  }
  return "All";
}

namespace {

struct Accumulator {
  double sum = 0.0;
  std::size_t num = 0;
  std::size_t den = 0;
  std::size_t count = 0;

  void add(const ErrorRate& r) {
    sum += r.value();
    num += r.numerator();
    den += r.denominator();
    ++count;
  }

  Cell cell(AggregationMode mode) const {
    if (count == 0) return {};
    const double v = mode == AggregationMode::kMacro
                         ? sum / static_cast<double>(count)
                         : static_cast<double>(num) / static_cast<double>(den);
    return {v, count};
  }
};

}  // namespace

ReportTable aggregate(std::span<const MetricsRow> rows, const entities::SubsetAssignment& subsets,
                      AggregationMode mode) {
  std::unordered_map<std::string, const entities::SubsetFlags*> flags;
  for (const auto& f : subsets.flags) flags.emplace(f.id, &f);

  std::vector<std::string> models;
  std::unordered_map<std::string, std::array<Accumulator, 6>> acc;
  for (const auto& r : rows) {
    auto it = flags.find(r.id);
    if (it == flags.end()) throw DataError("no subset flags for id '" + r.id + "'");
    const auto& f = *it->second;
    auto [slot, inserted] = acc.try_emplace(r.model_name);
    if (inserted) models.push_back(r.model_name);
    auto& a = slot->second;
    auto col = [&](Column c) -> Accumulator& { return a[static_cast<std::size_t>(c)]; };
    col(Column::kAll).add(r.wer);
    if (f.no_ner) col(Column::kNoNer).add(r.wer);
    if (f.afriner) col(Column::kAfriNer).add(r.wer);
    if (f.afrival) col(Column::kAfriVal).add(r.wer);
    if (r.ne_cer) {
      if (f.afriner) col(Column::kCharAfriNer).add(*r.ne_cer);
      if (f.afrival) col(Column::kCharAfriVal).add(*r.ne_cer);
    }
  }

  ReportTable table;
  table.mode = mode;
  for (const auto& m : models) {
    ModelRow row{m, {}};
    for (std::size_t c = 0; c < 6; ++c) row.cells[c] = acc[m][c].cell(mode);
    table.rows.push_back(std::move(row));
  }
  return table;
}

double relative_change(double baseline, double comparison) {
  if (!(baseline > 0.0)) throw DataError("relative change needs a positive baseline");
  return (baseline - comparison) / baseline;
}

// ---------------------------------------------------------------------------
// Rendering

Format parse_format(std::string_view s) {
  if (s == "md" || s == "markdown") return Format::kMarkdown;
  if (s == "csv") return Format::kCsv;
  if (s == "json") return Format::kJson;
  throw DataError("format must be md, csv or json");
}

namespace {

std::string thousandths(std::uint64_t k) {
  std::string frac = std::to_string(k % 1000);
  frac.insert(0, 3 - frac.size(), '0');
  return std::to_string(k / 1000) + "." + frac;
}

std::uint64_t round3(double magnitude) {
  return static_cast<std::uint64_t>(std::floor(magnitude * 1000.0 + 0.5 + 1e-9));
}

// Same rounding as format_fixed3, as a JSON number.
double rounded_value(double v) {
  const auto k = round3(std::fabs(v));
  return (v < 0 && k != 0 ? -1.0 : 1.0) * static_cast<double>(k) / 1000.0;
}

std::string cell_text(const Cell& c) { return c.value ? format_fixed3(*c.value) : "-"; }

}  // namespace

std::string format_rate(const ErrorRate& rate) {
  const std::uint64_t num = rate.numerator();
  const std::uint64_t den = rate.denominator();
  return thousandths((2 * num * 1000 + den) / (2 * den));
}

std::string format_fixed3(double value) {
  const auto k = round3(std::fabs(value));
  return (value < 0 && k != 0 ? "-" : "") + thousandths(k);
}

std::string render(const ReportTable& table, Format format) {
  std::ostringstream out;
  switch (format) {
    case Format::kMarkdown: {
      out << "| Model |";
      for (Column c : kAllColumns) out << ' ' << to_string(c) << " |";
      out << "\n|---|";
      for (std::size_t i = 0; i < kAllColumns.size(); ++i) out << "---:|";
      out << '\n';
      for (const auto& row : table.rows) {
        out << "| " << row.model_name << " |";
        for (const auto& cell : row.cells) out << ' ' << cell_text(cell) << " (#" << cell.count << ") |";
        out << '\n';
      }
      break;
    }
    case Format::kCsv: {
      out << "model";
      for (Column c : kAllColumns) out << ',' << to_string(c) << ',' << to_string(c) << "_n";
      out << '\n';
      for (const auto& row : table.rows) {
        out << row.model_name;
        for (const auto& cell : row.cells)
          out << ',' << (cell.value ? format_fixed3(*cell.value) : "") << ',' << cell.count;
        out << '\n';
      }
      break;
    }
    case Format::kJson: {
      ordered_json doc;
      doc["mode"] = to_string(table.mode);
      doc["columns"] = ordered_json::array();
      for (Column c : kAllColumns) doc["columns"].push_back(to_string(c));
      doc["rows"] = ordered_json::array();
      for (const auto& row : table.rows) {
        ordered_json r;
        r["model"] = row.model_name;
        for (Column c : kAllColumns) {
          const auto& cell = row.at(c);
          r["cells"][std::string(to_string(c))] = {
              {"value", cell.value ? ordered_json(rounded_value(*cell.value)) : ordered_json(nullptr)},
              {"count", cell.count}};
        }
        doc["rows"].push_back(std::move(r));
      }
      out << doc.dump(2) << '\n';
      break;
    }
  }
  return out.str();
}

std::string render_deltas(const ReportTable& table, Format format) {
  constexpr std::array<Column, 3> kCompared = {Column::kNoNer, Column::kAfriNer, Column::kAfriVal};
  auto delta = [](const ModelRow& row, Column c) -> std::optional<double> {
    const auto& base = row.at(Column::kAll);
    const auto& other = row.at(c);
    if (!base.value || !other.value || !(*base.value > 0.0)) return std::nullopt;
    return relative_change(*base.value, *other.value);
  };
  std::ostringstream out;
  switch (format) {
    case Format::kMarkdown:
      out << "| Model |";
      for (Column c : kCompared) out << " All -> " << to_string(c) << " |";
      out << "\n|---|---:|---:|---:|\n";
      for (const auto& row : table.rows) {
        out << "| " << row.model_name << " |";
        for (Column c : kCompared) {
          auto d = delta(row, c);
          out << ' ' << (d ? format_fixed3(*d) : "-") << " |";
        }
        out << '\n';
      }
      break;
    case Format::kCsv:
      out << "model";
      for (Column c : kCompared) out << ",All->" << to_string(c);
      out << '\n';
      for (const auto& row : table.rows) {
        out << row.model_name;
        for (Column c : kCompared) {
          auto d = delta(row, c);
          out << ',' << (d ? format_fixed3(*d) : "");
        }
        out << '\n';
      }
      break;
    case Format::kJson: {
      ordered_json doc = ordered_json::array();
      for (const auto& row : table.rows) {
        ordered_json r;
        r["model"] = row.model_name;
        for (Column c : kCompared) {
          auto d = delta(row, c);
          r[std::string("All->") + std::string(to_string(c))] =
              d ? ordered_json(rounded_value(*d)) : ordered_json(nullptr);
        }
        doc.push_back(std::move(r));
      }
      out << doc.dump(2) << '\n';
      break;
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Entity distribution

EntityDistribution entity_distribution(const entities::SpanMap& spans) {
  EntityDistribution dist;
  for (auto label : entities::kAllLabels) dist.totals[label] = 0;
  for (const auto& [id, list] : spans) {
    for (const auto& s : list) ++dist.totals[s.label];
    ++dist.per_utterance[list.size()];
    ++dist.utterances;
  }
  return dist;
}

std::string render_distribution(const EntityDistribution& dist, Format format) {
  // PER, ORG, LOC
  constexpr std::array<entities::Label, 3> kOrder = {entities::Label::kPer, entities::Label::kOrg,
                                                     entities::Label::kLoc};
  auto total = [&](entities::Label l) {
    auto it = dist.totals.find(l);
    return it == dist.totals.end() ? std::size_t{0} : it->second;
  };
  std::ostringstream out;
  switch (format) {
    case Format::kMarkdown:
      out << "| Category | Count |\n|---|---:|\n";
      for (auto l : kOrder) out << "| " << entities::to_string(l) << " | " << total(l) << " |\n";
      out << "\n| Entities per utterance | Utterances |\n|---:|---:|\n";
      for (const auto& [n, count] : dist.per_utterance) out << "| " << n << " | " << count << " |\n";
      break;
    case Format::kCsv:
      out << "category,count\n";
      for (auto l : kOrder) out << entities::to_string(l) << ',' << total(l) << '\n';
      out << "\nentities_per_utterance,utterances\n";
      for (const auto& [n, count] : dist.per_utterance) out << n << ',' << count << '\n';
      break;
    case Format::kJson: {
      ordered_json doc;
      for (auto l : kOrder) doc["totals"][std::string(entities::to_string(l))] = total(l);
      doc["per_utterance"] = ordered_json::object();
      for (const auto& [n, count] : dist.per_utterance) doc["per_utterance"][std::to_string(n)] = count;
      doc["utterances"] = dist.utterances;
      out << doc.dump(2) << '\n';
      break;
    }
  }
  return out.str();
}

}  // namespace afroasr::report
