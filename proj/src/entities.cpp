#include "afroasr/entities.hpp"

#include <json.hpp>

#include <unordered_map>

#include "afroasr/detail/span_json.hpp"
#include "afroasr/error.hpp"
#include "afroasr/io.hpp"

namespace afroasr::entities {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Label label) {
  switch (label) {
    case Label::kPer: return "PER";
    case Label::kLoc: return "LOC";
    case Label::kOrg: return "ORG";
  }
  return "PER";
}

Label parse_label(std::string_view s) {
  if (s == "PER") return Label::kPer;
  if (s == "LOC") return Label::kLoc;
  if (s == "ORG") return Label::kOrg;
  throw DataError("unknown entity label '" + std::string(s) + "' (expected PER, LOC or ORG)");
}

std::string_view to_string(SpanSource source) {
  return source == SpanSource::kGazetteer ? "gazetteer" : "ner";
}

void validate_span(const EntitySpan& span) {
  if (span.token_start >= span.token_end)
    throw DataError("span [" + std::to_string(span.token_start) + "," +
                    std::to_string(span.token_end) + ") is empty or reversed");
  if (!(span.score >= 0.0 && span.score <= 1.0))
    throw DataError("span score " + std::to_string(span.score) + " outside [0,1]");
  if (span.source == SpanSource::kGazetteer && span.score != 1.0)
    throw DataError("gazetteer spans must carry score 1.0");
}

void check_span_range(std::span<const EntitySpan> spans, std::size_t token_count,
                      std::string_view id) {
  for (const auto& s : spans) {
    if (s.token_end > token_count)
      throw DataError("span [" + std::to_string(s.token_start) + "," + std::to_string(s.token_end) +
                      ") out of range for '" + std::string(id) + "' (" +
                      std::to_string(token_count) + " tokens)");
  }
}

// ---------------------------------------------------------------------------
// Lexicon

bool EntityLexicon::add(Label label, std::string_view raw) {
  auto seq = textnorm::normalize_and_tokenize(raw);
  if (seq.empty()) return false;
  return forms_[index(label)].insert(std::move(seq.tokens)).second;
}

std::vector<std::string> EntityLexicon::surface_texts(Label label) const {
  std::vector<std::string> out;
  out.reserve(size(label));
  for (const auto& form : forms(label)) {
    std::string text;
    for (const auto& tok : form) {
      if (!text.empty()) text += ' ';
      text += tok;
    }
    out.push_back(std::move(text));
  }
  return out;
}

bool EntityLexicon::empty() const {
  for (const auto& f : forms_)
    if (!f.empty()) return false;
  return true;
}

EntityLexicon load_lexicon(const std::map<Label, std::filesystem::path>& paths,
                           LexiconLoadReport* report) {
  EntityLexicon lexicon;
  LexiconLoadReport local;
  for (const auto& [label, path] : paths) {
    std::size_t duplicates = 0;
    io::for_each_line(path, [&](std::size_t, std::string_view line) {
      if (io::is_blank(line)) return;
      if (!lexicon.add(label, line)) ++duplicates;
    });
    lexicon.set_source_tag(label, path.string());
    local.counts[label] = lexicon.size(label);
    local.duplicates[label] = duplicates;
    if (lexicon.size(label) == 0)
      local.warnings.push_back(std::string(to_string(label)) + " lexicon " + path.string() + " is empty");
  }
  if (report) *report = std::move(local);
  return lexicon;
}

// ---------------------------------------------------------------------------
// Gazetteer

struct Gazetteer::Trie {
  struct Node {
    std::unordered_map<std::string, std::uint32_t> next;
    bool terminal = false;
    Label label = Label::kPer;
  };
  std::vector<Node> nodes{Node{}};

  // First insertion wins, so a form listed under several categories takes
  // the earliest label in PER, LOC, ORG order.
  void insert(const SurfaceForm& form, Label label) {
    std::uint32_t at = 0;
    for (const auto& tok : form) {
      auto it = nodes[at].next.find(tok);
      if (it == nodes[at].next.end()) {
        const auto id = static_cast<std::uint32_t>(nodes.size());
        nodes[at].next.emplace(tok, id);
        nodes.emplace_back();
        at = id;
      } else {
        at = it->second;
      }
    }
    if (!nodes[at].terminal) {
      nodes[at].terminal = true;
      nodes[at].label = label;
    }
  }
};

namespace {

std::string matching_key(const std::string& token, const MatchOptions& opts) {
  return opts.strip_punct_for_matching ? textnorm::strip_punctuation(token) : token;
}

}  // namespace

Gazetteer::Gazetteer(const EntityLexicon& lexicon, MatchOptions opts)
    : trie_(std::make_unique<Trie>()), opts_(opts) {
  for (Label label : kAllLabels) {
    for (const auto& form : lexicon.forms(label)) {
      SurfaceForm key;
      key.reserve(form.size());
      bool usable = true;
      for (const auto& tok : form) {
        key.push_back(matching_key(tok, opts_));
        if (key.back().empty()) usable = false;
      }
      if (usable) trie_->insert(key, label);
    }
  }
}

Gazetteer::~Gazetteer() = default;
Gazetteer::Gazetteer(Gazetteer&&) noexcept = default;
Gazetteer& Gazetteer::operator=(Gazetteer&&) noexcept = default;

std::vector<EntitySpan> Gazetteer::tag(std::span<const std::string> tokens) const {
  std::vector<std::string> keys;
  keys.reserve(tokens.size());
  for (const auto& t : tokens) keys.push_back(matching_key(t, opts_));

  std::vector<EntitySpan> spans;
  const auto& nodes = trie_->nodes;
  std::size_t i = 0;
  while (i < keys.size()) {
    std::uint32_t at = 0;
    std::size_t best_end = 0;
    Label best_label = Label::kPer;
    for (std::size_t j = i; j < keys.size(); ++j) {
      if (keys[j].empty()) break;
      auto it = nodes[at].next.find(keys[j]);
      if (it == nodes[at].next.end()) break;
      at = it->second;
      if (nodes[at].terminal) {
        best_end = j + 1;
        best_label = nodes[at].label;
      }
    }
    if (best_end > i) {
      spans.push_back({best_label, i, best_end, 1.0, SpanSource::kGazetteer});
      i = best_end;
    } else {
      ++i;
    }
  }
  return spans;
}

std::vector<EntitySpan> gazetteer_tag(const textnorm::TokenSeq& tokens, const EntityLexicon& lexicon,
                                      MatchOptions opts) {
  return Gazetteer(lexicon, opts).tag(tokens);
}

// ---------------------------------------------------------------------------
// NER annotations

namespace {

class MissingSpanField : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace

namespace detail {

EntitySpan span_from_json(const json& obj, SpanSource default_source) {
  if (!obj.is_object()) throw DataError("span is not a JSON object");
  auto field = [&](const char* key) -> const json& {
    auto it = obj.find(key);
    if (it == obj.end()) throw MissingSpanField(std::string("span is missing field '") + key + "'");
    return *it;
  };
  EntitySpan span;
  const auto& label = field("label");
  if (!label.is_string()) throw DataError("span field 'label' must be a string");
  span.label = parse_label(label.get<std::string>());
  const auto& start = field("start");
  const auto& end = field("end");
  if (!start.is_number_integer() || start.get<long long>() < 0)
    throw DataError("span field 'start' must be a non-negative integer");
  if (!end.is_number_integer() || end.get<long long>() < 0)
    throw DataError("span field 'end' must be a non-negative integer");
  span.token_start = start.get<std::size_t>();
  span.token_end = end.get<std::size_t>();
  const auto& score = field("score");
  if (!score.is_number()) throw DataError("span field 'score' must be a number");
  span.score = score.get<double>();
  span.source = default_source;
  if (auto it = obj.find("source"); it != obj.end()) {
    if (*it == "gazetteer")
      span.source = SpanSource::kGazetteer;
    else if (*it == "ner")
      span.source = SpanSource::kNer;
    else
      throw DataError("span field 'source' must be \"ner\" or \"gazetteer\"");
  }
  validate_span(span);
  return span;
}

ordered_json span_to_json(const EntitySpan& span) {
  ordered_json obj;
  obj["label"] = to_string(span.label);
  obj["start"] = span.token_start;
  obj["end"] = span.token_end;
  obj["score"] = span.score;
  obj["source"] = to_string(span.source);
  return obj;
}

}  // namespace detail

SpanMap import_ner(const std::filesystem::path& path) {
  using Kind = RecordError::Kind;
  SpanMap out;
  const std::string source = path.string();
  io::for_each_line(path, [&](std::size_t number, std::string_view line) {
    if (io::is_blank(line)) return;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw RecordError(Kind::kMalformed, source, number, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) throw RecordError(Kind::kMalformed, source, number, "record is not a JSON object");
    auto id = obj.find("id");
    if (id == obj.end()) throw RecordError(Kind::kMissingField, source, number, "missing required field 'id'");
    if (!id->is_string() || id->get_ref<const std::string&>().empty())
      throw RecordError(Kind::kInvalidValue, source, number, "field 'id' must be a non-empty string");
    auto spans = obj.find("spans");
    if (spans == obj.end())
      throw RecordError(Kind::kMissingField, source, number, "missing required field 'spans'");
    if (!spans->is_array())
      throw RecordError(Kind::kInvalidValue, source, number, "field 'spans' must be an array");
    std::vector<EntitySpan> parsed;
    for (const auto& s : *spans) {
      try {
        parsed.push_back(detail::span_from_json(s, SpanSource::kNer));
      } catch (const RecordError&) {
        throw;
      } catch (const MissingSpanField& e) {
        throw RecordError(Kind::kMissingField, source, number, e.what());
      } catch (const DataError& e) {
        throw RecordError(Kind::kInvalidValue, source, number, e.what());
      }
    }
    auto key = id->get<std::string>();
    if (!out.emplace(key, std::move(parsed)).second)
      throw RecordError(Kind::kDuplicateId, source, number, "duplicate id '" + key + "'");
  });
  return out;
}

std::string serialize_spans(std::span<const std::pair<std::string, std::vector<EntitySpan>>> rows) {
  std::string out;
  for (const auto& [id, spans] : rows) {
    ordered_json obj;
    obj["id"] = id;
    obj["spans"] = ordered_json::array();
    for (const auto& s : spans) obj["spans"].push_back(detail::span_to_json(s));
    out += obj.dump();
    out += '\n';
  }
  return out;
}

void check_threshold(double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw DataError("threshold " + std::to_string(threshold) + " outside [0,1]");
}

std::vector<EntitySpan> filter_spans(std::span<const EntitySpan> spans, double threshold) {
  check_threshold(threshold);
  std::vector<EntitySpan> kept;
  for (const auto& s : spans)
    if (s.score > threshold) kept.push_back(s);
  return kept;
}

// ---------------------------------------------------------------------------
// Subsets

const SubsetFlags* SubsetAssignment::find(std::string_view id) const {
  for (const auto& f : flags)
    if (f.id == id) return &f;
  return nullptr;
}

SubsetAssignment build_subsets(const corpus::Corpus& corpus, const SpanMap& ner,
                               const EntityLexicon& lexicon, double threshold, MatchOptions opts) {
  check_threshold(threshold);
  const Gazetteer gazetteer(lexicon, opts);
  SubsetAssignment out;
  out.flags.reserve(corpus.size());
  for (const auto& u : corpus.utterances()) {
    const auto tokens = textnorm::normalize_and_tokenize(u.reference);
    SubsetFlags f{u.id};
    if (auto it = ner.find(u.id); it != ner.end()) {
      check_span_range(it->second, tokens.size(), u.id);
      f.afriner = !filter_spans(it->second, threshold).empty();
    } else {
      out.warnings.push_back("no NER annotation for '" + u.id + "'; treated as zero spans");
    }
    f.no_ner = !f.afriner;
    f.afrival = !gazetteer.tag(tokens).empty();
    out.no_ner += f.no_ner;
    out.afriner += f.afriner;
    out.afrival += f.afrival;
    out.afriner_afrival_overlap += f.afriner && f.afrival;
    out.flags.push_back(std::move(f));
  }
  return out;
}

std::string serialize_subsets(const SubsetAssignment& subsets) {
  std::string out;
  for (const auto& f : subsets.flags) {
    ordered_json obj;
    obj["id"] = f.id;
    obj["no_ner"] = f.no_ner;
    obj["afriner"] = f.afriner;
    obj["afrival"] = f.afrival;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

SubsetAssignment load_subsets(const std::filesystem::path& path) {
  using Kind = RecordError::Kind;
  SubsetAssignment out;
  std::unordered_map<std::string, std::size_t> seen;
  const std::string source = path.string();
  io::for_each_line(path, [&](std::size_t number, std::string_view line) {
    if (io::is_blank(line)) return;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw RecordError(Kind::kMalformed, source, number, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) throw RecordError(Kind::kMalformed, source, number, "record is not a JSON object");
    SubsetFlags f;
    auto get_bool = [&](const char* key) {
      auto it = obj.find(key);
      if (it == obj.end())
        throw RecordError(Kind::kMissingField, source, number, std::string("missing field '") + key + "'");
      if (!it->is_boolean())
        throw RecordError(Kind::kInvalidValue, source, number, std::string("field '") + key + "' must be boolean");
      return it->get<bool>();
    };
    auto id = obj.find("id");
    if (id == obj.end() || !id->is_string())
      throw RecordError(Kind::kMissingField, source, number, "missing required field 'id'");
    f.id = id->get<std::string>();
    f.no_ner = get_bool("no_ner");
    f.afriner = get_bool("afriner");
    f.afrival = get_bool("afrival");
    if (f.no_ner == f.afriner)
      throw RecordError(Kind::kInvalidValue, source, number,
                        "'" + f.id + "': no_ner and afriner must be mutually exclusive");
    if (!seen.emplace(f.id, number).second)
      throw RecordError(Kind::kDuplicateId, source, number, "duplicate id '" + f.id + "'");
    out.no_ner += f.no_ner;
    out.afriner += f.afriner;
    out.afrival += f.afrival;
    out.afriner_afrival_overlap += f.afriner && f.afrival;
    out.flags.push_back(std::move(f));
  });
  return out;
}

}  // namespace afroasr::entities
