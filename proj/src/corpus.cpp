#include "afroasr/corpus.hpp"

#include <json.hpp>

#include <sstream>

#include "afroasr/error.hpp"
#include "afroasr/io.hpp"

namespace afroasr::corpus {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(StageTag tag) {
  switch (tag) {
    case StageTag::kSource: return "source";
    case StageTag::kAugmented: return "augmented";
    case StageTag::kTest: return "test";
  }
  return "test";
}

StageTag parse_stage_tag(std::string_view s) {
  if (s == "source") return StageTag::kSource;
  if (s == "augmented") return StageTag::kAugmented;
  if (s == "test") return StageTag::kTest;
  throw DataError("unknown stage tag '" + std::string(s) + "'");
}

Corpus::Corpus(std::vector<Utterance> utterances, StageTag stage)
    : utterances_(std::move(utterances)), stage_(stage) {
  index_.reserve(utterances_.size());
  for (std::size_t i = 0; i < utterances_.size(); ++i) {
    const auto& u = utterances_[i];
    if (u.id.empty()) throw DataError("utterance " + std::to_string(i) + " has an empty id");
    if (io::is_blank(u.reference)) throw DataError("utterance '" + u.id + "' has an empty reference");
    if (u.duration_s && *u.duration_s < 0.0)
      throw DataError("utterance '" + u.id + "' has a negative duration");
    if (!index_.emplace(u.id, i).second) throw DataError("duplicate id '" + u.id + "'");
  }
}

const Utterance* Corpus::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &utterances_[it->second];
}

HypothesisSet::HypothesisSet(std::string model_name,
                             std::vector<std::pair<std::string, std::string>> entries)
    : model_name_(std::move(model_name)) {
  if (model_name_.empty()) throw DataError("hypothesis set needs a non-empty model name");
  order_.reserve(entries.size());
  for (auto& [id, text] : entries) {
    if (!entries_.emplace(id, std::move(text)).second)
      throw DataError("duplicate hypothesis id '" + id + "'");
    order_.push_back(std::move(id));
  }
}

const std::string* HypothesisSet::find(std::string_view id) const {
  auto it = entries_.find(std::string(id));
  return it == entries_.end() ? nullptr : &it->second;
}

namespace {

using Kind = RecordError::Kind;

struct ParsedManifest {
  std::vector<Utterance> utterances;
  std::vector<RecordError> violations;
};

std::optional<std::string> optional_string(const json& obj, const char* key, Kind& kind,
                                           std::string& err) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    kind = Kind::kInvalidValue;
    err = std::string("field '") + key + "' must be a string";
    return std::nullopt;
  }
  return it->get<std::string>();
}

// Single rule set for both load_manifest and validate_manifest.
ParsedManifest parse_manifest(const std::filesystem::path& path) {
  ParsedManifest out;
  std::unordered_map<std::string, std::size_t> first_line;
  const std::string source = path.string();

  io::for_each_line(path, [&](std::size_t number, std::string_view line) {
    if (io::is_blank(line)) return;
    auto fail = [&](Kind kind, std::string detail) {
      out.violations.emplace_back(kind, source, number, std::move(detail));
    };

    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(Kind::kMalformed, std::string("malformed JSON: ") + e.what());
      return;
    }
    if (!obj.is_object()) {
      fail(Kind::kMalformed, "record is not a JSON object");
      return;
    }

    Utterance u;
    auto id = obj.find("id");
    if (id == obj.end()) return fail(Kind::kMissingField, "missing required field 'id'");
    if (!id->is_string() || id->get_ref<const std::string&>().empty())
      return fail(Kind::kInvalidValue, "field 'id' must be a non-empty string");
    u.id = id->get<std::string>();

    auto ref = obj.find("reference");
    if (ref == obj.end())
      return fail(Kind::kMissingField, "missing required field 'reference' (id '" + u.id + "')");
    if (!ref->is_string())
      return fail(Kind::kInvalidValue, "field 'reference' must be a string (id '" + u.id + "')");
    u.reference = ref->get<std::string>();
    if (io::is_blank(u.reference))
      return fail(Kind::kInvalidValue, "empty reference (id '" + u.id + "')");

    Kind kind = Kind::kInvalidValue;
    std::string err;
    u.audio_path = optional_string(obj, "audio_path", kind, err);
    u.accent = optional_string(obj, "accent", kind, err);
    u.domain_tag = optional_string(obj, "domain", kind, err);
    if (!err.empty()) return fail(kind, err + " (id '" + u.id + "')");

    if (auto d = obj.find("duration_s"); d != obj.end() && !d->is_null()) {
      if (!d->is_number() || d->get<double>() < 0.0)
        return fail(Kind::kInvalidValue,
                    "field 'duration_s' must be a non-negative number (id '" + u.id + "')");
      u.duration_s = d->get<double>();
    }

    auto [it, inserted] = first_line.emplace(u.id, number);
    if (!inserted)
      return fail(Kind::kDuplicateId, "duplicate id '" + u.id + "' (first seen on line " +
                                          std::to_string(it->second) + ")");
    out.utterances.push_back(std::move(u));
  });
  return out;
}

}  // namespace

Corpus load_manifest(const std::filesystem::path& path, StageTag stage) {
  auto parsed = parse_manifest(path);
  if (!parsed.violations.empty()) throw parsed.violations.front();
  return Corpus(std::move(parsed.utterances), stage);
}

ValidationReport validate_manifest(const std::filesystem::path& path) {
  auto parsed = parse_manifest(path);
  ValidationReport report;
  report.records = parsed.utterances.size();
  for (const auto& v : parsed.violations) report.violations.push_back({v.line(), v.what()});
  if (report.records == 0 && report.violations.empty()) {
    report.warning = true;
    report.warnings.push_back(path.string() + ": manifest has no records");
  }
  return report;
}

std::string serialize_manifest(const Corpus& corpus) {
  std::string out;
  for (const auto& u : corpus.utterances()) {
    ordered_json obj;
    obj["id"] = u.id;
    obj["reference"] = u.reference;
    if (u.audio_path) obj["audio_path"] = *u.audio_path;
    if (u.duration_s) obj["duration_s"] = *u.duration_s;
    if (u.accent) obj["accent"] = *u.accent;
    if (u.domain_tag) obj["domain"] = *u.domain_tag;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

void save_manifest(const Corpus& corpus, const std::filesystem::path& path) {
  io::write_file_atomic(path, serialize_manifest(corpus));
}

namespace {

// RFC 4180 records; quoted fields may span lines.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"': quoted = true; any = true; break;
      case ',': row.push_back(std::move(field)); field.clear(); any = true; break;
      case '\r': break;
      case '\n':
        if (any || !field.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        any = false;
        break;
      default: field += c; any = true;
    }
  }
  if (quoted) throw DataError("unterminated quoted CSV field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Corpus import_csv(const std::filesystem::path& path, StageTag stage) {
  auto rows = parse_csv(io::read_file(path));
  if (rows.empty()) return Corpus({}, stage);
  const auto& header = rows.front();
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    return std::nullopt;
  };
  auto id_col = column("id");
  auto ref_col = column("reference");
  if (!id_col || !ref_col) throw DataError(path.string() + ": CSV header needs 'id' and 'reference'");
  auto audio_col = column("audio_path");
  auto dur_col = column("duration_s");
  auto accent_col = column("accent");
  auto domain_col = column("domain");

  std::vector<Utterance> utterances;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    auto cell = [&](std::optional<std::size_t> col) -> std::optional<std::string> {
      if (!col || *col >= row.size() || row[*col].empty()) return std::nullopt;
      return row[*col];
    };
    Utterance u;
    u.id = cell(id_col).value_or("");
    u.reference = cell(ref_col).value_or("");
    u.audio_path = cell(audio_col);
    u.accent = cell(accent_col);
    u.domain_tag = cell(domain_col);
    if (auto d = cell(dur_col)) {
      try {
        std::size_t used = 0;
        u.duration_s = std::stod(*d, &used);
        if (used != d->size()) throw std::invalid_argument(*d);
      } catch (const std::logic_error&) {
        throw DataError(path.string() + ": record " + std::to_string(r) +
                        ": duration_s is not a number");
      }
    }
    utterances.push_back(std::move(u));
  }
  return Corpus(std::move(utterances), stage);
}

HypothesisSet load_hypotheses(const std::filesystem::path& path, std::string model_name) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::unordered_map<std::string, std::size_t> first_line;
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
    auto text = obj.find("text");
    if (text == obj.end())
      throw RecordError(Kind::kMissingField, source, number, "missing required field 'text'");
    if (!text->is_string())
      throw RecordError(Kind::kInvalidValue, source, number, "field 'text' must be a string");
    auto key = id->get<std::string>();
    auto [it, inserted] = first_line.emplace(key, number);
    if (!inserted)
      throw RecordError(Kind::kDuplicateId, source, number,
                        "duplicate id '" + key + "' (first seen on line " + std::to_string(it->second) + ")");
    entries.emplace_back(std::move(key), text->get<std::string>());
  });
  return HypothesisSet(std::move(model_name), std::move(entries));
}

JoinResult join(const Corpus& corpus, const HypothesisSet& hyps) {
  JoinResult result;
  std::vector<std::string> missing;
  result.pairs.reserve(corpus.size());
  for (const auto& u : corpus.utterances()) {
    const std::string* text = hyps.find(u.id);
    if (!text) {
      missing.push_back(u.id);
      continue;
    }
    result.pairs.push_back({u.id, u.reference, *text, hyps.model_name()});
  }
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << "model '" << hyps.model_name() << "' has no hypothesis for " << missing.size() << " id(s):";
    for (const auto& id : missing) msg << ' ' << id;
    throw DataError(msg.str());
  }
  for (const auto& id : hyps.ids())
    if (!corpus.find(id)) result.extra_ids.push_back(id);
  return result;
}

}  // namespace afroasr::corpus
