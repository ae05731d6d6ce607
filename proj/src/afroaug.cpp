#include "afroasr/afroaug.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "afroasr/error.hpp"
#include "afroasr/io.hpp"
#include "afroasr/parallel.hpp"
#include "afroasr/random.hpp"
#include "afroasr/textnorm.hpp"

namespace afroasr::afroaug {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;
using entities::EntitySpan;

std::string_view to_string(TemplateStatus status) {
  switch (status) {
    case TemplateStatus::kPending: return "pending";
    case TemplateStatus::kApproved: return "approved";
    case TemplateStatus::kRejected: return "rejected";
  }
  return "pending";
}

TemplateStatus parse_status(std::string_view s) {
  if (s == "pending") return TemplateStatus::kPending;
  if (s == "approved") return TemplateStatus::kApproved;
  if (s == "rejected") return TemplateStatus::kRejected;
  throw DataError("unknown template status '" + std::string(s) + "'");
}

std::string slot_marker(Label label) { return "[" + std::string(entities::to_string(label)) + "]"; }

namespace {

constexpr std::size_t kMarkerLength = 5;  // "[PER]"

// Label of the marker starting at `pos`, if there is one.
std::optional<Label> marker_at(std::string_view text, std::size_t pos) {
  if (pos + kMarkerLength > text.size() || text[pos] != '[' || text[pos + 4] != ']') return std::nullopt;
  const auto name = text.substr(pos + 1, 3);
  for (Label l : entities::kAllLabels)
    if (name == entities::to_string(l)) return l;
  return std::nullopt;
}

}  // namespace

std::array<std::size_t, 3> count_slots(std::string_view text) {
  std::array<std::size_t, 3> counts{};
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '[') {
      auto label = marker_at(text, i);
      if (!label) throw DataError("bracket at byte " + std::to_string(i) + " is not a slot marker");
      ++counts[static_cast<std::size_t>(*label)];
      i += kMarkerLength - 1;
    } else if (text[i] == ']') {
      throw DataError("stray ']' at byte " + std::to_string(i));
    }
  }
  return counts;
}

Template mask_entities(const corpus::Utterance& utterance, std::span<const EntitySpan> spans,
                       std::string template_id) {
  const std::string text = textnorm::normalize(utterance.reference);
  const auto tokens = textnorm::tokenize(text);

  std::vector<EntitySpan> sorted(spans.begin(), spans.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const EntitySpan& a, const EntitySpan& b) { return a.token_start < b.token_start; });
  entities::check_span_range(sorted, tokens.size(), utterance.id);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    entities::validate_span(sorted[i]);
    if (i > 0 && sorted[i].token_start < sorted[i - 1].token_end)
      throw DataError("overlapping spans in '" + utterance.id + "'");
  }

  Template t;
  t.template_id = template_id.empty() ? "tpl-" + utterance.id : std::move(template_id);
  t.source_utterance_id = utterance.id;
  std::size_t cursor = 0;
  for (const auto& s : sorted) {
    const std::size_t begin = tokens.char_offsets[s.token_start].first;
    t.text_with_slots.append(text, cursor, begin - cursor);
    t.text_with_slots += slot_marker(s.label);
    cursor = tokens.char_offsets[s.token_end - 1].second;
  }
  t.text_with_slots.append(text, cursor);
  try {
    t.slot_counts = count_slots(t.text_with_slots);
  } catch (const DataError& e) {
    throw DataError("cannot mask '" + utterance.id + "': " + e.what());
  }
  return t;
}

std::vector<std::size_t> select_for_masking(const corpus::Corpus& corpus, double fraction,
                                            std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw DataError("mask fraction must be in [0,1]");
  const std::size_t n = corpus.size();
  const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
  std::vector<std::pair<std::uint64_t, std::size_t>> keyed;
  keyed.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    keyed.emplace_back(random::SeedHasher(seed).mix(corpus.utterances()[i].id).value(), i);
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::size_t> picked;
  picked.reserve(k);
  for (std::size_t i = 0; i < std::min(k, n); ++i) picked.push_back(keyed[i].second);
  std::sort(picked.begin(), picked.end());
  return picked;
}

// ---------------------------------------------------------------------------
// Template store

std::string serialize_templates(std::span<const Template> store) {
  std::string out;
  for (const auto& t : store) {
    ordered_json obj;
    obj["template_id"] = t.template_id;
    obj["source_utterance_id"] = t.source_utterance_id;
    obj["text_with_slots"] = t.text_with_slots;
    ordered_json counts;
    for (Label l : entities::kAllLabels) counts[std::string(entities::to_string(l))] = t.slot_count(l);
    obj["slot_count"] = counts;
    obj["status"] = to_string(t.status);
    obj["reviewer_note"] = t.reviewer_note ? ordered_json(*t.reviewer_note) : ordered_json(nullptr);
    obj["history"] = ordered_json::array();
    for (const auto& e : t.history)
      obj["history"].push_back({{"decision", to_string(e.decision)}, {"note", e.note}});
    out += obj.dump();
    out += '\n';
  }
  return out;
}

std::vector<Template> load_templates(const std::filesystem::path& path) {
  using Kind = RecordError::Kind;
  std::vector<Template> store;
  std::unordered_map<std::string, std::size_t> seen;
  const std::string source = path.string();
  io::for_each_line(path, [&](std::size_t number, std::string_view line) {
    if (io::is_blank(line)) return;
    auto fail = [&](Kind kind, std::string detail) { throw RecordError(kind, source, number, std::move(detail)); };
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(Kind::kMalformed, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) fail(Kind::kMalformed, "record is not a JSON object");
    auto str = [&](const char* key) {
      auto it = obj.find(key);
      if (it == obj.end()) fail(Kind::kMissingField, std::string("missing required field '") + key + "'");
      if (!it->is_string()) fail(Kind::kInvalidValue, std::string("field '") + key + "' must be a string");
      return it->get<std::string>();
    };
    Template t;
    try {
      t.template_id = str("template_id");
      t.source_utterance_id = str("source_utterance_id");
      t.text_with_slots = str("text_with_slots");
      t.status = parse_status(str("status"));
      t.slot_counts = count_slots(t.text_with_slots);
      if (auto it = obj.find("slot_count"); it != obj.end()) {
        for (Label l : entities::kAllLabels) {
          const auto key = std::string(entities::to_string(l));
          const auto stored = it->contains(key) ? (*it)[key].get<std::size_t>() : 0;
          if (stored != t.slot_count(l))
            fail(Kind::kInvalidValue, "slot_count." + key + " disagrees with text_with_slots");
        }
      }
      if (auto it = obj.find("reviewer_note"); it != obj.end() && !it->is_null())
        t.reviewer_note = it->get<std::string>();
      if (auto it = obj.find("history"); it != obj.end())
        for (const auto& e : *it)
          t.history.push_back({parse_status(e.at("decision").get<std::string>()), e.value("note", "")});
    } catch (const RecordError&) {
      throw;
    } catch (const std::exception& e) {
      fail(Kind::kInvalidValue, e.what());
    }
    if (t.template_id.empty()) fail(Kind::kInvalidValue, "empty template_id");
    if (!seen.emplace(t.template_id, number).second)
      fail(Kind::kDuplicateId, "duplicate template_id '" + t.template_id + "'");
    store.push_back(std::move(t));
  });
  return store;
}

std::vector<ReviewDecision> load_decisions(const std::filesystem::path& path) {
  using Kind = RecordError::Kind;
  std::vector<ReviewDecision> out;
  const std::string source = path.string();
  io::for_each_line(path, [&](std::size_t number, std::string_view line) {
    if (io::is_blank(line)) return;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw RecordError(Kind::kMalformed, source, number, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object() || !obj.contains("template_id") || !obj["template_id"].is_string())
      throw RecordError(Kind::kMissingField, source, number, "missing required field 'template_id'");
    if (!obj.contains("decision") || !obj["decision"].is_string())
      throw RecordError(Kind::kMissingField, source, number, "missing required field 'decision'");
    ReviewDecision d;
    d.template_id = obj["template_id"].get<std::string>();
    const auto decision = obj["decision"].get<std::string>();
    if (decision == "approve")
      d.decision = TemplateStatus::kApproved;
    else if (decision == "reject")
      d.decision = TemplateStatus::kRejected;
    else if (decision == "skip")
      d.decision = TemplateStatus::kPending;
    else
      throw RecordError(Kind::kInvalidValue, source, number,
                        "decision must be approve, reject or skip (got '" + decision + "')");
    if (auto it = obj.find("note"); it != obj.end() && it->is_string()) d.note = it->get<std::string>();
    out.push_back(std::move(d));
  });
  return out;
}

void review_templates(std::vector<Template>& store, std::span<const ReviewDecision> decisions,
                      ReviewSummary* summary) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < store.size(); ++i) index.emplace(store[i].template_id, i);

  auto updated = store;
  ReviewSummary local;
  for (const auto& d : decisions) {
    auto it = index.find(d.template_id);
    if (it == index.end()) throw DataError("unknown template_id '" + d.template_id + "'");
    auto& t = updated[it->second];
    if (d.decision == TemplateStatus::kPending || d.decision == t.status) {
      ++local.unchanged;
      continue;
    }
    if (t.status != TemplateStatus::kPending)
      throw DataError("template '" + d.template_id + "' is already " + std::string(to_string(t.status)));
    if (d.decision == TemplateStatus::kApproved && !t.usable())
      throw DataError("template '" + d.template_id + "' has no slots and cannot be approved");
    t.status = d.decision;
    if (!d.note.empty()) t.reviewer_note = d.note;
    t.history.push_back({d.decision, d.note});
    ++local.applied;
  }
  store = std::move(updated);
  if (summary) *summary = local;
}

// ---------------------------------------------------------------------------
// Synthesis

std::uint64_t slot_seed(std::uint64_t master_seed, std::string_view template_id, std::size_t repetition,
                        std::size_t slot_ordinal) {
  return random::SeedHasher(master_seed).mix(template_id).mix(repetition).mix(slot_ordinal).value();
}

namespace {

std::vector<std::string> merged(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

}  // namespace

corpus::Corpus synthesize(const SynthesisPlan& plan, const entities::EntityLexicon& lexicon) {
  if (plan.repetitions == 0) throw DataError("repetitions must be at least 1");

  std::vector<const Template*> approved;
  for (const auto& t : plan.templates) {
    if (t.status != TemplateStatus::kApproved) continue;
    if (!t.usable()) throw DataError("approved template '" + t.template_id + "' has no slots");
    approved.push_back(&t);
  }

  std::array<std::vector<std::string>, 3> pools;
  const auto per = lexicon.surface_texts(Label::kPer);
  const auto loc = lexicon.surface_texts(Label::kLoc);
  const auto org = lexicon.surface_texts(Label::kOrg);
  pools[static_cast<std::size_t>(Label::kLoc)] = loc;
  if (plan.strict_categories) {
    pools[static_cast<std::size_t>(Label::kPer)] = per;
    pools[static_cast<std::size_t>(Label::kOrg)] = org;
  } else {
    auto names = merged(per, org);
    pools[static_cast<std::size_t>(Label::kPer)] = names;
    pools[static_cast<std::size_t>(Label::kOrg)] = std::move(names);
  }
  for (const auto* t : approved)
    for (Label l : entities::kAllLabels)
      if (t->slot_count(l) > 0 && pools[static_cast<std::size_t>(l)].empty())
        throw DataError("template '" + t->template_id + "' needs " + std::string(entities::to_string(l)) +
                        " entries but the lexicon pool is empty");

  std::vector<corpus::Utterance> out(approved.size() * plan.repetitions);
  parallel_for(out.size(), plan.jobs, [&](std::size_t k) {
    const Template& t = *approved[k / plan.repetitions];
    const std::size_t rep = k % plan.repetitions;
    const std::string_view text = t.text_with_slots;
    std::string filled;
    filled.reserve(text.size() + 32);
    std::size_t ordinal = 0;
    for (std::size_t i = 0; i < text.size();) {
      if (auto label = marker_at(text, i)) {
        const auto& pool = pools[static_cast<std::size_t>(*label)];
        random::SplitMix64 rng(slot_seed(plan.master_seed, t.template_id, rep, ordinal++));
        filled += pool[rng.uniform(pool.size())];
        i += kMarkerLength;
      } else {
        filled += text[i++];
      }
    }
    out[k].id = t.template_id + "#" + std::to_string(rep);
    out[k].reference = std::move(filled);
  });
  return corpus::Corpus(std::move(out), corpus::StageTag::kAugmented);
}

}  // namespace afroasr::afroaug
