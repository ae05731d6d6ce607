#pragma once

// Entity-substitution augmentation: mask entity mentions into slot templates,
// review them, then fill the approved ones from an entity lexicon.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "afroasr/corpus.hpp"
#include "afroasr/entities.hpp"

namespace afroasr::afroaug {

using entities::Label;

enum class TemplateStatus { kPending, kApproved, kRejected };

std::string_view to_string(TemplateStatus status);
TemplateStatus parse_status(std::string_view s);

/// "[PER]", "[LOC]", "[ORG]"
std::string slot_marker(Label label);

struct ReviewEvent {
  TemplateStatus decision;
  std::string note;

  bool operator==(const ReviewEvent&) const = default;
};

struct Template {
  std::string template_id;
  std::string source_utterance_id;
  std::string text_with_slots;
  std::array<std::size_t, 3> slot_counts{};  // indexed by Label
  TemplateStatus status = TemplateStatus::kPending;
  std::optional<std::string> reviewer_note;
  std::vector<ReviewEvent> history;

  std::size_t slot_count() const noexcept { return slot_counts[0] + slot_counts[1] + slot_counts[2]; }
  std::size_t slot_count(Label label) const noexcept { return slot_counts[static_cast<std::size_t>(label)]; }
  bool usable() const noexcept { return slot_count() > 0; }

  bool operator==(const Template&) const = default;
};

/// Counts slot markers; throws DataError if any other '[' or ']' appears.
std::array<std::size_t, 3> count_slots(std::string_view text_with_slots);

/// Replaces each span's token range in the normalized reference by its slot
/// marker. Text outside the spans is copied byte for byte. `template_id`
/// defaults to "tpl-<utterance id>".
Template mask_entities(const corpus::Utterance& utterance, std::span<const entities::EntitySpan> spans,
                       std::string template_id = {});

/// Picks round(fraction * n) utterance indices by seeded hash, returned in
/// corpus order.
std::vector<std::size_t> select_for_masking(const corpus::Corpus& corpus, double fraction,
                                            std::uint64_t seed);

std::string serialize_templates(std::span<const Template> store);
std::vector<Template> load_templates(const std::filesystem::path& path);

struct ReviewDecision {
  std::string template_id;
  /// kPending means "skip".
  TemplateStatus decision = TemplateStatus::kPending;
  std::string note;
};

std::vector<ReviewDecision> load_decisions(const std::filesystem::path& path);

struct ReviewSummary {
  std::size_t applied = 0;
  std::size_t unchanged = 0;  // repeats of an already-applied decision, and skips
};

/// Applies decisions in order. Repeating the decision a template already
/// carries is a no-op; a different decision on a decided template, an
/// unknown id, or approving a template without slots throws DataError and
/// leaves `store` untouched.
void review_templates(std::vector<Template>& store, std::span<const ReviewDecision> decisions,
                      ReviewSummary* summary = nullptr);

struct SynthesisPlan {
  std::size_t repetitions = 200;
  std::uint64_t master_seed = 0;
  /// Templates that are not approved are ignored.
  std::vector<Template> templates;
  /// When false, [PER] and [ORG] both draw from PER ∪ ORG.
  bool strict_categories = false;
  std::size_t jobs = 1;
};

/// Seed for one slot fill; independent of execution order.
std::uint64_t slot_seed(std::uint64_t master_seed, std::string_view template_id, std::size_t repetition,
                        std::size_t slot_ordinal);

/// |approved| x repetitions utterances, template-major, ids
/// "<template_id>#<repetition>".
corpus::Corpus synthesize(const SynthesisPlan& plan, const entities::EntityLexicon& lexicon);

}  // namespace afroasr::afroaug
