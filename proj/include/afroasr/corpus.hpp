#pragma once

// Reference manifests, hypothesis files, and the join between them.
//
// Manifest: JSONL, one object per line, required keys `id` and `reference`,
// optional `audio_path`, `duration_s`, `accent`, `domain`.
// Hypotheses: JSONL with keys `id` and `text` (empty text is legal).

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace afroasr::corpus {

enum class StageTag { kSource, kAugmented, kTest };

std::string_view to_string(StageTag tag);
StageTag parse_stage_tag(std::string_view s);

struct Utterance {
  std::string id;
  std::string reference;
  std::optional<std::string> audio_path;
  std::optional<double> duration_s;
  std::optional<std::string> accent;
  std::optional<std::string> domain_tag;

  bool operator==(const Utterance&) const = default;
};

class Corpus {
 public:
  Corpus() = default;
  /// Throws DataError if ids repeat or a record breaks an Utterance invariant.
  explicit Corpus(std::vector<Utterance> utterances, StageTag stage = StageTag::kTest);

  const std::vector<Utterance>& utterances() const noexcept { return utterances_; }
  StageTag stage() const noexcept { return stage_; }
  std::size_t size() const noexcept { return utterances_.size(); }
  bool empty() const noexcept { return utterances_.empty(); }

  const Utterance* find(std::string_view id) const;

  bool operator==(const Corpus& other) const {
    return stage_ == other.stage_ && utterances_ == other.utterances_;
  }

 private:
  std::vector<Utterance> utterances_;
  std::unordered_map<std::string, std::size_t> index_;
  StageTag stage_ = StageTag::kTest;
};

class HypothesisSet {
 public:
  HypothesisSet(std::string model_name,
                std::vector<std::pair<std::string, std::string>> entries);

  const std::string& model_name() const noexcept { return model_name_; }
  std::size_t size() const noexcept { return order_.size(); }
  /// Ids in file order.
  const std::vector<std::string>& ids() const noexcept { return order_; }
  const std::string* find(std::string_view id) const;

 private:
  std::string model_name_;
  std::vector<std::string> order_;
  std::unordered_map<std::string, std::string> entries_;
};

struct EvalPair {
  std::string id;
  std::string reference;
  std::string hypothesis;
  std::string model_name;
};

struct JoinResult {
  std::vector<EvalPair> pairs;
  /// Hypothesis ids absent from the corpus; reported, never fatal.
  std::vector<std::string> extra_ids;
};

struct Violation {
  std::size_t line = 0;
  std::string message;
};

struct ValidationReport {
  std::size_t records = 0;
  std::vector<Violation> violations;
  /// Set for an empty manifest: loadable, but probably not what was meant.
  bool warning = false;
  std::vector<std::string> warnings;

  bool ok() const noexcept { return violations.empty(); }
};

Corpus load_manifest(const std::filesystem::path& path, StageTag stage = StageTag::kTest);
ValidationReport validate_manifest(const std::filesystem::path& path);

/// One JSONL line per utterance, optional fields omitted when unset.
std::string serialize_manifest(const Corpus& corpus);
void save_manifest(const Corpus& corpus, const std::filesystem::path& path);

/// CSV converter: header row naming `id`, `reference` and any optional manifest
/// columns; RFC 4180 quoting.
Corpus import_csv(const std::filesystem::path& path, StageTag stage = StageTag::kTest);

HypothesisSet load_hypotheses(const std::filesystem::path& path, std::string model_name);

/// One pair per utterance, in corpus order. Throws DataError listing every
/// corpus id that has no hypothesis.
JoinResult join(const Corpus& corpus, const HypothesisSet& hyps);

}  // namespace afroasr::corpus
