#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace afroasr::cli {

/// Bad invocation; exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a pipeline stage may need. Precedence: flag > config file >
/// NER_ENDPOINT environment variable > built-in default.
struct RunConfig {
  std::string manifest;
  std::map<std::string, std::string> hypotheses;      // model -> path
  std::map<std::string, std::string> lexicon;         // PER/LOC/ORG -> path
  std::string annotations;                            // reference NER spans
  std::map<std::string, std::string> hyp_annotations; // model -> path
  std::string scores;
  std::string subsets;
  std::string spans;
  std::string store;
  std::string decisions;
  std::string out;
  double threshold = 0.8;
  bool strip_punct = false;
  bool strip_punct_for_matching = false;
  std::uint64_t seed = 0;
  std::size_t repetitions = 200;
  double mask_fraction = 1.0;
  bool strict_categories = false;
  std::string mode = "macro";
  std::string format = "md";
  bool deltas = false;
  std::size_t jobs = 1;
  std::string ner_endpoint;
  std::size_t ner_batch_size = 16;
  int ner_attempts = 3;
  long ner_backoff_ms = 500;
  long ner_timeout_ms = 30000;
  std::size_t ner_concurrency = 1;
};

/// Applies a JSON config document on top of `cfg`. Throws UsageError for
/// unknown keys or wrongly typed values.
void apply_config_json(const std::string& json_text, RunConfig& cfg);

/// Exit status: 0 success, 1 data/validation error, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in);

}  // namespace afroasr::cli
