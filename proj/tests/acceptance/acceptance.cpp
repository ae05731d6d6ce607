// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "afroasr/afroaug.hpp"
#include "afroasr/align.hpp"
#include "afroasr/cli.hpp"
#include "afroasr/entities.hpp"
#include "afroasr/report.hpp"
#include "afroasr/textnorm.hpp"
#include "appendix.hpp"
#include "oracle/edit_oracle.hpp"
#include "support.hpp"

using namespace afroasr;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kRelativeChangeTolerance = 0.0005;
constexpr double kSigmaBound = 5.0;
constexpr std::size_t kOraclePairs = 1000;
constexpr std::size_t kOracleMaxLength = 8;

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

// ---------------------------------------------------------------------------
// 1. Appendix WERs

Outcome appendix_wers() {
  struct Cell {
    std::size_t row;
    bool pretrained;
  };
  // daberechi/ft, femi/pre, femi/ft, ogechukwukana/pre, kilani/pre, kilani/ft
  const std::vector<Cell> cells = {{0, false}, {2, true}, {2, false}, {1, true}, {3, true}, {3, false}};
  Outcome o;
  std::ostringstream seen;
  for (const auto& c : cells) {
    const auto& row = testing::kAppendixRows[c.row];
    const auto rate = align::wer(row.reference, c.pretrained ? row.pretrained : row.finetuned);
    const auto expected = c.pretrained ? row.published_pretrained : row.published_finetuned;
    const auto got = report::format_rate(rate);
    seen << row.name << (c.pretrained ? "/pre=" : "/ft=") << got << ' ';
    if (got != expected) o.fail(std::string(row.name) + ": got " + got + ", published " + std::string(expected));
  }
  if (o.pass) o.detail = seen.str();
  return o;
}

// ---------------------------------------------------------------------------
// 2. Relative change

Outcome relative_changes() {
  Outcome o;
  const double whisper = report::relative_change(0.186, 0.108);
  const double xlsr = report::relative_change(0.236, 0.212);
  if (std::abs(whisper - 0.419) > kRelativeChangeTolerance) o.fail("whisper " + std::to_string(whisper));
  if (std::abs(xlsr - 0.102) > kRelativeChangeTolerance) o.fail("xlsr " + std::to_string(xlsr));
  if (o.pass) o.detail = "whisper=" + report::format_fixed3(whisper) + " xlsr=" + report::format_fixed3(xlsr);
  return o;
}

// ---------------------------------------------------------------------------
// 3. Synthesis count and determinism

std::vector<afroaug::Template> approved_templates(std::size_t n) {
  const std::vector<std::string> shapes = {
      "patient [PER] presented on account of ammenorrhea of 4 months",
      "[PER] has been living at [LOC] with his wife [PER] who helps with his medications.",
      "[PER] says 21 not 18 persons have been killed in the first 14 days of the lockdown in [LOC] so far.",
      "[PER] began playing the piano when he was a young child at [ORG]",
      "dr [PER] neonatal intensive care unit (icu) aware and dr [PER] surgery notified.",
  };
  std::vector<afroaug::Template> out;
  for (std::size_t i = 0; i < n; ++i) {
    afroaug::Template t;
    t.template_id = "tpl-" + std::to_string(i);
    t.source_utterance_id = "u" + std::to_string(i);
    t.text_with_slots = shapes[i % shapes.size()];
    t.slot_counts = afroaug::count_slots(t.text_with_slots);
    t.status = afroaug::TemplateStatus::kApproved;
    out.push_back(std::move(t));
  }
  return out;
}

entities::EntityLexicon synthesis_lexicon() {
  entities::EntityLexicon lex;
  for (const char* p : {"femi", "kilani", "zeribe", "ihuoma", "daberechi", "chinweizu ojo", "mahaja onyedikachukwu"})
    lex.add(entities::Label::kPer, p);
  for (const char* l : {"nigeria", "eket", "birnin kebbi", "kaduna", "warri", "ibadan"}) lex.add(entities::Label::kLoc, l);
  for (const char* g : {"asaba elementary school", "lekki clinic"}) lex.add(entities::Label::kOrg, g);
  return lex;
}

Outcome synthesis_count() {
  Outcome o;
  afroaug::SynthesisPlan plan;
  plan.templates = approved_templates(140);
  plan.repetitions = 200;
  plan.master_seed = 20230601;
  plan.jobs = 4;
  const auto lex = synthesis_lexicon();
  const auto first = afroaug::synthesize(plan, lex);
  plan.jobs = 1;
  const auto second = afroaug::synthesize(plan, lex);
  if (first.size() != 28000) o.fail("size " + std::to_string(first.size()));
  const auto a = corpus::serialize_manifest(first);
  const auto b = corpus::serialize_manifest(second);
  if (a != b) o.fail("runs differ");
  if (o.pass) o.detail = std::to_string(first.size()) + " transcripts, " + std::to_string(a.size()) + " identical bytes";
  return o;
}

// ---------------------------------------------------------------------------
// 4. Oracle equivalence

template <typename T>
void compare_with_oracle(const std::vector<T>& a, const std::vector<T>& b, Outcome& o, const char* what) {
  const auto dp = align::edit_distance(a, b);
  const auto expected = oracle::exhaustive_distance(a, b);
  if (dp.distance != expected || align::edit_distance_only(a, b) != expected)
    o.fail(std::string(what) + ": dp " + std::to_string(dp.distance) + " vs oracle " + std::to_string(expected));
  if (!oracle::alignment_replays(a, b, dp.alignment)) o.fail(std::string(what) + ": alignment does not replay");
}

Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> len(0, kOracleMaxLength);
  const std::vector<std::string> vocab = {"dr", "femi", "phenyl", "kebbi", "birnin", "so,"};
  std::uniform_int_distribution<std::size_t> word(0, vocab.size() - 1);
  std::uniform_int_distribution<int> letter(0, 3);
  for (std::size_t i = 0; i < kOraclePairs; ++i) {
    std::vector<std::string> wa(len(rng)), wb(len(rng));
    for (auto& w : wa) w = vocab[word(rng)];
    for (auto& w : wb) w = vocab[word(rng)];
    compare_with_oracle(wa, wb, o, "words");
    std::vector<char32_t> ca(len(rng)), cb(len(rng));
    for (auto& c : ca) c = U'a' + letter(rng);
    for (auto& c : cb) c = U'a' + letter(rng);
    compare_with_oracle(ca, cb, o, "chars");
  }
  if (o.pass) o.detail = std::to_string(kOraclePairs) + " word pairs + " + std::to_string(kOraclePairs) + " char pairs";
  return o;
}

// ---------------------------------------------------------------------------
// 5. Property suites

using Property = std::pair<const char*, std::function<bool()>>;

std::string random_sentence(std::mt19937_64& rng, std::size_t n) {
  static const std::vector<std::string> words = {"patient", "zeribe", "presented", "account", "birnin", "kebbi"};
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += (i ? " " : "") + words[pick(rng)];
  return s;
}

bool wer_identity() {
  std::mt19937_64 rng(1);
  for (std::size_t n = 1; n <= 50; ++n) {
    const auto s = random_sentence(rng, n);
    if (align::wer(s, s).numerator() != 0) return false;
  }
  return true;
}

bool single_substitution() {
  std::mt19937_64 rng(3);
  for (std::size_t n = 1; n <= 50; ++n) {
    auto tokens = textnorm::normalize_and_tokenize(random_sentence(rng, n)).tokens;
    std::string ref;
    for (const auto& t : tokens) ref += t + " ";
    tokens[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)] = "xyz";
    std::string hyp;
    for (const auto& t : tokens) hyp += t + " ";
    if (!(align::wer(ref, hyp) == align::ErrorRate(1, n))) return false;
  }
  return true;
}

bool triangle() {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> len(0, 12);
  std::uniform_int_distribution<int> sym(0, 2);
  auto seq = [&] {
    std::vector<int> v(len(rng));
    for (auto& x : v) x = sym(rng);
    return v;
  };
  for (int i = 0; i < 2000; ++i) {
    const auto a = seq(), b = seq(), c = seq();
    const auto ab = align::edit_distance_only(a, b);
    if (ab != align::edit_distance_only(b, a)) return false;
    if (align::edit_distance_only(a, c) > ab + align::edit_distance_only(b, c)) return false;
  }
  return true;
}

bool normalize_idempotent() {
  const std::vector<std::string> pieces = {"A", "b", " ", "\t", "\xC2\xA0", ".", "(", "e\xCC\x81", "\xC3\x89",
                                           "\xC3\x9F", "\xC4\xB0", "\xEF\xAC\x81", "\xE1\xBA\xB8", "\xFF"};
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  std::uniform_int_distribution<std::size_t> len(0, 10);
  for (unsigned bits = 0; bits < 16; ++bits) {
    textnorm::NormOptions o{bool(bits & 1u), bool(bits & 2u), bool(bits & 4u), bool(bits & 8u)};
    for (int i = 0; i < 300; ++i) {
      std::string s;
      for (std::size_t n = len(rng); n > 0; --n) s += pieces[pick(rng)];
      const auto once = textnorm::normalize(s, o);
      if (textnorm::normalize(once, o) != once) return false;
    }
  }
  return true;
}

entities::EntityLexicon fixture_lexicon() {
  return entities::load_lexicon({{entities::Label::kPer, testing::data_path("pipeline/lexicon_per.txt")},
                                 {entities::Label::kLoc, testing::data_path("pipeline/lexicon_loc.txt")},
                                 {entities::Label::kOrg, testing::data_path("pipeline/lexicon_org.txt")}});
}

bool subset_partition() {
  const auto corpus = corpus::load_manifest(testing::data_path("pipeline/manifest.jsonl"));
  const auto spans = entities::import_ner(testing::data_path("pipeline/ner_reference.jsonl"));
  const auto lex = fixture_lexicon();
  for (double t = 0.0; t <= 1.0; t += 0.05) {
    const auto s = entities::build_subsets(corpus, spans, lex, std::min(t, 1.0));
    if (s.no_ner + s.afriner != corpus.size()) return false;
    for (const auto& f : s.flags)
      if (f.no_ner == f.afriner) return false;
  }
  return true;
}

bool filter_monotone() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    std::vector<entities::EntitySpan> spans;
    for (std::size_t k = 0; k < 10; ++k) spans.push_back({entities::Label::kPer, k, k + 1, u(rng)});
    double lo = u(rng), hi = u(rng);
    if (lo > hi) std::swap(lo, hi);
    if (entities::filter_spans(spans, hi).size() > entities::filter_spans(spans, lo).size()) return false;
  }
  return true;
}

bool gazetteer_non_overlap() {
  entities::EntityLexicon lex;
  for (const char* f : {"a", "a b", "b c", "a b c d", "c", "d d"}) lex.add(entities::Label::kLoc, f);
  const entities::Gazetteer g(lex);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> sym(0, 3);
  std::uniform_int_distribution<int> len(0, 30);
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::string> toks(len(rng));
    for (auto& t : toks) t = std::string(1, static_cast<char>('a' + sym(rng)));
    const auto spans = g.tag(toks);
    for (std::size_t k = 0; k < spans.size(); ++k) {
      if (spans[k].token_start >= spans[k].token_end) return false;
      if (k > 0 && spans[k - 1].token_end > spans[k].token_start) return false;
    }
  }
  return true;
}

bool slot_uniformity() {
  afroaug::SynthesisPlan plan;
  plan.repetitions = 20000;
  plan.master_seed = 99;
  plan.jobs = 4;
  afroaug::Template t;
  t.template_id = "t";
  t.text_with_slots = "[LOC] then [PER]";
  t.slot_counts = afroaug::count_slots(t.text_with_slots);
  t.status = afroaug::TemplateStatus::kApproved;
  plan.templates = {t};
  const auto lex = synthesis_lexicon();
  const auto out = afroaug::synthesize(plan, lex);
  std::map<std::string, double> locs, names;
  for (const auto& u : out.utterances()) {
    const auto sep = u.reference.find(" then ");
    ++locs[u.reference.substr(0, sep)];
    ++names[u.reference.substr(sep + 6)];
  }
  auto uniform = [&](const std::map<std::string, double>& counts, std::size_t pool) {
    if (counts.size() != pool) return false;
    const double n = static_cast<double>(plan.repetitions);
    const double p = 1.0 / static_cast<double>(pool);
    const double sigma = std::sqrt(n * p * (1 - p));
    for (const auto& [k, c] : counts)
      if (std::abs(c - n * p) > kSigmaBound * sigma) return false;
    return true;
  };
  return uniform(locs, lex.size(entities::Label::kLoc)) &&
         uniform(names, lex.size(entities::Label::kPer) + lex.size(entities::Label::kOrg));
}

bool mask_synth_round_trip() {
  const auto& row = testing::kAppendixRows[4];
  const corpus::Utterance u{"u4", std::string(row.reference)};
  const std::vector<entities::EntitySpan> spans = {{entities::Label::kPer, 1, 2, 0.99}};
  afroaug::SynthesisPlan plan;
  plan.repetitions = 5;
  plan.templates = {afroaug::mask_entities(u, spans)};
  plan.templates[0].status = afroaug::TemplateStatus::kApproved;
  entities::EntityLexicon lex;
  lex.add(entities::Label::kPer, "zeribe");
  const auto synthesized = afroaug::synthesize(plan, lex);
  for (const auto& out : synthesized.utterances())
    if (out.reference != textnorm::normalize(row.reference)) return false;
  return true;
}

Outcome property_suites() {
  const std::vector<Property> props = {
      {"WER(x,x)=0", wer_identity},
      {"single substitution 1/N", single_substitution},
      {"symmetry+triangle", triangle},
      {"normalize idempotence", normalize_idempotent},
      {"No-NER+AfriNER=All", subset_partition},
      {"filter monotonicity", filter_monotone},
      {"gazetteer non-overlap", gazetteer_non_overlap},
      {"slot-fill uniformity 5 sigma", slot_uniformity},
      {"mask/synthesize round-trip", mask_synth_round_trip},
  };
  Outcome o;
  for (const auto& [name, check] : props)
    if (!check()) o.fail(name);
  if (o.pass) o.detail = std::to_string(props.size()) + " properties";
  return o;
}

// ---------------------------------------------------------------------------
// 6. Golden run

Outcome golden_run() {
  Outcome o;
  testing::TempDir dir;
  auto f = [](const char* name) { return testing::data_path(std::string("pipeline/") + name).string(); };
  const std::vector<std::string> lex = {"--lexicon-per", f("lexicon_per.txt"), "--lexicon-loc", f("lexicon_loc.txt"),
                                        "--lexicon-org", f("lexicon_org.txt")};
  const auto subsets = (dir.path() / "subsets.jsonl").string();
  const auto scores = (dir.path() / "scores.jsonl").string();
  const auto report_path = (dir.path() / "report.md").string();
  auto call = [&](std::vector<std::string> args) {
    std::ostringstream out, err;
    std::istringstream in;
    const int code = cli::run(args, out, err, in);
    if (code != 0) o.fail(args[0] + " " + args[1] + " exited " + std::to_string(code) + ": " + err.str());
  };
  std::vector<std::string> build = {"subset", "build", "--manifest", f("manifest.jsonl"), "--annotations",
                                    f("ner_reference.jsonl"), "-o", subsets};
  build.insert(build.end(), lex.begin(), lex.end());
  call(build);
  std::vector<std::string> score = {"eval",
                                    "score",
                                    "--manifest",
                                    f("manifest.jsonl"),
                                    "--hyp",
                                    "pretrained=" + f("hyp_pretrained.jsonl"),
                                    "--hyp",
                                    "finetuned=" + f("hyp_finetuned.jsonl"),
                                    "--annotations",
                                    f("ner_reference.jsonl"),
                                    "--hyp-ner",
                                    "pretrained=" + f("ner_pretrained.jsonl"),
                                    "--hyp-ner",
                                    "finetuned=" + f("ner_finetuned.jsonl"),
                                    "-o",
                                    scores};
  score.insert(score.end(), lex.begin(), lex.end());
  call(score);
  call({"eval", "report", "--scores", scores, "--subsets", subsets, "-o", report_path});
  if (!o.pass) return o;
  const auto produced = testing::slurp(report_path);
  if (produced != testing::slurp(f("golden_report.md")))
    o.fail("report differs from golden:\n" + produced);
  else
    o.detail = std::to_string(produced.size()) + " bytes match";
  return o;
}

struct Criterion {
  int number;
  const char* title;
  double time_limit_s;
  std::function<Outcome()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "appendix WER fixtures (exact after rounding)", 1.0, appendix_wers},
      {2, "relative change 0.419 / 0.102 within 0.0005", 0.1, relative_changes},
      {3, "140 templates x 200 reps = 28000, byte-identical", 10.0, synthesis_count},
      {4, "DP equals exhaustive search, length <= 8", 30.0, oracle_equivalence},
      {5, "property suites", 60.0, property_suites},
      {6, "end-to-end golden report", 5.0, golden_run},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (secs > c.time_limit_s) o.fail("took " + std::to_string(secs) + " s, limit " + std::to_string(c.time_limit_s));
    std::printf("%s criterion %d: %s [%.3f s] %s\n", o.pass ? "PASS" : "FAIL", c.number, c.title, secs,
                o.detail.c_str());
    failed += o.pass ? 0 : 1;
  }
  return failed;
}
