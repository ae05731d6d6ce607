#include "afroasr/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "afroasr/afroaug.hpp"
#include "afroasr/corpus.hpp"
#include "afroasr/entities.hpp"
#include "afroasr/error.hpp"
#include "afroasr/io.hpp"
#include "afroasr/parallel.hpp"
#include "afroasr/ner_client.hpp"
#include "afroasr/report.hpp"

namespace afroasr::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::map<std::string, std::string> string_map(const json& v, const char* key) {
  if (!v.is_object()) throw UsageError(std::string("config key '") + key + "' must be an object");
  std::map<std::string, std::string> out;
  for (const auto& [k, val] : v.items()) {
    if (!val.is_string()) throw UsageError(std::string("config key '") + key + "." + k + "' must be a string");
    out[k] = val.get<std::string>();
  }
  return out;
}

}  // namespace

void apply_config_json(const std::string& json_text, RunConfig& cfg) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [key, v] : doc.items()) {
    try {
      if (key == "manifest") cfg.manifest = v.get<std::string>();
      else if (key == "hypotheses") cfg.hypotheses = string_map(v, "hypotheses");
      else if (key == "lexicon") cfg.lexicon = string_map(v, "lexicon");
      else if (key == "annotations") cfg.annotations = v.get<std::string>();
      else if (key == "hyp_annotations") cfg.hyp_annotations = string_map(v, "hyp_annotations");
      else if (key == "scores") cfg.scores = v.get<std::string>();
      else if (key == "subsets") cfg.subsets = v.get<std::string>();
      else if (key == "spans") cfg.spans = v.get<std::string>();
      else if (key == "store") cfg.store = v.get<std::string>();
      else if (key == "decisions") cfg.decisions = v.get<std::string>();
      else if (key == "out") cfg.out = v.get<std::string>();
      else if (key == "threshold") cfg.threshold = v.get<double>();
      else if (key == "strip_punct") cfg.strip_punct = v.get<bool>();
      else if (key == "strip_punct_for_matching") cfg.strip_punct_for_matching = v.get<bool>();
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "repetitions") cfg.repetitions = v.get<std::size_t>();
      else if (key == "mask_fraction") cfg.mask_fraction = v.get<double>();
      else if (key == "strict_categories") cfg.strict_categories = v.get<bool>();
      else if (key == "mode") cfg.mode = v.get<std::string>();
      else if (key == "format") cfg.format = v.get<std::string>();
      else if (key == "deltas") cfg.deltas = v.get<bool>();
      else if (key == "jobs") cfg.jobs = v.get<std::size_t>();
      else if (key == "ner_endpoint") cfg.ner_endpoint = v.get<std::string>();
      else if (key == "ner_batch_size") cfg.ner_batch_size = v.get<std::size_t>();
      else if (key == "ner_attempts") cfg.ner_attempts = v.get<int>();
      else if (key == "ner_backoff_ms") cfg.ner_backoff_ms = v.get<long>();
      else if (key == "ner_timeout_ms") cfg.ner_timeout_ms = v.get<long>();
      else if (key == "ner_concurrency") cfg.ner_concurrency = v.get<std::size_t>();
      else throw UsageError("unknown config key '" + key + "'");
    } catch (const json::type_error&) {
      throw UsageError("config key '" + key + "' has the wrong type");
    }
  }
}

namespace {

struct Io {
  std::ostream& out;
  std::ostream& err;
  std::istream& in;
};

void require(const std::string& value, const char* what) {
  if (value.empty()) throw UsageError(std::string("missing ") + what);
}

void require_file(const std::string& path, const char* what) {
  require(path, what);
  if (!fs::is_regular_file(path)) throw IoError(std::string(what) + " not found: " + path);
}

// Writes to --out atomically, or to stdout when no path is set.
void emit(const std::string& path, const std::string& text, Io& io) {
  if (path.empty())
    io.out << text;
  else
    io::write_file_atomic(path, text);
}

std::map<std::string, std::string> parse_pairs(const std::vector<std::string>& items, const char* flag) {
  std::map<std::string, std::string> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
      throw UsageError(std::string(flag) + " expects MODEL=PATH, got '" + item + "'");
    if (!out.emplace(item.substr(0, eq), item.substr(eq + 1)).second)
      throw UsageError(std::string(flag) + " repeats model '" + item.substr(0, eq) + "'");
  }
  return out;
}

textnorm::NormOptions norm_options(const RunConfig& cfg) {
  textnorm::NormOptions opts;
  opts.strip_punctuation = cfg.strip_punct;
  return opts;
}

entities::MatchOptions match_options(const RunConfig& cfg) {
  return {cfg.strip_punct_for_matching};
}

bool has_lexicon(const RunConfig& cfg) { return !cfg.lexicon.empty(); }

void require_lexicon_files(const RunConfig& cfg) {
  for (const auto& [label, path] : cfg.lexicon) require_file(path, "lexicon file");
}

entities::EntityLexicon load_lexicon(const RunConfig& cfg, Io& io) {
  std::map<entities::Label, fs::path> paths;
  for (const auto& [label, path] : cfg.lexicon) {
    entities::Label l;
    try {
      l = entities::parse_label(label);
    } catch (const DataError& e) {
      throw UsageError(e.what());
    }
    require_file(path, "lexicon file");
    paths[l] = path;
  }
  if (paths.empty()) throw UsageError("missing lexicon (--lexicon-per/--lexicon-loc/--lexicon-org)");
  entities::LexiconLoadReport report;
  auto lexicon = entities::load_lexicon(paths, &report);
  for (const auto& w : report.warnings) io.err << "warning: " << w << '\n';
  return lexicon;
}

int print_warnings(const std::vector<std::string>& warnings, Io& io) {
  for (const auto& w : warnings) io.err << "warning: " << w << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_validate(const RunConfig& cfg, Io& io) {
  require(cfg.manifest, "manifest path");
  if (!fs::exists(cfg.manifest)) throw IoError("manifest not found: " + cfg.manifest);
  const auto report = corpus::validate_manifest(cfg.manifest);
  nlohmann::ordered_json doc;
  doc["records"] = report.records;
  doc["violations"] = nlohmann::ordered_json::array();
  for (const auto& v : report.violations) doc["violations"].push_back({{"line", v.line}, {"message", v.message}});
  doc["warning"] = report.warning;
  io.out << doc.dump() << '\n';
  print_warnings(report.warnings, io);
  return report.ok() ? 0 : 1;
}

int cmd_convert_csv(const std::string& csv_path, const RunConfig& cfg, Io& io) {
  require_file(csv_path, "CSV file");
  const auto corpus = corpus::import_csv(csv_path);
  emit(cfg.out, corpus::serialize_manifest(corpus), io);
  io.err << "converted " << corpus.size() << " record(s)\n";
  return 0;
}

using SpanRows = std::vector<std::pair<std::string, std::vector<entities::EntitySpan>>>;

int cmd_tag_gazetteer(const RunConfig& cfg, Io& io) {
  require_file(cfg.manifest, "manifest");
  require_lexicon_files(cfg);
  const auto corpus = corpus::load_manifest(cfg.manifest);
  const auto lexicon = load_lexicon(cfg, io);
  const entities::Gazetteer gazetteer(lexicon, match_options(cfg));
  SpanRows rows(corpus.size());
  parallel_for(corpus.size(), cfg.jobs, [&](std::size_t i) {
    const auto& u = corpus.utterances()[i];
    rows[i] = {u.id, gazetteer.tag(textnorm::normalize_and_tokenize(u.reference))};
  });
  std::size_t total = 0;
  for (const auto& r : rows) total += r.second.size();
  emit(cfg.out, entities::serialize_spans(rows), io);
  io.err << "tagged " << rows.size() << " utterance(s), " << total << " span(s)\n";
  return 0;
}

// Orders annotations by corpus, checks token ranges, and warns about gaps.
SpanRows align_to_corpus(const corpus::Corpus& corpus, const entities::SpanMap& spans, Io& io) {
  SpanRows rows;
  for (const auto& u : corpus.utterances()) {
    auto it = spans.find(u.id);
    if (it == spans.end()) {
      io.err << "warning: no annotation for '" << u.id << "'\n";
      rows.emplace_back(u.id, std::vector<entities::EntitySpan>{});
      continue;
    }
    entities::check_span_range(it->second, textnorm::normalize_and_tokenize(u.reference).size(), u.id);
    rows.emplace_back(u.id, it->second);
  }
  for (const auto& [id, list] : spans)
    if (!corpus.find(id)) io.err << "warning: annotation for unknown id '" << id << "' ignored\n";
  return rows;
}

int cmd_tag_import(const RunConfig& cfg, Io& io) {
  require_file(cfg.manifest, "manifest");
  require_file(cfg.annotations, "annotation file");
  const auto corpus = corpus::load_manifest(cfg.manifest);
  const auto spans = entities::import_ner(cfg.annotations);
  emit(cfg.out, entities::serialize_spans(align_to_corpus(corpus, spans, io)), io);
  return 0;
}

int cmd_tag_fetch(const RunConfig& cfg, Io& io) {
  require_file(cfg.manifest, "manifest");
  if (cfg.ner_endpoint.empty()) throw UsageError("missing NER endpoint (--endpoint, config ner_endpoint, or NER_ENDPOINT)");
  const auto corpus = corpus::load_manifest(cfg.manifest);
  entities::NerClientOptions opts;
  opts.batch_size = cfg.ner_batch_size;
  opts.max_attempts = cfg.ner_attempts;
  opts.initial_backoff = std::chrono::milliseconds(cfg.ner_backoff_ms);
  opts.timeout = std::chrono::milliseconds(cfg.ner_timeout_ms);
  opts.max_concurrent_batches = cfg.ner_concurrency;
  const auto spans = entities::fetch_ner(cfg.ner_endpoint, corpus, opts);
  emit(cfg.out, entities::serialize_spans(align_to_corpus(corpus, spans, io)), io);
  return 0;
}

int cmd_subset_build(const RunConfig& cfg, Io& io) {
  require_file(cfg.manifest, "manifest");
  require_lexicon_files(cfg);
  require_file(cfg.annotations, "annotation file");
  const auto corpus = corpus::load_manifest(cfg.manifest);
  const auto spans = entities::import_ner(cfg.annotations);
  const auto lexicon = load_lexicon(cfg, io);
  const auto subsets = entities::build_subsets(corpus, spans, lexicon, cfg.threshold, match_options(cfg));
  print_warnings(subsets.warnings, io);
  emit(cfg.out, entities::serialize_subsets(subsets), io);
  io.err << "all " << subsets.flags.size() << ", no-ner " << subsets.no_ner << ", afriner " << subsets.afriner
         << ", afrival " << subsets.afrival << ", afriner&afrival " << subsets.afriner_afrival_overlap << '\n';
  return 0;
}

int cmd_augment_mask(const RunConfig& cfg, Io& io) {
  require_file(cfg.manifest, "manifest");
  require_file(cfg.annotations, "annotation file");
  const auto corpus = corpus::load_manifest(cfg.manifest);
  const auto spans = entities::import_ner(cfg.annotations);
  entities::check_threshold(cfg.threshold);
  std::vector<afroaug::Template> store;
  std::size_t unusable = 0;
  for (std::size_t idx : afroaug::select_for_masking(corpus, cfg.mask_fraction, cfg.seed)) {
    const auto& u = corpus.utterances()[idx];
    std::vector<entities::EntitySpan> kept;
    if (auto it = spans.find(u.id); it != spans.end()) kept = entities::filter_spans(it->second, cfg.threshold);
    auto t = afroaug::mask_entities(u, kept);
    if (!t.usable()) {
      ++unusable;
      continue;
    }
    store.push_back(std::move(t));
  }
  emit(cfg.out, afroaug::serialize_templates(store), io);
  io.err << "masked " << store.size() << " template(s); skipped " << unusable << " without entities\n";
  return 0;
}

int cmd_augment_review(const RunConfig& cfg, Io& io) {
  require_file(cfg.store, "template store");
  auto store = afroaug::load_templates(cfg.store);
  std::vector<afroaug::ReviewDecision> decisions;
  if (!cfg.decisions.empty()) {
    require_file(cfg.decisions, "decisions file");
    decisions = afroaug::load_decisions(cfg.decisions);
  } else {
    for (const auto& t : store) {
      if (t.status != afroaug::TemplateStatus::kPending) continue;
      io.out << '\n' << t.template_id << ": " << t.text_with_slots << "\n[a]pprove [r]eject [s]kip [q]uit > "
             << std::flush;
      std::string answer;
      if (!std::getline(io.in, answer) || answer == "q") break;
      if (answer == "a") {
        decisions.push_back({t.template_id, afroaug::TemplateStatus::kApproved, ""});
      } else if (answer == "r") {
        io.out << "note > " << std::flush;
        std::string note;
        std::getline(io.in, note);
        decisions.push_back({t.template_id, afroaug::TemplateStatus::kRejected, note});
      }
    }
  }
  afroaug::ReviewSummary summary;
  afroaug::review_templates(store, decisions, &summary);
  io::write_file_atomic(cfg.out.empty() ? cfg.store : cfg.out, afroaug::serialize_templates(store));
  io.err << "applied " << summary.applied << " decision(s), " << summary.unchanged << " unchanged\n";
  return 0;
}

int cmd_augment_synth(const RunConfig& cfg, Io& io) {
  require_file(cfg.store, "template store");
  require_lexicon_files(cfg);
  afroaug::SynthesisPlan plan;
  plan.templates = afroaug::load_templates(cfg.store);
  plan.repetitions = cfg.repetitions;
  plan.master_seed = cfg.seed;
  plan.strict_categories = cfg.strict_categories;
  plan.jobs = cfg.jobs;
  const auto lexicon = load_lexicon(cfg, io);
  const auto augmented = afroaug::synthesize(plan, lexicon);
  emit(cfg.out, corpus::serialize_manifest(augmented), io);
  io.err << "synthesized " << augmented.size() << " transcript(s)\n";
  return 0;
}

int cmd_eval_score(const RunConfig& cfg, Io& io) {
  require_file(cfg.manifest, "manifest");
  if (cfg.hypotheses.empty()) throw UsageError("missing --hyp MODEL=PATH");
  for (const auto& [model, path] : cfg.hypotheses) require_file(path, "hypothesis file");
  if (!cfg.annotations.empty()) require_file(cfg.annotations, "annotation file");
  for (const auto& [model, path] : cfg.hyp_annotations) {
    if (!cfg.hypotheses.contains(model)) throw UsageError("--hyp-ner names unknown model '" + model + "'");
    require_file(path, "hypothesis annotation file");
  }
  if (!cfg.hyp_annotations.empty() && cfg.annotations.empty())
    throw UsageError("--hyp-ner needs --annotations for the reference side");
  require_lexicon_files(cfg);
  const auto corpus = corpus::load_manifest(cfg.manifest);

  std::vector<corpus::EvalPair> pairs;
  for (const auto& [model, path] : cfg.hypotheses) {
    auto joined = corpus::join(corpus, corpus::load_hypotheses(path, model));
    for (const auto& id : joined.extra_ids)
      io.err << "warning: model '" << model << "' has a hypothesis for unknown id '" << id << "'\n";
    for (auto& p : joined.pairs) pairs.push_back(std::move(p));
  }

  std::vector<std::unique_ptr<report::EntitySource>> sources;
  if (!cfg.annotations.empty()) {
    std::map<std::string, entities::SpanMap> hyp_spans;
    for (const auto& [model, path] : cfg.hyp_annotations) hyp_spans[model] = entities::import_ner(path);
    sources.push_back(std::make_unique<report::AnnotationEntitySource>(entities::import_ner(cfg.annotations),
                                                                       std::move(hyp_spans), cfg.threshold));
  }
  if (has_lexicon(cfg))
    sources.push_back(std::make_unique<report::GazetteerEntitySource>(load_lexicon(cfg, io), match_options(cfg)));
  std::unique_ptr<report::EntitySource> source;
  if (sources.size() == 1)
    source = std::move(sources.front());
  else if (sources.size() > 1)
    source = std::make_unique<report::CombinedEntitySource>(std::move(sources));

  const auto result = report::score_pairs(pairs, norm_options(cfg), source.get(), cfg.jobs);
  emit(cfg.out, report::serialize_rows(result.rows), io);
  for (const auto& e : result.errors)
    io.err << "error: " << e.model_name << '/' << e.id << ": " << e.message << '\n';
  return result.errors.empty() ? 0 : 1;
}

int cmd_eval_report(const RunConfig& cfg, Io& io) {
  require_file(cfg.scores, "scores file");
  require_file(cfg.subsets, "subset file");
  const auto mode = report::parse_mode(cfg.mode);
  const auto format = report::parse_format(cfg.format);
  const auto table = report::aggregate(report::load_rows(cfg.scores), entities::load_subsets(cfg.subsets), mode);
  std::string text = report::render(table, format);
  if (cfg.deltas) text += "\n" + report::render_deltas(table, format);
  emit(cfg.out, text, io);
  return 0;
}

int cmd_eval_distribution(const RunConfig& cfg, Io& io) {
  require_file(cfg.spans, "span file");
  auto spans = entities::import_ner(cfg.spans);
  for (auto& [id, list] : spans) list = entities::filter_spans(list, cfg.threshold);
  emit(cfg.out, report::render_distribution(report::entity_distribution(spans), report::parse_format(cfg.format)),
       io);
  return 0;
}

// ---------------------------------------------------------------------------

std::string find_config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return {};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in) {
  Io io{out, err, in};
  RunConfig cfg;
  std::string config_path;
  std::vector<std::string> hyp_items;
  std::vector<std::string> hyp_ner_items;
  std::string lex_per, lex_loc, lex_org;
  std::string csv_path;

  try {
    if (const char* env = std::getenv("NER_ENDPOINT"); env && *env) cfg.ner_endpoint = env;
    config_path = find_config_path(args);
    if (!config_path.empty()) apply_config_json(io::read_file(config_path), cfg);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  CLI::App app{"Named-entity-aware ASR evaluation and entity-substitution augmentation"};
  app.name("afroasr");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", config_path, "JSON config file; flags override its keys");
  app.add_option("--jobs", cfg.jobs, "Worker threads for scoring, tagging and synthesis")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--strip-punct", cfg.strip_punct, "Strip punctuation before WER/CER");

  auto add_manifest = [&](CLI::App* sub) { sub->add_option("--manifest", cfg.manifest, "Reference manifest (JSONL)"); };
  auto add_out = [&](CLI::App* sub) { sub->add_option("-o,--out", cfg.out, "Output file (default: stdout)"); };
  auto add_lexicon = [&](CLI::App* sub) {
    sub->add_option("--lexicon-per", lex_per, "PER surface forms, one per line");
    sub->add_option("--lexicon-loc", lex_loc, "LOC surface forms, one per line");
    sub->add_option("--lexicon-org", lex_org, "ORG surface forms, one per line");
    sub->add_flag("--strip-punct-for-matching", cfg.strip_punct_for_matching,
                  "Ignore punctuation when matching lexicon forms");
  };
  auto add_threshold = [&](CLI::App* sub) {
    sub->add_option("--threshold", cfg.threshold, "Keep NER spans with score strictly above this")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
  };

  auto* validate = app.add_subcommand("validate", "Check a reference manifest");
  validate->add_option("manifest", cfg.manifest, "Manifest (JSONL)");

  auto* convert = app.add_subcommand("convert-csv", "Convert a CSV table to a JSONL manifest");
  convert->add_option("csv", csv_path, "CSV file with id,reference[,...] header")->required();
  add_out(convert);

  auto* tag = app.add_subcommand("tag", "Produce entity spans");
  tag->require_subcommand(1);
  auto* tag_gaz = tag->add_subcommand("gazetteer", "Longest-match lexicon tagging");
  add_manifest(tag_gaz);
  add_lexicon(tag_gaz);
  add_out(tag_gaz);
  auto* tag_import = tag->add_subcommand("import-ner", "Validate an NER annotation file against a manifest");
  add_manifest(tag_import);
  tag_import->add_option("--annotations", cfg.annotations, "NER annotations (JSONL)");
  add_out(tag_import);
  auto* tag_fetch = tag->add_subcommand("fetch-ner", "Annotate a manifest with a remote NER service");
  add_manifest(tag_fetch);
  tag_fetch->add_option("--endpoint", cfg.ner_endpoint, "Service URL (POST /ner)");
  tag_fetch->add_option("--batch-size", cfg.ner_batch_size, "Texts per request")->capture_default_str();
  tag_fetch->add_option("--attempts", cfg.ner_attempts, "Attempts per batch")->capture_default_str();
  tag_fetch->add_option("--backoff-ms", cfg.ner_backoff_ms, "First retry delay, doubled each retry")
      ->capture_default_str();
  tag_fetch->add_option("--timeout-ms", cfg.ner_timeout_ms, "Per-request timeout")->capture_default_str();
  tag_fetch->add_option("--concurrency", cfg.ner_concurrency, "Batches in flight")->capture_default_str();
  add_out(tag_fetch);

  auto* subset = app.add_subcommand("subset", "Evaluation subsets");
  subset->require_subcommand(1);
  auto* subset_build = subset->add_subcommand("build", "Assign No-NER / AfriNER / AfriVal flags");
  add_manifest(subset_build);
  subset_build->add_option("--annotations", cfg.annotations, "Reference NER annotations (JSONL)");
  add_lexicon(subset_build);
  add_threshold(subset_build);
  add_out(subset_build);

  auto* augment = app.add_subcommand("augment", "Entity-substitution augmentation");
  augment->require_subcommand(1);
  auto* mask = augment->add_subcommand("mask", "Mask entities into slot templates");
  add_manifest(mask);
  mask->add_option("--annotations", cfg.annotations, "NER annotations (JSONL)");
  add_threshold(mask);
  mask->add_option("--mask-fraction", cfg.mask_fraction, "Fraction of utterances to mask")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  mask->add_option("--seed", cfg.seed, "Selection seed")->capture_default_str();
  add_out(mask);
  auto* review = augment->add_subcommand("review", "Approve or reject templates");
  review->add_option("--store", cfg.store, "Template store (JSONL)");
  review->add_option("--decisions", cfg.decisions, "Decisions file (JSONL); interactive when omitted");
  review->add_option("-o,--out", cfg.out, "Output store (default: update --store in place)");
  auto* synth = augment->add_subcommand("synth", "Fill approved templates from the lexicon");
  synth->add_option("--store", cfg.store, "Template store (JSONL)");
  add_lexicon(synth);
  synth->add_option("--reps", cfg.repetitions, "Repetitions per template")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth->add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
  synth->add_flag("--strict-categories", cfg.strict_categories, "Fill [ORG] from ORG only instead of PER+ORG");
  add_out(synth);

  auto* eval = app.add_subcommand("eval", "Scoring and reporting");
  eval->require_subcommand(1);
  auto* score = eval->add_subcommand("score", "Per-utterance WER/CER");
  add_manifest(score);
  score->add_option("--hyp", hyp_items, "MODEL=PATH hypothesis file (repeatable)");
  score->add_option("--annotations", cfg.annotations, "Reference NER annotations for entity CER");
  score->add_option("--hyp-ner", hyp_ner_items, "MODEL=PATH hypothesis NER annotations (repeatable)");
  add_lexicon(score);
  add_threshold(score);
  add_out(score);
  auto* rep = eval->add_subcommand("report", "Aggregate scores into the subset table");
  rep->add_option("--scores", cfg.scores, "Output of eval score");
  rep->add_option("--subsets", cfg.subsets, "Output of subset build");
  rep->add_option("--format", cfg.format, "md, csv or json")->capture_default_str();
  rep->add_option("--mode", cfg.mode, "macro or micro")->capture_default_str();
  rep->add_flag("--deltas", cfg.deltas, "Append relative change of each subset against All");
  add_out(rep);
  auto* dist = eval->add_subcommand("distribution", "Entity counts per category");
  dist->add_option("--spans", cfg.spans, "Span file (JSONL)");
  dist->add_option("--threshold", cfg.threshold, "Keep spans with score strictly above this")
      ->check(CLI::Range(0.0, 1.0));
  dist->add_option("--format", cfg.format, "md, csv or json")->capture_default_str();
  add_out(dist);

  std::vector<const char*> argv{"afroasr"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!hyp_items.empty()) cfg.hypotheses = parse_pairs(hyp_items, "--hyp");
    if (!hyp_ner_items.empty()) cfg.hyp_annotations = parse_pairs(hyp_ner_items, "--hyp-ner");
    if (!lex_per.empty()) cfg.lexicon["PER"] = lex_per;
    if (!lex_loc.empty()) cfg.lexicon["LOC"] = lex_loc;
    if (!lex_org.empty()) cfg.lexicon["ORG"] = lex_org;
    if (!(cfg.threshold >= 0.0 && cfg.threshold <= 1.0)) throw UsageError("threshold must be in [0,1]");
    if (cfg.jobs == 0) throw UsageError("--jobs must be positive");

    if (validate->parsed()) return cmd_validate(cfg, io);
    if (convert->parsed()) return cmd_convert_csv(csv_path, cfg, io);
    if (tag_gaz->parsed()) return cmd_tag_gazetteer(cfg, io);
    if (tag_import->parsed()) return cmd_tag_import(cfg, io);
    if (tag_fetch->parsed()) return cmd_tag_fetch(cfg, io);
    if (subset_build->parsed()) return cmd_subset_build(cfg, io);
    if (mask->parsed()) return cmd_augment_mask(cfg, io);
    if (review->parsed()) return cmd_augment_review(cfg, io);
    if (synth->parsed()) return cmd_augment_synth(cfg, io);
    if (score->parsed()) return cmd_eval_score(cfg, io);
    if (rep->parsed()) return cmd_eval_report(cfg, io);
    if (dist->parsed()) return cmd_eval_distribution(cfg, io);
    throw UsageError("no command");
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace afroasr::cli
