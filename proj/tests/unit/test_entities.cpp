#include <doctest.h>

#include <random>

#include "afroasr/entities.hpp"
#include "afroasr/error.hpp"
#include "support.hpp"

using namespace afroasr;
using namespace afroasr::entities;
using testing::TempDir;

namespace {

EntityLexicon fixture_lexicon() {
  return load_lexicon({{Label::kPer, testing::data_path("pipeline/lexicon_per.txt")},
                       {Label::kLoc, testing::data_path("pipeline/lexicon_loc.txt")},
                       {Label::kOrg, testing::data_path("pipeline/lexicon_org.txt")}});
}

EntitySpan ner(Label l, std::size_t b, std::size_t e, double score) { return {l, b, e, score, SpanSource::kNer}; }

std::vector<std::string> words(std::string_view text) { return textnorm::normalize_and_tokenize(text).tokens; }

}  // namespace

TEST_SUITE("entities") {
  TEST_CASE("labels") {
    CHECK(parse_label("PER") == Label::kPer);
    CHECK(parse_label("LOC") == Label::kLoc);
    CHECK(parse_label("ORG") == Label::kOrg);
    CHECK(to_string(Label::kLoc) == "LOC");
    CHECK_THROWS_AS(parse_label("DATE"), DataError);
    CHECK_THROWS_AS(parse_label("per"), DataError);
  }

  TEST_CASE("span validation") {
    CHECK_NOTHROW(validate_span(ner(Label::kPer, 0, 1, 0.5)));
    CHECK_THROWS_AS(validate_span(ner(Label::kPer, 1, 1, 0.5)), DataError);
    CHECK_THROWS_AS(validate_span(ner(Label::kPer, 0, 1, 1.3)), DataError);
    CHECK_THROWS_AS(validate_span(ner(Label::kPer, 0, 1, -0.1)), DataError);
    CHECK_THROWS_AS(validate_span({Label::kPer, 0, 1, 0.9, SpanSource::kGazetteer}), DataError);
    const std::vector<EntitySpan> spans = {ner(Label::kPer, 2, 4, 0.9)};
    CHECK_NOTHROW(check_span_range(spans, 4, "u1"));
    CHECK_THROWS_WITH_AS(check_span_range(spans, 3, "u1"), doctest::Contains("u1"), DataError);
  }

  TEST_CASE("lexicon loading") {
    TempDir dir;
    LexiconLoadReport report;
    const auto lex = load_lexicon({{Label::kPer, dir.write("per.txt", "femi\nFemi\n\n  \nDaberechi\n")},
                                   {Label::kLoc, dir.write("loc.txt", "Birnin Kebbi\n")},
                                   {Label::kOrg, dir.write("org.txt", "")}},
                                  &report);
    CHECK(lex.forms(Label::kLoc).contains(SurfaceForm{"birnin", "kebbi"}));
    CHECK(lex.size(Label::kPer) == 2);
    CHECK(report.counts[Label::kPer] == 2);
    CHECK(report.duplicates[Label::kPer] == 1);
    CHECK(report.counts[Label::kOrg] == 0);
    CHECK(report.warnings.size() == 1);
    CHECK(lex.surface_texts(Label::kPer) == std::vector<std::string>{"daberechi", "femi"});
    CHECK(lex.source_tag(Label::kLoc).find("loc.txt") != std::string::npos);
    CHECK_THROWS_AS(load_lexicon({{Label::kPer, dir.path() / "absent.txt"}}), IoError);
  }

  TEST_CASE("lexicon add") {
    EntityLexicon lex;
    CHECK(lex.empty());
    CHECK(lex.add(Label::kPer, "Femi"));
    CHECK_FALSE(lex.add(Label::kPer, "femi"));
    CHECK_FALSE(lex.add(Label::kPer, "   "));
    CHECK_FALSE(lex.empty());
  }

  TEST_CASE("gazetteer examples") {
    EntityLexicon lex;
    lex.add(Label::kLoc, "birnin kebbi");
    const auto spans = Gazetteer(lex).tag(words("living at birnin kebbi with"));
    REQUIRE(spans.size() == 1);
    CHECK(spans[0] == EntitySpan{Label::kLoc, 2, 4, 1.0, SpanSource::kGazetteer});

    CHECK(Gazetteer(EntityLexicon{}).tag(words("living at birnin kebbi with")).empty());

    EntityLexicon warri;
    warri.add(Label::kLoc, "warri");
    warri.add(Label::kOrg, "warri leading");
    const auto longest = Gazetteer(warri).tag(words("at warri leading specialist"));
    REQUIRE(longest.size() == 1);
    CHECK(longest[0].token_start == 1);
    CHECK(longest[0].token_end == 3);
    CHECK(longest[0].label == Label::kOrg);
  }

  TEST_CASE("gazetteer falls back to shorter match after a failed long prefix") {
    EntityLexicon lex;
    lex.add(Label::kOrg, "lagos state university");
    lex.add(Label::kLoc, "lagos");
    const auto spans = Gazetteer(lex).tag(words("from lagos state to lagos state university"));
    REQUIRE(spans.size() == 2);
    CHECK(spans[0] == EntitySpan{Label::kLoc, 1, 2, 1.0, SpanSource::kGazetteer});
    CHECK(spans[1] == EntitySpan{Label::kOrg, 4, 7, 1.0, SpanSource::kGazetteer});
  }

  TEST_CASE("a form in several categories takes the first of PER, LOC, ORG") {
    EntityLexicon lex;
    lex.add(Label::kOrg, "jordan");
    lex.add(Label::kLoc, "jordan");
    auto spans = Gazetteer(lex).tag(words("jordan"));
    REQUIRE(spans.size() == 1);
    CHECK(spans[0].label == Label::kLoc);
    lex.add(Label::kPer, "jordan");
    spans = Gazetteer(lex).tag(words("jordan"));
    CHECK(spans[0].label == Label::kPer);
  }

  TEST_CASE("trailing punctuation blocks a match unless stripped for matching") {
    EntityLexicon lex;
    lex.add(Label::kLoc, "kaduna");
    const auto toks = words("back to kaduna, then home");
    CHECK(Gazetteer(lex).tag(toks).empty());
    const auto spans = Gazetteer(lex, {.strip_punct_for_matching = true}).tag(toks);
    REQUIRE(spans.size() == 1);
    CHECK(spans[0].token_start == 2);
  }

  TEST_CASE("property: gazetteer spans are ordered, disjoint, and stable under re-normalization") {
    EntityLexicon lex;
    for (const char* f : {"a", "a b", "b c", "a b c d", "c", "d d"}) lex.add(Label::kPer, f);
    const Gazetteer g(lex);
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> sym(0, 3);
    std::uniform_int_distribution<int> len(0, 25);
    for (int i = 0; i < 500; ++i) {
      std::string text;
      for (int n = len(rng); n > 0; --n) text += std::string(1, static_cast<char>('A' + sym(rng))) + "  ";
      const auto normalized = textnorm::normalize(text);
      const auto spans = g.tag(textnorm::tokenize(normalized));
      for (std::size_t k = 1; k < spans.size(); ++k) CHECK(spans[k - 1].token_end <= spans[k].token_start);
      for (const auto& s : spans) CHECK(s.token_start < s.token_end);
      CHECK(g.tag(textnorm::normalize_and_tokenize(normalized)) == spans);
    }
  }

  TEST_CASE("import_ner") {
    TempDir dir;
    const auto spans = import_ner(
        dir.write("a.jsonl", "{\"id\":\"u1\",\"spans\":[{\"label\":\"PER\",\"start\":1,\"end\":2,\"score\":0.97}]}\n"
                             "{\"id\":\"u2\",\"spans\":[]}\n"));
    REQUIRE(spans.at("u1").size() == 1);
    CHECK(spans.at("u1")[0] == ner(Label::kPer, 1, 2, 0.97));
    CHECK(spans.at("u2").empty());

    auto fails = [&](std::string_view text, RecordError::Kind kind) {
      try {
        import_ner(dir.write("bad.jsonl", text));
      } catch (const RecordError& e) {
        return e.kind() == kind;
      }
      return false;
    };
    CHECK(fails("{\"id\":\"u1\",\"spans\":[{\"label\":\"DATE\",\"start\":0,\"end\":1,\"score\":0.9}]}\n",
                RecordError::Kind::kInvalidValue));
    CHECK(fails("{\"id\":\"u1\",\"spans\":[{\"label\":\"PER\",\"start\":0,\"end\":1,\"score\":1.3}]}\n",
                RecordError::Kind::kInvalidValue));
    CHECK(fails("{\"id\":\"u1\",\"spans\":[{\"label\":\"PER\",\"start\":0,\"end\":1}]}\n",
                RecordError::Kind::kMissingField));
    CHECK(fails("{\"id\":\"u1\",\"spans\":[{\"label\":\"PER\",\"start\":2,\"end\":1,\"score\":0.5}]}\n",
                RecordError::Kind::kInvalidValue));
    CHECK(fails("{\"id\":\"u1\",\"spans\":[]}\n{\"id\":\"u1\",\"spans\":[]}\n", RecordError::Kind::kDuplicateId));
    CHECK(fails("nope\n", RecordError::Kind::kMalformed));
    CHECK(fails("{\"id\":\"u1\"}\n", RecordError::Kind::kMissingField));
  }

  TEST_CASE("serialize_spans round-trips through import_ner") {
    TempDir dir;
    std::vector<std::pair<std::string, std::vector<EntitySpan>>> rows = {
        {"u1", {ner(Label::kPer, 0, 1, 0.95), ner(Label::kLoc, 5, 7, 0.88)}},
        {"u2", {{Label::kOrg, 1, 4, 1.0, SpanSource::kGazetteer}}},
        {"u3", {}}};
    const auto back = import_ner(dir.write("s.jsonl", serialize_spans(rows)));
    for (const auto& [id, spans] : rows) CHECK(back.at(id) == spans);
  }

  TEST_CASE("filter_spans") {
    const std::vector<EntitySpan> spans = {ner(Label::kPer, 0, 1, 0.85), ner(Label::kPer, 1, 2, 0.80),
                                           ner(Label::kPer, 2, 3, 0.79)};
    const auto kept = filter_spans(spans, 0.8);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].score == 0.85);
    const std::vector<EntitySpan> with_zero = {ner(Label::kPer, 0, 1, 0.0), ner(Label::kPer, 1, 2, 0.01)};
    CHECK(filter_spans(with_zero, 0.0).size() == 1);
    CHECK(filter_spans(std::vector<EntitySpan>{}, 0.8).empty());
    const std::vector<EntitySpan> gaz = {{Label::kLoc, 0, 1, 1.0, SpanSource::kGazetteer}};
    CHECK(filter_spans(gaz, 0.999).size() == 1);
    CHECK_THROWS_AS(check_threshold(1.5), DataError);
    CHECK_THROWS_AS(check_threshold(-0.1), DataError);
  }

  TEST_CASE("property: raising the threshold never adds spans") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> score(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
      std::vector<EntitySpan> spans;
      for (std::size_t k = 0; k < 12; ++k) spans.push_back(ner(Label::kPer, k, k + 1, score(rng)));
      double lo = score(rng);
      double hi = score(rng);
      if (lo > hi) std::swap(lo, hi);
      const auto a = filter_spans(spans, lo);
      const auto b = filter_spans(spans, hi);
      CHECK(b.size() <= a.size());
      for (const auto& s : b) CHECK(std::find(a.begin(), a.end(), s) != a.end());
    }
  }

  TEST_CASE("build_subsets on the bundled fixture") {
    const auto corpus = corpus::load_manifest(testing::data_path("pipeline/manifest.jsonl"));
    const auto ner_spans = import_ner(testing::data_path("pipeline/ner_reference.jsonl"));
    const auto lex = fixture_lexicon();
    const auto s = build_subsets(corpus, ner_spans, lex, 0.8);
    CHECK(s.no_ner == 3);
    CHECK(s.afriner == 3);
    CHECK(s.afrival == 2);
    CHECK(s.afriner_afrival_overlap == 0);
    CHECK(s.find("u1")->afriner);
    CHECK(s.find("u2")->no_ner);
    CHECK(s.find("u2")->afrival);
    CHECK(s.find("u6")->no_ner);
    CHECK_FALSE(s.find("u6")->afrival);
    REQUIRE(s.warnings.size() == 1);
    CHECK(s.warnings[0].find("u6") != std::string::npos);
  }

  TEST_CASE("property: No-NER and AfriNER partition; AfriVal ignores the threshold") {
    const auto corpus = corpus::load_manifest(testing::data_path("pipeline/manifest.jsonl"));
    const auto ner_spans = import_ner(testing::data_path("pipeline/ner_reference.jsonl"));
    const auto lex = fixture_lexicon();
    const auto base = build_subsets(corpus, ner_spans, lex, 0.8);
    for (double t : {0.0, 0.5, 0.75, 0.8, 0.9, 0.95, 0.99, 1.0}) {
      const auto s = build_subsets(corpus, ner_spans, lex, t);
      CHECK(s.no_ner + s.afriner == corpus.size());
      for (std::size_t i = 0; i < s.flags.size(); ++i) {
        CHECK(s.flags[i].no_ner != s.flags[i].afriner);
        CHECK(s.flags[i].afrival == base.flags[i].afrival);
      }
    }
    CHECK(build_subsets(corpus, ner_spans, lex, 0.7).afriner == 4);
  }

  TEST_CASE("build_subsets rejects spans past the reference") {
    const corpus::Corpus c(std::vector<corpus::Utterance>{{"u1", "one two"}});
    SpanMap spans{{"u1", {ner(Label::kPer, 1, 3, 0.9)}}};
    CHECK_THROWS_AS(build_subsets(c, spans, EntityLexicon{}, 0.8), DataError);
  }

  TEST_CASE("subset file round-trip") {
    TempDir dir;
    const auto corpus = corpus::load_manifest(testing::data_path("pipeline/manifest.jsonl"));
    const auto s = build_subsets(corpus, import_ner(testing::data_path("pipeline/ner_reference.jsonl")),
                                 fixture_lexicon(), 0.8);
    const auto back = load_subsets(dir.write("s.jsonl", serialize_subsets(s)));
    CHECK(back.flags == s.flags);
    CHECK(back.no_ner == 3);
    CHECK(back.afrival == 2);
    CHECK_THROWS_AS(load_subsets(dir.write("bad.jsonl", "{\"id\":\"u1\",\"no_ner\":true,\"afriner\":true,"
                                                        "\"afrival\":false}\n")),
                    DataError);
  }
}
