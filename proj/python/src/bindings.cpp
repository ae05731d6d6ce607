#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "afroasr/align.hpp"
#include "afroasr/cli.hpp"
#include "afroasr/entities.hpp"
#include "afroasr/error.hpp"
#include "afroasr/report.hpp"
#include "afroasr/textnorm.hpp"

namespace py = pybind11;
using namespace afroasr;

namespace {

textnorm::NormOptions norm_options(bool lowercase, bool nfc, bool collapse, bool strip_punct) {
  textnorm::NormOptions o;
  o.lowercase = lowercase;
  o.unicode_nfc = nfc;
  o.collapse_whitespace = collapse;
  o.strip_punctuation = strip_punct;
  return o;
}

std::string edit_kind_name(align::EditKind k) { return std::string(align::to_string(k)); }

}  // namespace

PYBIND11_MODULE(_afroasr, m) {
  m.doc() = "Error-rate scoring, entity tagging and report rendering for accented clinical ASR.";

  static py::exception<Error> base(m, "AfroAsrError");
  static py::exception<DataError> data(m, "DataError", base.ptr());
  static py::exception<IoError> io(m, "IoError", base.ptr());
  static py::exception<RemoteError> remote(m, "RemoteError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DataError& e) {
      PyErr_SetString(data.ptr(), e.what());
    } catch (const IoError& e) {
      PyErr_SetString(io.ptr(), e.what());
    } catch (const RemoteError& e) {
      PyErr_SetString(remote.ptr(), e.what());
    } catch (const Error& e) {
      PyErr_SetString(base.ptr(), e.what());
    }
  });

  py::class_<align::ErrorRate>(m, "ErrorRate")
      .def(py::init<std::size_t, std::size_t>(), py::arg("numerator"), py::arg("denominator"))
      .def_property_readonly("numerator", &align::ErrorRate::numerator)
      .def_property_readonly("denominator", &align::ErrorRate::denominator)
      .def_property_readonly("value", &align::ErrorRate::value)
      .def("__float__", &align::ErrorRate::value)
      .def("__eq__", [](const align::ErrorRate& a, const align::ErrorRate& b) { return a == b; })
      .def("__repr__", [](const align::ErrorRate& r) {
        return "ErrorRate(" + std::to_string(r.numerator()) + ", " + std::to_string(r.denominator()) + ")";
      });

  m.def(
      "normalize",
      [](std::string_view s, bool lowercase, bool nfc, bool collapse, bool strip_punct) {
        return textnorm::normalize(s, norm_options(lowercase, nfc, collapse, strip_punct));
      },
      py::arg("text"), py::kw_only(), py::arg("lowercase") = true, py::arg("unicode_nfc") = true,
      py::arg("collapse_whitespace") = true, py::arg("strip_punctuation") = false);
  m.def(
      "tokenize",
      [](std::string_view s, bool strip_punct) {
        return textnorm::normalize_and_tokenize(s, norm_options(true, true, true, strip_punct)).tokens;
      },
      py::arg("text"), py::kw_only(), py::arg("strip_punctuation") = false);

  m.def(
      "wer",
      [](std::string_view ref, std::string_view hyp, bool strip_punct) {
        return align::wer(ref, hyp, norm_options(true, true, true, strip_punct));
      },
      py::arg("reference"), py::arg("hypothesis"), py::kw_only(), py::arg("strip_punctuation") = false);
  m.def(
      "cer",
      [](std::string_view ref, std::string_view hyp, bool strip_punct) {
        return align::cer(ref, hyp, norm_options(true, true, true, strip_punct));
      },
      py::arg("reference"), py::arg("hypothesis"), py::kw_only(), py::arg("strip_punctuation") = false);
  m.def(
      "edit_distance",
      [](const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
        return align::edit_distance_only(ref, hyp);
      },
      py::arg("reference"), py::arg("hypothesis"));
  m.def(
      "align_words",
      [](std::string_view ref, std::string_view hyp) {
        std::vector<std::tuple<std::string, std::optional<std::size_t>, std::optional<std::size_t>>> out;
        for (const auto& op : align::align_words(ref, hyp).alignment.ops)
          out.emplace_back(edit_kind_name(op.kind), op.ref_index, op.hyp_index);
        return out;
      },
      py::arg("reference"), py::arg("hypothesis"), "List of (kind, ref_index, hyp_index).");

  py::enum_<entities::Label>(m, "Label")
      .value("PER", entities::Label::kPer)
      .value("LOC", entities::Label::kLoc)
      .value("ORG", entities::Label::kOrg);
  py::enum_<entities::SpanSource>(m, "SpanSource")
      .value("NER", entities::SpanSource::kNer)
      .value("GAZETTEER", entities::SpanSource::kGazetteer);

  py::class_<entities::EntitySpan>(m, "EntitySpan")
      .def(py::init([](entities::Label l, std::size_t b, std::size_t e, double score, entities::SpanSource src) {
             entities::EntitySpan s{l, b, e, score, src};
             entities::validate_span(s);
             return s;
           }),
           py::arg("label"), py::arg("start"), py::arg("end"), py::arg("score") = 1.0,
           py::arg("source") = entities::SpanSource::kNer)
      .def_readonly("label", &entities::EntitySpan::label)
      .def_readonly("start", &entities::EntitySpan::token_start)
      .def_readonly("end", &entities::EntitySpan::token_end)
      .def_readonly("score", &entities::EntitySpan::score)
      .def_readonly("source", &entities::EntitySpan::source)
      .def("__eq__", [](const entities::EntitySpan& a, const entities::EntitySpan& b) { return a == b; })
      .def("__repr__", [](const entities::EntitySpan& s) {
        return std::string(entities::to_string(s.label)) + "[" + std::to_string(s.token_start) + "," +
               std::to_string(s.token_end) + ")";
      });

  py::class_<entities::EntityLexicon>(m, "EntityLexicon")
      .def(py::init<>())
      .def("add", &entities::EntityLexicon::add, py::arg("label"), py::arg("form"))
      .def("forms", &entities::EntityLexicon::surface_texts, py::arg("label"))
      .def("size", &entities::EntityLexicon::size, py::arg("label"));

  m.def(
      "gazetteer_tag",
      [](std::string_view text, const entities::EntityLexicon& lex, bool strip_punct) {
        entities::MatchOptions opts;
        opts.strip_punct_for_matching = strip_punct;
        return entities::gazetteer_tag(textnorm::normalize_and_tokenize(text), lex, opts);
      },
      py::arg("text"), py::arg("lexicon"), py::kw_only(), py::arg("strip_punct_for_matching") = false);

  m.def(
      "ne_concat_cer",
      [](const std::vector<entities::EntitySpan>& ref_spans, const std::vector<entities::EntitySpan>& hyp_spans,
         std::string_view ref, std::string_view hyp) { return report::ne_concat_cer(ref_spans, hyp_spans, ref, hyp); },
      py::arg("reference_spans"), py::arg("hypothesis_spans"), py::arg("reference"), py::arg("hypothesis"));

  m.def("relative_change", &report::relative_change, py::arg("baseline"), py::arg("comparison"));
  m.def("format_rate", &report::format_rate, py::arg("rate"));

  m.def(
      "run",
      [](const std::vector<std::string>& args, const std::string& stdin_text) {
        std::ostringstream out, err;
        std::istringstream in(stdin_text);
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err, in);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), py::arg("stdin") = "", "Run the command-line interface in process; returns (code, stdout, stderr).");
}
