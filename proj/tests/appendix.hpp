#pragma once

// Reference / prediction rows from the appendix tables, with the WERs
// printed next to them.

#include <array>
#include <cmath>
#include <string>
#include <string_view>

namespace testing {

struct AppendixRow {
  std::string_view name;
  std::string_view reference;
  std::string_view pretrained;
  std::string_view finetuned;
  std::string_view published_pretrained;
  std::string_view published_finetuned;
};

inline constexpr std::array<AppendixRow, 6> kAppendixRows = {{
    {"daberechi",
     "dr daberechi neonatal intensive care unit (icu) aware and dr iniola surgery notified. 09 january, 2003",
     "dr. davirechi nyunato, intensive care unit, awuya, and dr. inuyo la sajar, notified 9th january, 2003.",
     "dr daberechi neonatal intensive care unit (icu) and dr inyola surgery notified. 09 jan, 2003", "0.813",
     "0.188"},
    {"ogechukwukana",
     "ogechukwukana has been living at birnin kebbi with his wife mahaja onyedikachukwu who helps with his "
     "medications.",
     "so,",
     "ogichukwukana has been living at birnin kebbi with his wife mahaja oyedikachukwu who helps with his "
     "medications.",
     "1.000", "0.118"},
    {"femi-lockdown",
     "femi says 21 not 18 persons have been killed in the first 14 days of the coronavirus lockdown in nigeria "
     "so far.",
     "phenyl says 21 not 18 persons have been cured in the first 14 days of the coronavirus lockdown in nigeria "
     "so far.",
     "femi says 21 not 18 persons have been killed in the first 14 days of the coronavirus lockdown in nigeria "
     "so far.",
     "0.091", "0.000"},
    {"kilani", "kilani began playing the piano when he was a young child at asaba elementary school",
     "killani began playing the piano when he was a young child at asaba elementary school.",
     "kilani began playing the piano when he was a young child at asaba elementary school", "0.133", "0.000"},
    {"zeribe",
     "patient zeribe presented on account of ammenorrhea of 4 months. next line. hot flushes associated with "
     "night sweats",
     "patient 0 will be represented on a count of arm and ear of a 4-month-old. next line. outflotches are "
     "associated with 9th sweat.",
     "patient zirinbe presented on account of ammenorrhea of 4 months. next line. hot flushes associated with "
     "night sweats",
     "0.833", "0.0556"},
    {"ihuoma", "patient ihuoma was addicted to morphine and eventually had to see dr. inango",
     "patient ioma was addicted to morphine and eventually had to see dr. enango.",
     "patient ihuoma was addicted to morphine and eventually had to see dr. inango", "0.154", "0.000"},
}};

/// True iff `value` rounds to `printed` at the printed precision.
inline bool matches_printed(double value, std::string_view printed) {
  const auto dot = printed.find('.');
  const int decimals = dot == std::string_view::npos ? 0 : static_cast<int>(printed.size() - dot - 1);
  return std::abs(value - std::stod(std::string(printed))) <= 0.5 * std::pow(10.0, -decimals) + 1e-12;
}

}  // namespace testing
