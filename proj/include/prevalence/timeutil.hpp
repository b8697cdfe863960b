#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace prevalence {

// All instants are UTC epoch seconds. Timestamps in files must carry an
// explicit offset; offset-less strings are rejected so that time bucketing
// never depends on a silent UTC assumption.

struct CivilDate {
  int year;
  unsigned month;  // 1..12
  unsigned day;    // 1..31
};

std::int64_t days_from_civil(int y, unsigned m, unsigned d);
CivilDate civil_from_days(std::int64_t z);

// Parses "YYYY-MM-DDTHH:MM:SS[.frac](Z|+HH:MM|-HH:MM)". Fractional seconds
// are accepted and truncated. Throws ValidationError on anything else.
std::int64_t parse_iso8601(std::string_view s);

// Canonical UTC form "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601_utc(std::int64_t epoch_seconds);

std::int64_t civil_to_epoch(int y, unsigned m, unsigned d, int hh = 0, int mm = 0, int ss = 0);
CivilDate civil_of_epoch(std::int64_t epoch_seconds);

}  // namespace prevalence
