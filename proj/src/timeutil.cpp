#include "prevalence/timeutil.hpp"

#include <cctype>
#include <cstdio>

#include "prevalence/errors.hpp"

namespace prevalence {

namespace {

bool is_leap(int y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

unsigned days_in_month(int y, unsigned m) {
  static const unsigned lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return lengths[m - 1];
}

// Expects exactly n digits at s[pos..]; advances pos.
int take_digits(std::string_view s, std::size_t& pos, int n, const char* what) {
  if (pos + static_cast<std::size_t>(n) > s.size()) {
    throw ValidationError(std::string("timestamp: truncated ") + what);
  }
  int v = 0;
  for (int i = 0; i < n; ++i) {
    char c = s[pos + i];
    if (c < '0' || c > '9') {
      throw ValidationError(std::string("timestamp: bad digit in ") + what);
    }
    v = v * 10 + (c - '0');
  }
  pos += n;
  return v;
}

void expect(std::string_view s, std::size_t& pos, char c) {
  if (pos >= s.size() || s[pos] != c) {
    throw ValidationError(std::string("timestamp: expected '") + c + "'");
  }
  ++pos;
}

}  // namespace

// Howard Hinnant's civil calendar algorithms.
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return CivilDate{static_cast<int>(y + (m <= 2)), m, d};
}

std::int64_t civil_to_epoch(int y, unsigned m, unsigned d, int hh, int mm, int ss) {
  return days_from_civil(y, m, d) * 86400 + hh * 3600 + mm * 60 + ss;
}

CivilDate civil_of_epoch(std::int64_t t) {
  std::int64_t days = t / 86400;
  if (t % 86400 < 0) --days;
  return civil_from_days(days);
}

std::int64_t parse_iso8601(std::string_view s) {
  std::size_t pos = 0;
  const int year = take_digits(s, pos, 4, "year");
  expect(s, pos, '-');
  const int month = take_digits(s, pos, 2, "month");
  expect(s, pos, '-');
  const int day = take_digits(s, pos, 2, "day");
  expect(s, pos, 'T');
  const int hh = take_digits(s, pos, 2, "hour");
  expect(s, pos, ':');
  const int mm = take_digits(s, pos, 2, "minute");
  expect(s, pos, ':');
  const int ss = take_digits(s, pos, 2, "second");

  if (month < 1 || month > 12) throw ValidationError("timestamp: month out of range");
  if (day < 1 || static_cast<unsigned>(day) > days_in_month(year, month)) {
    throw ValidationError("timestamp: day out of range");
  }
  if (hh > 23 || mm > 59 || ss > 59) throw ValidationError("timestamp: time out of range");

  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    std::size_t ndigits = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      ++pos;
      ++ndigits;
    }
    if (ndigits == 0) throw ValidationError("timestamp: empty fractional second");
  }

  if (pos >= s.size()) {
    throw ValidationError("timestamp: missing UTC offset (offset-less timestamps are rejected)");
  }

  std::int64_t offset = 0;
  if (s[pos] == 'Z') {
    ++pos;
  } else if (s[pos] == '+' || s[pos] == '-') {
    const int sign = s[pos] == '+' ? 1 : -1;
    ++pos;
    const int oh = take_digits(s, pos, 2, "offset hour");
    expect(s, pos, ':');
    const int om = take_digits(s, pos, 2, "offset minute");
    if (oh > 23 || om > 59) throw ValidationError("timestamp: offset out of range");
    offset = sign * (oh * 3600 + om * 60);
  } else {
    throw ValidationError("timestamp: missing UTC offset (offset-less timestamps are rejected)");
  }
  if (pos != s.size()) throw ValidationError("timestamp: trailing characters");

  return civil_to_epoch(year, static_cast<unsigned>(month), static_cast<unsigned>(day), hh, mm, ss) - offset;
}

std::string format_iso8601_utc(std::int64_t t) {
  const CivilDate cd = civil_of_epoch(t);
  std::int64_t sod = t % 86400;
  if (sod < 0) sod += 86400;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", cd.year, cd.month, cd.day,
                static_cast<int>(sod / 3600), static_cast<int>((sod % 3600) / 60),
                static_cast<int>(sod % 60));
  return buf;
}

}  // namespace prevalence
