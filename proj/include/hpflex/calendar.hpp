#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace hpflex {

// Model calendar: UTC hours with every February 29 removed, so each calendar
// year has exactly 8760 hours. HourStamp counts model hours since
// 1970-01-01T00:00Z.
inline constexpr int kHoursPerYear = 8760;
inline constexpr int kEpochYear = 1970;

struct CivilHour {
  int year = kEpochYear;
  unsigned month = 1;  // 1..12
  unsigned day = 1;    // 1..31
  unsigned hour = 0;   // 0..23

  bool operator==(const CivilHour&) const = default;
};

class HourStamp {
 public:
  constexpr HourStamp() = default;
  constexpr explicit HourStamp(std::int64_t index) : index_(index) {}

  constexpr std::int64_t index() const { return index_; }
  constexpr HourStamp operator+(std::int64_t hours) const { return HourStamp(index_ + hours); }
  constexpr std::int64_t operator-(HourStamp other) const { return index_ - other.index_; }
  constexpr auto operator<=>(const HourStamp&) const = default;

 private:
  std::int64_t index_ = 0;
};

namespace detail {

inline constexpr std::array<unsigned, 12> kDaysInMonth{31, 28, 31, 30, 31, 30,
                                                       31, 31, 30, 31, 30, 31};

constexpr bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  return a / b - ((a % b != 0) && ((a < 0) != (b < 0)));
}

}  // namespace detail

constexpr bool is_leap_day(const CivilHour& c) {
  return c.month == 2 && c.day == 29 && detail::is_leap(c.year);
}

constexpr bool is_valid(const CivilHour& c) {
  if (c.month < 1 || c.month > 12 || c.hour > 23 || c.day < 1) return false;
  unsigned dim = detail::kDaysInMonth[c.month - 1];
  if (c.month == 2 && detail::is_leap(c.year)) dim = 29;
  return c.day <= dim;
}

// Leap days have no model hour; callers must filter them first.
constexpr HourStamp to_stamp(const CivilHour& c) {
  std::int64_t doy = 0;
  for (unsigned m = 1; m < c.month; ++m) doy += detail::kDaysInMonth[m - 1];
  doy += c.day - 1;
  return HourStamp((static_cast<std::int64_t>(c.year) - kEpochYear) * kHoursPerYear + doy * 24 +
                   c.hour);
}

constexpr CivilHour to_civil(HourStamp s) {
  const std::int64_t years = detail::floor_div(s.index(), kHoursPerYear);
  std::int64_t rem = s.index() - years * kHoursPerYear;
  CivilHour c;
  c.year = static_cast<int>(kEpochYear + years);
  c.hour = static_cast<unsigned>(rem % 24);
  std::int64_t doy = rem / 24;
  unsigned m = 0;
  while (doy >= detail::kDaysInMonth[m]) doy -= detail::kDaysInMonth[m++];
  c.month = m + 1;
  c.day = static_cast<unsigned>(doy) + 1;
  return c;
}

constexpr HourStamp july_first(int year) { return to_stamp({year, 7, 1, 0}); }

// Accepts "YYYY-MM-DDTHH[:MM[:SS]]" with optional 'Z' or "+00:00"; a space may
// replace the 'T'. Minutes and seconds must be zero (hourly data).
inline std::optional<CivilHour> parse_iso_hour(std::string_view text) {
  auto num = [&](std::size_t pos, std::size_t len, auto& out) {
    if (pos + len > text.size()) return false;
    auto r = std::from_chars(text.data() + pos, text.data() + pos + len, out);
    return r.ec == std::errc{} && r.ptr == text.data() + pos + len;
  };
  CivilHour c;
  if (text.size() < 13 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' '))
    return std::nullopt;
  if (!num(0, 4, c.year) || !num(5, 2, c.month) || !num(8, 2, c.day) || !num(11, 2, c.hour))
    return std::nullopt;
  std::size_t pos = 13;
  for (int field = 0; field < 2 && pos < text.size() && text[pos] == ':'; ++field) {
    unsigned v = 0;
    if (!num(pos + 1, 2, v) || v != 0) return std::nullopt;
    pos += 3;
  }
  std::string_view tail = text.substr(pos);
  if (!(tail.empty() || tail == "Z" || tail == "+00:00" || tail == "+0000")) return std::nullopt;
  if (!is_valid(c)) return std::nullopt;
  return c;
}

inline std::string format_iso_hour(const CivilHour& c) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02u:00:00Z", c.year, c.month, c.day, c.hour);
  return buf;
}

inline std::string format_iso_hour(HourStamp s) { return format_iso_hour(to_civil(s)); }

}  // namespace hpflex
