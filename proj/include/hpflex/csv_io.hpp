#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hpflex/calendar.hpp"
#include "hpflex/error.hpp"
#include "hpflex/series.hpp"

namespace hpflex {

inline constexpr std::string_view kSeriesHeader = "timestamp,country,quantity,value";

// Reads a long-format series CSV (one row per country/quantity/hour). Rows of
// one (country, quantity) pair may appear in any order; February 29 rows are
// dropped. Series come back ordered by (country, quantity).
inline std::vector<HourlySeries> read_series_csv(std::istream& in, const std::string& source = "<stream>") {
  std::string line;
  std::size_t line_no = 0;
  auto where = [&] { return source + ":" + std::to_string(line_no); };

  while (std::getline(in, line)) {
    ++line_no;
    if (!detail::trim(line).empty()) break;
  }
  if (detail::trim(line) != kSeriesHeader)
    fail(ErrorKind::bad_header, where() + ": expected header '" + std::string(kSeriesHeader) + "'");

  struct Rows {
    Quantity quantity;
    std::map<std::int64_t, double> by_hour;
  };
  std::map<std::pair<CountryCode, Quantity>, Rows> groups;

  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.empty()) continue;
    auto fields = detail::split(text, ',');
    if (fields.size() != 4) fail(ErrorKind::malformed_row, where() + ": expected 4 fields");
    const auto stamp_text = detail::trim(fields[0]);
    const auto country = std::string(detail::trim(fields[1]));
    const auto quantity_text = detail::trim(fields[2]);
    const auto value_text = detail::trim(fields[3]);

    auto civil = parse_iso_hour(stamp_text);
    if (!civil) fail(ErrorKind::malformed_row, where() + ": bad timestamp '" + std::string(stamp_text) + "'");
    if (country.empty()) fail(ErrorKind::malformed_row, where() + ": empty country");
    auto parsed = parse_quantity(quantity_text);
    if (!parsed) fail(ErrorKind::malformed_row, where() + ": unknown quantity '" + std::string(quantity_text) + "'");
    if (value_text.empty())
      fail(ErrorKind::missing_value, where() + ": empty value at " + std::string(stamp_text));
    double value = 0.0;
    auto r = std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
    if (r.ec != std::errc{} || r.ptr != value_text.data() + value_text.size())
      fail(ErrorKind::malformed_row, where() + ": bad value '" + std::string(value_text) + "'");
    if (is_leap_day(*civil)) continue;

    auto& g = groups[{country, parsed->quantity}];
    g.quantity = parsed->quantity;
    const auto idx = to_stamp(*civil).index();
    if (!g.by_hour.emplace(idx, value * parsed->to_canonical).second)
      fail(ErrorKind::malformed_row, where() + ": duplicate row for " + format_iso_hour(*civil));
  }

  std::vector<HourlySeries> out;
  for (auto& [key, g] : groups) {
    std::vector<double> values;
    values.reserve(g.by_hour.size());
    std::int64_t expected = g.by_hour.begin()->first;
    for (const auto& [idx, v] : g.by_hour) {
      if (idx != expected)
        fail(ErrorKind::missing_value, source + ": " + key.first + " " + to_string(key.second) +
                                           " has no value for " + format_iso_hour(HourStamp(expected)));
      values.push_back(v);
      ++expected;
    }
    out.emplace_back(key.first, g.quantity, HourStamp(g.by_hour.begin()->first), std::move(values));
  }
  return out;
}

inline std::vector<HourlySeries> read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open " + path.string());
  return read_series_csv(in, path.string());
}

// Single-series convenience: the file must contain exactly one series of the
// given quantity (optionally restricted to one country).
inline HourlySeries ingest_series(const std::filesystem::path& path, const Quantity& quantity,
                                  const std::optional<CountryCode>& country = std::nullopt) {
  std::vector<HourlySeries> matches;
  for (auto& s : read_series_csv(path))
    if (s.quantity() == quantity && (!country || s.country() == *country)) matches.push_back(std::move(s));
  if (matches.size() != 1)
    fail(ErrorKind::invalid_argument, path.string() + ": expected exactly one " + to_string(quantity) +
                                          " series, found " + std::to_string(matches.size()));
  return std::move(matches.front());
}

// Canonical emission: header, then each series' rows in hour order.
inline void write_series_csv(std::ostream& out, const std::vector<HourlySeries>& series) {
  out << kSeriesHeader << '\n';
  for (const auto& s : series) {
    const std::string q = to_string(s.quantity());
    for (std::size_t h = 0; h < s.size(); ++h)
      out << format_iso_hour(s.start() + static_cast<std::int64_t>(h)) << ',' << s.country() << ','
          << q << ',' << format_number(s[h]) << '\n';
  }
}

inline std::string to_csv(const std::vector<HourlySeries>& series) {
  std::ostringstream os;
  write_series_csv(os, series);
  return os.str();
}

}  // namespace hpflex
