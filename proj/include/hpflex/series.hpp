#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hpflex/calendar.hpp"
#include "hpflex/error.hpp"
#include "hpflex/ids.hpp"

namespace hpflex {

enum class QuantityKind { electric_load, heat_demand, availability_factor, cop, hydro_inflow };

// Quantity token as it appears in the CSV "quantity" column. The base name is
// one of the canonical unit-bearing names; qualifiers select the technology,
// (building, sink) or (sink, pump) the series belongs to:
//   electric_load_MW
//   availability_factor:<technology>
//   hydro_inflow_MWh:<storage>
//   heat_demand_MWth:<building>:<sink>
//   cop:<sink>:<pump>
struct Quantity {
  QuantityKind kind = QuantityKind::electric_load;
  std::string qualifier;  // canonical "a:b" form, empty for electric_load

  auto operator<=>(const Quantity&) const = default;

  static Quantity load() { return {QuantityKind::electric_load, ""}; }
  static Quantity availability(Technology t) {
    return {QuantityKind::availability_factor, std::string(to_string(t))};
  }
  static Quantity inflow(StorageTech s) {
    return {QuantityKind::hydro_inflow, std::string(to_string(s))};
  }
  static Quantity heat_demand(BuildingType b, Sink s) {
    return {QuantityKind::heat_demand, std::string(to_string(b)) + ":" + std::string(to_string(s))};
  }
  static Quantity cop(Sink s, HeatPumpType p) {
    return {QuantityKind::cop, std::string(to_string(s)) + ":" + std::string(to_string(p))};
  }
};

inline std::string_view canonical_name(QuantityKind k) {
  switch (k) {
    case QuantityKind::electric_load: return "electric_load_MW";
    case QuantityKind::heat_demand: return "heat_demand_MWth";
    case QuantityKind::availability_factor: return "availability_factor";
    case QuantityKind::cop: return "cop";
    case QuantityKind::hydro_inflow: return "hydro_inflow_MWh";
  }
  return "?";
}

inline std::string to_string(const Quantity& q) {
  std::string out(canonical_name(q.kind));
  if (!q.qualifier.empty()) out += ":" + q.qualifier;
  return out;
}

struct ParsedQuantity {
  Quantity quantity;
  double to_canonical = 1.0;  // multiply raw values by this
};

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

inline std::optional<ParsedQuantity> parse_quantity(std::string_view token) {
  auto parts = detail::split(token, ':');
  const std::string_view base = parts[0];
  struct Unit {
    std::string_view name;
    QuantityKind kind;
    double factor;
  };
  static constexpr Unit kUnits[] = {
      {"electric_load_MW", QuantityKind::electric_load, 1.0},
      {"electric_load_GW", QuantityKind::electric_load, 1000.0},
      {"heat_demand_MWth", QuantityKind::heat_demand, 1.0},
      {"heat_demand_GWth", QuantityKind::heat_demand, 1000.0},
      {"availability_factor", QuantityKind::availability_factor, 1.0},
      {"cop", QuantityKind::cop, 1.0},
      {"hydro_inflow_MWh", QuantityKind::hydro_inflow, 1.0},
      {"hydro_inflow_GWh", QuantityKind::hydro_inflow, 1000.0},
  };
  const Unit* unit = nullptr;
  for (const auto& u : kUnits)
    if (u.name == base) unit = &u;
  if (!unit) return std::nullopt;

  ParsedQuantity out;
  out.quantity.kind = unit->kind;
  out.to_canonical = unit->factor;
  switch (unit->kind) {
    case QuantityKind::electric_load:
      if (parts.size() != 1) return std::nullopt;
      break;
    case QuantityKind::availability_factor: {
      if (parts.size() != 2) return std::nullopt;
      auto t = find_technology(parts[1]);
      if (!t || !is_variable_renewable(*t)) return std::nullopt;
      out.quantity = Quantity::availability(*t);
      break;
    }
    case QuantityKind::hydro_inflow: {
      if (parts.size() != 2) return std::nullopt;
      auto s = find_storage(parts[1]);
      if (!s || !has_inflow(*s)) return std::nullopt;
      out.quantity = Quantity::inflow(*s);
      break;
    }
    case QuantityKind::heat_demand: {
      if (parts.size() != 3) return std::nullopt;
      auto b = detail::kBuildingNames.find(parts[1]);
      auto s = detail::kSinkNames.find(parts[2]);
      if (!b || !s) return std::nullopt;
      out.quantity = Quantity::heat_demand(*b, *s);
      break;
    }
    case QuantityKind::cop: {
      if (parts.size() != 3) return std::nullopt;
      auto s = detail::kSinkNames.find(parts[1]);
      auto p = detail::kHeatPumpNames.find(parts[2]);
      if (!s || !p) return std::nullopt;
      out.quantity = Quantity::cop(*s, *p);
      break;
    }
  }
  return out;
}

// Shortest representation that parses back to the same double.
inline std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// A validated, immutable hourly series in canonical units (MW, MWh/h,
// dimensionless). Hour h covers [start + h, start + h + 1).
class HourlySeries {
 public:
  HourlySeries(CountryCode country, Quantity quantity, HourStamp start, std::vector<double> values)
      : country_(std::move(country)),
        quantity_(std::move(quantity)),
        start_(start),
        values_(std::move(values)) {
    validate();
  }

  const CountryCode& country() const { return country_; }
  const Quantity& quantity() const { return quantity_; }
  HourStamp start() const { return start_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t h) const { return values_[h]; }
  double sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }
  double max() const { return *std::max_element(values_.begin(), values_.end()); }

  bool aligned_with(const HourlySeries& o) const {
    return start_ == o.start_ && values_.size() == o.values_.size();
  }

  bool operator==(const HourlySeries&) const = default;

 private:
  void validate() const {
    const std::string where = country_ + " " + to_string(quantity_);
    if (values_.empty()) fail(ErrorKind::missing_value, where + ": empty series");
    for (std::size_t h = 0; h < values_.size(); ++h) {
      const double v = values_[h];
      const std::string at = where + " at " + format_iso_hour(start_ + static_cast<std::int64_t>(h));
      if (!std::isfinite(v)) fail(ErrorKind::missing_value, at + ": non-finite value");
      switch (quantity_.kind) {
        case QuantityKind::availability_factor:
          if (v < 0.0 || v > 1.0)
            fail(ErrorKind::out_of_range, at + ": availability " + format_number(v) + " outside [0,1]");
          break;
        case QuantityKind::cop:
          if (v <= 0.0) fail(ErrorKind::out_of_range, at + ": COP must be > 0");
          break;
        default:
          if (v < 0.0) fail(ErrorKind::negative_value, at + ": value " + format_number(v) + " < 0");
      }
    }
  }

  CountryCode country_;
  Quantity quantity_;
  HourStamp start_;
  std::vector<double> values_;
};

// Index arithmetic into the model calendar: hours [begin, end) of a source
// series starting at `source_start`.
struct ModelWindow {
  int label = 0;  // weather year: July 1 of `label` to June 30 of label + 1
  std::int64_t begin = 0;
  std::int64_t end = 0;

  std::int64_t length() const { return end - begin; }
};

inline ModelWindow make_window(HourStamp source_start, std::size_t source_length, int year,
                               std::int64_t hours) {
  if (hours < 1) fail(ErrorKind::invalid_argument, "window length must be >= 1 hour");
  const std::int64_t begin = july_first(year) - source_start;
  const auto len = static_cast<std::int64_t>(source_length);
  if (begin < 0 || begin + hours > len)
    fail(ErrorKind::coverage, "source " + format_iso_hour(source_start) + " + " +
                                  std::to_string(len) + "h does not cover " +
                                  std::to_string(hours) + "h from " +
                                  format_iso_hour(july_first(year)));
  return {year, begin, begin + hours};
}

inline HourlySeries window_july_june(const HourlySeries& series, int year, std::int64_t hours) {
  const ModelWindow w = make_window(series.start(), series.size(), year, hours);
  auto v = series.values();
  return HourlySeries(series.country(), series.quantity(), july_first(year),
                      std::vector<double>(v.begin() + w.begin, v.begin() + w.end));
}

// hd_{bt,st,h} per building type and sink for one country. An empty set
// means no heat-pump rollout is simulated for the country.
class HeatDemandSet {
 public:
  using Key = std::pair<BuildingType, Sink>;

  explicit HeatDemandSet(CountryCode country, std::map<Key, HourlySeries> profiles = {})
      : country_(std::move(country)), profiles_(std::move(profiles)) {
    const HourlySeries* first = nullptr;
    for (const auto& [key, s] : profiles_) {
      if (s.quantity() != Quantity::heat_demand(key.first, key.second) || s.country() != country_)
        fail(ErrorKind::alignment, "heat demand profile " + to_string(s.quantity()) +
                                       " filed under the wrong key");
      if (first && !first->aligned_with(s))
        fail(ErrorKind::alignment, country_ + ": heat demand profiles are not aligned");
      first = &s;
    }
  }

  const CountryCode& country() const { return country_; }
  bool empty() const { return profiles_.empty(); }
  const std::map<Key, HourlySeries>& profiles() const { return profiles_; }
  const HourlySeries* find(BuildingType b, Sink s) const {
    auto it = profiles_.find({b, s});
    return it == profiles_.end() ? nullptr : &it->second;
  }
  std::size_t hours() const { return empty() ? 0 : profiles_.begin()->second.size(); }
  std::optional<HourStamp> start() const {
    if (empty()) return std::nullopt;
    return profiles_.begin()->second.start();
  }

  // Sum over all building types and sinks, hour by hour.
  std::vector<double> total() const {
    std::vector<double> out(hours(), 0.0);
    for (const auto& [key, s] : profiles_)
      for (std::size_t h = 0; h < out.size(); ++h) out[h] += s[h];
    return out;
  }

 private:
  CountryCode country_;
  std::map<Key, HourlySeries> profiles_;
};

// cop_{st,hpt,h} per sink and heat-pump type for one country.
class CopSet {
 public:
  using Key = std::pair<Sink, HeatPumpType>;

  explicit CopSet(CountryCode country, std::map<Key, HourlySeries> profiles = {})
      : country_(std::move(country)), profiles_(std::move(profiles)) {
    const HourlySeries* first = nullptr;
    for (const auto& [key, s] : profiles_) {
      if (s.quantity() != Quantity::cop(key.first, key.second) || s.country() != country_)
        fail(ErrorKind::alignment, "COP profile " + to_string(s.quantity()) +
                                       " filed under the wrong key");
      if (first && !first->aligned_with(s))
        fail(ErrorKind::alignment, country_ + ": COP profiles are not aligned");
      first = &s;
    }
  }

  const CountryCode& country() const { return country_; }
  bool empty() const { return profiles_.empty(); }
  const std::map<Key, HourlySeries>& profiles() const { return profiles_; }
  const HourlySeries* find(Sink s, HeatPumpType p) const {
    auto it = profiles_.find({s, p});
    return it == profiles_.end() ? nullptr : &it->second;
  }

  // COP <= 1 is legal data but physically suspicious.
  std::vector<std::string> warnings() const {
    std::vector<std::string> out;
    for (const auto& [key, s] : profiles_) {
      std::size_t low = 0;
      for (double v : s.values()) low += v <= 1.0;
      if (low > 0)
        out.push_back(country_ + " " + to_string(s.quantity()) + ": " + std::to_string(low) +
                      " hour(s) with COP <= 1");
    }
    return out;
  }

  bool aligned_with(const HeatDemandSet& demand) const {
    if (demand.empty() || empty()) return true;
    const HourlySeries& ref = demand.profiles().begin()->second;
    return std::all_of(profiles_.begin(), profiles_.end(),
                       [&](const auto& kv) { return kv.second.aligned_with(ref); });
  }

 private:
  CountryCode country_;
  std::map<Key, HourlySeries> profiles_;
};

}  // namespace hpflex
