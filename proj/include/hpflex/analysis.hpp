#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpflex/calendar.hpp"
#include "hpflex/scenarios.hpp"

namespace hpflex {

// ---------------------------------------------------------------- residual load

inline constexpr std::array kResidualVre{Technology::pv, Technology::wind_onshore, Technology::wind_offshore,
                                         Technology::run_of_river};

// load - sum(vre) [+ hp]; all series aligned.
inline std::vector<double> residual_load(std::span<const double> load, const std::vector<std::span<const double>>& vre,
                                         std::optional<std::span<const double>> heat_pump = std::nullopt) {
  std::vector<double> out(load.begin(), load.end());
  for (const auto& s : vre) {
    if (s.size() != out.size()) fail(ErrorKind::alignment, "VRE series length differs from load");
    for (std::size_t h = 0; h < out.size(); ++h) out[h] -= s[h];
  }
  if (heat_pump) {
    if (heat_pump->size() != out.size()) fail(ErrorKind::alignment, "heat-pump series length differs from load");
    for (std::size_t h = 0; h < out.size(); ++h) out[h] += (*heat_pump)[h];
  }
  return out;
}

// Residual load of one country from a solved model: load minus dispatched
// PV, wind and run-of-river, optionally plus heat-pump electricity. GW.
inline std::vector<double> residual_load(const ModelResult& r, const CountryCode& c, bool include_heat_pumps = false) {
  const NamedSeries* load = r.series(c, "load");
  if (!load) fail(ErrorKind::alignment, c + ": result has no load series");
  std::vector<std::span<const double>> vre;
  for (Technology t : kResidualVre)
    if (const NamedSeries* s = r.series(c, "gen:" + std::string(to_string(t)))) vre.emplace_back(s->values);
  std::optional<std::span<const double>> hp;
  const NamedSeries* e = r.series(c, "heat_pump");
  if (include_heat_pumps && e) hp = std::span<const double>(e->values);
  return residual_load(load->values, vre, hp);
}

inline std::vector<double> sum_series(const std::vector<std::vector<double>>& parts) {
  std::vector<double> out;
  for (const auto& p : parts) {
    if (out.empty()) out.assign(p.size(), 0.0);
    if (p.size() != out.size()) fail(ErrorKind::alignment, "series lengths differ");
    for (std::size_t h = 0; h < p.size(); ++h) out[h] += p[h];
  }
  return out;
}

// ------------------------------------------------------------------ RLDC

inline std::vector<double> rldc(std::span<const double> series, std::size_t top_n) {
  if (top_n > series.size()) fail(ErrorKind::invalid_argument, "rldc: top_n exceeds series length");
  std::vector<double> v(series.begin(), series.end());
  std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(top_n), v.end(), std::greater<>());
  v.resize(top_n);
  return v;
}

inline std::vector<double> rldc(std::span<const double> series) { return rldc(series, series.size()); }

// ------------------------------------------------------------------ peaks

enum class PeakQuantity { heat_demand, heat_pump_load, residual_load };

inline std::string_view to_string(PeakQuantity q) {
  switch (q) {
    case PeakQuantity::heat_demand: return "heat_demand";
    case PeakQuantity::heat_pump_load: return "heat_pump_load";
    case PeakQuantity::residual_load: return "residual_load";
  }
  return "?";
}

inline constexpr const char* kTotalCountry = "total";

struct PeakRecord {
  CountryCode country;  // or "total"
  PeakQuantity quantity;
  std::size_t hour = 0;
  double value = 0.0;
  int rank = 1;  // 1 = maximum; >1 from the top-k variant
};

// Hours of the k largest values, ties broken by earliest hour.
inline std::vector<std::size_t> top_hours(std::span<const double> s, std::size_t k) {
  std::vector<std::size_t> idx(s.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  k = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) { return s[a] != s[b] ? s[a] > s[b] : a < b; });
  idx.resize(k);
  return idx;
}

inline std::size_t argmax(std::span<const double> s) {
  if (s.empty()) fail(ErrorKind::invalid_argument, "argmax of an empty series");
  std::size_t best = 0;
  for (std::size_t h = 1; h < s.size(); ++h)
    if (s[h] > s[best]) best = h;
  return best;
}

using PeakBundle = std::map<CountryCode, std::map<PeakQuantity, std::vector<double>>>;

// Per country and quantity the hour of the maximum (earliest on ties), plus a
// "total" record on the cross-country sum. k > 1 adds the next-largest hours.
inline std::vector<PeakRecord> peak_records(const PeakBundle& bundle, std::size_t k = 1) {
  std::vector<PeakRecord> out;
  std::map<PeakQuantity, std::vector<std::vector<double>>> by_quantity;
  for (const auto& [c, qs] : bundle)
    for (const auto& [q, s] : qs) {
      int rank = 1;
      for (std::size_t h : top_hours(s, k)) out.push_back({c, q, h, s[h], rank++});
      by_quantity[q].push_back(s);
    }
  for (const auto& [q, parts] : by_quantity) {
    const auto total = sum_series(parts);
    int rank = 1;
    for (std::size_t h : top_hours(total, k)) out.push_back({kTotalCountry, q, h, total[h], rank++});
  }
  return out;
}

// Heat output served by heat pumps, heat-pump electricity and residual load
// (without heat pumps) per country of a solved result. GW.
inline PeakBundle peak_bundle(const ModelResult& r, const std::vector<CountryCode>& countries) {
  PeakBundle b;
  for (const auto& c : countries) {
    auto& q = b[c];
    q[PeakQuantity::residual_load] = residual_load(r, c, false);
    const std::size_t H = q[PeakQuantity::residual_load].size();
    std::vector<double> heat(H, 0.0);
    if (auto it = r.heat.find(c); it != r.heat.end())
      for (const auto& [combo, t] : it->second.combos)
        for (std::size_t h = 0; h < H && h < t.ho.size(); ++h) heat[h] += t.ho[h];
    q[PeakQuantity::heat_demand] = std::move(heat);
    const NamedSeries* e = r.series(c, "heat_pump");
    q[PeakQuantity::heat_pump_load] = e ? e->values : std::vector<double>(H, 0.0);
  }
  return b;
}

// ------------------------------------------------------------------ events

struct Event {
  std::size_t start = 0;  // first hour
  std::size_t end = 0;    // one past the last hour
  double magnitude = 0.0;   // cumulative excess, series unit x hours
  double normalized = 0.0;  // magnitude / largest magnitude in the series
};

namespace detail {

// Maximal runs with value > threshold; magnitude sums value - threshold.
inline std::vector<Event> runs_above(std::span<const double> s, double threshold) {
  std::vector<Event> out;
  for (std::size_t h = 0; h < s.size();) {
    if (!(s[h] > threshold)) {
      ++h;
      continue;
    }
    Event e;
    e.start = h;
    while (h < s.size() && s[h] > threshold) e.magnitude += s[h++] - threshold;
    e.end = h;
    out.push_back(e);
  }
  double biggest = 0.0;
  for (const auto& e : out) biggest = std::max(biggest, e.magnitude);
  for (auto& e : out) e.normalized = e.magnitude / biggest;
  return out;
}

}  // namespace detail

inline double series_mean(std::span<const double> s) {
  if (s.empty()) fail(ErrorKind::invalid_argument, "mean of an empty series");
  const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
  if (*lo == *hi) return *lo;  // constant: exact, so no spurious rounding events
  return std::clamp(std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size()), *lo, *hi);
}

// Runs strictly above the window mean; an hour at or below the mean ends an
// event.
inline std::vector<Event> deviation_events(std::span<const double> heat) {
  return detail::runs_above(heat, series_mean(heat));
}

// Runs of positive residual load; magnitude is the summed residual load.
inline std::vector<Event> residual_events(std::span<const double> residual) {
  if (residual.empty()) fail(ErrorKind::invalid_argument, "empty residual load series");
  return detail::runs_above(residual, 0.0);
}

// Calendar-day (UTC) sums; a partial first or last day is summed as is.
inline std::vector<double> daily_sums(std::span<const double> s, HourStamp start) {
  std::vector<double> out;
  std::int64_t current = std::numeric_limits<std::int64_t>::min();
  for (std::size_t h = 0; h < s.size(); ++h) {
    const std::int64_t day = detail::floor_div((start + static_cast<std::int64_t>(h)).index(), 24);
    if (day != current) {
      out.push_back(0.0);
      current = day;
    }
    out.back() += s[h];
  }
  return out;
}

// ------------------------------------------------------------- firm capacity

inline bool is_firm_generation(std::string_view asset) {
  for (Technology t : kResidualVre)
    if (to_string(t) == asset) return false;
  return true;
}

struct FirmDelta {
  std::map<std::string, double> by_asset;  // "<asset>/<kind>" -> GW or GWh, summed over countries
  double firm = 0.0;                       // dispatchable generation + storage discharge, GW
};

// with - without, aggregated over countries.
inline FirmDelta firm_capacity_delta(const ScenarioResult& with_hp, const ScenarioResult& without_hp) {
  if (with_hp.year != without_hp.year || with_hp.spec.variant != without_hp.spec.variant ||
      with_hp.spec.window_hours != without_hp.spec.window_hours || with_hp.countries != without_hp.countries)
    fail(ErrorKind::mismatched_scenario, with_hp.cell() + " and " + without_hp.cell() + " are not a pair");
  if (!with_hp.optimal() || !without_hp.optimal())
    fail(ErrorKind::mismatched_scenario, "firm capacity delta needs two solved results");
  FirmDelta d;
  auto add = [&](const ScenarioResult& r, double sign) {
    for (const auto& c : r.result.capacities) {
      d.by_asset[c.asset + "/" + c.kind] += sign * c.value;
      const bool storage = c.kind != "power";
      if ((storage && c.kind == "discharge") || (!storage && is_firm_generation(c.asset))) d.firm += sign * c.value;
    }
  };
  add(with_hp, 1.0);
  add(without_hp, -1.0);
  return d;
}

// ------------------------------------------------------------------ costs

// EUR/MWh from EUR and MWh; undefined without heat.
inline std::optional<double> heat_cost(double delta_cost_eur, double heat_mwh) {
  if (!(heat_mwh > 0.0)) return std::nullopt;
  return delta_cost_eur / heat_mwh;
}

inline double heat_supplied_gwh(const ModelResult& r) {
  double s = 0.0;
  for (const auto& [c, traj] : r.heat)
    for (const auto& [combo, t] : traj.combos)
      for (double v : t.ho) s += v;
  return s;
}

struct CostReport {
  std::string cell;
  double investment = 0.0, fixed = 0.0, variable = 0.0, total = 0.0, objective = 0.0;  // MEUR
  double heat_supplied_gwh = 0.0;
  std::optional<std::string> baseline;
  std::optional<double> delta_cost_meur;
  std::optional<double> heat_cost_eur_per_mwh;  // null without heat or without a baseline
};

inline CostReport cost_report(const ScenarioResult& r, const ScenarioResult* baseline = nullptr) {
  if (!r.optimal()) fail(ErrorKind::invalid_argument, r.cell() + " is not solved");
  CostReport c;
  c.cell = r.cell();
  c.investment = r.result.costs.investment;
  c.fixed = r.result.costs.fixed;
  c.variable = r.result.costs.variable;
  c.total = r.result.costs.total();
  c.objective = r.objective;
  c.heat_supplied_gwh = heat_supplied_gwh(r.result);
  if (baseline) {
    if (baseline->year != r.year || baseline->spec.variant != r.spec.variant ||
        baseline->spec.window_hours != r.spec.window_hours || baseline->countries != r.countries)
      fail(ErrorKind::mismatched_scenario, r.cell() + " and " + baseline->cell() + " are not a pair");
    if (!baseline->optimal()) fail(ErrorKind::mismatched_scenario, baseline->cell() + " is not solved");
    c.baseline = baseline->cell();
    c.delta_cost_meur = r.objective - baseline->objective;
    c.heat_cost_eur_per_mwh = heat_cost(*c.delta_cost_meur * 1e6, c.heat_supplied_gwh * 1e3);
  }
  return c;
}

// ------------------------------------------------------------------ emission

inline void write_rldc_csv(std::ostream& o, const std::string& cell, const CountryCode& c, const std::string& curve,
                           std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i)
    o << cell << ',' << c << ',' << curve << ',' << i + 1 << ',' << format_number(values[i]) << '\n';
}

inline void write_events_csv(std::ostream& o, const std::string& cell, const CountryCode& c, const std::string& kind,
                             const std::vector<Event>& events) {
  for (const auto& e : events)
    o << cell << ',' << c << ',' << kind << ',' << e.start << ',' << e.end << ',' << format_number(e.magnitude) << ','
      << format_number(e.normalized) << '\n';
}

inline void write_peaks_csv(std::ostream& o, const std::string& cell, const std::vector<PeakRecord>& peaks) {
  for (const auto& p : peaks)
    o << cell << ',' << p.country << ',' << to_string(p.quantity) << ',' << p.rank << ',' << p.hour << ','
      << format_number(p.value) << '\n';
}

inline constexpr const char* kRldcHeader = "cell,country,curve,rank,value_gw";
inline constexpr const char* kEventsHeader = "cell,country,kind,start_hour,end_hour,magnitude_gwh,normalized";
inline constexpr const char* kPeaksHeader = "cell,country,quantity,rank,hour,value_gw";
inline constexpr const char* kFirmHeader = "with,without,asset,delta";

inline void write_firm_csv(std::ostream& o, const std::string& with, const std::string& without, const FirmDelta& d) {
  for (const auto& [asset, v] : d.by_asset) o << with << ',' << without << ',' << asset << ',' << format_number(v) << '\n';
  o << with << ',' << without << ",firm_subtotal," << format_number(d.firm) << '\n';
}

inline nlohmann::json to_json(const CostReport& c) {
  using nlohmann::json;
  auto opt = [](const auto& v) { return v ? json(*v) : json(nullptr); };
  return {{"cell", c.cell},
          {"investment_meur", c.investment},
          {"fixed_meur", c.fixed},
          {"variable_meur", c.variable},
          {"total_meur", c.total},
          {"objective_meur", c.objective},
          {"heat_supplied_gwh", c.heat_supplied_gwh},
          {"baseline", opt(c.baseline)},
          {"delta_cost_meur", opt(c.delta_cost_meur)},
          {"heat_cost_eur_per_mwh", opt(c.heat_cost_eur_per_mwh)}};
}

}  // namespace hpflex
