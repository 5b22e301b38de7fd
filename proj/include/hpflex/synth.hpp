#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hpflex/calendar.hpp"
#include "hpflex/dataset.hpp"
#include "hpflex/series.hpp"

namespace hpflex {

// Desk-scale stand-in for reanalysis-based load, weather and heat data.
// Everything is driven by one seed; each country draws from its own stream.
struct SynthOptions {
  HourStamp start = july_first(2009);
  // Length of one seasonal cycle (summer -> winter -> summer). Restarts every
  // 8760 hours so every July-June window sees the same compressed season.
  std::int64_t season_hours = 8760;
};

struct SynthCountry {
  double load_mw;        // mean electric load
  double space_heat_mw;  // space-heating demand per degree below 15 C, all buildings
  double water_heat_mw;  // mean hot-water demand, all buildings
  double temp_mean;      // C
  double temp_amp;       // C, half the summer-winter swing
  double inflow_mw;      // mean natural inflow into open pumped hydro and reservoirs
  bool heat;             // false: no heat-pump rollout (empty heat demand)
};

namespace detail {

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ull;
  return h;
}

inline SynthCountry synth_parameters(const CountryCode& c) {
  if (c == "DE") return {56000, 9000, 14000, 9.5, 9.0, 400, true};
  if (c == "FR") return {52000, 7500, 11000, 11.5, 8.0, 1800, true};
  if (c == "CH") return {7000, 0, 0, 9.0, 9.0, 1200, false};
  // Anything else: a mid-sized country with parameters spread by its code.
  const double u = static_cast<double>(fnv1a(c) % 1000) / 1000.0;
  return {8000 + 20000 * u, 1000 + 3000 * u, 1500 + 4000 * u, 8.0 + 4.0 * u, 7.0 + 3.0 * u, 300 + 600 * u, true};
}

constexpr std::array kBuildingShare{0.55, 0.25, 0.20};  // single family, multifamily, commercial

}  // namespace detail

// Hourly load, renewable availability, hydro inflow, heat demand and COP per
// country. Heat demand falls and COP rises with the temperature proxy; wind
// is windier in winter, PV sunnier in summer.
inline std::vector<HourlySeries> synth_profiles(std::uint64_t seed, const std::vector<CountryCode>& countries,
                                                std::int64_t hours, const SynthOptions& opt = {}) {
  if (hours < 24) fail(ErrorKind::invalid_argument, "synthetic profiles need at least 24 hours");
  const double two_pi = 2.0 * std::numbers::pi;
  const std::int64_t season = std::clamp<std::int64_t>(opt.season_hours, 24, 8760);

  // Shared weather noise couples neighbouring countries.
  std::mt19937_64 common_rng(seed * 0x9E3779B97F4A7C15ull + 17);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> common_temp(hours), common_wind(hours);
  double t = 0, w = 0;
  for (std::int64_t h = 0; h < hours; ++h) {
    t = 0.97 * t + 0.25 * z(common_rng);
    w = 0.95 * w + 0.30 * z(common_rng);
    common_temp[h] = t;
    common_wind[h] = w;
  }

  std::vector<HourlySeries> out;
  for (const auto& c : countries) {
    const SynthCountry p = detail::synth_parameters(c);
    std::mt19937_64 rng(seed ^ detail::fnv1a(c));

    std::vector<double> temp(hours), load(hours), pv(hours), on(hours), off(hours), ror(hours), inflow(hours);
    double t_noise = 0, w_noise = 0, cloud = 0, load_noise = 0;
    for (std::int64_t h = 0; h < hours; ++h) {
      const std::int64_t in_year = h % 8760;
      const double phase = static_cast<double>(in_year % season) / static_cast<double>(season);
      const double summer = std::cos(two_pi * phase);  // +1 at window start (July), -1 mid-window
      const int hod = static_cast<int>(to_civil(opt.start + h).hour);
      const double day = std::cos(two_pi * (hod - 15) / 24.0);

      t_noise = 0.96 * t_noise + 0.35 * z(rng);
      temp[h] = p.temp_mean + p.temp_amp * summer + 3.0 * day + 2.0 * common_temp[h] + t_noise;

      load_noise = 0.9 * load_noise + 0.01 * z(rng);
      const double daily_load = 0.08 * std::cos(two_pi * (hod - 13) / 24.0) + 0.04 * std::cos(two_pi * (hod - 19) / 12.0);
      load[h] = p.load_mw * std::max(0.3, 1.0 - 0.08 * summer + daily_load + load_noise);

      cloud = 0.9 * cloud + 0.3 * z(rng);
      const double sun = std::max(0.0, std::sin(std::numbers::pi * (hod - 5.0 - 1.5 * (1 - summer) / 2) /
                                                (14.0 - 5.0 * (1 - summer) / 2)));
      const bool daylight = hod >= 5 && hod < 19 - static_cast<int>(2.5 * (1 - summer));
      pv[h] = daylight ? std::clamp(sun * (0.55 + 0.2 * summer) * (1.0 - 0.35 * (1.0 / (1.0 + std::exp(-cloud)))), 0.0, 1.0)
                       : 0.0;

      w_noise = 0.93 * w_noise + 0.3 * z(rng);
      const double windiness = 0.7 * common_wind[h] + 0.6 * w_noise;
      on[h] = std::clamp(0.24 - 0.08 * summer + 0.12 * windiness, 0.0, 1.0);
      off[h] = std::clamp(0.42 - 0.10 * summer + 0.16 * windiness, 0.0, 1.0);
      ror[h] = std::clamp(0.55 + 0.15 * std::sin(two_pi * phase) + 0.02 * z(rng), 0.0, 1.0);
      inflow[h] = p.inflow_mw * std::clamp(1.0 + 0.4 * std::sin(two_pi * phase) + 0.1 * z(rng), 0.0, 3.0);
    }

    out.emplace_back(c, Quantity::load(), opt.start, load);
    out.emplace_back(c, Quantity::availability(Technology::pv), opt.start, pv);
    out.emplace_back(c, Quantity::availability(Technology::wind_onshore), opt.start, on);
    out.emplace_back(c, Quantity::availability(Technology::wind_offshore), opt.start, off);
    out.emplace_back(c, Quantity::availability(Technology::run_of_river), opt.start, ror);
    out.emplace_back(c, Quantity::inflow(StorageTech::phs_open), opt.start, inflow);
    std::vector<double> res(inflow);
    for (double& v : res) v *= 2.0;
    out.emplace_back(c, Quantity::inflow(StorageTech::reservoir), opt.start, res);

    if (!p.heat) continue;
    for (std::size_t b = 0; b < kBuildingTypes.size(); ++b) {
      std::vector<double> space(hours), water(hours);
      for (std::int64_t h = 0; h < hours; ++h) {
        const int hod = static_cast<int>(to_civil(opt.start + h).hour);
        const double morning = hod >= 6 && hod <= 9 ? 1.25 : (hod >= 17 && hod <= 21 ? 1.15 : (hod <= 4 ? 0.8 : 1.0));
        space[h] = detail::kBuildingShare[b] * p.space_heat_mw * std::max(0.0, 15.0 - temp[h]) * morning;
        water[h] = detail::kBuildingShare[b] * p.water_heat_mw * (hod >= 6 && hod <= 9 ? 1.6 : (hod <= 4 ? 0.5 : 1.0)) *
                   (1.0 + 0.1 * (12.0 - temp[h]) / 12.0);
        water[h] = std::max(0.0, water[h]);
      }
      out.emplace_back(c, Quantity::heat_demand(kBuildingTypes[b], Sink::space), opt.start, space);
      out.emplace_back(c, Quantity::heat_demand(kBuildingTypes[b], Sink::water), opt.start, water);
    }
    for (Sink s : kSinks)
      for (HeatPumpType hp : kHeatPumpTypes) {
        const double sink_temp = s == Sink::space ? 0.0 : 1.0;  // water needs higher supply temperatures
        std::vector<double> cop(hours);
        for (std::int64_t h = 0; h < hours; ++h) {
          const double source = hp == HeatPumpType::air ? temp[h] : (hp == HeatPumpType::ground ? 10.0 + 0.1 * temp[h] : 8.0 + 0.2 * temp[h]);
          cop[h] = std::clamp(3.3 + 0.075 * (source - 7.0) - 0.8 * sink_temp, 1.2, 6.0);
        }
        out.emplace_back(c, Quantity::cop(s, hp), opt.start, cop);
      }
  }
  return out;
}

// Indicative transfer limits between the synthetic countries, MW.
inline NtcMatrix synth_ntc(const std::vector<CountryCode>& countries) {
  NtcMatrix m;
  for (std::size_t i = 0; i < countries.size(); ++i)
    for (std::size_t j = 0; j < countries.size(); ++j) {
      if (i == j) continue;
      const auto& a = countries[i];
      const auto& b = countries[j];
      auto pair = [&](const char* x, const char* y) { return (a == x && b == y) || (a == y && b == x); };
      double mw = 2000.0;
      if (pair("DE", "FR")) mw = 3000.0;
      if (pair("DE", "CH")) mw = 4000.0;
      if (pair("FR", "CH")) mw = 3200.0;
      m.set(a, b, mw / 1000.0);
    }
  return m;
}

// Multi-year synthetic dataset starting July 1 of `first_year`, with the
// seasonal cycle compressed into the first `season_hours` of each year.
inline Dataset synth_dataset(std::uint64_t seed, const std::vector<CountryCode>& countries, int first_year, int years,
                             std::int64_t season_hours = 8760) {
  SynthOptions opt;
  opt.start = july_first(first_year);
  opt.season_hours = season_hours;
  Dataset d = Dataset::from_series(synth_profiles(seed, countries, static_cast<std::int64_t>(years) * 8760, opt));
  d.ntc() = synth_ntc(countries);
  return d;
}

}  // namespace hpflex
