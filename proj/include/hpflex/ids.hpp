#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "hpflex/error.hpp"

namespace hpflex {

// Two-letter ISO code ("DE", "FR", ...). Kept as a string so ingested data
// may carry countries beyond the bundled nine.
using CountryCode = std::string;

enum class BuildingType { single_family, multifamily, commercial };
enum class Sink { space, water };
enum class HeatPumpType { air, ground, water };

enum class Technology {
  ccgt,
  bioenergy,
  hard_coal,
  lignite,
  nuclear,
  oil,
  other,
  pv,
  wind_onshore,
  wind_offshore,
  run_of_river,
};

enum class StorageTech { li_ion, p2g2p, phs_closed, phs_open, reservoir };

enum class TechClass { variable_renewable, dispatchable_renewable, non_renewable };

inline constexpr std::array kBuildingTypes{BuildingType::single_family, BuildingType::multifamily,
                                           BuildingType::commercial};
inline constexpr std::array kSinks{Sink::space, Sink::water};
inline constexpr std::array kHeatPumpTypes{HeatPumpType::air, HeatPumpType::ground,
                                           HeatPumpType::water};
inline constexpr std::array kTechnologies{
    Technology::ccgt,    Technology::bioenergy,    Technology::hard_coal,
    Technology::lignite, Technology::nuclear,      Technology::oil,
    Technology::other,   Technology::pv,           Technology::wind_onshore,
    Technology::wind_offshore, Technology::run_of_river};
inline constexpr std::array kStorageTechs{StorageTech::li_ion, StorageTech::p2g2p,
                                          StorageTech::phs_closed, StorageTech::phs_open,
                                          StorageTech::reservoir};

namespace detail {

template <typename Enum, std::size_t N>
struct NameTable {
  std::array<std::pair<Enum, std::string_view>, N> entries;

  constexpr std::string_view name(Enum e) const {
    for (const auto& [value, text] : entries)
      if (value == e) return text;
    return "?";
  }

  std::optional<Enum> find(std::string_view text) const {
    for (const auto& [value, name] : entries)
      if (name == text) return value;
    return std::nullopt;
  }
};

inline constexpr NameTable<BuildingType, 3> kBuildingNames{{{
    {BuildingType::single_family, "single_family"},
    {BuildingType::multifamily, "multifamily"},
    {BuildingType::commercial, "commercial"},
}}};

inline constexpr NameTable<Sink, 2> kSinkNames{{{
    {Sink::space, "space"},
    {Sink::water, "water"},
}}};

inline constexpr NameTable<HeatPumpType, 3> kHeatPumpNames{{{
    {HeatPumpType::air, "air"},
    {HeatPumpType::ground, "ground"},
    {HeatPumpType::water, "water"},
}}};

inline constexpr NameTable<Technology, 11> kTechnologyNames{{{
    {Technology::ccgt, "ccgt"},
    {Technology::bioenergy, "bioenergy"},
    {Technology::hard_coal, "hard_coal"},
    {Technology::lignite, "lignite"},
    {Technology::nuclear, "nuclear"},
    {Technology::oil, "oil"},
    {Technology::other, "other"},
    {Technology::pv, "pv"},
    {Technology::wind_onshore, "wind_onshore"},
    {Technology::wind_offshore, "wind_offshore"},
    {Technology::run_of_river, "run_of_river"},
}}};

inline constexpr NameTable<StorageTech, 5> kStorageNames{{{
    {StorageTech::li_ion, "li_ion"},
    {StorageTech::p2g2p, "p2g2p"},
    {StorageTech::phs_closed, "phs_closed"},
    {StorageTech::phs_open, "phs_open"},
    {StorageTech::reservoir, "reservoir"},
}}};

template <typename Enum, std::size_t N>
Enum parse_or_throw(const NameTable<Enum, N>& table, std::string_view text, const char* what) {
  if (auto e = table.find(text)) return *e;
  fail(ErrorKind::invalid_argument, std::string("unknown ") + what + " '" + std::string(text) + "'");
}

}  // namespace detail

constexpr std::string_view to_string(BuildingType v) { return detail::kBuildingNames.name(v); }
constexpr std::string_view to_string(Sink v) { return detail::kSinkNames.name(v); }
constexpr std::string_view to_string(HeatPumpType v) { return detail::kHeatPumpNames.name(v); }
constexpr std::string_view to_string(Technology v) { return detail::kTechnologyNames.name(v); }
constexpr std::string_view to_string(StorageTech v) { return detail::kStorageNames.name(v); }

inline BuildingType parse_building_type(std::string_view s) {
  return detail::parse_or_throw(detail::kBuildingNames, s, "building type");
}
inline Sink parse_sink(std::string_view s) { return detail::parse_or_throw(detail::kSinkNames, s, "sink"); }
inline HeatPumpType parse_heat_pump_type(std::string_view s) {
  return detail::parse_or_throw(detail::kHeatPumpNames, s, "heat pump type");
}
inline Technology parse_technology(std::string_view s) {
  return detail::parse_or_throw(detail::kTechnologyNames, s, "technology");
}
inline StorageTech parse_storage(std::string_view s) {
  return detail::parse_or_throw(detail::kStorageNames, s, "storage technology");
}
inline std::optional<Technology> find_technology(std::string_view s) {
  return detail::kTechnologyNames.find(s);
}
inline std::optional<StorageTech> find_storage(std::string_view s) {
  return detail::kStorageNames.find(s);
}

constexpr TechClass tech_class(Technology t) {
  switch (t) {
    case Technology::pv:
    case Technology::wind_onshore:
    case Technology::wind_offshore:
    case Technology::run_of_river: return TechClass::variable_renewable;
    case Technology::bioenergy: return TechClass::dispatchable_renewable;
    default: return TechClass::non_renewable;
  }
}

constexpr bool is_variable_renewable(Technology t) {
  return tech_class(t) == TechClass::variable_renewable;
}

// Storages that receive natural inflow in addition to (or instead of) pumping.
constexpr bool has_inflow(StorageTech s) {
  return s == StorageTech::phs_open || s == StorageTech::reservoir;
}

constexpr bool can_charge(StorageTech s) { return s != StorageTech::reservoir; }

// One heat-module cell: building type x sink x heat-pump type.
struct HeatCombo {
  BuildingType building;
  Sink sink;
  HeatPumpType pump;

  auto operator<=>(const HeatCombo&) const = default;
};

inline std::string to_string(const HeatCombo& c) {
  return std::string(to_string(c.building)) + "/" + std::string(to_string(c.sink)) + "/" +
         std::string(to_string(c.pump));
}

}  // namespace hpflex
