#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "hpflex/error.hpp"
#include "hpflex/ids.hpp"

namespace hpflex {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// One row of the generation cost table. Costs per MW of capacity in kEUR,
// fuel cost per MWh of fuel, carbon content in t CO2 per MWh of fuel.
struct TechnologySpec {
  Technology tech = Technology::ccgt;
  std::string label;
  double interest_rate = 0.0;
  double lifetime = 1.0;
  double availability = 1.0;
  double overnight_cost = 0.0;
  double fixed_cost = 0.0;
  double efficiency = 1.0;
  double carbon_content = 0.0;
  double fuel_cost = 0.0;

  TechClass tech_class() const { return hpflex::tech_class(tech); }
  bool operator==(const TechnologySpec&) const = default;
};

// One row of the storage cost table. "phs" covers open and closed pumped
// hydro. Reservoirs have no discharge-power cost entry in the source table.
struct StorageSpec {
  std::string key;
  std::string label;
  double interest_rate = 0.0;
  double lifetime = 1.0;
  double availability = 1.0;
  double overnight_energy = 0.0;     // kEUR/MWh
  double overnight_charge = 0.0;     // kEUR/MW
  std::optional<double> overnight_discharge;  // kEUR/MW
  double efficiency_charge = 1.0;
  double efficiency_discharge = 1.0;
  double marginal_charge = 0.0;      // EUR/MWh
  double marginal_discharge = 0.0;   // EUR/MWh

  bool operator==(const StorageSpec&) const = default;
};

inline std::string storage_table_key(StorageTech s) {
  switch (s) {
    case StorageTech::phs_closed:
    case StorageTech::phs_open: return "phs";
    default: return std::string(to_string(s));
  }
}

// Capacity-bound table row exactly as printed: one value pair per country,
// in the unit named by `unit` (GW, GWh or TWh).
struct BoundsRow {
  std::string technology;
  std::string kind;  // power | power_in_out | power_in | power_out | energy
  std::string unit;
  std::vector<double> low;
  std::vector<double> up;

  bool operator==(const BoundsRow&) const = default;
};

struct HeatPumpReferenceRow {
  std::string country;
  double heat_output_gwth = 0.0;
  double heat_storage_gwhth = 0.0;
  double electricity_input_gwel = 0.0;

  bool operator==(const HeatPumpReferenceRow&) const = default;
};

struct StaticData {
  std::string schema = "hpflex.static/1";
  std::vector<TechnologySpec> generation;
  std::vector<StorageSpec> storage;
  std::vector<std::string> bound_countries;
  std::vector<BoundsRow> bounds;
  std::string heat_reference_note;
  std::vector<HeatPumpReferenceRow> heat_reference;
  double co2_price = 150.0;                 // EUR/t
  double bioenergy_full_load_hours = 5000;  // h/yr, caps annual bioenergy output

  const TechnologySpec& technology(Technology t) const {
    for (const auto& g : generation)
      if (g.tech == t) return g;
    fail(ErrorKind::invalid_argument, "no cost row for " + std::string(to_string(t)));
  }

  const StorageSpec& storage_spec(StorageTech s) const {
    const auto key = storage_table_key(s);
    for (const auto& row : storage)
      if (row.key == key) return row;
    fail(ErrorKind::invalid_argument, "no cost row for storage " + key);
  }

  bool operator==(const StaticData&) const = default;
};

namespace detail {

using nlohmann::json;

inline double bound_value(const json& v) {
  if (v.is_string() && v.get<std::string>() == "inf") return kInf;
  if (v.is_number()) return v.get<double>();
  fail(ErrorKind::invalid_argument, "bound cell must be a number or \"inf\"");
}

inline json bound_json(double v) { return std::isinf(v) ? json("inf") : json(v); }

inline void check_tech(const TechnologySpec& t) {
  const std::string n(to_string(t.tech));
  if (!(t.efficiency > 0.0 && t.efficiency <= 1.0))
    fail(ErrorKind::out_of_range, n + ": efficiency must lie in (0,1]");
  if (!(t.availability > 0.0 && t.availability <= 1.0))
    fail(ErrorKind::out_of_range, n + ": availability must lie in (0,1]");
  if (!(t.lifetime >= 1.0)) fail(ErrorKind::out_of_range, n + ": lifetime must be >= 1");
  if (t.interest_rate < 0.0) fail(ErrorKind::out_of_range, n + ": negative interest rate");
}

inline void check_storage(const StorageSpec& s) {
  for (double e : {s.efficiency_charge, s.efficiency_discharge})
    if (!(e > 0.0 && e <= 1.0)) fail(ErrorKind::out_of_range, s.key + ": efficiency must lie in (0,1]");
  if (!(s.lifetime >= 1.0)) fail(ErrorKind::out_of_range, s.key + ": lifetime must be >= 1");
}

}  // namespace detail

inline StaticData static_data_from_json(const nlohmann::json& j) {
  StaticData d;
  d.schema = j.at("schema").get<std::string>();
  if (d.schema != "hpflex.static/1") fail(ErrorKind::bad_header, "unsupported static-data schema " + d.schema);

  for (const auto& r : j.at("generation")) {
    TechnologySpec t;
    t.tech = parse_technology(r.at("technology").get<std::string>());
    t.label = r.at("label").get<std::string>();
    t.interest_rate = r.at("interest_rate").get<double>();
    t.lifetime = r.at("lifetime_years").get<double>();
    t.availability = r.at("availability").get<double>();
    t.overnight_cost = r.at("overnight_cost_kEUR_per_MW").get<double>();
    t.fixed_cost = r.at("fixed_cost_kEUR_per_MW_yr").get<double>();
    t.efficiency = r.at("efficiency").get<double>();
    t.carbon_content = r.at("carbon_content_t_per_MWh").get<double>();
    t.fuel_cost = r.at("fuel_cost_EUR_per_MWh").get<double>();
    detail::check_tech(t);
    d.generation.push_back(std::move(t));
  }

  for (const auto& r : j.at("storage")) {
    StorageSpec s;
    s.key = r.at("technology").get<std::string>();
    s.label = r.at("label").get<std::string>();
    s.interest_rate = r.at("interest_rate").get<double>();
    s.lifetime = r.at("lifetime_years").get<double>();
    s.availability = r.at("availability").get<double>();
    s.overnight_energy = r.at("overnight_energy_kEUR_per_MWh").get<double>();
    s.overnight_charge = r.at("overnight_charge_kEUR_per_MW").get<double>();
    if (const auto& v = r.at("overnight_discharge_kEUR_per_MW"); !v.is_null()) s.overnight_discharge = v.get<double>();
    s.efficiency_charge = r.at("efficiency_charge").get<double>();
    s.efficiency_discharge = r.at("efficiency_discharge").get<double>();
    s.marginal_charge = r.at("marginal_charge_EUR_per_MWh").get<double>();
    s.marginal_discharge = r.at("marginal_discharge_EUR_per_MWh").get<double>();
    detail::check_storage(s);
    d.storage.push_back(std::move(s));
  }

  const auto& cb = j.at("capacity_bounds");
  d.bound_countries = cb.at("countries").get<std::vector<std::string>>();
  for (const auto& r : cb.at("rows")) {
    BoundsRow b;
    b.technology = r.at("technology").get<std::string>();
    b.kind = r.at("kind").get<std::string>();
    b.unit = r.at("unit").get<std::string>();
    for (const auto& v : r.at("low")) b.low.push_back(detail::bound_value(v));
    for (const auto& v : r.at("up")) b.up.push_back(detail::bound_value(v));
    if (b.low.size() != d.bound_countries.size() || b.up.size() != d.bound_countries.size())
      fail(ErrorKind::alignment, "bounds row " + b.technology + "/" + b.kind + " has the wrong width");
    d.bounds.push_back(std::move(b));
  }

  if (j.contains("heat_pump_capacities_reference")) {
    const auto& hp = j.at("heat_pump_capacities_reference");
    d.heat_reference_note = hp.value("note", "");
    for (const auto& r : hp.at("rows"))
      d.heat_reference.push_back({r.at("country").get<std::string>(), r.at("heat_output_GWth").get<double>(),
                                  r.at("heat_storage_GWhth").get<double>(),
                                  r.at("electricity_input_GWel").get<double>()});
  }

  const auto& a = j.at("assumptions");
  d.co2_price = a.at("co2_price_EUR_per_t").get<double>();
  d.bioenergy_full_load_hours = a.at("bioenergy_full_load_hours").get<double>();
  return d;
}

inline nlohmann::json to_json(const StaticData& d) {
  using nlohmann::json;
  json j;
  j["schema"] = d.schema;
  json gen = json::array();
  for (const auto& t : d.generation)
    gen.push_back({{"technology", to_string(t.tech)},
                   {"label", t.label},
                   {"interest_rate", t.interest_rate},
                   {"lifetime_years", t.lifetime},
                   {"availability", t.availability},
                   {"overnight_cost_kEUR_per_MW", t.overnight_cost},
                   {"fixed_cost_kEUR_per_MW_yr", t.fixed_cost},
                   {"efficiency", t.efficiency},
                   {"carbon_content_t_per_MWh", t.carbon_content},
                   {"fuel_cost_EUR_per_MWh", t.fuel_cost}});
  j["generation"] = gen;

  json sto = json::array();
  for (const auto& s : d.storage)
    sto.push_back({{"technology", s.key},
                   {"label", s.label},
                   {"interest_rate", s.interest_rate},
                   {"lifetime_years", s.lifetime},
                   {"availability", s.availability},
                   {"overnight_energy_kEUR_per_MWh", s.overnight_energy},
                   {"overnight_charge_kEUR_per_MW", s.overnight_charge},
                   {"overnight_discharge_kEUR_per_MW",
                    s.overnight_discharge ? json(*s.overnight_discharge) : json(nullptr)},
                   {"efficiency_charge", s.efficiency_charge},
                   {"efficiency_discharge", s.efficiency_discharge},
                   {"marginal_charge_EUR_per_MWh", s.marginal_charge},
                   {"marginal_discharge_EUR_per_MWh", s.marginal_discharge}});
  j["storage"] = sto;

  json rows = json::array();
  for (const auto& b : d.bounds) {
    json low = json::array(), up = json::array();
    for (double v : b.low) low.push_back(detail::bound_json(v));
    for (double v : b.up) up.push_back(detail::bound_json(v));
    rows.push_back({{"technology", b.technology}, {"kind", b.kind}, {"unit", b.unit}, {"low", low}, {"up", up}});
  }
  j["capacity_bounds"] = {{"countries", d.bound_countries}, {"rows", rows}};

  json hp = json::array();
  for (const auto& r : d.heat_reference)
    hp.push_back({{"country", r.country},
                  {"heat_output_GWth", r.heat_output_gwth},
                  {"heat_storage_GWhth", r.heat_storage_gwhth},
                  {"electricity_input_GWel", r.electricity_input_gwel}});
  j["heat_pump_capacities_reference"] = {{"note", d.heat_reference_note}, {"rows", hp}};
  j["assumptions"] = {{"co2_price_EUR_per_t", d.co2_price},
                      {"bioenergy_full_load_hours", d.bioenergy_full_load_hours}};
  return j;
}

inline StaticData parse_static_data(const std::string& text) {
  try {
    return static_data_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::malformed_row, std::string("static data: ") + e.what());
  }
}

inline std::string emit_static_data(const StaticData& d) { return to_json(d).dump(2) + "\n"; }

inline StaticData load_static_data(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_static_data(ss.str());
}

inline void save_static_data(const StaticData& d, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io, "cannot write " + path.string());
  out << emit_static_data(d);
}

// ---------------------------------------------------------------------------
// Normalized bounds (GW for power, GWh for energy).

struct Bound {
  double lower = 0.0;
  double upper = kInf;

  bool fixed() const { return lower == upper; }
  bool operator==(const Bound&) const = default;
};

enum class StorageCapacity { charge, discharge, energy };

inline std::string_view to_string(StorageCapacity k) {
  switch (k) {
    case StorageCapacity::charge: return "charge";
    case StorageCapacity::discharge: return "discharge";
    case StorageCapacity::energy: return "energy";
  }
  return "?";
}

class BoundsTable {
 public:
  // Missing entries are unrestricted: [0, inf).
  Bound generation(const CountryCode& c, Technology t) const {
    auto it = gen_.find({c, t});
    return it == gen_.end() ? Bound{} : it->second;
  }
  Bound storage(const CountryCode& c, StorageTech s, StorageCapacity k) const {
    auto it = sto_.find({c, s, k});
    return it == sto_.end() ? Bound{} : it->second;
  }

  void set_generation(const CountryCode& c, Technology t, Bound b) { gen_[{c, t}] = b; }
  void set_storage(const CountryCode& c, StorageTech s, StorageCapacity k, Bound b) { sto_[{c, s, k}] = b; }

  const auto& generation_entries() const { return gen_; }
  const auto& storage_entries() const { return sto_; }

  // Throws InfeasibleBounds on the first entry with lower > upper.
  void validate() const {
    for (const auto& [key, b] : gen_)
      if (b.lower > b.upper || b.lower < 0.0)
        fail(ErrorKind::infeasible_bounds, key.first + " " + std::string(hpflex::to_string(key.second)) +
                                               ": lower bound exceeds upper bound");
    for (const auto& [key, b] : sto_)
      if (b.lower > b.upper || b.lower < 0.0)
        fail(ErrorKind::infeasible_bounds, std::get<0>(key) + " " +
                                               std::string(hpflex::to_string(std::get<1>(key))) + " " +
                                               std::string(hpflex::to_string(std::get<2>(key))) +
                                               ": lower bound exceeds upper bound");
  }

  // Pins every inverted entry (lower > upper) at its upper value and reports
  // what was changed. The printed table has one such cell.
  std::vector<std::string> pin_inverted_at_upper() {
    std::vector<std::string> notes;
    for (auto& [key, b] : gen_)
      if (b.lower > b.upper) {
        notes.push_back(key.first + " " + std::string(hpflex::to_string(key.second)) + ": lower " +
                        std::to_string(b.lower) + " > upper " + std::to_string(b.upper) + ", pinned at upper");
        b.lower = b.upper;
      }
    for (auto& [key, b] : sto_)
      if (b.lower > b.upper) {
        notes.push_back(std::get<0>(key) + " " + std::string(hpflex::to_string(std::get<1>(key))) +
                        ": inverted bound pinned at upper");
        b.lower = b.upper;
      }
    return notes;
  }

  bool operator==(const BoundsTable&) const = default;

  static BoundsTable from_static(const StaticData& d) {
    BoundsTable t;
    for (const auto& row : d.bounds) {
      const double scale = row.unit == "TWh" ? 1000.0 : 1.0;
      for (std::size_t i = 0; i < d.bound_countries.size(); ++i) {
        const auto& c = d.bound_countries[i];
        const Bound b{row.low[i] * scale, row.up[i] * scale};
        if (row.kind == "power") {
          t.set_generation(c, parse_technology(row.technology), b);
          continue;
        }
        const StorageTech s = parse_storage(row.technology);
        if (row.kind == "power_in_out") {
          t.set_storage(c, s, StorageCapacity::charge, b);
          t.set_storage(c, s, StorageCapacity::discharge, b);
        } else if (row.kind == "power_in") {
          t.set_storage(c, s, StorageCapacity::charge, b);
        } else if (row.kind == "power_out") {
          t.set_storage(c, s, StorageCapacity::discharge, b);
          if (!can_charge(s)) t.set_storage(c, s, StorageCapacity::charge, {0.0, 0.0});
        } else if (row.kind == "energy") {
          t.set_storage(c, s, StorageCapacity::energy, b);
        } else {
          fail(ErrorKind::invalid_argument, "unknown bound kind " + row.kind);
        }
      }
    }
    return t;
  }

 private:
  std::map<std::pair<CountryCode, Technology>, Bound> gen_;
  std::map<std::tuple<CountryCode, StorageTech, StorageCapacity>, Bound> sto_;
};

// Directed cross-border transfer limits in GW. Absent pairs carry nothing.
class NtcMatrix {
 public:
  void set(const CountryCode& from, const CountryCode& to, double gw) {
    if (gw < 0.0) fail(ErrorKind::negative_value, "NTC " + from + "->" + to + " is negative");
    if (gw == 0.0)
      limits_.erase({from, to});
    else
      limits_[{from, to}] = gw;
  }
  double limit(const CountryCode& from, const CountryCode& to) const {
    auto it = limits_.find({from, to});
    return it == limits_.end() ? 0.0 : it->second;
  }
  bool empty() const { return limits_.empty(); }
  void clear() { limits_.clear(); }
  const std::map<std::pair<CountryCode, CountryCode>, double>& entries() const { return limits_; }

  bool operator==(const NtcMatrix&) const = default;

 private:
  std::map<std::pair<CountryCode, CountryCode>, double> limits_;
};

}  // namespace hpflex
