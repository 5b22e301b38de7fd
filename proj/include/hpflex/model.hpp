#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "hpflex/dataset.hpp"
#include "hpflex/economics.hpp"
#include "hpflex/heat.hpp"
#include "hpflex/lp.hpp"
#include "hpflex/simplex.hpp"
#include "hpflex/static_data.hpp"

namespace hpflex {

// Everything one optimization run needs. Series are already cut to the model
// window; power in GW, energy in GWh, money in MEUR inside the LP.
struct SystemInstance {
  std::vector<CountryCode> countries;
  int year = 0;
  int hours = 0;
  Dataset data;
  StaticData tech;
  BoundsTable bounds;
  NtcMatrix ntc;
  HeatConfig heat;
  std::map<CountryCode, HeatPumpFleet> fleets;
  double co2_price = 150.0;
  std::map<CountryCode, double> bioenergy_cap_gwh_year;  // absent: uncapped
  std::string variant = "base";  // robustness variant applied to bounds/NTC

  const HeatPumpFleet* fleet(const CountryCode& c) const {
    auto it = fleets.find(c);
    return it == fleets.end() || it->second.empty() ? nullptr : &it->second;
  }
};

// Assembles an instance from a windowed dataset: bounds from the static
// tables (inverted cells pinned at their upper value), fleets sized on the
// window's heat demand, bioenergy caps from the dataset or capacity x
// full-load hours.
inline SystemInstance make_instance(const Dataset& windowed, const StaticData& tech, const HeatConfig& heat,
                                    int year, std::vector<std::string>* notes = nullptr) {
  SystemInstance inst;
  inst.countries = windowed.countries();
  inst.year = year;
  inst.hours = static_cast<int>(windowed.hours());
  inst.data = windowed;
  inst.tech = tech;
  inst.bounds = BoundsTable::from_static(tech);
  auto pinned = inst.bounds.pin_inverted_at_upper();
  if (notes) notes->insert(notes->end(), pinned.begin(), pinned.end());
  inst.ntc = windowed.ntc();
  inst.heat = heat;
  inst.co2_price = tech.co2_price;
  for (const auto& c : inst.countries) {
    const auto& p = windowed.country(c);
    inst.fleets[c] = size_fleet(heat, p.heat, p.cops);
    if (auto it = windowed.bioenergy_cap_gwh().find(c); it != windowed.bioenergy_cap_gwh().end()) {
      inst.bioenergy_cap_gwh_year[c] = it->second;
    } else {
      const double cap = inst.bounds.generation(c, Technology::bioenergy).upper;
      if (std::isfinite(cap)) inst.bioenergy_cap_gwh_year[c] = cap * tech.bioenergy_full_load_hours;
    }
  }
  return inst;
}

struct GenerationIndex {
  CountryCode country;
  Technology tech;
  int capacity = -1;
  bool pinned = false;
  std::vector<int> output;
};

struct StorageIndex {
  CountryCode country;
  StorageTech tech;
  int charge_capacity = -1;  // -1 when the storage cannot pump
  int discharge_capacity = -1;
  int energy_capacity = -1;
  bool pinned = false;
  std::vector<int> charge, discharge, level, spill;
};

struct FlowIndex {
  CountryCode from, to;
  std::vector<int> flow;
};

struct HeatIndex {
  CountryCode country;
  HeatCombo combo;
  std::vector<int> output, generated, level, electricity;  // HO, HI, HL, E; level empty when ep = 0
};

struct ModelIndex {
  std::vector<GenerationIndex> generation;
  std::vector<StorageIndex> storage;
  std::vector<FlowIndex> flows;
  std::vector<HeatIndex> heat;
  std::map<CountryCode, std::vector<int>> balance_rows;
};

struct BuiltModel {
  LinearProgram lp;
  ModelIndex index;
};

namespace detail {

inline std::string key(const CountryCode& c, std::string_view a) { return c + "," + std::string(a); }
inline std::string key(const CountryCode& c, std::string_view a, int h) {
  return c + "," + std::string(a) + "," + std::to_string(h);
}

inline double capacity_cost_per_gw(double overnight, double fixed, double rate, double lifetime, bool pinned,
                                   int hours) {
  const double annual = (pinned ? 0.0 : annuity(overnight, rate, lifetime)) + fixed;
  return prorate_fixed_costs(annual, hours);
}

}  // namespace detail

// Cost-minimizing dispatch and investment LP over all countries and hours.
//   balance[c,h]:   sum gen + sum discharge - sum charge + imports - exports - sum E = load
//   avail[c,t,h]:   gen <= factor * capacity   (column bound when capacity is pinned)
//   storage[c,s,h]: level_h = level_{h-1} + eta_c charge - discharge / eta_d + inflow - spill (cyclic)
//   flows:          0 <= flow <= NTC
//   bio_cap[c]:     sum_h gen_bio <= annual cap * hours / 8760
//   heat:           HI = cop * E,  HL_h = HL_{h-1} + HI_h - HO_h (cyclic), fleet capacities as bounds
inline BuiltModel build_model(const SystemInstance& inst) {
  using detail::key;
  constexpr double inf = LpBuilder::inf;
  const int H = inst.hours;
  if (H < 1) fail(ErrorKind::invalid_argument, "instance has no hours");
  inst.bounds.validate();

  LpBuilder b;
  b.set_name("hpflex_" + std::to_string(inst.year));
  BuiltModel out;
  ModelIndex& idx = out.index;

  // Per-country, per-hour balance contributions collected before rows exist.
  std::map<CountryCode, std::vector<std::vector<std::pair<int, double>>>> balance;
  for (const auto& c : inst.countries) {
    const auto& p = inst.data.country(c);
    if (static_cast<int>(p.load->size()) != H)
      fail(ErrorKind::alignment, c + ": load series does not match the window length");
    balance[c].resize(H);
  }

  for (const auto& c : inst.countries) {
    const auto& prof = inst.data.country(c);
    auto& bal = balance[c];

    // Generation.
    for (Technology t : kTechnologies) {
      const Bound bound = inst.bounds.generation(c, t);
      if (bound.upper <= 0.0) continue;
      const TechnologySpec& spec = inst.tech.technology(t);
      const bool pinned = bound.fixed();
      const std::string name(to_string(t));
      GenerationIndex g{c, t, -1, pinned, {}};
      g.capacity = b.add_column("cap_gen[" + key(c, name) + "]", bound.lower, bound.upper,
                                detail::capacity_cost_per_gw(spec.overnight_cost, spec.fixed_cost, spec.interest_rate,
                                                             spec.lifetime, pinned, H),
                                "capacity");
      const HourlySeries* factor = nullptr;
      if (is_variable_renewable(t)) {
        auto it = prof.availability.find(t);
        if (it == prof.availability.end())
          fail(ErrorKind::alignment, c + ": no availability series for " + name);
        if (static_cast<int>(it->second.size()) != H)
          fail(ErrorKind::alignment, c + ": availability series for " + name + " does not match the window");
        factor = &it->second;
      }
      const double vc = variable_cost(spec, inst.co2_price) * 1e-3;
      for (int h = 0; h < H; ++h) {
        const double f = factor ? (*factor)[h] : spec.availability;
        const int col = b.add_column("gen[" + key(c, name, h) + "]", 0.0, pinned ? f * bound.upper : inf, vc,
                                     "generation");
        g.output.push_back(col);
        bal[h].push_back({col, 1.0});
        if (!pinned) b.add_row("avail[" + key(c, name, h) + "]", -inf, 0.0, "availability", {{col, 1.0}, {g.capacity, -f}});
      }
      if (t == Technology::bioenergy) {
        if (auto it = inst.bioenergy_cap_gwh_year.find(c); it != inst.bioenergy_cap_gwh_year.end()) {
          std::vector<std::pair<int, double>> terms;
          for (int col : g.output) terms.push_back({col, 1.0});
          b.add_row("bio_cap[" + c + "]", -inf, it->second * H / 8760.0, "generation_cap", terms);
        }
      }
      idx.generation.push_back(std::move(g));
    }

    // Electricity storage and reservoirs.
    for (StorageTech s : kStorageTechs) {
      const Bound ch = inst.bounds.storage(c, s, StorageCapacity::charge);
      const Bound dis = inst.bounds.storage(c, s, StorageCapacity::discharge);
      const Bound en = inst.bounds.storage(c, s, StorageCapacity::energy);
      if (dis.upper <= 0.0 || en.upper <= 0.0) continue;
      const StorageSpec& spec = inst.tech.storage_spec(s);
      const std::string name(to_string(s));
      const bool pumps = can_charge(s) && ch.upper > 0.0;
      const bool inflow = has_inflow(s);
      StorageIndex si{c, s};
      si.pinned = dis.fixed() && en.fixed() && (!pumps || ch.fixed());

      auto cap_col = [&](const char* what, const Bound& bound, double overnight) {
        const double cost = detail::capacity_cost_per_gw(overnight, 0.0, spec.interest_rate, spec.lifetime,
                                                         bound.fixed(), H);
        return b.add_column(std::string("cap_sto_") + what + "[" + key(c, name) + "]", bound.lower, bound.upper, cost,
                            "capacity");
      };
      if (pumps) si.charge_capacity = cap_col("ch", ch, spec.overnight_charge);
      si.discharge_capacity = cap_col("dis", dis, spec.overnight_discharge.value_or(0.0));
      si.energy_capacity = cap_col("e", en, spec.overnight_energy);

      const HourlySeries* inflow_series = nullptr;
      if (inflow) {
        auto it = prof.inflow.find(s);
        if (it != prof.inflow.end()) {
          if (static_cast<int>(it->second.size()) != H)
            fail(ErrorKind::alignment, c + ": inflow series for " + name + " does not match the window");
          inflow_series = &it->second;
        }
      }

      for (int h = 0; h < H; ++h) {
        if (pumps) {
          const int col = b.add_column("sto_ch[" + key(c, name, h) + "]", 0.0,
                                       ch.fixed() ? spec.availability * ch.upper : inf, spec.marginal_charge * 1e-3,
                                       "storage");
          si.charge.push_back(col);
          bal[h].push_back({col, -1.0});
          if (!ch.fixed())
            b.add_row("sto_ch_cap[" + key(c, name, h) + "]", -inf, 0.0, "storage",
                      {{col, 1.0}, {si.charge_capacity, -spec.availability}});
        }
        const int dcol = b.add_column("sto_dis[" + key(c, name, h) + "]", 0.0,
                                      dis.fixed() ? spec.availability * dis.upper : inf,
                                      spec.marginal_discharge * 1e-3, "storage");
        si.discharge.push_back(dcol);
        bal[h].push_back({dcol, 1.0});
        if (!dis.fixed())
          b.add_row("sto_dis_cap[" + key(c, name, h) + "]", -inf, 0.0, "storage",
                    {{dcol, 1.0}, {si.discharge_capacity, -spec.availability}});
        const int lcol = b.add_column("sto_lvl[" + key(c, name, h) + "]", 0.0, en.fixed() ? en.upper : inf, 0.0,
                                      "storage");
        si.level.push_back(lcol);
        if (!en.fixed())
          b.add_row("sto_lvl_cap[" + key(c, name, h) + "]", -inf, 0.0, "storage",
                    {{lcol, 1.0}, {si.energy_capacity, -1.0}});
        if (inflow) si.spill.push_back(b.add_column("spill[" + key(c, name, h) + "]", 0.0, inf, 0.0, "storage"));
      }
      for (int h = 0; h < H; ++h) {
        std::vector<std::pair<int, double>> terms{{si.level[h], 1.0}, {si.level[(h + H - 1) % H], -1.0},
                                                  {si.discharge[h], 1.0 / spec.efficiency_discharge}};
        if (pumps) terms.push_back({si.charge[h], -spec.efficiency_charge});
        if (inflow) terms.push_back({si.spill[h], 1.0});
        const double rhs = inflow_series ? (*inflow_series)[h] / 1000.0 : 0.0;
        b.add_row("sto_bal[" + key(c, name, h) + "]", rhs, rhs, "storage", terms);
      }
      idx.storage.push_back(std::move(si));
    }

    // Heat pumps with their fixed fleet.
    if (const HeatPumpFleet* fleet = inst.fleet(c)) {
      const HeatTargets targets = required_heat_output(inst.heat, prof.heat);
      for (const auto& [combo, unit] : fleet->units) {
        auto tit = targets.find(combo);
        const HourlySeries* cop = prof.cops.find(combo.sink, combo.pump);
        if (tit == targets.end() || !cop) fail(ErrorKind::alignment, c + ": incomplete heat data for " + to_string(combo));
        if (static_cast<int>(cop->size()) != H)
          fail(ErrorKind::alignment, c + ": heat series do not match the window");
        const std::string name = to_string(combo);
        HeatIndex hi{c, combo};
        const bool storage = unit.heat_storage_gwh > 0.0;
        for (int h = 0; h < H; ++h) {
          const double ho = tit->second[h] / 1000.0;
          const double copv = (*cop)[h];
          hi.output.push_back(b.add_column("hp_ho[" + key(c, name, h) + "]", ho, ho, 0.0, "heat"));
          if (storage) {
            hi.generated.push_back(b.add_column("hp_hi[" + key(c, name, h) + "]", 0.0, unit.heat_output_gw, 0.0, "heat"));
            hi.electricity.push_back(
                b.add_column("hp_e[" + key(c, name, h) + "]", 0.0, unit.electricity_input_gw, 0.0, "heat"));
            hi.level.push_back(b.add_column("hp_hl[" + key(c, name, h) + "]", 0.0, unit.heat_storage_gwh, 0.0, "heat"));
          } else {
            const double e = electricity_for_heat(ho, copv);
            hi.generated.push_back(b.add_column("hp_hi[" + key(c, name, h) + "]", ho, ho, 0.0, "heat"));
            hi.electricity.push_back(b.add_column("hp_e[" + key(c, name, h) + "]", e, e, 0.0, "heat"));
          }
          bal[h].push_back({hi.electricity[h], -1.0});
          b.add_row("hp_cop[" + key(c, name, h) + "]", 0.0, 0.0, "heat",
                    {{hi.generated[h], 1.0}, {hi.electricity[h], -copv}});
        }
        if (storage)
          for (int h = 0; h < H; ++h)
            b.add_row("hp_sto[" + key(c, name, h) + "]", 0.0, 0.0, "heat",
                      {{hi.level[h], 1.0},
                       {hi.level[(h + H - 1) % H], -1.0},
                       {hi.generated[h], -1.0},
                       {hi.output[h], 1.0}});
        idx.heat.push_back(std::move(hi));
      }
    }
  }

  // Cross-border flows.
  for (const auto& from : inst.countries)
    for (const auto& to : inst.countries) {
      if (from == to) continue;
      const double ntc = inst.ntc.limit(from, to);
      if (ntc <= 0.0) continue;
      FlowIndex f{from, to, {}};
      for (int h = 0; h < H; ++h) {
        const int col = b.add_column("flow[" + from + ">" + to + "," + std::to_string(h) + "]", 0.0, ntc, 0.0, "flow");
        f.flow.push_back(col);
        balance[from][h].push_back({col, -1.0});
        balance[to][h].push_back({col, 1.0});
      }
      idx.flows.push_back(std::move(f));
    }

  for (const auto& c : inst.countries) {
    const auto& load = *inst.data.country(c).load;
    auto& rows = idx.balance_rows[c];
    for (int h = 0; h < H; ++h) {
      const double demand = load[h] / 1000.0;
      rows.push_back(b.add_row("balance[" + c + "," + std::to_string(h) + "]", demand, demand, "balance", balance[c][h]));
    }
  }

  out.lp = std::move(b).finish();
  return out;
}

// ---------------------------------------------------------------------------
// Decoded results.

struct CapacityRecord {
  CountryCode country;
  std::string asset;  // technology or storage name
  std::string kind;   // power | charge | discharge | energy
  double value = 0.0;  // GW or GWh
  bool pinned = false;
};

struct NamedSeries {
  CountryCode country;
  std::string name;
  std::vector<double> values;
};

struct CostBreakdown {
  double investment = 0.0;  // annuitized overnight cost of expandable capacity
  double fixed = 0.0;       // fixed O&M
  double variable = 0.0;    // fuel, carbon and storage throughput
  double total() const { return investment + fixed + variable; }
};

struct ModelResult {
  std::vector<CapacityRecord> capacities;
  std::vector<NamedSeries> dispatch;  // gen:<tech>, charge:<sto>, discharge:<sto>, level:<sto>, spill:<sto>, load, heat_pump
  std::vector<NamedSeries> flows;     // country = from, name = to
  std::map<CountryCode, HeatTrajectory> heat;
  CostBreakdown costs;  // MEUR over the window
  double objective = 0.0;

  double capacity(const CountryCode& c, std::string_view asset, std::string_view kind) const {
    for (const auto& r : capacities)
      if (r.country == c && r.asset == asset && r.kind == kind) return r.value;
    return 0.0;
  }
  const NamedSeries* series(const CountryCode& c, std::string_view name) const {
    for (const auto& s : dispatch)
      if (s.country == c && s.name == name) return &s;
    return nullptr;
  }
};

inline ModelResult decode(const BuiltModel& model, const SystemInstance& inst, const Solution& sol) {
  ModelResult r;
  const auto& x = sol.x;
  const int H = inst.hours;
  auto pick = [&](const std::vector<int>& cols) {
    std::vector<double> v(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) v[i] = x[cols[i]];
    return v;
  };

  for (const auto& g : model.index.generation) {
    const std::string name(to_string(g.tech));
    const double cap = x[g.capacity];
    r.capacities.push_back({g.country, name, "power", cap, g.pinned});
    const TechnologySpec& spec = inst.tech.technology(g.tech);
    const double annual = g.pinned ? 0.0 : annuity(spec.overnight_cost, spec.interest_rate, spec.lifetime);
    r.costs.investment += prorate_fixed_costs(annual, H) * cap;
    r.costs.fixed += prorate_fixed_costs(spec.fixed_cost, H) * cap;
    auto out = pick(g.output);
    const double vc = variable_cost(spec, inst.co2_price) * 1e-3;
    for (double v : out) r.costs.variable += vc * v;
    r.dispatch.push_back({g.country, "gen:" + name, std::move(out)});
  }
  for (const auto& s : model.index.storage) {
    const std::string name(to_string(s.tech));
    const StorageSpec& spec = inst.tech.storage_spec(s.tech);
    auto add_cap = [&](int col, const char* kind, double overnight) {
      if (col < 0) return;
      const bool pinned = model.lp.col_lower[col] == model.lp.col_upper[col];
      r.capacities.push_back({s.country, name, kind, x[col], pinned});
      if (!pinned) r.costs.investment += prorate_fixed_costs(annuity(overnight, spec.interest_rate, spec.lifetime), H) * x[col];
    };
    add_cap(s.charge_capacity, "charge", spec.overnight_charge);
    add_cap(s.discharge_capacity, "discharge", spec.overnight_discharge.value_or(0.0));
    add_cap(s.energy_capacity, "energy", spec.overnight_energy);
    if (!s.charge.empty()) {
      auto v = pick(s.charge);
      for (double e : v) r.costs.variable += spec.marginal_charge * 1e-3 * e;
      r.dispatch.push_back({s.country, "charge:" + name, std::move(v)});
    }
    auto d = pick(s.discharge);
    for (double e : d) r.costs.variable += spec.marginal_discharge * 1e-3 * e;
    r.dispatch.push_back({s.country, "discharge:" + name, std::move(d)});
    r.dispatch.push_back({s.country, "level:" + name, pick(s.level)});
    if (!s.spill.empty()) r.dispatch.push_back({s.country, "spill:" + name, pick(s.spill)});
  }
  for (const auto& f : model.index.flows) r.flows.push_back({f.from, f.to, pick(f.flow)});

  for (const auto& hi : model.index.heat) {
    auto& traj = r.heat[hi.country];
    traj.country = hi.country;
    ComboTrajectory t;
    t.ho = pick(hi.output);
    t.hi = pick(hi.generated);
    t.e = pick(hi.electricity);
    t.hl = hi.level.empty() ? std::vector<double>(H, 0.0) : pick(hi.level);
    traj.combos.emplace(hi.combo, std::move(t));
  }

  for (const auto& c : inst.countries) {
    const auto& load = *inst.data.country(c).load;
    std::vector<double> gw(H);
    for (int h = 0; h < H; ++h) gw[h] = load[h] / 1000.0;
    r.dispatch.push_back({c, "load", std::move(gw)});
    auto it = r.heat.find(c);
    std::vector<double> hp = it == r.heat.end() ? std::vector<double>(H, 0.0) : it->second.electricity();
    r.dispatch.push_back({c, "heat_pump", std::move(hp)});
  }
  r.objective = sol.objective;
  return r;
}

}  // namespace hpflex
