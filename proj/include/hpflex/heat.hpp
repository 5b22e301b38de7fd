#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hpflex/error.hpp"
#include "hpflex/ids.hpp"
#include "hpflex/series.hpp"

namespace hpflex {

// Exogenous heat-pump rollout: the share s of each (building, sink) heat
// demand served by each pump type, and the storage energy-to-power ratio ep
// (hours of maximum heat output).
class HeatConfig {
 public:
  HeatConfig() = default;

  // Same share and ep everywhere, one or more active pump types.
  static HeatConfig uniform(double share, double ep, std::set<HeatPumpType> active = {HeatPumpType::air}) {
    HeatConfig cfg;
    cfg.active_ = std::move(active);
    for (auto b : kBuildingTypes)
      for (auto s : kSinks)
        for (auto p : cfg.active_) {
          cfg.set_share({b, s, p}, share);
          cfg.set_ep({b, s, p}, ep);
        }
    return cfg;
  }

  void set_share(const HeatCombo& c, double s) {
    if (!(s >= 0.0 && s <= 1.0)) fail(ErrorKind::out_of_range, "heat share must lie in [0,1]");
    share_[c] = s;
  }
  void set_ep(const HeatCombo& c, double ep) {
    if (!(ep >= 0.0)) fail(ErrorKind::out_of_range, "energy-to-power ratio must be >= 0");
    ep_[c] = ep;
  }
  void activate(HeatPumpType p) { active_.insert(p); }

  double share(const HeatCombo& c) const {
    if (!active_.count(c.pump)) return 0.0;
    auto it = share_.find(c);
    return it == share_.end() ? 0.0 : it->second;
  }
  double ep(const HeatCombo& c) const {
    auto it = ep_.find(c);
    return it == ep_.end() ? 0.0 : it->second;
  }
  const std::set<HeatPumpType>& active() const { return active_; }

  // Active combos in canonical order.
  std::vector<HeatCombo> combos() const {
    std::vector<HeatCombo> out;
    for (auto b : kBuildingTypes)
      for (auto s : kSinks)
        for (auto p : active_) out.push_back({b, s, p});
    return out;
  }

  // Copy with every share multiplied by `factor` (clamped to [0,1]).
  HeatConfig scaled(double factor) const {
    HeatConfig out = *this;
    for (auto& [c, s] : out.share_) s = std::clamp(s * factor, 0.0, 1.0);
    return out;
  }

  bool operator==(const HeatConfig&) const = default;

 private:
  std::map<HeatCombo, double> share_;
  std::map<HeatCombo, double> ep_;
  std::set<HeatPumpType> active_;
};

using HeatTargets = std::map<HeatCombo, std::vector<double>>;

// HO_{bt,st,hpt,h} = s_{bt,st,hpt} * hd_{bt,st,h}, in the demand's unit.
inline HeatTargets required_heat_output(const HeatConfig& config, const HeatDemandSet& demand) {
  HeatTargets out;
  for (const auto& combo : config.combos()) {
    const HourlySeries* hd = demand.find(combo.building, combo.sink);
    if (!hd) continue;
    const double s = config.share(combo);
    std::vector<double> ho(hd->size());
    for (std::size_t h = 0; h < ho.size(); ++h) ho[h] = s * (*hd)[h];
    out.emplace(combo, std::move(ho));
  }
  return out;
}

// HL_h = HL_{h-1} + HI_h - HO_h. Bounds are the optimizer's business.
constexpr double storage_step(double hl_prev, double hi, double ho) { return hl_prev + hi - ho; }

// E_h = HI_h / cop_h.
inline double electricity_for_heat(double hi, double cop) {
  if (!(cop > 0.0)) fail(ErrorKind::division_domain, "COP must be > 0, got " + format_number(cop));
  return hi / cop;
}

struct FleetUnit {
  double heat_output_gw = 0.0;     // GW_th
  double heat_storage_gwh = 0.0;   // GWh_th
  double electricity_input_gw = 0.0;  // GW_el

  bool operator==(const FleetUnit&) const = default;
};

struct HeatPumpFleet {
  CountryCode country;
  std::map<HeatCombo, FleetUnit> units;

  FleetUnit total() const {
    FleetUnit t;
    for (const auto& [c, u] : units) {
      t.heat_output_gw += u.heat_output_gw;
      t.heat_storage_gwh += u.heat_storage_gwh;
      t.electricity_input_gw += u.electricity_input_gw;
    }
    return t;
  }
  bool empty() const { return units.empty(); }
};

// Sizes each unit for the peak hour without storage: heat output covers
// max_h(s*hd), electricity input covers max_h(s*hd/cop) (possibly a different
// hour), storage = ep * heat output. Demand in MW_th, capacities in GW.
inline HeatPumpFleet size_fleet(const HeatConfig& config, const HeatDemandSet& demand, const CopSet& cops) {
  HeatPumpFleet fleet{demand.country(), {}};
  if (demand.empty()) return fleet;
  if (!cops.aligned_with(demand))
    fail(ErrorKind::alignment, demand.country() + ": COP and heat demand series are not aligned");
  for (const auto& [combo, ho] : required_heat_output(config, demand)) {
    const HourlySeries* cop = cops.find(combo.sink, combo.pump);
    if (!cop) fail(ErrorKind::alignment, demand.country() + ": no COP series for " + to_string(combo));
    double peak_heat = 0.0, peak_elec = 0.0;
    for (std::size_t h = 0; h < ho.size(); ++h) {
      peak_heat = std::max(peak_heat, ho[h]);
      peak_elec = std::max(peak_elec, electricity_for_heat(ho[h], (*cop)[h]));
    }
    FleetUnit u;
    u.heat_output_gw = peak_heat / 1000.0;
    u.electricity_input_gw = peak_elec / 1000.0;
    u.heat_storage_gwh = config.ep(combo) * u.heat_output_gw;
    fleet.units.emplace(combo, u);
  }
  return fleet;
}

struct ComboTrajectory {
  std::vector<double> ho;  // heat output, GW_th
  std::vector<double> hi;  // heat generated, GW_th
  std::vector<double> hl;  // storage level at end of hour, GWh_th
  std::vector<double> e;   // electricity input, GW_el
};

struct HeatTrajectory {
  CountryCode country;
  std::map<HeatCombo, ComboTrajectory> combos;

  // Total heat-pump electricity per hour.
  std::vector<double> electricity() const {
    std::vector<double> out;
    for (const auto& [c, t] : combos) {
      if (out.empty()) out.assign(t.e.size(), 0.0);
      for (std::size_t h = 0; h < t.e.size(); ++h) out[h] += t.e[h];
    }
    return out;
  }
};

// Max absolute violation per heat-module relation. Storage recursion uses the
// cyclic boundary HL_{-1} = HL_{H-1}.
struct HeatResidualReport {
  double storage_recursion = 0.0;
  double storage_bounds = 0.0;
  double cop_link = 0.0;
  double output_target = 0.0;
  double heat_generated_capacity = 0.0;
  double electricity_capacity = 0.0;
  double heat_output_capacity = 0.0;
  double no_storage_equality = 0.0;  // |HO - HI| where ep = 0
  std::vector<std::string> flagged;  // "<combo>: <relation>" for every nonzero entry

  double max() const {
    return std::max({storage_recursion, storage_bounds, cop_link, output_target, heat_generated_capacity,
                     electricity_capacity, heat_output_capacity, no_storage_equality});
  }
};

// targets and trajectory in GW; cops aligned with the trajectory hours.
inline HeatResidualReport validate_trajectory(const HeatTrajectory& traj, const HeatPumpFleet& fleet,
                                              const HeatTargets& targets_gw, const CopSet& cops,
                                              double flag_tolerance = 1e-6) {
  HeatResidualReport r;
  auto note = [&](double& slot, double v, const HeatCombo& c, const char* what) {
    v = std::abs(v);
    if (v > slot) slot = v;
    if (v > flag_tolerance) {
      const std::string tag = to_string(c) + ": " + what;
      if (std::find(r.flagged.begin(), r.flagged.end(), tag) == r.flagged.end()) r.flagged.push_back(tag);
    }
  };
  auto excess = [](double v, double lo, double hi) { return v < lo ? lo - v : (v > hi ? v - hi : 0.0); };

  for (const auto& [combo, t] : traj.combos) {
    const std::size_t n = t.ho.size();
    if (t.hi.size() != n || t.hl.size() != n || t.e.size() != n)
      fail(ErrorKind::alignment, to_string(combo) + ": trajectory columns differ in length");
    auto fit = fleet.units.find(combo);
    const FleetUnit unit = fit == fleet.units.end() ? FleetUnit{} : fit->second;
    const HourlySeries* cop = cops.find(combo.sink, combo.pump);
    auto tit = targets_gw.find(combo);
    const bool no_storage = unit.heat_storage_gwh == 0.0;
    for (std::size_t h = 0; h < n; ++h) {
      const double prev = t.hl[h == 0 ? n - 1 : h - 1];
      note(r.storage_recursion, t.hl[h] - storage_step(prev, t.hi[h], t.ho[h]), combo, "storage recursion");
      note(r.storage_bounds, excess(t.hl[h], 0.0, unit.heat_storage_gwh), combo, "storage bounds");
      if (cop) note(r.cop_link, t.hi[h] - (*cop)[h] * t.e[h], combo, "COP link");
      if (tit != targets_gw.end()) note(r.output_target, t.ho[h] - tit->second[h], combo, "output target");
      note(r.heat_generated_capacity, excess(t.hi[h], 0.0, unit.heat_output_gw), combo, "heat generated capacity");
      note(r.electricity_capacity, excess(t.e[h], 0.0, unit.electricity_input_gw), combo, "electricity capacity");
      note(r.heat_output_capacity, excess(t.ho[h], 0.0, unit.heat_output_gw), combo, "heat output capacity");
      if (no_storage) note(r.no_storage_equality, t.ho[h] - t.hi[h], combo, "HO != HI without storage");
    }
  }
  return r;
}

}  // namespace hpflex
