#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpflex/analysis.hpp"
#include "hpflex/cache.hpp"
#include "hpflex/scenarios.hpp"

namespace hpflex {

// Every persisted cell below `root` (<root>/<spec>/<year>/manifest.json),
// ordered by directory path.
inline std::vector<ScenarioResult> discover_results(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) fail(ErrorKind::io, root.string() + " is not a directory");
  std::vector<fs::path> dirs;
  for (const auto& spec : fs::directory_iterator(root)) {
    if (!spec.is_directory()) continue;
    for (const auto& cell : fs::directory_iterator(spec.path()))
      if (cell.is_directory() && fs::exists(cell.path() / "manifest.json")) dirs.push_back(cell.path());
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<ScenarioResult> out;
  for (const auto& d : dirs) out.push_back(load_result(d));
  return out;
}

// The heat-pump-free result with the same variant, year, window and
// countries, if present.
inline const ScenarioResult* find_baseline(const std::vector<ScenarioResult>& all, const ScenarioResult& r) {
  for (const auto& b : all)
    if (b.spec.heat_share == 0.0 && b.spec.variant == r.spec.variant && b.year == r.year &&
        b.spec.window_hours == r.spec.window_hours && b.countries == r.countries)
      return &b;
  return nullptr;
}

struct AnalyzeOptions {
  std::size_t top_k = 3;                  // peak hours per quantity
  std::optional<std::size_t> rldc_hours;  // RLDC prefix length; whole curve when unset
  bool require_pairs = false;             // every heat-pump cell needs its baseline
};

struct AnalysisSummary {
  std::vector<std::string> cells, skipped, pairs, unpaired;
  std::vector<std::string> files;
};

inline constexpr const char* kHeatCostHeader = "cell,baseline,delta_cost_meur,heat_supplied_gwh,heat_cost_eur_per_mwh";

// Writes rldc.csv, events.csv, peaks.csv and costs.json for every solved
// cell, plus firm_delta.csv and heat_cost.csv for every (heat-pump cell,
// baseline) pair. With `require_pairs`, a heat-pump cell without a baseline,
// or a selection without any pair, is a MismatchedScenario error and nothing
// is written.
inline AnalysisSummary write_analysis(const std::filesystem::path& dir, const std::vector<ScenarioResult>& results,
                                      const AnalyzeOptions& opt = {}) {
  AnalysisSummary sum;
  std::vector<std::pair<const ScenarioResult*, const ScenarioResult*>> pairs;
  for (const auto& r : results) {
    if (!r.optimal()) {
      sum.skipped.push_back(r.cell());
      continue;
    }
    sum.cells.push_back(r.cell());
    if (r.spec.heat_share == 0.0) continue;
    const ScenarioResult* b = find_baseline(results, r);
    if (b && b->optimal()) {
      pairs.push_back({&r, b});
      sum.pairs.push_back(r.cell() + " vs " + b->cell());
    } else {
      sum.unpaired.push_back(r.cell());
    }
  }
  if (opt.require_pairs) {
    if (!sum.unpaired.empty())
      fail(ErrorKind::mismatched_scenario, "no solved heat-pump-free baseline for " + sum.unpaired.front());
    if (pairs.empty()) fail(ErrorKind::mismatched_scenario, "no (heat pump, baseline) pair among the selected results");
  }

  std::ostringstream rldc_csv, events_csv, peaks_csv, firm_csv, heat_csv;
  rldc_csv << kRldcHeader << '\n';
  events_csv << kEventsHeader << '\n';
  peaks_csv << kPeaksHeader << '\n';
  firm_csv << kFirmHeader << '\n';
  heat_csv << kHeatCostHeader << '\n';
  nlohmann::json costs = nlohmann::json::array();

  auto prefix = [&](std::vector<double> curve) {
    if (opt.rldc_hours && *opt.rldc_hours < curve.size()) curve.resize(*opt.rldc_hours);
    return curve;
  };
  for (const auto& r : results) {
    if (!r.optimal()) continue;
    const std::string cell = r.cell();
    std::vector<std::vector<double>> plain, with_hp;
    for (const auto& c : r.countries) {
      plain.push_back(residual_load(r.result, c, false));
      with_hp.push_back(residual_load(r.result, c, true));
      write_rldc_csv(rldc_csv, cell, c, "residual", prefix(rldc(plain.back())));
      write_rldc_csv(rldc_csv, cell, c, "residual_with_hp", prefix(rldc(with_hp.back())));
    }
    write_rldc_csv(rldc_csv, cell, kTotalCountry, "residual", prefix(rldc(sum_series(plain))));
    write_rldc_csv(rldc_csv, cell, kTotalCountry, "residual_with_hp", prefix(rldc(sum_series(with_hp))));

    const PeakBundle bundle = peak_bundle(r.result, r.countries);
    for (std::size_t i = 0; i < r.countries.size(); ++i) {
      const auto& c = r.countries[i];
      const auto& heat = bundle.at(c).at(PeakQuantity::heat_demand);
      if (std::any_of(heat.begin(), heat.end(), [](double v) { return v != 0.0; }))
        write_events_csv(events_csv, cell, c, "heat_deviation", deviation_events(heat));
      write_events_csv(events_csv, cell, c, "residual_with_hp", residual_events(with_hp[i]));
    }
    write_peaks_csv(peaks_csv, cell, peak_records(bundle, opt.top_k));

    const ScenarioResult* base = nullptr;
    for (const auto& [w, b] : pairs)
      if (w == &r) base = b;
    const CostReport report = cost_report(r, base);
    costs.push_back(to_json(report));
    if (base) {
      write_firm_csv(firm_csv, cell, base->cell(), firm_capacity_delta(r, *base));
      heat_csv << cell << ',' << base->cell() << ',' << format_number(*report.delta_cost_meur) << ','
               << format_number(report.heat_supplied_gwh) << ','
               << (report.heat_cost_eur_per_mwh ? format_number(*report.heat_cost_eur_per_mwh) : "") << '\n';
    }
  }

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
  auto emit = [&](const char* name, const std::string& text) {
    detail::write_text(dir / name, text);
    sum.files.push_back(name);
  };
  emit("rldc.csv", rldc_csv.str());
  emit("events.csv", events_csv.str());
  emit("peaks.csv", peaks_csv.str());
  emit("costs.json", costs.dump(2) + "\n");
  if (!pairs.empty()) {
    emit("firm_delta.csv", firm_csv.str());
    emit("heat_cost.csv", heat_csv.str());
  } else {
    std::filesystem::remove(dir / "firm_delta.csv", ec);
    std::filesystem::remove(dir / "heat_cost.csv", ec);
  }
  return sum;
}

}  // namespace hpflex
