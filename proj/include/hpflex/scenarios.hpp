#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "hpflex/hash.hpp"
#include "hpflex/model.hpp"
#include "hpflex/mps.hpp"
#include "hpflex/simplex.hpp"
#include "hpflex/verify.hpp"

namespace hpflex {

enum class Variant { base, gas_free, half_nuc, no_coal, no_ntc, wind_cap };

inline constexpr std::array kVariants{Variant::base,    Variant::gas_free, Variant::half_nuc,
                                      Variant::no_coal, Variant::no_ntc,   Variant::wind_cap};

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::base: return "base";
    case Variant::gas_free: return "gas_free";
    case Variant::half_nuc: return "half_nuc";
    case Variant::no_coal: return "no_coal";
    case Variant::no_ntc: return "no_ntc";
    case Variant::wind_cap: return "wind_cap";
  }
  return "?";
}

inline Variant parse_variant(std::string_view s) {
  for (Variant v : kVariants)
    if (to_string(v) == s) return v;
  fail(ErrorKind::unknown_variant, "'" + std::string(s) + "' is not one of base, gas_free, half_nuc, no_coal, no_ntc, wind_cap");
}

struct ScenarioSpec {
  std::string name;
  double heat_share = 0.0;  // fraction of heat demand served by heat pumps
  double ep = 0.0;          // thermal storage hours; irrelevant when heat_share = 0
  Variant variant = Variant::base;
  std::vector<int> weather_years;
  int window_hours = 8760;

  HeatConfig heat_config() const { return HeatConfig::uniform(heat_share, heat_share > 0.0 ? ep : 0.0); }

  void validate() const {
    if (name.empty()) fail(ErrorKind::invalid_argument, "scenario without a name");
    if (!(heat_share >= 0.0 && heat_share <= 1.0)) fail(ErrorKind::out_of_range, name + ": heat share outside [0,1]");
    if (!(ep >= 0.0)) fail(ErrorKind::out_of_range, name + ": negative energy-to-power ratio");
    if (window_hours < 1) fail(ErrorKind::out_of_range, name + ": window must have at least one hour");
    if (weather_years.empty()) fail(ErrorKind::invalid_argument, name + ": no weather years");
  }
};

inline std::string scenario_name(Variant v, double share, double ep) {
  std::string n = std::string(to_string(v)) + "_hp" + format_number(std::round(share * 1000.0) / 10.0);
  if (share > 0.0) n += "_ep" + format_number(ep);
  return n;
}

inline ScenarioSpec make_spec(Variant v, double share, double ep, std::vector<int> years, int hours) {
  ScenarioSpec s{scenario_name(v, share, ep), share, share > 0.0 ? ep : 0.0, v, std::move(years), hours};
  s.validate();
  return s;
}

// {(0 %, -), (25 %, 0 h), (25 %, 2 h)}.
inline std::vector<ScenarioSpec> base_matrix(const std::vector<int>& years, int hours) {
  return {make_spec(Variant::base, 0.0, 0.0, years, hours), make_spec(Variant::base, 0.25, 0.0, years, hours),
          make_spec(Variant::base, 0.25, 2.0, years, hours)};
}

// Robustness runs pair a no-heat-pump case with 25 % heat pumps and two-hour
// storage.
inline std::vector<ScenarioSpec> robustness_pair(Variant v, const std::vector<int>& years, int hours) {
  return {make_spec(v, 0.0, 0.0, years, hours), make_spec(v, 0.25, 2.0, years, hours)};
}

// "base", a variant name, "all", or a comma-separated list of those.
inline std::vector<ScenarioSpec> select_specs(const std::string& selection, const std::vector<int>& years, int hours) {
  std::vector<ScenarioSpec> out;
  auto add = [&](std::vector<ScenarioSpec> v) {
    for (auto& s : v)
      if (std::none_of(out.begin(), out.end(), [&](const ScenarioSpec& o) { return o.name == s.name; }))
        out.push_back(std::move(s));
  };
  std::stringstream ss(selection);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item == "all") {
      add(base_matrix(years, hours));
      for (Variant v : kVariants)
        if (v != Variant::base) add(robustness_pair(v, years, hours));
    } else {
      const Variant v = parse_variant(item);
      add(v == Variant::base ? base_matrix(years, hours) : robustness_pair(v, years, hours));
    }
  }
  if (out.empty()) fail(ErrorKind::unknown_variant, "empty scenario selection");
  return out;
}

// Mutates bounds and NTC only. Applying the same variant twice is a no-op;
// a different variant requires an instance in base form.
inline SystemInstance apply_variant(SystemInstance inst, Variant v) {
  const std::string name(to_string(v));
  if (inst.variant == name) return inst;
  if (inst.variant != "base")
    fail(ErrorKind::invalid_argument, "variant " + name + " needs a base instance, got " + inst.variant);
  auto each_country = [&](auto&& f) {
    for (const auto& c : inst.countries) f(c);
  };
  switch (v) {
    case Variant::base: break;
    case Variant::gas_free:
      each_country([&](const CountryCode& c) {
        Bound b = inst.bounds.generation(c, Technology::ccgt);
        b.lower = 0.0;
        inst.bounds.set_generation(c, Technology::ccgt, b);
      });
      break;
    case Variant::half_nuc:
      each_country([&](const CountryCode& c) {
        const double half = 0.5 * inst.bounds.generation(c, Technology::nuclear).lower;
        inst.bounds.set_generation(c, Technology::nuclear, {half, half});
      });
      break;
    case Variant::no_coal:
      each_country([&](const CountryCode& c) {
        inst.bounds.set_generation(c, Technology::hard_coal, {0.0, 0.0});
        inst.bounds.set_generation(c, Technology::lignite, {0.0, 0.0});
      });
      break;
    case Variant::no_ntc: inst.ntc.clear(); break;
    case Variant::wind_cap:
      each_country([&](const CountryCode& c) {
        for (Technology t : {Technology::wind_onshore, Technology::wind_offshore}) {
          Bound b = inst.bounds.generation(c, t);
          b.upper = 1.5 * b.lower;
          inst.bounds.set_generation(c, t, b);
        }
      });
      break;
  }
  inst.variant = name;
  return inst;
}

// Canonical text of every model input, hashed for provenance.
inline std::string instance_hash(const SystemInstance& inst) {
  Sha256 h;
  std::ostringstream head;
  head << "year," << inst.year << "\nhours," << inst.hours << "\nvariant," << inst.variant << "\nco2,"
       << format_number(inst.co2_price) << '\n';
  for (const auto& c : inst.countries) head << "country," << c << '\n';
  for (const auto& [k, b] : inst.bounds.generation_entries())
    head << "gen," << k.first << ',' << to_string(k.second) << ',' << format_number(b.lower) << ','
         << format_number(b.upper) << '\n';
  for (const auto& [k, b] : inst.bounds.storage_entries())
    head << "sto," << std::get<0>(k) << ',' << to_string(std::get<1>(k)) << ',' << to_string(std::get<2>(k)) << ','
         << format_number(b.lower) << ',' << format_number(b.upper) << '\n';
  for (const auto& [k, gw] : inst.ntc.entries()) head << "ntc," << k.first << ',' << k.second << ',' << format_number(gw) << '\n';
  for (const auto& [c, v] : inst.bioenergy_cap_gwh_year) head << "bio," << c << ',' << format_number(v) << '\n';
  for (const auto& combo : inst.heat.combos())
    head << "heat," << to_string(combo) << ',' << format_number(inst.heat.share(combo)) << ','
         << format_number(inst.heat.ep(combo)) << '\n';
  h.update(head.str());
  h.update(emit_static_data(inst.tech));
  for (const auto& s : inst.data.all_series()) {
    std::ostringstream os;
    write_series_csv(os, {s});
    h.update(os.str());
  }
  return h.hex();
}

inline SystemInstance scenario_instance(const Dataset& data, const StaticData& tech, const ScenarioSpec& spec, int year,
                                        std::vector<std::string>* notes = nullptr) {
  const Dataset window = data.window(year, spec.window_hours);
  return apply_variant(make_instance(window, tech, spec.heat_config(), year, notes), spec.variant);
}

struct ScenarioResult {
  ScenarioSpec spec;
  int year = 0;
  std::string status = "error";  // optimal | infeasible | unbounded | iteration_limit | error
  std::string error;
  double objective = std::numeric_limits<double>::quiet_NaN();
  ModelResult result;
  ResidualReport residuals;
  double heat_residual = 0.0;  // worst heat-module violation over countries
  SolveStats stats;
  int rows = 0, cols = 0, nonzeros = 0;
  std::string input_hash;
  std::vector<CountryCode> countries;
  NtcMatrix ntc;
  std::vector<std::string> notes;

  bool optimal() const { return status == "optimal"; }
  std::string cell() const { return spec.name + "/" + std::to_string(year); }
};

struct RunOptions {
  SolveOptions solve;
  int jobs = 1;
  double verify_tol = 1e-6;                      // residual above which a family is flagged
  std::optional<std::filesystem::path> out_dir;  // persist each cell when set
  bool export_mps = false;                       // also write model.mps into each cell directory
  nlohmann::json provenance = nlohmann::json::object();  // copied into every manifest
  // Applied to each cell's instance after the variant; for experiments and tests.
  std::function<void(SystemInstance&, const ScenarioSpec&, int)> customize;
  std::function<void(const ScenarioResult&)> on_cell;  // progress, called under a lock
};

// Worst heat-module residual of a decoded result, GW / GWh.
inline double heat_residual(const SystemInstance& inst, const ModelResult& r) {
  double worst = 0.0;
  for (const auto& c : inst.countries) {
    const HeatPumpFleet* fleet = inst.fleet(c);
    if (!fleet) continue;
    auto targets = required_heat_output(inst.heat, inst.data.country(c).heat);
    for (auto& [combo, v] : targets)
      for (double& x : v) x /= 1000.0;
    auto it = r.heat.find(c);
    if (it == r.heat.end()) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, validate_trajectory(it->second, *fleet, targets, inst.data.country(c).cops).max());
  }
  return worst;
}

namespace detail {

template <class F>
void write_file(const std::filesystem::path& path, F&& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write " + path.string());
  body(out);
  if (!out) fail(ErrorKind::io, "write failed: " + path.string());
}

inline std::vector<std::string> split_plain(const std::string& line) {
  std::vector<std::string> out(1);
  for (char ch : line) {
    if (ch == ',') out.emplace_back();
    else if (ch != '\r') out.back().push_back(ch);
  }
  return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) fail(ErrorKind::malformed_row, where + ": bad number '" + s + "'");
  return v;
}

}  // namespace detail

inline constexpr std::array kResultFiles{"capacities.csv", "dispatch.csv", "flows.csv", "heat.csv", "costs.csv"};

// Writes the five result tables into `dir` (which must exist).
inline void write_result_tables(const std::filesystem::path& dir, const ModelResult& r) {
  using detail::write_file;
  write_file(dir / "capacities.csv", [&](std::ostream& o) {
    o << "country,asset,kind,value,pinned\n";
    for (const auto& c : r.capacities)
      o << c.country << ',' << c.asset << ',' << c.kind << ',' << format_number(c.value) << ',' << (c.pinned ? 1 : 0) << '\n';
  });
  write_file(dir / "dispatch.csv", [&](std::ostream& o) {
    o << "country,series,hour,value\n";
    for (const auto& s : r.dispatch)
      for (std::size_t h = 0; h < s.values.size(); ++h)
        o << s.country << ',' << s.name << ',' << h << ',' << format_number(s.values[h]) << '\n';
  });
  write_file(dir / "flows.csv", [&](std::ostream& o) {
    o << "from,to,hour,value\n";
    for (const auto& s : r.flows)
      for (std::size_t h = 0; h < s.values.size(); ++h)
        o << s.country << ',' << s.name << ',' << h << ',' << format_number(s.values[h]) << '\n';
  });
  write_file(dir / "heat.csv", [&](std::ostream& o) {
    o << "country,combo,hour,heat_output,heat_generated,storage_level,electricity\n";
    for (const auto& [c, traj] : r.heat)
      for (const auto& [combo, t] : traj.combos)
        for (std::size_t h = 0; h < t.ho.size(); ++h)
          o << c << ',' << to_string(combo) << ',' << h << ',' << format_number(t.ho[h]) << ',' << format_number(t.hi[h])
            << ',' << format_number(t.hl[h]) << ',' << format_number(t.e[h]) << '\n';
  });
  write_file(dir / "costs.csv", [&](std::ostream& o) {
    o << "component,value\n";
    o << "investment," << format_number(r.costs.investment) << '\n';
    o << "fixed," << format_number(r.costs.fixed) << '\n';
    o << "variable," << format_number(r.costs.variable) << '\n';
    o << "total," << format_number(r.costs.total()) << '\n';
    o << "objective," << format_number(r.objective) << '\n';
  });
}

inline nlohmann::json manifest_json(const ScenarioResult& res, const nlohmann::json& provenance,
                                    const std::filesystem::path& dir) {
  using nlohmann::json;
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json m;
  m["schema"] = "hpflex.result/1";
  m["cell"] = res.cell();
  m["spec"] = {{"name", res.spec.name},
               {"variant", std::string(to_string(res.spec.variant))},
               {"heat_share", res.spec.heat_share},
               {"ep", res.spec.ep},
               {"weather_year", res.year},
               {"window_hours", res.spec.window_hours}};
  m["status"] = res.status;
  m["error"] = res.error;
  m["objective_meur"] = num(res.objective);
  m["countries"] = res.countries;
  json ntc = json::array();
  for (const auto& [k, gw] : res.ntc.entries()) ntc.push_back({{"from", k.first}, {"to", k.second}, {"gw", gw}});
  m["ntc"] = ntc;
  m["provenance"] = provenance;
  m["input_sha256"] = res.input_hash;
  json files = json::object();
  for (const char* f : kResultFiles)
    if (std::filesystem::exists(dir / f)) files[f] = sha256_file(dir / f);
  m["files_sha256"] = files;
  m["solver"] = {{"rows", res.rows},
                 {"cols", res.cols},
                 {"nonzeros", res.nonzeros},
                 {"iterations", res.stats.iterations},
                 {"dual_iterations", res.stats.dual_iterations},
                 {"phase1_iterations", res.stats.phase1_iterations},
                 {"bound_flips", res.stats.bound_flips},
                 {"refactorizations", res.stats.refactorizations},
                 {"presolved_rows", res.stats.presolved_rows},
                 {"presolved_cols", res.stats.presolved_cols},
                 {"seconds", res.stats.seconds}};
  json fams = json::array();
  for (const auto& f : res.residuals.families)
    fams.push_back({{"family", f.family}, {"count", f.count}, {"violated", f.violated}, {"max", f.max}, {"mean", f.mean}});
  m["residuals"] = {{"max", res.residuals.max()}, {"heat_max", res.heat_residual}, {"families", fams}};
  m["notes"] = res.notes;
  return m;
}

// Writes one cell into <out>/<spec>/<year>: tables and manifest go to a
// temporary sibling first, which is then renamed into place.
inline std::filesystem::path persist_result(const std::filesystem::path& out, const ScenarioResult& res,
                                            const nlohmann::json& provenance, const BuiltModel* model = nullptr) {
  namespace fs = std::filesystem;
  const fs::path parent = out / res.spec.name;
  const fs::path final_dir = parent / std::to_string(res.year);
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) fail(ErrorKind::io, "cannot create " + parent.string() + ": " + ec.message());
  std::ostringstream tag;
  tag << ".tmp-" << res.year << '-' << std::this_thread::get_id();
  const fs::path tmp = parent / tag.str();
  fs::remove_all(tmp, ec);
  fs::create_directories(tmp, ec);
  if (ec) fail(ErrorKind::io, "cannot create " + tmp.string() + ": " + ec.message());
  if (res.optimal()) write_result_tables(tmp, res.result);
  if (model) export_mps(model->lp, tmp / "model.mps");
  detail::write_file(tmp / "manifest.json",
                     [&](std::ostream& o) { o << manifest_json(res, provenance, tmp).dump(2) << '\n'; });
  fs::remove_all(final_dir, ec);
  fs::rename(tmp, final_dir, ec);
  if (ec) fail(ErrorKind::io, "cannot move results into " + final_dir.string() + ": " + ec.message());
  return final_dir;
}

// Builds, solves, verifies and decodes one (spec, year) cell. Never throws:
// failures become the cell's status.
inline ScenarioResult run_cell(const Dataset& data, const StaticData& tech, const ScenarioSpec& spec, int year,
                               const RunOptions& opt = {}) {
  ScenarioResult res;
  res.spec = spec;
  res.year = year;
  std::optional<BuiltModel> model;
  try {
    SystemInstance inst = scenario_instance(data, tech, spec, year, &res.notes);
    if (opt.customize) opt.customize(inst, spec, year);
    res.countries = inst.countries;
    res.ntc = inst.ntc;
    res.input_hash = instance_hash(inst);
    model = build_model(inst);
    res.rows = model->lp.num_rows();
    res.cols = model->lp.num_cols();
    res.nonzeros = model->lp.num_nonzeros();
    const Solution sol = solve(model->lp, opt.solve);
    res.stats = sol.stats;
    res.status = std::string(to_string(sol.status));
    if (sol.status == SolveStatus::optimal) {
      res.objective = sol.objective;
      res.residuals = verify(model->lp, sol, opt.verify_tol);
      res.result = decode(*model, inst, sol);
      res.heat_residual = heat_residual(inst, res.result);
    }
  } catch (const std::exception& e) {
    res.status = "error";
    res.error = e.what();
  }
  if (opt.out_dir) {
    try {
      persist_result(*opt.out_dir, res, opt.provenance, opt.export_mps && model ? &*model : nullptr);
    } catch (const std::exception& e) {
      res.status = "error";
      res.error = e.what();
    }
  }
  return res;
}

// One result per (spec, year) in spec-major order, cells spread over
// `opt.jobs` workers.
inline std::vector<ScenarioResult> run_matrix(const Dataset& data, const StaticData& tech,
                                              const std::vector<ScenarioSpec>& specs, const RunOptions& opt = {}) {
  std::vector<std::pair<const ScenarioSpec*, int>> cells;
  for (const auto& s : specs) {
    s.validate();
    for (int y : s.weather_years) cells.push_back({&s, y});
  }
  std::vector<ScenarioResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex report;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < cells.size();) {
      results[i] = run_cell(data, tech, *cells[i].first, cells[i].second, opt);
      if (opt.on_cell) {
        std::lock_guard lock(report);
        opt.on_cell(results[i]);
      }
    }
  };
  const int jobs = std::clamp(opt.jobs, 1, std::max(1, static_cast<int>(cells.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return results;
}

// Reads a persisted cell back (tables are empty for non-optimal cells).
inline ScenarioResult load_result(const std::filesystem::path& dir) {
  using nlohmann::json;
  ScenarioResult res;
  std::ifstream mf(dir / "manifest.json");
  if (!mf) fail(ErrorKind::io, "no manifest in " + dir.string());
  json m;
  try {
    m = json::parse(mf);
    const auto& s = m.at("spec");
    res.spec.name = s.at("name").get<std::string>();
    res.spec.variant = parse_variant(s.at("variant").get<std::string>());
    res.spec.heat_share = s.at("heat_share").get<double>();
    res.spec.ep = s.at("ep").get<double>();
    res.spec.window_hours = s.at("window_hours").get<int>();
    res.year = s.at("weather_year").get<int>();
    res.spec.weather_years = {res.year};
    res.status = m.at("status").get<std::string>();
    res.error = m.at("error").get<std::string>();
    res.objective = m.at("objective_meur").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                      : m.at("objective_meur").get<double>();
    res.countries = m.at("countries").get<std::vector<std::string>>();
    for (const auto& e : m.at("ntc")) res.ntc.set(e.at("from"), e.at("to"), e.at("gw").get<double>());
    res.input_hash = m.at("input_sha256").get<std::string>();
    res.notes = m.at("notes").get<std::vector<std::string>>();
    res.heat_residual = m.at("residuals").at("heat_max").get<double>();
    for (const auto& f : m.at("residuals").at("families"))
      res.residuals.families.push_back({f.at("family"), f.at("count"), f.at("violated"), f.at("max"), f.at("mean")});
  } catch (const json::exception& e) {
    fail(ErrorKind::io, dir.string() + "/manifest.json: " + e.what());
  }
  if (!res.optimal()) return res;

  auto each_row = [&](const char* file, std::size_t fields, auto&& f) {
    const auto path = dir / file;
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "missing " + path.string());
    std::string line;
    std::getline(in, line);
    int n = 1;
    while (std::getline(in, line)) {
      ++n;
      if (line.empty()) continue;
      const auto v = detail::split_plain(line);
      const std::string where = path.string() + ":" + std::to_string(n);
      if (v.size() != fields) fail(ErrorKind::malformed_row, where);
      f(v, where);
    }
  };
  auto& r = res.result;
  each_row("capacities.csv", 5, [&](const auto& v, const std::string& w) {
    r.capacities.push_back({v[0], v[1], v[2], detail::parse_double(v[3], w), v[4] == "1"});
  });
  auto append = [](std::vector<NamedSeries>& list, const std::string& a, const std::string& b, double x) {
    if (list.empty() || list.back().country != a || list.back().name != b) list.push_back({a, b, {}});
    list.back().values.push_back(x);
  };
  each_row("dispatch.csv", 4, [&](const auto& v, const std::string& w) { append(r.dispatch, v[0], v[1], detail::parse_double(v[3], w)); });
  each_row("flows.csv", 4, [&](const auto& v, const std::string& w) { append(r.flows, v[0], v[1], detail::parse_double(v[3], w)); });
  each_row("heat.csv", 7, [&](const auto& v, const std::string& w) {
    const auto parts = detail::split(v[1], '/');
    if (parts.size() != 3) fail(ErrorKind::malformed_row, w + ": bad combo");
    const HeatCombo combo{parse_building_type(parts[0]), parse_sink(parts[1]), parse_heat_pump_type(parts[2])};
    auto& traj = r.heat[v[0]];
    traj.country = v[0];
    auto& t = traj.combos[combo];
    t.ho.push_back(detail::parse_double(v[3], w));
    t.hi.push_back(detail::parse_double(v[4], w));
    t.hl.push_back(detail::parse_double(v[5], w));
    t.e.push_back(detail::parse_double(v[6], w));
  });
  each_row("costs.csv", 2, [&](const auto& v, const std::string& w) {
    const double x = detail::parse_double(v[1], w);
    if (v[0] == "investment") r.costs.investment = x;
    else if (v[0] == "fixed") r.costs.fixed = x;
    else if (v[0] == "variable") r.costs.variable = x;
    else if (v[0] == "objective") r.objective = x;
  });
  return res;
}

}  // namespace hpflex
