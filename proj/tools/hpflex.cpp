// hpflex: ingest -> run -> analyze.
//
// Exit codes: 0 success; 1 validation or input failure; 2 a scenario cell did
// not solve to optimality; 3 a paired baseline required by --delta is missing.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hpflex/cache.hpp"
#include "hpflex/report.hpp"
#include "hpflex/scenarios.hpp"
#include "hpflex/synth.hpp"

namespace fs = std::filesystem;
using namespace hpflex;

namespace {

constexpr const char* kVersion = "1.0.0";

enum Exit { ok = 0, invalid = 1, unsolved = 2, unpaired = 3 };

struct Common {
  std::string dataset;
  std::optional<std::uint64_t> seed;
  std::string countries = "CH,DE,FR";
  std::string years;
  int first_year = 2009;
  int hours = 8760;
  std::string out;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

// "synth:N" -> N consecutive years from first_year; otherwise a comma list.
struct YearSpec {
  std::optional<int> synth_count;
  std::vector<int> list;
};

YearSpec parse_years(const std::string& text) {
  YearSpec y;
  if (text.empty()) return y;
  if (text.rfind("synth:", 0) == 0) {
    try {
      y.synth_count = std::stoi(text.substr(6));
    } catch (const std::exception&) {
      fail(ErrorKind::invalid_argument, "bad --years '" + text + "'");
    }
    if (*y.synth_count < 1) fail(ErrorKind::invalid_argument, "--years synth:N needs N >= 1");
    return y;
  }
  for (const auto& s : split_list(text)) {
    try {
      y.list.push_back(std::stoi(s));
    } catch (const std::exception&) {
      fail(ErrorKind::invalid_argument, "bad year '" + s + "' in --years");
    }
  }
  return y;
}

// Weather years whose window of `hours` lies wholly inside the dataset.
std::vector<int> available_years(const Dataset& d, int hours) {
  std::vector<int> out;
  const auto start = d.start();
  if (!start) return out;
  const std::int64_t first = start->index(), last = first + static_cast<std::int64_t>(d.hours());
  for (int y = to_civil(*start).year - 1; july_first(y).index() + hours <= last; ++y)
    if (july_first(y).index() >= first) out.push_back(y);
  return out;
}

struct Loaded {
  DatasetBundle bundle;
  std::vector<int> years;
  nlohmann::json provenance;
};

// Resolves --dataset / --synth-seed and --years into data plus the weather
// years to run.
Loaded load_inputs(const Common& c, bool from_cache, bool need_years = true) {
  if (c.dataset.empty() == !c.seed) fail(ErrorKind::invalid_argument, "give exactly one of --dataset and --synth-seed");
  if (c.hours < 1 || c.hours > kHoursPerYear) fail(ErrorKind::invalid_argument, "--hours must be in [1, 8760]");
  const YearSpec ys = parse_years(c.years);
  Loaded l;
  nlohmann::json& p = l.provenance;
  p["tool"] = "hpflex";
  p["version"] = kVersion;
  if (c.seed) {
    std::vector<int> years = ys.list;
    if (ys.synth_count)
      for (int i = 0; i < *ys.synth_count; ++i) years.push_back(c.first_year + i);
    if (years.empty()) years.push_back(c.first_year);
    std::sort(years.begin(), years.end());
    years.erase(std::unique(years.begin(), years.end()), years.end());
    const auto countries = split_list(c.countries);
    l.bundle.data = synth_dataset(*c.seed, countries, years.front(), years.back() - years.front() + 1, c.hours);
    l.bundle.tech = bundled_static_data();
    l.years = years;
    p["source"] = "synthetic";
    p["seed"] = *c.seed;
    p["countries"] = countries;
    p["first_year"] = years.front();
  } else {
    if (ys.synth_count) fail(ErrorKind::invalid_argument, "--years synth:N needs --synth-seed");
    CacheInfo info;
    l.bundle = from_cache ? load_cache(c.dataset, &info) : read_bundle(c.dataset);
    const auto avail = available_years(l.bundle.data, c.hours);
    l.years = ys.list.empty() ? avail : ys.list;
    for (int y : l.years)
      if (std::find(avail.begin(), avail.end(), y) == avail.end())
        fail(ErrorKind::coverage, "weather year " + std::to_string(y) + " (" + std::to_string(c.hours) +
                                      " h from July 1) is not covered by the dataset");
    p["source"] = "dataset";
    p["seed"] = nullptr;
    p["dataset_sha256"] = info.hash;
  }
  if (need_years && l.years.empty()) fail(ErrorKind::coverage, "no weather year to run");
  validate_bundle(l.bundle);
  p["years"] = l.years;
  p["hours"] = c.hours;
  return l;
}

void add_common(CLI::App& app, Common& c, const char* dataset_help) {
  app.add_option("--dataset", c.dataset, dataset_help);
  app.add_option("--synth-seed", c.seed, "Generate a synthetic dataset from this seed");
  app.add_option("--countries", c.countries, "Synthetic countries (comma list)");
  app.add_option("--years", c.years, "Weather years: synth:N or a comma list (default: all covered)");
  app.add_option("--first-year", c.first_year, "First synthetic weather year");
  app.add_option("--hours", c.hours, "Window length from July 1, hours")->check(CLI::Range(1, kHoursPerYear));
  app.add_option("--out", c.out, "Output directory")->required();
}

int cmd_ingest(const Common& c) {
  const Loaded l = load_inputs(c, false, false);
  std::vector<std::string> warnings = validate_bundle(l.bundle);
  const CacheInfo info = save_cache(c.out, l.bundle);
  const auto& d = l.bundle.data;
  std::cout << "countries: ";
  for (const auto& x : d.countries()) std::cout << x << ' ';
  std::cout << "\nseries: " << d.all_series().size() << "\nhours: " << d.hours() << "\nstart: "
            << (d.start() ? format_iso_hour(*d.start()) : "-") << "\nntc entries: " << d.ntc().entries().size()
            << "\nweather years: ";
  for (int y : available_years(d, c.hours)) std::cout << y << ' ';
  std::cout << '\n';
  for (const auto& w : warnings) std::cout << "warning: " << w << '\n';
  for (const auto& [name, h] : info.files) std::cout << "sha256 " << name << ' ' << h << '\n';
  std::cout << "cache " << c.out << " hash " << info.hash << '\n';
  return ok;
}

int cmd_run(const Common& c, const std::string& scenario, double tol, int jobs, bool export_mps) {
  if (!(tol > 0.0)) fail(ErrorKind::invalid_argument, "--tol must be positive");
  Loaded l = load_inputs(c, true);
  const auto specs = select_specs(scenario, l.years, c.hours);
  l.provenance["scenario"] = scenario;
  l.provenance["tol"] = tol;

  RunOptions opt;
  opt.jobs = std::max(1, jobs);
  opt.verify_tol = tol;
  opt.out_dir = fs::path(c.out);
  opt.export_mps = export_mps;
  opt.provenance = l.provenance;
  opt.on_cell = [](const ScenarioResult& r) {
    std::cerr << r.cell() << ": " << r.status;
    if (r.optimal()) std::cerr << " objective " << format_number(r.objective) << " MEUR";
    std::cerr << '\n';
  };
  const auto results = run_matrix(l.bundle.data, l.bundle.tech, specs, opt);

  nlohmann::json run;
  run["schema"] = "hpflex.run/1";
  run["provenance"] = l.provenance;
  run["cells"] = nlohmann::json::array();
  int code = ok;
  for (const auto& r : results) {
    const bool flagged = r.optimal() && (!r.residuals.flagged().empty() || r.heat_residual > tol);
    run["cells"].push_back({{"cell", r.cell()},
                            {"status", r.status},
                            {"objective_meur", r.optimal() ? nlohmann::json(r.objective) : nlohmann::json(nullptr)},
                            {"max_residual", r.optimal() ? r.residuals.max() : 0.0},
                            {"residuals_ok", r.optimal() && !flagged}});
    if (r.status == "error") code = std::max<int>(code, invalid);
    if (!r.optimal() && r.status != "error") code = unsolved;
    if (flagged) {
      std::cerr << r.cell() << ": residual above " << tol << '\n';
      code = std::max<int>(code, invalid);
    }
    if (!r.error.empty()) std::cerr << r.cell() << ": " << r.error << '\n';
  }
  run["exit_code"] = code;
  detail::write_text(fs::path(c.out) / "run.json", run.dump(2) + "\n");
  std::cout << run.dump(2) << '\n';
  return code;
}

int cmd_analyze(const std::string& out, const std::string& dest, const std::string& scenario, bool delta,
                std::size_t top_k, std::size_t rldc_hours) {
  auto results = discover_results(out);
  if (!scenario.empty()) {
    const auto names = split_list(scenario);
    std::erase_if(results, [&](const ScenarioResult& r) {
      return std::find(names.begin(), names.end(), r.spec.name) == names.end() &&
             std::find(names.begin(), names.end(), std::string(to_string(r.spec.variant))) == names.end();
    });
  }
  if (results.empty()) fail(ErrorKind::coverage, "no results under " + out);
  AnalyzeOptions opt;
  opt.top_k = top_k;
  if (rldc_hours > 0) opt.rldc_hours = rldc_hours;
  opt.require_pairs = delta;
  const fs::path dir = dest.empty() ? fs::path(out) / "analysis" : fs::path(dest);
  const AnalysisSummary s = write_analysis(dir, results, opt);
  nlohmann::json j{{"cells", s.cells}, {"skipped", s.skipped}, {"pairs", s.pairs}, {"unpaired", s.unpaired},
                   {"files", s.files}, {"directory", dir.string()}};
  std::cout << j.dump(2) << '\n';
  return ok;
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::mismatched_scenario: return unpaired;
    default: return invalid;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat pump flexibility capacity-expansion model"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common ingest_c;
  auto* ingest = app.add_subcommand("ingest", "Validate inputs and write a canonical dataset cache");
  add_common(*ingest, ingest_c, "Input bundle directory (series.csv, optional ntc.csv, bio_caps.csv, static_data.json)");

  Common run_c;
  std::string scenario = "base";
  double tol = 1e-6;
  int jobs = 1;
  bool export_mps = false;
  auto* run = app.add_subcommand("run", "Solve a scenario matrix and persist every cell");
  add_common(*run, run_c, "Dataset cache directory written by ingest");
  run->add_option("--scenario", scenario, "base | variant | all | comma list of variants");
  run->add_option("--tol", tol, "Maximum accepted constraint residual");
  run->add_option("--jobs", jobs, "Parallel cells")->check(CLI::PositiveNumber);
  run->add_flag("--export-mps", export_mps, "Also write model.mps (and its name map) per cell");

  std::string an_out, an_dest, an_scenario;
  bool delta = false;
  std::size_t top_k = 3, rldc_hours = 0;
  auto* analyze = app.add_subcommand("analyze", "Derive RLDC, events, peaks, firm-capacity and cost reports");
  analyze->add_option("--out", an_out, "Results directory written by run")->required();
  analyze->add_option("--dest", an_dest, "Report directory (default <out>/analysis)");
  analyze->add_option("--scenario", an_scenario, "Restrict to these scenario or variant names (comma list)");
  analyze->add_flag("--delta", delta, "Require a heat-pump-free baseline for every heat-pump result");
  analyze->add_option("--top-k", top_k, "Peak hours reported per quantity")->check(CLI::PositiveNumber);
  analyze->add_option("--rldc-hours", rldc_hours, "Keep only the top N hours of each RLDC (0: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : invalid;
  }

  try {
    if (*ingest) return cmd_ingest(ingest_c);
    if (*run) return cmd_run(run_c, scenario, tol, jobs, export_mps);
    if (*analyze) return cmd_analyze(an_out, an_dest, an_scenario, delta, top_k, rldc_hours);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return invalid;
  }
  return invalid;
}
