#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "../support/toy.hpp"
#include "hpflex/scenarios.hpp"
#include "hpflex/synth.hpp"

using namespace hpflex;
namespace fs = std::filesystem;

namespace {

const Dataset& two_year_data() {
  static const Dataset d = synth_dataset(4, {"CH", "DE", "FR"}, 2009, 2, 8760);
  return d;
}

SystemInstance base_instance(int hours = 24) {
  return make_instance(two_year_data().window(2009, hours), bundled_static_data(), HeatConfig::uniform(0.25, 2.0), 2009);
}

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("hpflex_scen_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Scenarios, VariantNames) {
  for (Variant v : kVariants) EXPECT_EQ(parse_variant(to_string(v)), v);
  try {
    parse_variant("no_nuc");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unknown_variant);
  }
}

TEST(Scenarios, BaseMatrixIsExactlyThreeCells) {
  const auto m = base_matrix({2009}, 336);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m[0].heat_share, 0.0);
  EXPECT_EQ(m[1].heat_share, 0.25);
  EXPECT_EQ(m[1].ep, 0.0);
  EXPECT_EQ(m[2].heat_share, 0.25);
  EXPECT_EQ(m[2].ep, 2.0);
  EXPECT_EQ(m[0].name, "base_hp0");
  EXPECT_EQ(m[1].name, "base_hp25_ep0");
  EXPECT_EQ(m[2].name, "base_hp25_ep2");
  for (const auto& s : m) EXPECT_EQ(s.variant, Variant::base);
}

TEST(Scenarios, RobustnessRunsUseTwoHourStorage) {
  for (Variant v : kVariants) {
    if (v == Variant::base) continue;
    const auto p = robustness_pair(v, {2009, 2010}, 48);
    ASSERT_EQ(p.size(), 2u);
    EXPECT_EQ(p[0].heat_share, 0.0);
    EXPECT_EQ(p[1].heat_share, 0.25);
    EXPECT_EQ(p[1].ep, 2.0);
    EXPECT_EQ(p[1].variant, v);
  }
  EXPECT_EQ(select_specs("all", {2009}, 24).size(), 3u + 5u * 2u);
  EXPECT_EQ(select_specs("base,no_ntc,base", {2009}, 24).size(), 5u);
  EXPECT_THROW(select_specs("base,bogus", {2009}, 24), Error);
}

TEST(Scenarios, HalfNuclearHalvesFrance) {
  const auto inst = base_instance();
  const Bound before = inst.bounds.generation("FR", Technology::nuclear);
  EXPECT_EQ(before.lower, 61.8);
  EXPECT_EQ(before.upper, 61.8);
  const auto v = apply_variant(inst, Variant::half_nuc);
  EXPECT_DOUBLE_EQ(v.bounds.generation("FR", Technology::nuclear).lower, 30.9);
  EXPECT_DOUBLE_EQ(v.bounds.generation("FR", Technology::nuclear).upper, 30.9);
}

TEST(Scenarios, WindCapIsHalfAboveLowerBound) {
  const auto inst = base_instance();
  EXPECT_EQ(inst.bounds.generation("DE", Technology::wind_onshore).lower, 64.0);
  EXPECT_TRUE(std::isinf(inst.bounds.generation("DE", Technology::wind_onshore).upper));
  const auto v = apply_variant(inst, Variant::wind_cap);
  EXPECT_DOUBLE_EQ(v.bounds.generation("DE", Technology::wind_onshore).upper, 96.0);
  EXPECT_EQ(v.bounds.generation("DE", Technology::wind_onshore).lower, 64.0);
  const double off = inst.bounds.generation("DE", Technology::wind_offshore).lower;
  EXPECT_DOUBLE_EQ(v.bounds.generation("DE", Technology::wind_offshore).upper, 1.5 * off);
}

TEST(Scenarios, GasFreeDropsOnlyTheLowerBound) {
  const auto inst = base_instance();
  const Bound gas = inst.bounds.generation("DE", Technology::ccgt);
  EXPECT_GT(gas.lower, 0.0);
  const auto v = apply_variant(inst, Variant::gas_free);
  EXPECT_EQ(v.bounds.generation("DE", Technology::ccgt).lower, 0.0);
  EXPECT_EQ(v.bounds.generation("DE", Technology::ccgt).upper, gas.upper);
}

TEST(Scenarios, NoCoalAndNoNtc) {
  const auto inst = base_instance();
  const auto c = apply_variant(inst, Variant::no_coal);
  for (const auto& country : inst.countries)
    for (Technology t : {Technology::hard_coal, Technology::lignite})
      EXPECT_EQ(c.bounds.generation(country, t), (Bound{0.0, 0.0}));
  EXPECT_FALSE(inst.ntc.empty());
  EXPECT_TRUE(apply_variant(inst, Variant::no_ntc).ntc.empty());
}

TEST(Scenarios, VariantsTouchOnlyBoundsAndNtc) {
  const auto inst = base_instance();
  for (Variant v : kVariants) {
    const auto out = apply_variant(inst, v);
    EXPECT_EQ(out.heat, inst.heat);
    EXPECT_EQ(out.tech, inst.tech);
    EXPECT_EQ(out.hours, inst.hours);
    EXPECT_EQ(out.co2_price, inst.co2_price);
    EXPECT_EQ(out.bioenergy_cap_gwh_year, inst.bioenergy_cap_gwh_year);
    EXPECT_EQ(out.data.all_series().size(), inst.data.all_series().size());
    // Idempotent.
    const auto twice = apply_variant(out, v);
    EXPECT_EQ(twice.bounds, out.bounds);
    EXPECT_EQ(twice.ntc.entries(), out.ntc.entries());
  }
  EXPECT_THROW(apply_variant(apply_variant(inst, Variant::no_coal), Variant::half_nuc), Error);
}

TEST(Scenarios, VariantCommutesWithWindowSelection) {
  const auto& data = two_year_data();
  const auto& tech = bundled_static_data();
  for (Variant v : kVariants) {
    const auto spec = make_spec(v, 0.25, 2.0, {2010}, 48);
    // Variant on a long window then cut == variant on the short window.
    const auto shortw = scenario_instance(data, tech, spec, 2010);
    auto longw = apply_variant(make_instance(data.window(2010, 500), tech, spec.heat_config(), 2010), v);
    EXPECT_EQ(shortw.bounds, longw.bounds);
    EXPECT_EQ(shortw.ntc.entries(), longw.ntc.entries());
    EXPECT_EQ(shortw.data.window(2010, 24).all_series().front().values()[5],
              longw.data.window(2010, 24).all_series().front().values()[5]);
  }
}

TEST(Scenarios, InstanceHashIsStableAndSensitive) {
  const auto inst = base_instance();
  EXPECT_EQ(instance_hash(inst), instance_hash(inst));
  EXPECT_EQ(instance_hash(inst).size(), 64u);
  EXPECT_NE(instance_hash(inst), instance_hash(apply_variant(inst, Variant::no_ntc)));
  auto other = inst;
  other.co2_price = 151.0;
  EXPECT_NE(instance_hash(inst), instance_hash(other));
}

TEST(Scenarios, MatrixCardinalityPersistenceAndDeterminism) {
  const auto out = fresh_dir("matrix");
  RunOptions opt;
  opt.jobs = 3;
  opt.out_dir = out;
  opt.provenance = {{"synth_seed", 4}};
  const auto specs = base_matrix({2009, 2010}, 24);
  const auto a = run_matrix(two_year_data(), bundled_static_data(), specs, opt);
  ASSERT_EQ(a.size(), 6u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(a[i].optimal()) << a[i].cell() << " " << a[i].error;
    EXPECT_EQ(a[i].spec.name, specs[i / 2].name);
    EXPECT_EQ(a[i].year, i % 2 == 0 ? 2009 : 2010);
    EXPECT_LE(a[i].residuals.max(), 1e-6);
    EXPECT_LE(a[i].heat_residual, 1e-6);
    const auto dir = out / a[i].spec.name / std::to_string(a[i].year);
    for (const char* f : kResultFiles) EXPECT_TRUE(fs::exists(dir / f)) << dir / f;
    EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  }
  for (const auto& spec_dir : fs::directory_iterator(out))
    for (const auto& e : fs::directory_iterator(spec_dir))
      EXPECT_EQ(e.path().filename().string().rfind(".tmp", 0), std::string::npos) << e.path();

  const auto costs = slurp(out / "base_hp25_ep2" / "2010" / "costs.csv");
  opt.jobs = 1;
  const auto b = run_matrix(two_year_data(), bundled_static_data(), specs, opt);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].objective, b[i].objective);
    EXPECT_EQ(a[i].status, b[i].status);
    EXPECT_EQ(a[i].input_hash, b[i].input_hash);
  }
  EXPECT_EQ(slurp(out / "base_hp25_ep2" / "2010" / "costs.csv"), costs);
}

TEST(Scenarios, FailedCellDoesNotAbortTheBatch) {
  RunOptions opt;
  opt.jobs = 2;
  opt.out_dir = fresh_dir("isolation");
  opt.customize = [](SystemInstance& inst, const ScenarioSpec& spec, int year) {
    if (year == 2010 && spec.heat_share == 0.0) inst.bounds = toy::closed_bounds(inst.countries);
  };
  const auto r = run_matrix(two_year_data(), bundled_static_data(), base_matrix({2009, 2010}, 24), opt);
  ASSERT_EQ(r.size(), 6u);
  int flagged = 0;
  for (const auto& c : r)
    if (!c.optimal()) {
      ++flagged;
      EXPECT_EQ(c.status, "infeasible");
      EXPECT_EQ(c.cell(), "base_hp0/2010");
      const auto back = load_result(*opt.out_dir / "base_hp0" / "2010");
      EXPECT_EQ(back.status, "infeasible");
      EXPECT_FALSE(fs::exists(*opt.out_dir / "base_hp0" / "2010" / "costs.csv"));
    }
  EXPECT_EQ(flagged, 1);

  // A window outside the data is an error confined to its cell.
  const auto cov = run_matrix(two_year_data(), bundled_static_data(), base_matrix({2010, 2012}, 24), RunOptions{});
  ASSERT_EQ(cov.size(), 6u);
  for (const auto& c : cov) EXPECT_EQ(c.optimal(), c.year == 2010) << c.cell() << c.error;
}

TEST(Scenarios, FeasibleSetOrdering) {
  const auto r = run_matrix(two_year_data(), bundled_static_data(), base_matrix({2009}, 48));
  ASSERT_EQ(r.size(), 3u);
  for (const auto& c : r) ASSERT_TRUE(c.optimal());
  EXPECT_LE(r[0].objective, r[2].objective);
  EXPECT_LE(r[2].objective, r[1].objective + 1e-9 * r[1].objective);
}

TEST(Scenarios, PersistedResultsLoadBack) {
  RunOptions opt;
  opt.out_dir = fresh_dir("load");
  opt.export_mps = true;
  const auto spec = make_spec(Variant::no_ntc, 0.25, 2.0, {2009}, 24);
  const auto r = run_matrix(two_year_data(), bundled_static_data(), {spec}, opt);
  ASSERT_EQ(r.size(), 1u);
  ASSERT_TRUE(r[0].optimal());
  const auto dir = *opt.out_dir / spec.name / "2009";
  EXPECT_TRUE(fs::exists(dir / "model.mps"));
  const auto back = load_result(dir);
  EXPECT_EQ(back.spec.name, spec.name);
  EXPECT_EQ(back.spec.variant, Variant::no_ntc);
  EXPECT_TRUE(back.ntc.empty());
  EXPECT_EQ(back.objective, r[0].objective);
  EXPECT_EQ(back.result.capacities.size(), r[0].result.capacities.size());
  for (std::size_t i = 0; i < back.result.capacities.size(); ++i)
    EXPECT_EQ(back.result.capacities[i].value, r[0].result.capacities[i].value);
  ASSERT_EQ(back.result.dispatch.size(), r[0].result.dispatch.size());
  for (std::size_t i = 0; i < back.result.dispatch.size(); ++i)
    EXPECT_EQ(back.result.dispatch[i].values, r[0].result.dispatch[i].values);
  EXPECT_EQ(back.result.heat.size(), r[0].result.heat.size());
  EXPECT_EQ(back.result.costs.total(), r[0].result.costs.total());
  EXPECT_EQ(back.input_hash, r[0].input_hash);

  std::ifstream mf(dir / "manifest.json");
  const auto m = nlohmann::json::parse(mf);
  EXPECT_TRUE(m.at("ntc").empty());
  EXPECT_EQ(m.at("files_sha256").at("costs.csv").get<std::string>(), sha256_file(dir / "costs.csv"));
}
