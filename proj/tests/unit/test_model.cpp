#include <gtest/gtest.h>

#include "../support/toy.hpp"
#include "hpflex/synth.hpp"

using namespace hpflex;

namespace {

SystemInstance two_hour_bio() {
  auto inst = toy::instance({{"XA", {1.0, 2.0}}});
  inst.bounds.set_generation("XA", Technology::bioenergy, {0.0, kInf});
  return inst;
}

double hand_objective(double cap, double energy) {
  const auto& t = bundled_static_data().technology(Technology::bioenergy);
  const double per_gw = prorate_fixed_costs(annuity(t.overnight_cost, t.interest_rate, t.lifetime) + t.fixed_cost, 2);
  return cap * per_gw + variable_cost(t, 150.0) * 1e-3 * energy;
}

void add_heat(SystemInstance& inst, std::vector<double> hd_mw, std::vector<double> cop, double share, double ep) {
  std::vector<HourlySeries> series = inst.data.all_series();
  const HourStamp start = *inst.data.start();
  series.emplace_back("XA", Quantity::heat_demand(BuildingType::single_family, Sink::space), start, hd_mw);
  series.emplace_back("XA", Quantity::cop(Sink::space, HeatPumpType::air), start, cop);
  inst.data = Dataset::from_series(series);
  inst.heat = HeatConfig::uniform(share, ep);
  const auto& p = inst.data.country("XA");
  inst.fleets["XA"] = size_fleet(inst.heat, p.heat, p.cops);
}

}  // namespace

TEST(Model, TwoHourHandInstance) {
  const auto inst = two_hour_bio();
  const auto model = build_model(inst);
  const auto sol = solve(model.lp);
  ASSERT_EQ(sol.status, SolveStatus::optimal);
  const auto r = decode(model, inst, sol);
  EXPECT_NEAR(r.capacity("XA", "bioenergy", "power"), 2.0, 1e-9);
  const auto* gen = r.series("XA", "gen:bioenergy");
  ASSERT_NE(gen, nullptr);
  EXPECT_NEAR(gen->values[0], 1.0, 1e-9);
  EXPECT_NEAR(gen->values[1], 2.0, 1e-9);
  EXPECT_NEAR(sol.objective, hand_objective(2.0, 3.0), 1e-6 * hand_objective(2.0, 3.0));
  EXPECT_NEAR(r.costs.total(), sol.objective, 1e-9 * sol.objective);
}

TEST(Model, HeatElectricityFoldsIntoBalance) {
  auto inst = two_hour_bio();
  add_heat(inst, {2000.0, 0.0}, {2.0, 2.0}, 0.25, 0.0);
  const auto model = build_model(inst);
  const auto sol = solve(model.lp);
  ASSERT_EQ(sol.status, SolveStatus::optimal);
  const auto r = decode(model, inst, sol);
  const auto* gen = r.series("XA", "gen:bioenergy");
  EXPECT_NEAR(gen->values[0], 1.25, 1e-9);
  EXPECT_NEAR(gen->values[1], 2.0, 1e-9);
  EXPECT_NEAR(sol.objective, hand_objective(2.0, 3.25), 1e-9);
  auto targets = required_heat_output(inst.heat, inst.data.country("XA").heat);
  for (auto& [combo, ho] : targets)
    for (double& v : ho) v /= 1000.0;
  const auto rep = validate_trajectory(r.heat.at("XA"), inst.fleets.at("XA"), targets, inst.data.country("XA").cops);
  EXPECT_LE(rep.max(), 1e-6);
  EXPECT_TRUE(rep.flagged.empty());
}

TEST(Model, HeatStorageShiftsElectricity) {
  // Heat needed only in hour 0 with poor COP; storage lets the pump run in
  // hour 1 at good COP, but demand in hour 1 is higher, so the optimizer
  // trades capacity against energy. With ep=2 the model must not be worse.
  auto base = two_hour_bio();
  add_heat(base, {2000.0, 0.0}, {2.0, 4.0}, 0.25, 0.0);
  auto stor = two_hour_bio();
  add_heat(stor, {2000.0, 0.0}, {2.0, 4.0}, 0.25, 2.0);
  const auto s0 = solve(build_model(base).lp);
  const auto s2 = solve(build_model(stor).lp);
  ASSERT_EQ(s0.status, SolveStatus::optimal);
  ASSERT_EQ(s2.status, SolveStatus::optimal);
  EXPECT_LE(s2.objective, s0.objective + 1e-9);
}

TEST(Model, PinnedCapacityIsAColumnBound) {
  auto inst = toy::instance({{"XA", {1.0, 2.0}}});
  inst.bounds.set_generation("XA", Technology::nuclear, {3.0, 3.0});
  const auto model = build_model(inst);
  const auto cap = model.lp.find_column("cap_gen[XA,nuclear]");
  ASSERT_TRUE(cap);
  EXPECT_EQ(model.lp.col_lower[*cap], 3.0);
  EXPECT_EQ(model.lp.col_upper[*cap], 3.0);
  EXPECT_FALSE(model.lp.find_row("avail[XA,nuclear,0]"));
  const auto g = model.lp.find_column("gen[XA,nuclear,0]");
  EXPECT_NEAR(model.lp.col_upper[*g], 3.0 * 0.91, 1e-12);
  // Pinned capacity pays fixed O&M only.
  EXPECT_NEAR(model.lp.cost[*cap], prorate_fixed_costs(30.0, 2), 1e-15);
}

TEST(Model, InvertedBoundsAreRejected) {
  auto inst = toy::instance({{"XA", {1.0}}});
  inst.bounds.set_generation("XA", Technology::lignite, {14.6, 14.5});
  try {
    build_model(inst);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::infeasible_bounds);
  }
}

TEST(Model, NoFlowColumnsWithoutNtc) {
  auto inst = toy::instance({{"XA", {1.0, 1.0}}, {"XB", {1.0, 1.0}}});
  for (auto c : {"XA", "XB"}) inst.bounds.set_generation(c, Technology::bioenergy, {0.0, kInf});
  auto with = inst;
  with.ntc.set("XA", "XB", 1.0);
  EXPECT_EQ(build_model(with).index.flows.size(), 1u);
  const auto model = build_model(inst);
  EXPECT_TRUE(model.index.flows.empty());
  for (const auto& f : model.lp.col_families) EXPECT_NE(f, "flow");
}

TEST(Model, CatalogRoundTrips) {
  auto inst = two_hour_bio();
  add_heat(inst, {2000.0, 1000.0}, {2.0, 3.0}, 0.25, 2.0);
  const auto model = build_model(inst);
  for (int j = 0; j < model.lp.num_cols(); ++j) EXPECT_EQ(*model.lp.find_column(model.lp.col_names[j]), j);
  for (int i = 0; i < model.lp.num_rows(); ++i) EXPECT_EQ(*model.lp.find_row(model.lp.row_names[i]), i);
}

TEST(Model, CarbonPriceMonotone) {
  auto inst = toy::instance({{"XA", {1.0, 3.0, 2.0}}});
  inst.bounds.set_generation("XA", Technology::ccgt, {0.0, kInf});
  inst.bounds.set_generation("XA", Technology::lignite, {0.0, kInf});
  double last = -1.0;
  for (double price : {0.0, 50.0, 150.0, 300.0}) {
    inst.co2_price = price;
    const auto s = solve(build_model(inst).lp);
    ASSERT_EQ(s.status, SolveStatus::optimal);
    EXPECT_GE(s.objective, last - 1e-12);
    last = s.objective;
  }
}

TEST(Model, SynthInstanceBuildsFromStaticTables) {
  const auto data = synth_dataset(3, {"CH", "DE", "FR"}, 2009, 1, 48).window(2009, 48);
  std::vector<std::string> notes;
  const auto inst = make_instance(data, bundled_static_data(), HeatConfig::uniform(0.25, 2.0), 2009, &notes);
  ASSERT_EQ(notes.size(), 1u);  // DE lignite
  EXPECT_TRUE(inst.fleet("DE"));
  EXPECT_FALSE(inst.fleet("CH"));
  const auto model = build_model(inst);
  EXPECT_FALSE(model.index.flows.empty());
  const auto sol = solve(model.lp);
  EXPECT_EQ(sol.status, SolveStatus::optimal);
}
