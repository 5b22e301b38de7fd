#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "hpflex/csv_io.hpp"
#include "hpflex/dataset.hpp"

using namespace hpflex;

namespace {

ErrorKind kind_of(const std::string& csv) {
  std::istringstream in(csv);
  try {
    read_series_csv(in);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for:\n" << csv;
  return ErrorKind::invalid_argument;
}

std::string message_of(const std::string& csv) {
  std::istringstream in(csv);
  try {
    read_series_csv(in);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

const std::string kHead = "timestamp,country,quantity,value\n";

}  // namespace

TEST(Series, IngestPassesValuesThrough) {
  const auto path = std::filesystem::temp_directory_path() / "hpflex_series_pass.csv";
  {
    std::ofstream f(path);
    f << kHead << "2009-07-01T00:00:00Z,DE,availability_factor:pv,0.0\n"
      << "2009-07-01T01:00:00Z,DE,availability_factor:pv,0.5\n"
      << "2009-07-01T02:00:00Z,DE,availability_factor:pv,1.0\n";
  }
  const auto s = ingest_series(path, Quantity::availability(Technology::pv));
  EXPECT_EQ(std::vector<double>(s.values().begin(), s.values().end()), (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(s.start(), july_first(2009));
  EXPECT_EQ(s.country(), "DE");
  std::filesystem::remove(path);
}

TEST(Series, IngestErrors) {
  EXPECT_EQ(kind_of(kHead + "2009-07-01T00,DE,availability_factor:pv,1.2\n"), ErrorKind::out_of_range);
  EXPECT_EQ(kind_of(kHead + "2009-07-01T00,DE,electric_load_MW,-1\n"), ErrorKind::negative_value);
  EXPECT_EQ(kind_of(kHead + "2009-07-01T00,DE,cop:space:air,0\n"), ErrorKind::out_of_range);
  EXPECT_EQ(kind_of("time,country,quantity,value\n"), ErrorKind::bad_header);
  EXPECT_EQ(kind_of(kHead + "2009-07-01T00,DE,electric_load_MW,\n"), ErrorKind::missing_value);
  EXPECT_EQ(kind_of(kHead + "2009-07-01T00,DE,wind_speed,3\n"), ErrorKind::malformed_row);
  EXPECT_EQ(kind_of(kHead + "2009-07-01T00,DE,electric_load_MW,1\n2009-07-01T00,DE,electric_load_MW,1\n"),
            ErrorKind::malformed_row);
  EXPECT_EQ(kind_of(kHead + "2009-07-01T00,DE,electric_load_MW,1,2\n"), ErrorKind::malformed_row);
}

TEST(Series, SkippedHourIsMissingValueWithTimestamp) {
  const std::string csv = kHead + "2009-07-01T00,DE,electric_load_MW,1\n2009-07-01T01,DE,electric_load_MW,1\n" +
                          "2009-07-01T03,DE,electric_load_MW,1\n";
  EXPECT_EQ(kind_of(csv), ErrorKind::missing_value);
  const auto msg = message_of(csv);
  EXPECT_NE(msg.find("MissingValue"), std::string::npos);
  EXPECT_NE(msg.find("2009-07-01T02:00:00Z"), std::string::npos) << msg;
}

TEST(Series, LeapDayRowsAreDropped) {
  std::string csv = kHead;
  for (int d : {28, 29})
    for (int h = 0; h < 24; ++h) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "2012-02-%02dT%02d,FR,electric_load_MW,%d\n", d, h, d);
      csv += buf;
    }
  csv += "2012-03-01T00,FR,electric_load_MW,1\n";
  std::istringstream in(csv);
  const auto s = read_series_csv(in);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].size(), 25u);
  EXPECT_EQ(s[0][24], 1.0);
}

TEST(Series, UnitsAreConvertedToMegawatts) {
  std::istringstream in(kHead + "2009-07-01T00,DE,electric_load_GW,1.5\n2009-07-01T00,DE,heat_demand_GWth:commercial:water,0.25\n");
  const auto s = read_series_csv(in);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].quantity(), Quantity::load());
  EXPECT_EQ(s[0][0], 1500.0);
  EXPECT_EQ(s[1][0], 250.0);
}

TEST(Series, ReEmissionIsBitIdentical) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<HourlySeries> series;
  for (const char* c : {"AT", "DE"}) {
    std::vector<double> v(200);
    for (double& x : v) x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 12) - 4);
    series.emplace_back(c, Quantity::load(), july_first(2011) + 5, v);
    for (double& x : v) x = std::min(1.0, x);
    series.emplace_back(c, Quantity::availability(Technology::wind_onshore), july_first(2011) + 5, v);
  }
  const std::string text = to_csv(series);
  std::istringstream in(text);
  const auto back = read_series_csv(in);
  EXPECT_EQ(to_csv(back), text);
  for (std::size_t i = 0; i < back.size(); ++i)
    EXPECT_TRUE(std::find(series.begin(), series.end(), back[i]) != series.end());
}

TEST(Series, WindowJulyJune) {
  std::vector<double> v(7 * 8760);
  std::iota(v.begin(), v.end(), 0.0);
  const HourlySeries s("DE", Quantity::load(), to_stamp({2009, 1, 1, 0}), v);
  const auto w = window_july_june(s, 2009, 8760);
  EXPECT_EQ(w.start(), july_first(2009));
  EXPECT_EQ(to_civil(w.start()), (CivilHour{2009, 7, 1, 0}));
  EXPECT_EQ(w.size(), 8760u);
  const auto offset = static_cast<std::size_t>(july_first(2009) - s.start());
  EXPECT_EQ(w[0], v[offset]);

  const auto day = window_july_june(s, 2012, 24);
  ASSERT_EQ(day.size(), 24u);
  const auto d0 = static_cast<std::size_t>(july_first(2012) - s.start());
  for (std::size_t h = 0; h < 24; ++h) EXPECT_EQ(day[h], v[d0 + h]);

  try {
    window_july_june(s, 2016, 8760);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::coverage);
  }
  EXPECT_THROW(window_july_june(s, 2008, 24), Error);  // starts before the data
}

TEST(Series, WindowSumIsTheSliceSum) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  std::vector<double> v(3 * 8760);
  for (double& x : v) x = u(rng);
  const HourlySeries s("FR", Quantity::load(), july_first(2009), v);
  for (int y : {2009, 2010, 2011})
    for (int hours : {24, 336, 8760}) {
      const auto w = window_july_june(s, y, hours);
      const auto b = static_cast<std::size_t>(july_first(y) - s.start());
      EXPECT_EQ(w.sum(), std::accumulate(v.begin() + b, v.begin() + b + hours, 0.0));
    }
}

TEST(Series, CopAtOrBelowOneIsAWarning) {
  const HourStamp t = july_first(2009);
  std::map<CopSet::Key, HourlySeries> m;
  m.emplace(CopSet::Key{Sink::space, HeatPumpType::air},
            HourlySeries("DE", Quantity::cop(Sink::space, HeatPumpType::air), t, {0.9, 1.0, 2.5}));
  const CopSet cops("DE", m);
  const auto w = cops.warnings();
  ASSERT_EQ(w.size(), 1u);
  EXPECT_NE(w[0].find("2 hour(s)"), std::string::npos);
}

TEST(Series, DatasetRejectsMisalignedSeries) {
  const HourStamp t = july_first(2009);
  std::vector<HourlySeries> s{HourlySeries("DE", Quantity::load(), t, {1, 2, 3}),
                              HourlySeries("FR", Quantity::load(), t + 1, {1, 2, 3})};
  try {
    Dataset::from_series(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::alignment);
  }
  std::vector<HourlySeries> no_load{HourlySeries("DE", Quantity::availability(Technology::pv), t, {0.1})};
  EXPECT_THROW(Dataset::from_series(no_load), Error);
}

TEST(Series, NtcAndCapsFilesRoundTrip) {
  NtcMatrix ntc;
  ntc.set("DE", "FR", 3.0);
  ntc.set("FR", "DE", 2.75);
  std::ostringstream os;
  write_ntc_csv(os, ntc);
  EXPECT_EQ(os.str(), "from,to,MW\nDE,FR,3000\nFR,DE,2750\n");
  NtcMatrix back;
  std::istringstream in(os.str());
  read_ntc_csv(in, back);
  EXPECT_EQ(back, ntc);
  EXPECT_EQ(back.limit("DE", "CH"), 0.0);
  EXPECT_THROW(ntc.set("DE", "CH", -1.0), Error);

  std::map<CountryCode, double> caps{{"DE", 36000.0}};
  std::ostringstream cs;
  write_bio_caps_csv(cs, caps);
  std::map<CountryCode, double> caps_back;
  std::istringstream ci(cs.str());
  read_bio_caps_csv(ci, caps_back, "caps");
  EXPECT_EQ(caps_back, caps);
}
