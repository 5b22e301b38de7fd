#include <gtest/gtest.h>

#include "hpflex/calendar.hpp"

using namespace hpflex;

TEST(Calendar, StampRoundTripsEveryHour) {
  for (int y : {1969, 2009, 2012, 2100}) {
    const HourStamp a = to_stamp({y, 1, 1, 0});
    for (std::int64_t h = 0; h < kHoursPerYear; ++h) {
      const CivilHour c = to_civil(a + h);
      EXPECT_TRUE(is_valid(c));
      ASSERT_EQ(to_stamp(c), a + h);
    }
    EXPECT_EQ(to_civil(a + kHoursPerYear), (CivilHour{y + 1, 1, 1, 0}));
  }
}

TEST(Calendar, WeatherYearStartsJulyFirst) {
  EXPECT_EQ(to_civil(july_first(2009)), (CivilHour{2009, 7, 1, 0}));
  EXPECT_EQ(july_first(2010) - july_first(2009), 8760);
  EXPECT_EQ(to_civil(july_first(2009) + 8759), (CivilHour{2010, 6, 30, 23}));
  // Leap years have no extra model hour.
  EXPECT_EQ(july_first(2012) - july_first(2011), 8760);
}

TEST(Calendar, ParsesIsoHours) {
  EXPECT_EQ(parse_iso_hour("2009-07-01T05:00:00Z"), (CivilHour{2009, 7, 1, 5}));
  EXPECT_EQ(parse_iso_hour("2009-07-01 05"), (CivilHour{2009, 7, 1, 5}));
  EXPECT_EQ(parse_iso_hour("2009-07-01T05:00+00:00"), (CivilHour{2009, 7, 1, 5}));
  EXPECT_FALSE(parse_iso_hour("2009-07-01T05:30"));
  EXPECT_FALSE(parse_iso_hour("2009-07-01T05:00:00+01:00"));
  EXPECT_FALSE(parse_iso_hour("2009-13-01T00"));
  EXPECT_FALSE(parse_iso_hour("2009-02-29T00"));
  EXPECT_FALSE(parse_iso_hour("2009-07-01T24"));
  EXPECT_FALSE(parse_iso_hour("garbage"));
  const auto leap = parse_iso_hour("2012-02-29T10");
  ASSERT_TRUE(leap);
  EXPECT_TRUE(is_leap_day(*leap));
}

TEST(Calendar, FormatIsCanonical) {
  EXPECT_EQ(format_iso_hour(july_first(2009) + 29), "2009-07-02T05:00:00Z");
  for (std::int64_t h = 0; h < 1000; h += 37) {
    const auto s = format_iso_hour(july_first(2015) + h);
    EXPECT_EQ(to_stamp(*parse_iso_hour(s)), july_first(2015) + h);
  }
}
