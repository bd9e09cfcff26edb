#include <doctest.h>

#include "scootsense/errors.hpp"
#include "scootsense/time.hpp"

using namespace scootsense;

TEST_CASE("iso8601 parse and format round trip") {
  auto ts = parse_iso8601("2026-04-06T08:15:30.250-05:00");
  CHECK(ts.offset_min == -300);
  CHECK(format_iso8601(ts) == "2026-04-06T08:15:30.250-05:00");

  auto utc = parse_iso8601("2026-04-06T13:15:30.250Z");
  CHECK(utc.epoch_ms == ts.epoch_ms);
  CHECK(utc.offset_min == 0);
  CHECK(format_iso8601(utc) == "2026-04-06T13:15:30.250+00:00");

  CHECK(parse_iso8601("2026-04-06T13:15:30+0530").offset_min == 330);
  CHECK(parse_iso8601("2026-04-06T13:15:30.5Z").epoch_ms % 1000 == 500);
}

TEST_CASE("iso8601 rejects malformed input") {
  CHECK_THROWS_AS(parse_iso8601(""), DataError);
  CHECK_THROWS_AS(parse_iso8601("2026-04-06"), DataError);
  CHECK_THROWS_AS(parse_iso8601("2026-04-06T08:15:30"), DataError);  // offset required
  CHECK_THROWS_AS(parse_iso8601("2026-13-06T08:15:30Z"), DataError);
  CHECK_THROWS_AS(parse_iso8601("2026-02-30T08:15:30Z"), DataError);
  CHECK_THROWS_AS(parse_iso8601("2026-04-06T25:15:30Z"), DataError);
  CHECK_THROWS_AS(parse_iso8601("2026-04-06T08:15:30.Z"), DataError);
  CHECK_THROWS_AS(parse_iso8601("2026-04-06T08:15:30Zx"), DataError);
}

TEST_CASE("local day and weekday use the attached offset") {
  // 2026-04-06 is a Monday
  auto ts = parse_iso8601("2026-04-06T00:30:00.000-05:00");
  CHECK(ts.iso_weekday() == 1);
  CHECK(ts.ms_of_local_day() == 30 * kMsPerMinute);
  // same instant viewed at +00:00 is a different civil time
  Timestamp utc{ts.epoch_ms, 0};
  CHECK(utc.ms_of_local_day() == 5 * kMsPerHour + 30 * kMsPerMinute);

  CHECK(parse_iso8601("2026-04-05T23:59:59.999-05:00").iso_weekday() == 7);
  CHECK(iso_weekday_of_day(0) == 4);  // 1970-01-01 was a Thursday
}

TEST_CASE("civil date and time-of-day parsing") {
  CHECK(parse_civil_date("1970-01-01") == 0);
  CHECK(parse_civil_date("2026-04-06") == 20549);
  CHECK_THROWS_AS(parse_civil_date("2026-4-6"), DataError);
  CHECK(parse_hhmm_ms("06:00") == 6 * kMsPerHour);
  CHECK(parse_hhmm_ms("23:00") == 23 * kMsPerHour);
  CHECK(parse_hhmm_ms("09:45:30") == 9 * kMsPerHour + 45 * kMsPerMinute + 30000);
  CHECK_THROWS_AS(parse_hhmm_ms("9:45"), DataError);
  CHECK(*parse_weekday("Mon") == 1);
  CHECK(*parse_weekday("sunday") == 7);
  CHECK(!parse_weekday("Funday"));
  CHECK(weekday_name(3) == "Wed");
}

TEST_CASE("fixed-offset timezones") {
  auto tz = Timezone::parse("-05:00");
  CHECK(tz.offset_min_at(0) == -300);
  auto ts = tz.at(1'000'000);
  CHECK(ts.offset_min == -300);
  auto back = tz.from_local(ts.local_ms());
  CHECK(back.epoch_ms == 1'000'000);

  CHECK(Timezone::parse("UTC").offset_min_at(0) == 0);
  CHECK(Timezone::parse("UTC+01:30").offset_min_at(0) == 90);
  CHECK(Timezone::parse("+0130").offset_min_at(0) == 90);
  CHECK_THROWS_AS(Timezone::parse("Not/AZone"), ConfigError);
}

TEST_CASE("named timezone resolves daylight-aware offsets") {
  Timezone tz;
  try {
    tz = Timezone::parse("America/Chicago");
  } catch (const ConfigError&) {
    return;  // zoneinfo not installed in this environment
  }
  // April is CDT (-05:00), January is CST (-06:00)
  auto apr = parse_iso8601("2026-04-06T12:00:00.000+00:00");
  auto jan = parse_iso8601("2026-01-06T12:00:00.000+00:00");
  CHECK(tz.offset_min_at(apr.epoch_ms) == -300);
  CHECK(tz.offset_min_at(jan.epoch_ms) == -360);
  auto local_noon = tz.from_local(parse_civil_date("2026-04-06") * kMsPerDay + 12 * kMsPerHour);
  CHECK(local_noon.offset_min == -300);
  CHECK(local_noon.ms_of_local_day() == 12 * kMsPerHour);
}
