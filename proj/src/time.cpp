#include "scootsense/time.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>

#include "scootsense/errors.hpp"

namespace scootsense {

namespace {

bool parse_int_field(std::string_view s, size_t pos, size_t len, int& out) {
  if (pos + len > s.size()) return false;
  out = 0;
  for (size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    out = out * 10 + (s[i] - '0');
  }
  return true;
}

std::int64_t days_from_civil(int y, int m, int d) {
  using namespace std::chrono;
  return sys_days{year{y} / m / d}.time_since_epoch().count();
}

bool valid_civil(int y, int m, int d) {
  using namespace std::chrono;
  return (year{y} / m / d).ok();
}

std::string two_digits(int v) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d", v);
  return buf;
}

}  // namespace

int iso_weekday_of_day(std::int64_t day_index) {
  using namespace std::chrono;
  weekday wd{sys_days{days{day_index}}};
  return static_cast<int>(wd.iso_encoding());
}

int Timestamp::iso_weekday() const { return iso_weekday_of_day(local_day()); }

std::optional<Timestamp> try_parse_iso8601(std::string_view s) {
  // YYYY-MM-DDTHH:MM:SS[.fff][Z|±HH[:]MM]
  int y, mo, d, h, mi, se;
  if (!parse_int_field(s, 0, 4, y)) return std::nullopt;
  if (s.size() < 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') ||
      s[13] != ':' || s[16] != ':')
    return std::nullopt;
  if (!parse_int_field(s, 5, 2, mo) || !parse_int_field(s, 8, 2, d) ||
      !parse_int_field(s, 11, 2, h) || !parse_int_field(s, 14, 2, mi) ||
      !parse_int_field(s, 17, 2, se))
    return std::nullopt;
  if (!valid_civil(y, mo, d) || h > 23 || mi > 59 || se > 60) return std::nullopt;
  if (se == 60) se = 59;  // leap second: clamp

  size_t pos = 19;
  int frac_ms = 0;
  if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
    ++pos;
    int digits = 0;
    std::int64_t value = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      if (digits < 9) {
        value = value * 10 + (s[pos] - '0');
        ++digits;
      }
      ++pos;
    }
    if (digits == 0) return std::nullopt;
    while (digits < 3) {
      value *= 10;
      ++digits;
    }
    while (digits > 3) {
      value /= 10;
      --digits;
    }
    frac_ms = static_cast<int>(value);
  }

  std::int32_t offset_min = 0;
  if (pos >= s.size()) return std::nullopt;  // offset is required
  if (s[pos] == 'Z' || s[pos] == 'z') {
    ++pos;
  } else if (s[pos] == '+' || s[pos] == '-') {
    int sign = s[pos] == '-' ? -1 : 1;
    ++pos;
    int oh, om = 0;
    if (!parse_int_field(s, pos, 2, oh)) return std::nullopt;
    pos += 2;
    if (pos < s.size() && s[pos] == ':') ++pos;
    if (pos < s.size()) {
      if (!parse_int_field(s, pos, 2, om)) return std::nullopt;
      pos += 2;
    }
    if (oh > 18 || om > 59) return std::nullopt;
    offset_min = sign * (oh * 60 + om);
  } else {
    return std::nullopt;
  }
  if (pos != s.size()) return std::nullopt;

  std::int64_t local_ms = days_from_civil(y, mo, d) * kMsPerDay + h * kMsPerHour +
                          mi * kMsPerMinute + se * 1000LL + frac_ms;
  return Timestamp{local_ms - offset_min * kMsPerMinute, offset_min};
}

Timestamp parse_iso8601(std::string_view s) {
  auto ts = try_parse_iso8601(s);
  if (!ts) throw DataError("invalid ISO-8601 timestamp: '" + std::string(s) + "'");
  return *ts;
}

std::string format_iso8601(const Timestamp& ts) {
  using namespace std::chrono;
  std::int64_t lms = ts.local_ms();
  std::int64_t day = floor_div(lms, kMsPerDay);
  std::int64_t rem = lms - day * kMsPerDay;
  year_month_day ymd{sys_days{days{day}}};
  int ms = static_cast<int>(rem % 1000);
  int sec = static_cast<int>(rem / 1000 % 60);
  int min = static_cast<int>(rem / 60000 % 60);
  int hour = static_cast<int>(rem / kMsPerHour);
  char sign = ts.offset_min < 0 ? '-' : '+';
  int off = std::abs(ts.offset_min);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03d%c%s:%s",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), hour, min, sec, ms, sign,
                two_digits(off / 60).c_str(), two_digits(off % 60).c_str());
  return buf;
}

std::int64_t parse_civil_date(std::string_view s) {
  int y, mo, d;
  if (s.size() != 10 || s[4] != '-' || s[7] != '-' || !parse_int_field(s, 0, 4, y) ||
      !parse_int_field(s, 5, 2, mo) || !parse_int_field(s, 8, 2, d) || !valid_civil(y, mo, d))
    throw DataError("invalid date: '" + std::string(s) + "'");
  return days_from_civil(y, mo, d);
}

std::int32_t parse_hhmm_ms(std::string_view s) {
  int h, m, sec = 0;
  bool ok = s.size() >= 5 && s[2] == ':' && parse_int_field(s, 0, 2, h) &&
            parse_int_field(s, 3, 2, m);
  if (ok && s.size() == 8 && s[5] == ':')
    ok = parse_int_field(s, 6, 2, sec);
  else if (ok && s.size() != 5)
    ok = false;
  if (!ok || h > 24 || m > 59 || sec > 59)
    throw DataError("invalid time of day: '" + std::string(s) + "'");
  return static_cast<std::int32_t>(h * kMsPerHour + m * kMsPerMinute + sec * 1000);
}

namespace {
constexpr std::array<std::string_view, 7> kWeekdayNames = {"Mon", "Tue", "Wed", "Thu",
                                                           "Fri", "Sat", "Sun"};
}

std::optional<int> parse_weekday(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  static constexpr std::array<std::string_view, 7> full = {
      "monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"};
  for (int i = 0; i < 7; ++i) {
    if (lower == full[i] || lower == full[i].substr(0, 3)) return i + 1;
  }
  return std::nullopt;
}

std::string_view weekday_name(int iso_weekday) { return kWeekdayNames.at(iso_weekday - 1); }

// ---- Timezone ----

namespace {

// libc reads TZ process-wide, so track which named zone is currently active.
std::string g_active_named_zone;

void activate_named_zone(const std::string& name) {
  if (g_active_named_zone == name) return;
  ::setenv("TZ", name.c_str(), 1);
  ::tzset();
  g_active_named_zone = name;
}

bool zoneinfo_exists(const std::string& name) {
  if (name.empty() || name.front() == '/' || name.find("..") != std::string::npos) return false;
  std::error_code ec;
  return std::filesystem::is_regular_file("/usr/share/zoneinfo/" + name, ec);
}

std::optional<std::int32_t> parse_fixed_offset(std::string_view s) {
  if (s == "UTC" || s == "utc" || s == "Z" || s == "z") return 0;
  if (s.rfind("UTC", 0) == 0) s.remove_prefix(3);
  if (s.empty() || (s[0] != '+' && s[0] != '-')) return std::nullopt;
  int sign = s[0] == '-' ? -1 : 1;
  s.remove_prefix(1);
  int h = 0, m = 0;
  if (s.size() == 5 && s[2] == ':' && parse_int_field(s, 0, 2, h) && parse_int_field(s, 3, 2, m)) {
  } else if (s.size() == 4 && parse_int_field(s, 0, 2, h) && parse_int_field(s, 2, 2, m)) {
  } else if (s.size() == 2 && parse_int_field(s, 0, 2, h)) {
  } else {
    return std::nullopt;
  }
  if (h > 18 || m > 59) return std::nullopt;
  return sign * (h * 60 + m);
}

}  // namespace

Timezone Timezone::fixed(std::int32_t offset_min) {
  Timezone tz;
  tz.fixed_min_ = offset_min;
  char sign = offset_min < 0 ? '-' : '+';
  int off = std::abs(offset_min);
  tz.spec_ = std::string(1, sign) + two_digits(off / 60) + ":" + two_digits(off % 60);
  if (offset_min == 0) tz.spec_ = "UTC";
  return tz;
}

Timezone Timezone::parse(const std::string& spec) {
  if (auto off = parse_fixed_offset(spec)) return fixed(*off);
  if (!zoneinfo_exists(spec))
    throw ConfigError("unknown timezone '" + spec + "' (use an IANA name or a fixed offset like -05:00)");
  Timezone tz;
  tz.spec_ = spec;
  tz.fixed_min_ = std::nullopt;
  activate_named_zone(spec);
  return tz;
}

std::int32_t Timezone::offset_min_at(std::int64_t epoch_ms) const {
  if (fixed_min_) return *fixed_min_;
  activate_named_zone(spec_);
  std::time_t secs = static_cast<std::time_t>(floor_div(epoch_ms, 1000));
  struct tm tmv{};
  localtime_r(&secs, &tmv);
  return static_cast<std::int32_t>(tmv.tm_gmtoff / 60);
}

Timestamp Timezone::from_local(std::int64_t local_ms) const {
  if (fixed_min_) return {local_ms - *fixed_min_ * kMsPerMinute, *fixed_min_};
  // Guess with the offset in force at the same UTC instant, then correct once.
  std::int32_t guess = offset_min_at(local_ms);
  std::int64_t utc = local_ms - std::int64_t{guess} * kMsPerMinute;
  std::int32_t actual = offset_min_at(utc);
  if (actual != guess) utc = local_ms - std::int64_t{actual} * kMsPerMinute;
  return {utc, offset_min_at(utc)};
}

}  // namespace scootsense
