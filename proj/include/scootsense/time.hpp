#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace scootsense {

inline constexpr std::int64_t kMsPerMinute = 60'000;
inline constexpr std::int64_t kMsPerHour = 3'600'000;
inline constexpr std::int64_t kMsPerDay = 86'400'000;

inline constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// An instant with millisecond resolution plus the UTC offset of the civil
// clock it was recorded against (local time = UTC + offset).
struct Timestamp {
  std::int64_t epoch_ms = 0;
  std::int32_t offset_min = 0;

  std::int64_t local_ms() const { return epoch_ms + std::int64_t{offset_min} * kMsPerMinute; }
  std::int64_t local_day() const { return floor_div(local_ms(), kMsPerDay); }
  std::int32_t ms_of_local_day() const {
    return static_cast<std::int32_t>(local_ms() - local_day() * kMsPerDay);
  }
  // 1 = Monday .. 7 = Sunday, of the local civil date.
  int iso_weekday() const;

  friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

inline bool chrono_less(const Timestamp& a, const Timestamp& b) { return a.epoch_ms < b.epoch_ms; }

int iso_weekday_of_day(std::int64_t day_index);

// "YYYY-MM-DDTHH:MM:SS[.fff]±HH:MM" (also accepts 'Z', comma fractions, "±HHMM").
Timestamp parse_iso8601(std::string_view text);  // throws DataError
std::optional<Timestamp> try_parse_iso8601(std::string_view text);
// Always "YYYY-MM-DDTHH:MM:SS.fff±HH:MM" so outputs are byte-stable.
std::string format_iso8601(const Timestamp& ts);

// "YYYY-MM-DD" -> days since the Unix epoch.
std::int64_t parse_civil_date(std::string_view text);  // throws DataError
// "HH:MM" or "HH:MM:SS" -> milliseconds into the day.
std::int32_t parse_hhmm_ms(std::string_view text);  // throws DataError
// "Mon".."Sun" (or full names, case-insensitive) -> 1..7.
std::optional<int> parse_weekday(std::string_view text);
std::string_view weekday_name(int iso_weekday);

// A civil clock: either a fixed UTC offset ("UTC", "+05:30", "UTC-06:00") or an
// IANA zone name resolved through the C library (one named zone per process).
class Timezone {
 public:
  Timezone() = default;
  static Timezone fixed(std::int32_t offset_min);
  static Timezone parse(const std::string& spec);  // throws ConfigError

  std::int32_t offset_min_at(std::int64_t epoch_ms) const;
  Timestamp at(std::int64_t epoch_ms) const { return {epoch_ms, offset_min_at(epoch_ms)}; }
  // Converts a local civil instant to UTC (named zones: DST-ambiguous instants
  // resolve to the pre-transition offset).
  Timestamp from_local(std::int64_t local_ms) const;
  const std::string& spec() const { return spec_; }

 private:
  std::string spec_ = "UTC";
  std::optional<std::int32_t> fixed_min_ = 0;
};

}  // namespace scootsense
