#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "scootsense/time.hpp"

namespace scootsense::bins {

// Study day window [06:00, 23:00), half-open so the 15-minute bins partition it.
inline constexpr std::int64_t kWindowStartMs = 6 * kMsPerHour;
inline constexpr std::int64_t kWindowEndMs = 23 * kMsPerHour;
inline constexpr int kQuarterSlotsPerDay = 68;
inline constexpr int kQuarterSlotsPerWeek = 476;
inline constexpr int kHourSlotsPerDay = 17;
inline constexpr int kHourSlotsPerWeek = 119;

struct TimeBin {
  int iso_weekday = 1;  // 1 = Monday .. 7 = Sunday
  int index = 0;        // 0..67, 15-minute slot within [06:00, 23:00)
  friend bool operator==(const TimeBin&, const TimeBin&) = default;
};

// std::nullopt when the local time falls outside [06:00, 23:00).
std::optional<TimeBin> bin_time(const Timestamp& ts);
std::optional<int> bin_hourly(const Timestamp& ts);   // 0..16 within the day
std::optional<int> hour_of_week(const Timestamp& ts); // 0..118

enum class Keying { Space, Time, SpaceTime };

inline constexpr std::int64_t kUnmatchedSegment = -1;

// Spatial/temporal placement of one encounter, parallel to the encounter list.
struct PlacedEncounter {
  std::int64_t segment_id = kUnmatchedSegment;
  std::optional<TimeBin> bin;  // day-agnostic binning uses bin->index only
};

// Key of a placed encounter under a keying; nullopt when the encounter has no
// segment (Space/SpaceTime) or is out of the time window (Time/SpaceTime).
std::optional<std::int64_t> key_of(const PlacedEncounter& p, Keying keying);
std::int64_t universe_size(Keying keying, std::int64_t n_segments);

// Encounter counts over the full key universe; zero-count keys are implicit.
struct FrequencyDistribution {
  Keying keying = Keying::Space;
  std::int64_t universe = 0;
  std::int64_t counted = 0;   // encounters with a key
  std::int64_t excluded = 0;  // unmatched or out-of-window encounters
  std::map<std::int64_t, std::int64_t> count_per_key;  // nonzero keys only

  // count value -> number of keys with that count, including the zeros.
  std::map<std::int64_t, std::int64_t> count_histogram() const;
  // Nearest-rank percentile of per-key counts over the whole universe.
  std::int64_t percentile(double p) const;
  std::int64_t max_count() const;
};

FrequencyDistribution frequency_distribution(std::span<const PlacedEncounter> placed,
                                             Keying keying, std::int64_t n_segments);

enum class HalfSplitRule { Floor, Ceil };
enum class Group : std::int8_t { None = 0, Low = 1, High = 2 };

// Splits keys (and the encounters they carry) into Low/High groups around half
// of the maximum key count: Low = [1, M/2], High = (M/2, M].
struct HighLowSplit {
  std::int64_t max_count = 0;
  std::int64_t low_upper = 0;  // Low counts are in [1, low_upper]
  std::map<std::int64_t, Group> key_group;
  std::vector<Group> encounter_group;  // parallel to the placed input
};

HighLowSplit split_high_low(std::span<const PlacedEncounter> placed, Keying keying,
                            std::int64_t n_segments, HalfSplitRule rule = HalfSplitRule::Floor);

}  // namespace scootsense::bins
