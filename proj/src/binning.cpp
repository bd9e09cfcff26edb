#include "scootsense/binning.hpp"

#include <algorithm>
#include <cmath>

#include "scootsense/errors.hpp"

namespace scootsense::bins {

std::optional<TimeBin> bin_time(const Timestamp& ts) {
  std::int64_t ms = ts.ms_of_local_day();
  if (ms < kWindowStartMs || ms >= kWindowEndMs) return std::nullopt;
  return TimeBin{ts.iso_weekday(), static_cast<int>((ms - kWindowStartMs) / (15 * kMsPerMinute))};
}

std::optional<int> bin_hourly(const Timestamp& ts) {
  std::int64_t ms = ts.ms_of_local_day();
  if (ms < kWindowStartMs || ms >= kWindowEndMs) return std::nullopt;
  return static_cast<int>((ms - kWindowStartMs) / kMsPerHour);
}

std::optional<int> hour_of_week(const Timestamp& ts) {
  auto h = bin_hourly(ts);
  if (!h) return std::nullopt;
  return (ts.iso_weekday() - 1) * kHourSlotsPerDay + *h;
}

std::optional<std::int64_t> key_of(const PlacedEncounter& p, Keying keying) {
  switch (keying) {
    case Keying::Space:
      if (p.segment_id == kUnmatchedSegment) return std::nullopt;
      return p.segment_id;
    case Keying::Time:
      if (!p.bin) return std::nullopt;
      return p.bin->index;
    case Keying::SpaceTime:
      if (p.segment_id == kUnmatchedSegment || !p.bin) return std::nullopt;
      return p.segment_id * kQuarterSlotsPerDay + p.bin->index;
  }
  return std::nullopt;
}

std::int64_t universe_size(Keying keying, std::int64_t n_segments) {
  switch (keying) {
    case Keying::Space: return n_segments;
    case Keying::Time: return kQuarterSlotsPerDay;
    case Keying::SpaceTime: return n_segments * kQuarterSlotsPerDay;
  }
  return 0;
}

std::map<std::int64_t, std::int64_t> FrequencyDistribution::count_histogram() const {
  std::map<std::int64_t, std::int64_t> hist;
  std::int64_t nonzero = static_cast<std::int64_t>(count_per_key.size());
  if (universe > nonzero) hist[0] = universe - nonzero;
  for (const auto& [key, count] : count_per_key) {
    (void)key;
    ++hist[count];
  }
  return hist;
}

std::int64_t FrequencyDistribution::percentile(double p) const {
  if (universe <= 0) return 0;
  p = std::clamp(p, 0.0, 1.0);
  std::int64_t rank = static_cast<std::int64_t>(std::ceil(p * static_cast<double>(universe)));
  rank = std::max<std::int64_t>(rank, 1);
  std::int64_t zeros = universe - static_cast<std::int64_t>(count_per_key.size());
  if (rank <= zeros) return 0;
  // Walk the nonzero counts in ascending order.
  std::vector<std::int64_t> counts;
  counts.reserve(count_per_key.size());
  for (const auto& [key, count] : count_per_key) {
    (void)key;
    counts.push_back(count);
  }
  std::sort(counts.begin(), counts.end());
  return counts[static_cast<size_t>(rank - zeros - 1)];
}

std::int64_t FrequencyDistribution::max_count() const {
  std::int64_t m = 0;
  for (const auto& [key, count] : count_per_key) {
    (void)key;
    m = std::max(m, count);
  }
  return m;
}

FrequencyDistribution frequency_distribution(std::span<const PlacedEncounter> placed,
                                             Keying keying, std::int64_t n_segments) {
  FrequencyDistribution fd;
  fd.keying = keying;
  fd.universe = universe_size(keying, n_segments);
  for (const auto& p : placed) {
    auto key = key_of(p, keying);
    if (!key) {
      ++fd.excluded;
      continue;
    }
    if (keying != Keying::Time && *key >= n_segments * (keying == Keying::Space ? 1 : kQuarterSlotsPerDay))
      throw DataError("frequency_distribution: segment id outside the universe");
    ++fd.count_per_key[*key];
    ++fd.counted;
  }
  return fd;
}

HighLowSplit split_high_low(std::span<const PlacedEncounter> placed, Keying keying,
                            std::int64_t n_segments, HalfSplitRule rule) {
  auto fd = frequency_distribution(placed, keying, n_segments);
  HighLowSplit split;
  split.max_count = fd.max_count();
  if (split.max_count > 0) {
    split.low_upper = rule == HalfSplitRule::Floor ? split.max_count / 2
                                                   : (split.max_count + 1) / 2;
    for (const auto& [key, count] : fd.count_per_key)
      split.key_group[key] = count <= split.low_upper ? Group::Low : Group::High;
  }
  split.encounter_group.reserve(placed.size());
  for (const auto& p : placed) {
    auto key = key_of(p, keying);
    split.encounter_group.push_back(key ? split.key_group.at(*key) : Group::None);
  }
  return split;
}

}  // namespace scootsense::bins
