#include "scootsense/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "scootsense/binning.hpp"
#include "scootsense/errors.hpp"

namespace scootsense::fb {

void validate(const FeedbackRecord& r) {
  auto fail = [&](const std::string& what) {
    throw DataError("feedback record (" + r.participant_id + "): " + what);
  };
  if (r.participant_id.empty()) fail("participant_id is empty");
  if (!r.q_moving && (r.q_in_front || r.q_toward))
    fail("direction answers present on a stationary record");
  if (r.answered_within_s < 0 || r.answered_within_s > 60)
    fail("answered_within_s outside [0, 60]");
  if (r.heart_rate_bpm && !(*r.heart_rate_bpm > 25 && *r.heart_rate_bpm < 250))
    fail("heart_rate_bpm out of range");
  if (r.gps.lat < -90 || r.gps.lat > 90 || r.gps.lon < -180 || r.gps.lon > 180)
    fail("gps out of range");
}

std::vector<Timestamp> gate_prompts(std::span<const Timestamp> events, double min_interval_s) {
  std::vector<Timestamp> accepted;
  std::int64_t min_ms = static_cast<std::int64_t>(min_interval_s * 1000 + 0.5);
  std::int64_t last = 0;
  bool have_last = false;
  for (const auto& t : events) {
    if (!have_last || t.epoch_ms - last >= min_ms) {
      accepted.push_back(t);
      last = t.epoch_ms;
      have_last = true;
    }
  }
  return accepted;
}

std::vector<FeedbackRecord> filter_study_window(std::span<const FeedbackRecord> records) {
  std::vector<FeedbackRecord> out;
  for (const auto& r : records) {
    if (r.provider != ble::Provider::Bird && r.provider != ble::Provider::Lime) continue;
    std::int64_t ms = r.timestamp.ms_of_local_day();
    if (ms < bins::kWindowStartMs || ms >= bins::kWindowEndMs) continue;
    out.push_back(r);
  }
  return out;
}

HeartRateProfile build_profile(std::span<const double> samples_bpm, double bin_width_bpm,
                               double spread_k, std::int64_t min_samples) {
  HeartRateProfile profile;
  profile.n_samples = static_cast<std::int64_t>(samples_bpm.size());
  if (samples_bpm.empty()) throw DataError("build_profile: no heart-rate samples");

  std::vector<double> sorted(samples_bpm.begin(), samples_bpm.end());
  std::sort(sorted.begin(), sorted.end());
  double lo = sorted.front(), hi = sorted.back();

  if (profile.n_samples < min_samples) {
    profile.low_confidence = true;
    profile.band_low = lo;
    profile.band_high = hi;
    return profile;
  }

  // Modal bin (lowest bin wins ties), bins anchored at 0 bpm.
  std::map<std::int64_t, std::int64_t> hist;
  for (double v : sorted) ++hist[static_cast<std::int64_t>(std::floor(v / bin_width_bpm))];
  std::int64_t mode_bin = hist.begin()->first;
  std::int64_t mode_count = hist.begin()->second;
  for (const auto& [bin, count] : hist) {
    if (count > mode_count) {
      mode_bin = bin;
      mode_count = count;
    }
  }
  double bin_lo = static_cast<double>(mode_bin) * bin_width_bpm;
  double bin_hi = bin_lo + bin_width_bpm;
  double center = (bin_lo + bin_hi) / 2;

  auto median_of = [](std::vector<double>& v) {
    size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + n / 2, v.end());
    double m = v[n / 2];
    if (n % 2 == 0) {
      std::nth_element(v.begin(), v.begin() + n / 2 - 1, v.end());
      m = (m + v[n / 2 - 1]) / 2;
    }
    return m;
  };
  std::vector<double> tmp = sorted;
  double med = median_of(tmp);
  std::vector<double> dev;
  dev.reserve(sorted.size());
  for (double v : sorted) dev.push_back(std::abs(v - med));
  double mad = median_of(dev);

  double half = std::max(spread_k * mad, bin_width_bpm / 2);
  // Band always covers the modal bin; the clamp to the sample range is
  // quantized to bin edges so it can never cut into that bin.
  double band_lo = std::min(center - half, bin_lo);
  double band_hi = std::max(center + half, bin_hi);
  band_lo = std::max(band_lo, std::floor(lo / bin_width_bpm) * bin_width_bpm);
  band_hi = std::min(band_hi, std::ceil(hi / bin_width_bpm) * bin_width_bpm);

  profile.band_low = band_lo;
  profile.band_high = band_hi;
  return profile;
}

std::string_view to_string(Startle s) {
  switch (s) {
    case Startle::Elevated: return "Elevated";
    case Startle::Normal: return "Normal";
    case Startle::Unknown: return "Unknown";
  }
  return "Unknown";
}

Startle classify_startle(const FeedbackRecord& record, const HeartRateProfile& profile) {
  if (!record.heart_rate_bpm) return Startle::Unknown;
  return *record.heart_rate_bpm > profile.band_high ? Startle::Elevated : Startle::Normal;
}

DirectionMatrix summarize_direction_matrix(std::span<const FeedbackRecord> records) {
  DirectionMatrix m;
  for (const auto& r : records) {
    if (!r.q_moving) {
      ++m.stationary;
    } else if (!r.q_in_front || !r.q_toward) {
      ++m.moving_incomplete;
    } else if (*r.q_in_front) {
      ++(*r.q_toward ? m.front_toward : m.front_away);
    } else {
      ++(*r.q_toward ? m.behind_toward : m.behind_away);
    }
  }
  return m;
}

}  // namespace scootsense::fb
