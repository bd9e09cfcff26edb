#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scootsense/ble.hpp"
#include "scootsense/geo.hpp"
#include "scootsense/time.hpp"

namespace scootsense::fb {

// An observed encounter: the participant's real-time answers to the app's
// three yes/no questions, plus heart rate at the prompt.
struct FeedbackRecord {
  std::string participant_id;
  Timestamp timestamp;
  geo::LatLon gps;
  ble::Provider provider = ble::Provider::Unknown;
  bool q_moving = false;
  std::optional<bool> q_in_front;  // absent when q_moving is false
  std::optional<bool> q_toward;    // absent when q_moving is false
  std::optional<double> heart_rate_bpm;
  double answered_within_s = 0.0;
};

void validate(const FeedbackRecord& r);  // throws DataError

// Greedy prompt gating: accept an event iff at least min_interval_s passed
// since the last accepted event. Events must be time-ordered (one participant).
std::vector<Timestamp> gate_prompts(std::span<const Timestamp> events,
                                    double min_interval_s = 900.0);

// Keeps records with local time in [06:00, 23:00) and provider Bird or Lime.
std::vector<FeedbackRecord> filter_study_window(std::span<const FeedbackRecord> records);

// Personalized heart-rate band: modal histogram bin center +/- k * MAD,
// floored at the bin width and clamped to the (bin-aligned) sample range.
struct HeartRateProfile {
  std::string participant_id;
  double band_low = 0.0;
  double band_high = 0.0;
  bool low_confidence = false;  // fewer than min_samples: band = sample range
  std::int64_t n_samples = 0;
};

HeartRateProfile build_profile(std::span<const double> samples_bpm, double bin_width_bpm = 5.0,
                               double spread_k = 3.0, std::int64_t min_samples = 30);

enum class Startle { Elevated, Normal, Unknown };
std::string_view to_string(Startle s);

// Elevated iff the record's heart rate exceeds band_high; Unknown when absent.
Startle classify_startle(const FeedbackRecord& record, const HeartRateProfile& profile);

// Counts by (moving?, in_front?, toward?); moving records missing an answer
// are tracked separately so totals stay conserved.
struct DirectionMatrix {
  std::int64_t stationary = 0;
  std::int64_t front_toward = 0;
  std::int64_t front_away = 0;
  std::int64_t behind_toward = 0;
  std::int64_t behind_away = 0;
  std::int64_t moving_incomplete = 0;

  std::int64_t moving_complete() const {
    return front_toward + front_away + behind_toward + behind_away;
  }
  std::int64_t total() const { return stationary + moving_complete() + moving_incomplete; }
};

DirectionMatrix summarize_direction_matrix(std::span<const FeedbackRecord> records);

}  // namespace scootsense::fb
