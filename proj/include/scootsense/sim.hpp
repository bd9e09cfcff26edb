#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "scootsense/ble.hpp"
#include "scootsense/detector.hpp"
#include "scootsense/feedback.hpp"
#include "scootsense/geo.hpp"
#include "scootsense/metrics.hpp"
#include "scootsense/time.hpp"

namespace scootsense::sim {

// Probability of capturing one advertisement at a given distance: piecewise
// linear between control points, zero beyond the last point.
struct CurvePoint {
  double distance_ft = 0.0;
  double probability = 0.0;
};

double capture_probability(std::span<const CurvePoint> curve, double distance_ft);
// 0.95 out to 20 ft, linear down to 0.05 at 60 ft, flat to 150 ft, then silent.
std::vector<CurvePoint> default_reception_curve();

struct SimConfig {
  std::uint64_t seed = 1;
  int n_pedestrians = 20;
  int n_scooters = 50;
  double parked_fraction = 0.5;

  double advertisement_interval_s = 0.25;
  double rssi_noise_sigma_db = 4.0;
  double path_loss_exponent = 2.0;
  std::vector<CurvePoint> reception_curve = default_reception_curve();

  int duration_days = 1;
  std::string start_date = "2026-04-06";  // local civil date of the first day
  std::string timezone = "-05:00";
  std::int32_t active_start_ms = 5 * kMsPerHour + 45 * kMsPerMinute;
  std::int32_t active_end_ms = 23 * kMsPerHour;

  double pedestrian_speed_mph = 3.0;
  double scooter_speed_mph = 9.0;
  double tick_s = 0.05;  // position clock quantum

  // Demand shaping: per session, round(magnitude * scale) agents travel there.
  double attendance_scale = 1.0;
  double scooter_trip_scale = 0.25;

  double answer_fraction = 0.8;
  double startle_fraction = 0.6;
  double startle_delta_bpm = 20.0;
  double prompt_min_interval_s = 900.0;

  double gps_noise_sigma_m = 4.0;
  double truth_distance_ft = 25.0;
  double truth_min_duration_s = 1.0;

  // Crowded segments squeeze agents into a narrower corridor, so passes there
  // are closer.
  double base_corridor_halfwidth_ft = 10.0;
  double hot_corridor_halfwidth_ft = 3.0;
  double hot_traversal_percentile = 0.8;

  // Dwelling agents sit this far off the street (inside buildings).
  double dwell_offset_min_ft = 85.0;
  double dwell_offset_max_ft = 120.0;

  std::map<ble::Provider, double> provider_mix = {{ble::Provider::Bird, 0.50},
                                                  {ble::Provider::Lime, 0.45},
                                                  {ble::Provider::BlueDuck, 0.05}};

  // A true close pass must stay detectable: advertisement_interval_s must not
  // exceed detector_window_s / detector_min_packets.
  double detector_window_s = 1.0;
  int detector_min_packets = 4;

  void validate() const;  // throws ConfigError
  static SimConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// A closed approach within truth_distance_ft sustained at least
// truth_min_duration_s, from the simulated trajectories.
struct GroundTruthEncounter {
  std::string participant_id;
  std::string device_id;
  Timestamp start;
  Timestamp end;
  double min_distance_ft = 0.0;
};

struct SimStats {
  std::int64_t receptions = 0;
  std::int64_t feedbacks = 0;
  std::int64_t moving_feedbacks = 0;
  std::int64_t startled_planted = 0;
  std::int64_t truth_encounters = 0;
  std::int64_t prompts = 0;
};

struct SimResult {
  std::vector<ble::BleReception> receptions;  // sorted by (time, receiver, device)
  std::vector<fb::FeedbackRecord> feedback;   // sorted by time
  std::vector<GroundTruthEncounter> truth;    // sorted by (start, participant, device)
  SimStats stats;
};

// Deterministic under a fixed config: same seed, byte-identical streams.
SimResult simulate(const SimConfig& config, const geo::Network& network,
                   std::span<const metrics::PoiEvent> pois, const ble::ProviderTable& providers);

struct Score {
  double precision = 1.0;
  double recall = 1.0;
  std::int64_t truth_total = 0;
  std::int64_t detected_total = 0;
  std::int64_t matched_truth = 0;
  std::int64_t matched_detected = 0;
  bool precision_by_convention = false;  // no detections to score
  bool recall_by_convention = false;     // no truth to score
};

// A detection matches a truth encounter when participant and device agree and
// the time intervals overlap (closed intervals).
Score score_detector(std::span<const GroundTruthEncounter> truth,
                     std::span<const detect::Encounter> detected);

}  // namespace scootsense::sim
