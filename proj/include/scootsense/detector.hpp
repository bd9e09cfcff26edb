#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scootsense/ble.hpp"
#include "scootsense/geo.hpp"
#include "scootsense/time.hpp"

namespace scootsense::detect {

struct DetectorParams {
  double window_length_s = 1.0;
  double overlap_fraction = 0.8;  // in [0, 1)
  int min_packets_per_window = 4;
  double merge_gap_s = 300.0;
  int max_encounters_per_scooter_per_day = 4;
  // Civil-day boundary for the per-day cap; defaults to each packet's own
  // recorded offset when unset.
  std::optional<std::int32_t> day_offset_min;

  std::int64_t window_ms() const { return static_cast<std::int64_t>(window_length_s * 1000 + 0.5); }
  std::int64_t stride_ms() const {
    return static_cast<std::int64_t>(window_length_s * (1.0 - overlap_fraction) * 1000 + 0.5);
  }
  std::int64_t merge_gap_ms() const { return static_cast<std::int64_t>(merge_gap_s * 1000 + 0.5); }

  void validate() const;  // throws ConfigError
};

// A predicted encounter: one participant near one beaconing scooter.
struct Encounter {
  std::string participant_id;
  std::string device_id;
  ble::Provider provider = ble::Provider::Unknown;
  Timestamp start;
  Timestamp end;
  int packet_count = 0;
  double max_rssi_db = 0.0;
  std::optional<geo::LatLon> gps;  // fix of the max-RSSI packet, if any
};

// Sliding-window detection over one participant's time-ordered stream:
//  1. partition by device_id;
//  2. windows of window_length at stride window_length*(1-overlap), anchored
//     at the partition's first packet; windows holding >= min_packets packets
//     are potential encounter windows;
//  3. adjacent potential windows merge into one encounter when the packet gap
//     between them is < merge_gap, else they split;
//  4. per (participant, device, local day) only the chronologically first
//     max_encounters_per_scooter_per_day encounters are kept.
// Output is sorted by start time. Throws DataError on unsorted input or mixed
// participant ids.
std::vector<Encounter> detect_encounters(std::span<const ble::BleReception> stream,
                                         const DetectorParams& params,
                                         const ble::ProviderTable& providers);

struct CorpusSummary {
  std::int64_t unique_scooters_seen = 0;
  std::int64_t scooters_with_encounters = 0;
  std::int64_t total_encounters = 0;
};

struct CorpusResult {
  std::vector<Encounter> encounters;  // merged across participants, by start time
  CorpusSummary summary;
};

// Streams are (participant_id, time-ordered receptions). Duplicate participant
// ids are a DataError.
CorpusResult detect_corpus(
    std::span<const std::pair<std::string, std::vector<ble::BleReception>>> streams,
    const DetectorParams& params, const ble::ProviderTable& providers);

// Groups a flat reception log by receiver_id (preserving order within each
// receiver) for detect_corpus.
std::vector<std::pair<std::string, std::vector<ble::BleReception>>> partition_by_receiver(
    std::span<const ble::BleReception> receptions);

}  // namespace scootsense::detect
