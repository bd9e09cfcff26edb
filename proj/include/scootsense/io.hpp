#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "scootsense/ble.hpp"
#include "scootsense/detector.hpp"
#include "scootsense/feedback.hpp"
#include "scootsense/metrics.hpp"
#include "scootsense/sim.hpp"

namespace scootsense::io {

// Shortest round-trip decimal form, so re-read values are bit-identical.
std::string format_double(double v);
double parse_double(std::string_view s);  // throws DataError
std::int64_t parse_int(std::string_view s);

std::string csv_field(std::string_view v);
std::vector<std::string> split_csv_line(std::string_view line);

std::string read_file(const std::string& path);                    // ConfigError if missing
void write_file(const std::string& path, std::string_view content);
nlohmann::json read_json_file(const std::string& path);

// One BleReception per line; timestamps ISO-8601 with offset, payload hex.
void write_receptions_jsonl(std::ostream& out, std::span<const ble::BleReception> receptions);
std::vector<ble::BleReception> read_receptions_jsonl(std::istream& in);  // DataError w/ line no

// participant_id,iso_time,lat,lon,provider,q_moving,q_in_front,q_toward,
// heart_rate_bpm,answered_within_s — empty cells for absent optionals.
void write_feedback_csv(std::ostream& out, std::span<const fb::FeedbackRecord> records);
std::vector<fb::FeedbackRecord> read_feedback_csv(std::istream& in);

// participant_id,device_id,provider,start_iso,end_iso,packet_count,
// max_rssi_db,lat,lon
void write_encounters_csv(std::ostream& out, std::span<const detect::Encounter> encounters);
std::vector<detect::Encounter> read_encounters_csv(std::istream& in);

void write_truth_csv(std::ostream& out, std::span<const sim::GroundTruthEncounter> truth);
std::vector<sim::GroundTruthEncounter> read_truth_csv(std::istream& in);

// poi_id,kind,lat,lon,magnitude,day_of_week,start,end — one row per session,
// schedule-free POIs leave the last three empty.
void write_poi_csv(std::ostream& out, std::span<const metrics::PoiEvent> pois);
std::vector<metrics::PoiEvent> read_poi_csv(std::istream& in);

void write_segments_csv(std::ostream& out, const std::vector<geo::AtomicSegment>& segments);

}  // namespace scootsense::io
