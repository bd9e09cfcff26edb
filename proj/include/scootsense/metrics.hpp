#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scootsense/binning.hpp"
#include "scootsense/detector.hpp"
#include "scootsense/geo.hpp"

namespace scootsense::metrics {

// A point of interest that draws (attractor) or emits (generator) pedestrian
// and rider flows, with its weekly schedule.
struct PoiSession {
  int iso_weekday = 1;          // 1 = Monday .. 7 = Sunday
  std::int32_t start_ms = 0;    // ms into the local day
  std::int32_t end_ms = 0;
};

enum class PoiKind { Attractor, Generator, Both };
std::string_view to_string(PoiKind k);
std::optional<PoiKind> poi_kind_from_string(std::string_view s);

struct PoiEvent {
  std::string poi_id;
  PoiKind kind = PoiKind::Both;
  geo::LatLon location;
  std::vector<PoiSession> schedule;
  double magnitude = 0.0;  // expected headcount
};

void validate(const PoiEvent& poi);  // throws DataError

// ---- TES / MEM / PEM ----

// Total Encounters per Segment: exact group-by counts.
struct TesResult {
  std::vector<std::int64_t> per_segment;  // indexed by segment id
  std::map<geo::FunctionalClass, std::int64_t> per_class;
  std::int64_t unmatched = 0;  // snap failures, reported but never dropped
  std::int64_t total_matched = 0;
};

TesResult tes(std::span<const bins::PlacedEncounter> placed,
              const std::vector<geo::AtomicSegment>& segments);

// Mean Encounters per Mile per functional class. MeanOfRatios averages
// TES_s / miles_s over every segment of the class (zero-TES segments included);
// RatioOfTotals divides class encounter totals by class mileage.
enum class MemMode { MeanOfRatios, RatioOfTotals };

struct MemResult {
  std::map<geo::FunctionalClass, double> per_class;  // classes with segments only
  std::vector<std::string> warnings;                 // e.g. classes with no segments
};

MemResult mem(const TesResult& tes_result, const std::vector<geo::AtomicSegment>& segments,
              MemMode mode = MemMode::MeanOfRatios);

// Percent Encounters per Mile: each class's share of the summed MEM.
std::map<geo::FunctionalClass, double> pem(const std::map<geo::FunctionalClass, double>& mem);
// Footnote-literal alternative: class TES share of total TES.
std::map<geo::FunctionalClass, double> pem_tes_share(const TesResult& tes_result);

// ---- RSSI group comparison ----

struct GroupStats {
  std::int64_t n = 0;
  double mean = 0.0, median = 0.0, q1 = 0.0, q3 = 0.0;
};

// Linear-interpolation quantile of a sample (R type 7).
double quantile(std::span<const double> sorted_values, double p);

struct RssiGroupRow {
  ble::Provider provider;
  bins::Group group;
  std::optional<GroupStats> stats;  // absent (flagged) when the cell is empty
};

// Per (provider, Low/High group) distribution of encounter max RSSI.
std::vector<RssiGroupRow> rssi_group_comparison(std::span<const detect::Encounter> encounters,
                                                std::span<const bins::Group> groups);

// ---- schedule correlation ----

// Scheduled class-session count per hour-of-week bin (0..118).
std::array<std::int64_t, bins::kHourSlotsPerWeek> scheduled_class_counts(
    std::span<const PoiEvent> pois);

std::array<std::int64_t, bins::kHourSlotsPerWeek> hourly_encounter_counts(
    std::span<const detect::Encounter> encounters);

struct ScheduleCorrelation {
  struct Row {
    int hour_of_week;
    std::int64_t encounters;
    std::int64_t classes;
  };
  std::vector<Row> rows;               // full 7x17 grid
  std::optional<double> spearman;      // absent when a series is constant
};

ScheduleCorrelation schedule_correlation(
    const std::array<std::int64_t, bins::kHourSlotsPerWeek>& hourly_encounters,
    std::span<const PoiEvent> pois);

// Rank correlation with average ranks for ties; nullopt for constant input.
std::optional<double> spearman(std::span<const double> a, std::span<const double> b);

}  // namespace scootsense::metrics
