#include <doctest.h>

#include <random>

#include "scootsense/errors.hpp"
#include "scootsense/metrics.hpp"

using namespace scootsense;
using geo::FunctionalClass;

namespace {

geo::AtomicSegment segment(std::int64_t id, FunctionalClass cls, double miles) {
  geo::AtomicSegment s;
  s.id = id;
  s.functional_class = cls;
  s.length_miles = miles;
  s.polyline = {{45.0, -93.0}, {45.001, -93.0}};
  return s;
}

// The published functional-classification table: MEM and PEM columns.
struct TableRow {
  FunctionalClass cls;
  double mem_p, mem_o, pem_p, pem_o;
};
const std::vector<TableRow> kTable = {
    {FunctionalClass::Arterial, 146.1, 60.7, 6.9, 2.3},
    {FunctionalClass::Collector, 68.4, 55.2, 3.2, 2.1},
    {FunctionalClass::Local, 176.0, 171.8, 8.3, 6.6},
    {FunctionalClass::SharedUsePath, 306.0, 432.6, 14.5, 16.6},
    {FunctionalClass::Sidewalk, 617.8, 470.7, 29.2, 18.1},
    {FunctionalClass::Other, 799.1, 1410.0, 37.8, 54.2},
};

}  // namespace

TEST_CASE("pem reproduces the published table from its MEM columns") {
  std::map<FunctionalClass, double> mem_p, mem_o;
  for (const auto& row : kTable) {
    mem_p[row.cls] = row.mem_p;
    mem_o[row.cls] = row.mem_o;
  }
  auto pem_p = metrics::pem(mem_p);
  auto pem_o = metrics::pem(mem_o);
  for (const auto& row : kTable) {
    CHECK(std::abs(pem_p.at(row.cls) - row.pem_p) <= 0.1);
    CHECK(std::abs(pem_o.at(row.cls) - row.pem_o) <= 0.1);
  }
  double sum_p = 0, sum_o = 0;
  for (const auto& row : kTable) {
    sum_p += pem_p.at(row.cls);
    sum_o += pem_o.at(row.cls);
  }
  CHECK(std::abs(sum_p - 100.0) <= 0.2);
  CHECK(std::abs(sum_o - 100.0) <= 0.2);
}

TEST_CASE("pem of a single class is 100") {
  std::map<FunctionalClass, double> mem = {{FunctionalClass::Sidewalk, 42.0}};
  auto result = metrics::pem(mem);
  CHECK(result.at(FunctionalClass::Sidewalk) == 100.0);
  std::map<FunctionalClass, double> zeros = {{FunctionalClass::Sidewalk, 0.0}};
  CHECK_THROWS_AS(metrics::pem(zeros), DataError);
}

TEST_CASE("tes counts exactly, keeps unmatched separate") {
  std::vector<geo::AtomicSegment> segments = {
      segment(0, FunctionalClass::Sidewalk, 0.5),
      segment(1, FunctionalClass::Sidewalk, 0.25),
      segment(2, FunctionalClass::Arterial, 1.0),
  };
  std::vector<bins::PlacedEncounter> placed = {
      {0, std::nullopt}, {0, std::nullopt}, {1, std::nullopt},
      {bins::kUnmatchedSegment, std::nullopt}, {2, std::nullopt},
  };
  auto result = metrics::tes(placed, segments);
  CHECK(result.per_segment == std::vector<std::int64_t>{2, 1, 1});
  CHECK(result.per_class.at(FunctionalClass::Sidewalk) == 3);
  CHECK(result.per_class.at(FunctionalClass::Arterial) == 1);
  CHECK(result.per_class.at(FunctionalClass::Local) == 0);
  CHECK(result.unmatched == 1);
  CHECK(result.total_matched == 4);

  // conservation: per-class totals sum to total_matched
  std::int64_t sum = 0;
  for (const auto& [cls, v] : result.per_class) sum += v;
  CHECK(sum == result.total_matched);

  std::vector<bins::PlacedEncounter> empty;
  auto zero = metrics::tes(empty, segments);
  CHECK(zero.total_matched == 0);
  CHECK(zero.per_class.at(FunctionalClass::Sidewalk) == 0);
}

TEST_CASE("tes equals a direct group-by on random data") {
  std::mt19937_64 rng(31);
  std::vector<geo::AtomicSegment> segments;
  for (int i = 0; i < 20; ++i)
    segments.push_back(segment(i, static_cast<FunctionalClass>(i % 6), 0.1 + 0.05 * i));
  std::uniform_int_distribution<std::int64_t> pick(-1, 19);
  std::vector<bins::PlacedEncounter> placed;
  std::vector<std::int64_t> expected(20, 0);
  for (int i = 0; i < 3000; ++i) {
    std::int64_t s = pick(rng);
    placed.push_back({s, std::nullopt});
    if (s >= 0) ++expected[static_cast<size_t>(s)];
  }
  auto result = metrics::tes(placed, segments);
  CHECK(result.per_segment == expected);
}

TEST_CASE("mem formula: encounters per segment-mile") {
  std::vector<geo::AtomicSegment> segments = {segment(0, FunctionalClass::Sidewalk, 0.5)};
  std::vector<bins::PlacedEncounter> placed(10, {0, std::nullopt});
  auto result = metrics::mem(metrics::tes(placed, segments), segments);
  CHECK(result.per_class.at(FunctionalClass::Sidewalk) == doctest::Approx(20.0));
  CHECK(result.warnings.size() == 5);  // five classes have no segments
}

TEST_CASE("mem averages include zero-encounter segments") {
  std::vector<geo::AtomicSegment> segments = {
      segment(0, FunctionalClass::Sidewalk, 0.5),
      segment(1, FunctionalClass::Sidewalk, 1.0),  // zero encounters
  };
  std::vector<bins::PlacedEncounter> placed(10, {0, std::nullopt});
  auto tes = metrics::tes(placed, segments);
  auto mean_of_ratios = metrics::mem(tes, segments, metrics::MemMode::MeanOfRatios);
  CHECK(mean_of_ratios.per_class.at(FunctionalClass::Sidewalk) == doctest::Approx(10.0));
  auto ratio_of_totals = metrics::mem(tes, segments, metrics::MemMode::RatioOfTotals);
  CHECK(ratio_of_totals.per_class.at(FunctionalClass::Sidewalk) ==
        doctest::Approx(10.0 / 1.5));
}

TEST_CASE("mem is scale consistent: doubling lengths halves every value") {
  std::mt19937_64 rng(37);
  std::vector<geo::AtomicSegment> segments;
  for (int i = 0; i < 12; ++i)
    segments.push_back(segment(i, static_cast<FunctionalClass>(i % 6), 0.2 + 0.1 * (i % 4)));
  std::uniform_int_distribution<std::int64_t> pick(0, 11);
  std::vector<bins::PlacedEncounter> placed;
  for (int i = 0; i < 400; ++i) placed.push_back({pick(rng), std::nullopt});
  auto tes = metrics::tes(placed, segments);
  auto before = metrics::mem(tes, segments);

  auto doubled = segments;
  for (auto& s : doubled) s.length_miles *= 2;
  auto after = metrics::mem(metrics::tes(placed, doubled), doubled);
  for (const auto& [cls, v] : before.per_class)
    CHECK(after.per_class.at(cls) == doctest::Approx(v / 2));
}

TEST_CASE("tes-share pem variant uses the footnote-literal formula") {
  std::vector<geo::AtomicSegment> segments = {
      segment(0, FunctionalClass::Sidewalk, 0.5),
      segment(1, FunctionalClass::Arterial, 0.5),
  };
  std::vector<bins::PlacedEncounter> placed;
  for (int i = 0; i < 3; ++i) placed.push_back({0, std::nullopt});
  placed.push_back({1, std::nullopt});
  auto shares = metrics::pem_tes_share(metrics::tes(placed, segments));
  CHECK(shares.at(FunctionalClass::Sidewalk) == doctest::Approx(75.0));
  CHECK(shares.at(FunctionalClass::Arterial) == doctest::Approx(25.0));
}

TEST_CASE("quantile interpolates linearly") {
  std::vector<double> v = {1, 2, 3, 4};
  CHECK(metrics::quantile(v, 0.5) == doctest::Approx(2.5));
  CHECK(metrics::quantile(v, 0.25) == doctest::Approx(1.75));
  CHECK(metrics::quantile(v, 0.0) == 1.0);
  CHECK(metrics::quantile(v, 1.0) == 4.0);
}

namespace {

detect::Encounter encounter(ble::Provider p, double rssi) {
  detect::Encounter e;
  e.participant_id = "P001";
  e.device_id = "d";
  e.provider = p;
  e.start = {0, 0};
  e.end = {1000, 0};
  e.packet_count = 6;
  e.max_rssi_db = rssi;
  return e;
}

}  // namespace

TEST_CASE("rssi group comparison per provider and group") {
  std::vector<detect::Encounter> encounters = {
      encounter(ble::Provider::Bird, -50), encounter(ble::Provider::Bird, -70),
      encounter(ble::Provider::Bird, -55), encounter(ble::Provider::Lime, -45),
  };
  std::vector<bins::Group> groups = {bins::Group::High, bins::Group::High, bins::Group::Low,
                                     bins::Group::None};
  auto rows = metrics::rssi_group_comparison(encounters, groups);
  REQUIRE(rows.size() == 6);  // 3 providers x 2 groups

  for (const auto& row : rows) {
    if (row.provider == ble::Provider::Bird && row.group == bins::Group::High) {
      REQUIRE(row.stats.has_value());
      CHECK(row.stats->n == 2);
      CHECK(row.stats->mean == doctest::Approx(-60.0));
      CHECK(row.stats->median == doctest::Approx(-60.0));
    }
    if (row.provider == ble::Provider::Bird && row.group == bins::Group::Low) {
      REQUIRE(row.stats.has_value());
      CHECK(row.stats->n == 1);
    }
    if (row.provider == ble::Provider::Lime) CHECK(!row.stats.has_value());  // None group excluded
    if (row.provider == ble::Provider::BlueDuck) CHECK(!row.stats.has_value());
  }

  // identical values in both groups give equal means
  std::vector<detect::Encounter> flat(10, encounter(ble::Provider::Bird, -60));
  std::vector<bins::Group> half(10, bins::Group::Low);
  for (size_t i = 0; i < 5; ++i) half[i] = bins::Group::High;
  auto rows2 = metrics::rssi_group_comparison(flat, half);
  double mean_low = 0, mean_high = 0;
  for (const auto& row : rows2)
    if (row.provider == ble::Provider::Bird && row.stats)
      (row.group == bins::Group::High ? mean_high : mean_low) = row.stats->mean;
  CHECK(mean_low == mean_high);
}

TEST_CASE("spearman rank correlation") {
  std::vector<double> a = {1, 2, 3, 4, 5};
  std::vector<double> b = {10, 20, 30, 40, 50};
  CHECK(*metrics::spearman(a, b) == doctest::Approx(1.0));
  std::vector<double> r = {50, 40, 30, 20, 10};
  CHECK(*metrics::spearman(a, r) == doctest::Approx(-1.0));
  std::vector<double> c(5, 7.0);
  CHECK(!metrics::spearman(a, c).has_value());  // constant series undefined
  // ties use average ranks; a monotone-with-ties pair stays strongly positive
  std::vector<double> t1 = {1, 1, 2, 3, 3};
  std::vector<double> t2 = {5, 6, 7, 8, 8};
  CHECK(*metrics::spearman(t1, t2) > 0.9);
}

TEST_CASE("schedule correlation over the week grid") {
  metrics::PoiEvent poi;
  poi.poi_id = "class_a";
  poi.kind = metrics::PoiKind::Attractor;
  poi.location = {45.0, -93.0};
  poi.magnitude = 10;
  // Monday 09:00-10:30 overlaps hour bins 3 and 4
  poi.schedule.push_back({1, 9 * 3600'000, 10 * 3600'000 + 1800'000});
  std::vector<metrics::PoiEvent> pois = {poi};

  auto counts = metrics::scheduled_class_counts(pois);
  CHECK(counts[3] == 1);
  CHECK(counts[4] == 1);
  CHECK(counts[5] == 0);

  // encounters mirroring the schedule correlate positively
  std::array<std::int64_t, bins::kHourSlotsPerWeek> hourly{};
  hourly[3] = 5;
  hourly[4] = 7;
  auto result = metrics::schedule_correlation(hourly, pois);
  REQUIRE(result.spearman.has_value());
  CHECK(*result.spearman > 0.9);
  CHECK(result.rows.size() == bins::kHourSlotsPerWeek);

  // no schedule at all: constant series, undefined correlation
  std::vector<metrics::PoiEvent> none;
  auto undef = metrics::schedule_correlation(hourly, none);
  CHECK(!undef.spearman.has_value());
}

TEST_CASE("poi validation") {
  metrics::PoiEvent poi;
  poi.poi_id = "x";
  poi.magnitude = 1;
  poi.schedule.push_back({1, 1000, 500});
  CHECK_THROWS_AS(metrics::validate(poi), DataError);
  poi.schedule = {{8, 0, 100}};
  CHECK_THROWS_AS(metrics::validate(poi), DataError);
  poi.schedule = {{1, 0, 100}};
  CHECK_NOTHROW(metrics::validate(poi));
}
