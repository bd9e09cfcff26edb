#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "scootsense/errors.hpp"
#include "scootsense/geo.hpp"
#include "support/oracles.hpp"

using namespace scootsense;
using nlohmann::json;

namespace {

json line_feature(const std::string& highway, std::initializer_list<geo::LatLon> pts) {
  json coords = json::array();
  for (const auto& p : pts) coords.push_back({p.lon, p.lat});
  return {{"type", "Feature"},
          {"properties", {{"highway", highway}}},
          {"geometry", {{"type", "LineString"}, {"coordinates", coords}}}};
}

json collection(std::vector<json> features) {
  return {{"type", "FeatureCollection"}, {"features", features}};
}

// A rows x cols lattice of residential streets; every edge is its own feature.
json grid_collection(int rows, int cols, double step_deg = 0.001) {
  std::vector<json> features;
  auto node = [&](int r, int c) { return geo::LatLon{45.0 + r * step_deg, -93.0 + c * step_deg}; };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c + 1 < cols; ++c)
      features.push_back(line_feature("residential", {node(r, c), node(r, c + 1)}));
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r + 1 < rows; ++r)
      features.push_back(line_feature("residential", {node(r, c), node(r + 1, c)}));
  return collection(features);
}

}  // namespace

TEST_CASE("haversine sanity") {
  // one degree of latitude is about 111.19 km on the spherical model
  double d = geo::haversine_m({45.0, -93.0}, {46.0, -93.0});
  CHECK(d == doctest::Approx(111194.9).epsilon(0.001));
  CHECK(geo::haversine_m({45, -93}, {45, -93}) == 0.0);
}

TEST_CASE("two lines crossing at a shared vertex split into 4 segments") {
  geo::LatLon mid{45.001, -93.001};
  auto fc = collection({
      line_feature("residential", {{45.000, -93.001}, mid, {45.002, -93.001}}),
      line_feature("footway", {{45.001, -93.000}, mid, {45.001, -93.002}}),
  });
  auto net = geo::build_graph(fc);
  CHECK(net.segments.size() == 4);
  int sidewalks = 0;
  for (const auto& s : net.segments)
    if (s.functional_class == geo::FunctionalClass::Sidewalk) ++sidewalks;
  CHECK(sidewalks == 2);
}

TEST_CASE("functional classification follows the tag table") {
  geo::FunctionalClassMap classes;
  CHECK(classes.classify("primary") == geo::FunctionalClass::Arterial);
  CHECK(classes.classify("secondary") == geo::FunctionalClass::Arterial);
  CHECK(classes.classify("tertiary") == geo::FunctionalClass::Collector);
  CHECK(classes.classify("residential") == geo::FunctionalClass::Local);
  CHECK(classes.classify("service") == geo::FunctionalClass::Local);
  CHECK(classes.classify("path") == geo::FunctionalClass::SharedUsePath);
  CHECK(classes.classify("cycleway") == geo::FunctionalClass::SharedUsePath);
  CHECK(classes.classify("footway") == geo::FunctionalClass::Sidewalk);
  CHECK(classes.classify("pedestrian") == geo::FunctionalClass::Sidewalk);
  CHECK(classes.classify("motorway") == geo::FunctionalClass::Other);
  CHECK(classes.classify("") == geo::FunctionalClass::Other);

  auto fc = collection({line_feature("footway", {{45.0, -93.0}, {45.001, -93.0}})});
  auto net = geo::build_graph(fc);
  REQUIRE(net.segments.size() == 1);
  CHECK(net.segments[0].functional_class == geo::FunctionalClass::Sidewalk);
}

TEST_CASE("degenerate features are rejected with diagnostics") {
  auto fc = collection({
      line_feature("residential", {{45.0, -93.0}}),                 // < 2 vertices
      line_feature("residential", {{45.0, -93.0}, {45.0, -93.0}}),  // zero length
      line_feature("residential", {{45.0, -93.0}, {45.001, -93.0}}),
  });
  auto net = geo::build_graph(fc);
  CHECK(net.segments.size() == 1);
  CHECK(net.diagnostics.size() == 2);
}

TEST_CASE("grid split matches the pairwise vertex-sharing oracle") {
  auto fc = grid_collection(10, 10);
  auto net = geo::build_graph(fc);

  // oracle: a feature splits at an interior vertex iff that vertex also
  // appears in any other feature (checked pairwise, O(n^2))
  const auto& features = fc.at("features");
  auto vertices_of = [](const json& f) {
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    for (const auto& c : f.at("geometry").at("coordinates"))
      out.push_back({llround(c[1].get<double>() * 1e7), llround(c[0].get<double>() * 1e7)});
    return out;
  };
  size_t expected = 0;
  for (size_t i = 0; i < features.size(); ++i) {
    auto vi = vertices_of(features[i]);
    size_t cuts = 0;
    for (size_t k = 1; k + 1 < vi.size(); ++k) {
      bool shared = false;
      for (size_t j = 0; j < features.size() && !shared; ++j) {
        if (j == i) continue;
        for (const auto& v : vertices_of(features[j]))
          if (v == vi[k]) {
            shared = true;
            break;
          }
      }
      if (shared) ++cuts;
    }
    expected += cuts + 1;
  }
  CHECK(net.segments.size() == expected);
  CHECK(net.segments.size() == 180);  // 10x10 lattice of unit edges

  // split-length conservation against the raw feature lengths
  double total_feature_m = 0;
  for (const auto& f : features) {
    std::vector<geo::LatLon> pts;
    for (const auto& c : f.at("geometry").at("coordinates"))
      pts.push_back({c[1].get<double>(), c[0].get<double>()});
    total_feature_m += geo::polyline_length_m(pts);
  }
  double total_segment_m = 0;
  for (const auto& s : net.segments) total_segment_m += s.length_miles * geo::kMetersPerMile;
  CHECK(total_segment_m == doctest::Approx(total_feature_m).epsilon(1e-6));
}

TEST_CASE("snap matches the exhaustive oracle on random points") {
  auto net = geo::build_graph(grid_collection(8, 8));
  geo::SegmentIndex index(net.segments);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dlat(44.999, 45.009), dlon(-93.009, -92.999);
  for (int i = 0; i < 1000; ++i) {
    geo::LatLon p{dlat(rng), dlon(rng)};
    auto got = index.snap(p, 25.0);
    auto want = testsupport::exhaustive_snap(p, net.segments, 25.0);
    REQUIRE(got.has_value() == want.has_value());
    if (got) {
      CHECK(got->segment_id == want->segment_id);
      CHECK(got->distance_m == want->distance_m);
    }
  }
}

TEST_CASE("snap edge cases") {
  auto net = geo::build_graph(grid_collection(3, 3));
  geo::SegmentIndex index(net.segments);

  // a point exactly on a segment vertex snaps to that segment
  auto hit = index.snap({45.0, -93.0005}, 25.0);
  REQUIRE(hit.has_value());
  CHECK(hit->distance_m == doctest::Approx(0.0).epsilon(1e-9));

  // far point: unmatched
  CHECK(!index.snap({45.5, -93.0}, 25.0).has_value());
  CHECK(!index.snap(geo::offset_point({45.0, -93.0005}, 0, -100), 25.0).has_value());

  // equidistant between two parallel rows: deterministic lowest id
  geo::LatLon between{45.0005, -93.0005};
  auto tie = index.snap(between, 80.0);
  auto oracle = testsupport::exhaustive_snap(between, net.segments, 80.0);
  REQUIRE(tie.has_value());
  CHECK(tie->segment_id == oracle->segment_id);

  std::vector<geo::AtomicSegment> empty;
  geo::SegmentIndex empty_index(empty);
  CHECK_THROWS_AS(empty_index.snap({45.0, -93.0}, 25.0), DataError);
}

TEST_CASE("polygon containment") {
  geo::NamedPolygon square{"sq", {{45.0, -93.0}, {45.0, -92.9}, {45.1, -92.9}, {45.1, -93.0}}};
  CHECK(geo::polygon_contains(square, {45.05, -92.95}));
  CHECK(!geo::polygon_contains(square, {45.15, -92.95}));
  CHECK(!geo::polygon_contains(square, {44.95, -92.95}));
}

TEST_CASE("offset_point and segment_direction are consistent") {
  geo::LatLon a{45.0, -93.0};
  auto b = geo::offset_point(a, 30.0, 40.0);
  CHECK(geo::haversine_m(a, b) == doctest::Approx(50.0).epsilon(1e-4));
  double east, north;
  geo::segment_direction(a, b, east, north);
  CHECK(east == doctest::Approx(0.6).epsilon(1e-3));
  CHECK(north == doctest::Approx(0.8).epsilon(1e-3));
}
