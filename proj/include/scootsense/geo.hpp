#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace scootsense::geo {

inline constexpr double kEarthRadiusM = 6371008.8;  // spherical mean radius
inline constexpr double kMetersPerMile = 1609.344;
inline constexpr double kMetersPerFoot = 0.3048;

inline double feet_to_m(double ft) { return ft * kMetersPerFoot; }
inline double m_to_feet(double m) { return m / kMetersPerFoot; }

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
  friend bool operator==(const LatLon&, const LatLon&) = default;
};

double haversine_m(const LatLon& a, const LatLon& b);
double polyline_length_m(std::span<const LatLon> pts);

// Distance from a point to a polyline, measured on a tangent plane centered at
// the point (exact enough at snap-radius scales).
double point_to_polyline_m(const LatLon& p, std::span<const LatLon> pts);

// Destination point after moving `dist_m` along the bearing defined by the
// local east/north unit vector (ex, en), from `origin`.
LatLon offset_point(const LatLon& origin, double east_m, double north_m);

// Unit east/north direction of the segment a->b in the local tangent plane.
void segment_direction(const LatLon& a, const LatLon& b, double& east, double& north);

enum class FunctionalClass { Arterial, Collector, Local, SharedUsePath, Sidewalk, Other };
inline constexpr int kFunctionalClassCount = 6;

std::string_view to_string(FunctionalClass c);
std::optional<FunctionalClass> functional_class_from_string(std::string_view s);

// Highway-tag to functional-class table; every tag maps to exactly one class,
// with Other as the only fallback.
class FunctionalClassMap {
 public:
  FunctionalClassMap();  // default OSM-tag mapping
  FunctionalClass classify(std::string_view tag) const;
  void set(std::string tag, FunctionalClass c) { table_[std::move(tag)] = c; }

 private:
  std::map<std::string, FunctionalClass, std::less<>> table_;
};

// One edge of the road/walkway graph; enterable only at its endpoints.
struct AtomicSegment {
  std::int64_t id = 0;
  std::vector<LatLon> polyline;
  double length_miles = 0.0;
  FunctionalClass functional_class = FunctionalClass::Other;
  std::string raw_tag;
};

struct Network {
  std::vector<AtomicSegment> segments;  // ids are dense: segments[i].id == i
  std::vector<std::string> diagnostics;
};

// Splits line features at shared vertices so segments intersect only at their
// endpoints. Expects a GeoJSON FeatureCollection with a "highway" property.
Network build_graph(const nlohmann::json& feature_collection,
                    const FunctionalClassMap& classes = FunctionalClassMap());

Network load_network(const std::string& path,
                     const FunctionalClassMap& classes = FunctionalClassMap());

struct SnapResult {
  std::int64_t segment_id = -1;
  double distance_m = 0.0;
};

// Grid-bucketed nearest-segment index. Ties resolve to the lowest segment id.
class SegmentIndex {
 public:
  explicit SegmentIndex(const std::vector<AtomicSegment>& segments, double cell_m = 150.0);

  // std::nullopt when the nearest segment is farther than max_snap_m.
  std::optional<SnapResult> snap(const LatLon& p, double max_snap_m = 25.0) const;

 private:
  const std::vector<AtomicSegment>& segments_;
  double cell_deg_lat_ = 0.0, cell_deg_lon_ = 0.0;
  double min_lat_ = 0.0, min_lon_ = 0.0;
  int cols_ = 0, rows_ = 0;
  std::vector<std::vector<std::int32_t>> cells_;

  std::pair<int, int> cell_of(const LatLon& p) const;
};

struct NamedPolygon {
  std::string name;
  std::vector<LatLon> ring;  // closed implicitly
};

bool polygon_contains(const NamedPolygon& poly, const LatLon& p);
std::vector<NamedPolygon> parse_polygons(const nlohmann::json& feature_collection);

}  // namespace scootsense::geo
