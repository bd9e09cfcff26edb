#include "scootsense/geo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "scootsense/errors.hpp"

namespace scootsense::geo {

namespace {
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
}

double haversine_m(const LatLon& a, const LatLon& b) {
  double phi1 = a.lat * kDegToRad, phi2 = b.lat * kDegToRad;
  double dphi = (b.lat - a.lat) * kDegToRad;
  double dlam = (b.lon - a.lon) * kDegToRad;
  double s1 = std::sin(dphi / 2), s2 = std::sin(dlam / 2);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

double polyline_length_m(std::span<const LatLon> pts) {
  double total = 0.0;
  for (size_t i = 1; i < pts.size(); ++i) total += haversine_m(pts[i - 1], pts[i]);
  return total;
}

namespace {

// Local tangent-plane coordinates (meters) of q relative to origin p.
inline void to_plane(const LatLon& p, const LatLon& q, double& x, double& y) {
  double coslat = std::cos(p.lat * kDegToRad);
  x = (q.lon - p.lon) * kDegToRad * kEarthRadiusM * coslat;
  y = (q.lat - p.lat) * kDegToRad * kEarthRadiusM;
}

inline double point_to_segment_plane(double px, double py, double ax, double ay, double bx,
                                     double by) {
  double dx = bx - ax, dy = by - ay;
  double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((px - ax) * dx + (py - ay) * dy) / len2, 0.0, 1.0);
  double cx = ax + t * dx, cy = ay + t * dy;
  return std::hypot(px - cx, py - cy);
}

}  // namespace

double point_to_polyline_m(const LatLon& p, std::span<const LatLon> pts) {
  if (pts.empty()) return std::numeric_limits<double>::infinity();
  if (pts.size() == 1) return haversine_m(p, pts[0]);
  double best = std::numeric_limits<double>::infinity();
  double ax, ay;
  to_plane(p, pts[0], ax, ay);
  for (size_t i = 1; i < pts.size(); ++i) {
    double bx, by;
    to_plane(p, pts[i], bx, by);
    best = std::min(best, point_to_segment_plane(0.0, 0.0, ax, ay, bx, by));
    ax = bx;
    ay = by;
  }
  return best;
}

LatLon offset_point(const LatLon& origin, double east_m, double north_m) {
  double coslat = std::cos(origin.lat * kDegToRad);
  if (std::abs(coslat) < 1e-9) coslat = 1e-9;
  return {origin.lat + north_m / kEarthRadiusM / kDegToRad,
          origin.lon + east_m / (kEarthRadiusM * coslat) / kDegToRad};
}

void segment_direction(const LatLon& a, const LatLon& b, double& east, double& north) {
  double x, y;
  to_plane(a, b, x, y);
  double len = std::hypot(x, y);
  if (len < 1e-12) {
    east = 1.0;
    north = 0.0;
    return;
  }
  east = x / len;
  north = y / len;
}

std::string_view to_string(FunctionalClass c) {
  switch (c) {
    case FunctionalClass::Arterial: return "Arterial";
    case FunctionalClass::Collector: return "Collector";
    case FunctionalClass::Local: return "Local";
    case FunctionalClass::SharedUsePath: return "SharedUsePath";
    case FunctionalClass::Sidewalk: return "Sidewalk";
    case FunctionalClass::Other: return "Other";
  }
  return "Other";
}

std::optional<FunctionalClass> functional_class_from_string(std::string_view s) {
  for (int i = 0; i < kFunctionalClassCount; ++i) {
    auto c = static_cast<FunctionalClass>(i);
    if (s == to_string(c)) return c;
  }
  return std::nullopt;
}

FunctionalClassMap::FunctionalClassMap() {
  table_ = {
      {"primary", FunctionalClass::Arterial},  {"secondary", FunctionalClass::Arterial},
      {"tertiary", FunctionalClass::Collector}, {"residential", FunctionalClass::Local},
      {"service", FunctionalClass::Local},      {"path", FunctionalClass::SharedUsePath},
      {"cycleway", FunctionalClass::SharedUsePath},
      {"footway", FunctionalClass::Sidewalk},   {"pedestrian", FunctionalClass::Sidewalk},
  };
}

FunctionalClass FunctionalClassMap::classify(std::string_view tag) const {
  auto it = table_.find(tag);
  return it == table_.end() ? FunctionalClass::Other : it->second;
}

namespace {

struct VertexKey {
  std::int64_t lat_e7, lon_e7;
  friend bool operator==(const VertexKey&, const VertexKey&) = default;
};

struct VertexKeyHash {
  size_t operator()(const VertexKey& k) const {
    return std::hash<std::int64_t>{}(k.lat_e7 * 1000003 ^ k.lon_e7);
  }
};

VertexKey key_of(const LatLon& p) {
  return {static_cast<std::int64_t>(std::llround(p.lat * 1e7)),
          static_cast<std::int64_t>(std::llround(p.lon * 1e7))};
}

struct RawLine {
  std::vector<LatLon> pts;
  std::string tag;
};

}  // namespace

Network build_graph(const nlohmann::json& fc, const FunctionalClassMap& classes) {
  Network net;
  if (!fc.is_object() || fc.value("type", "") != "FeatureCollection" || !fc.contains("features"))
    throw DataError("network input is not a GeoJSON FeatureCollection");

  std::vector<RawLine> lines;
  size_t feature_idx = 0;
  for (const auto& feat : fc.at("features")) {
    size_t idx = feature_idx++;
    const auto& geom = feat.value("geometry", nlohmann::json::object());
    std::string gtype = geom.value("type", "");
    std::string tag;
    if (feat.contains("properties") && feat["properties"].is_object())
      tag = feat["properties"].value("highway", "");

    auto add_line = [&](const nlohmann::json& coords) {
      RawLine line;
      line.tag = tag;
      for (const auto& c : coords) {
        if (!c.is_array() || c.size() < 2) {
          net.diagnostics.push_back("feature " + std::to_string(idx) + ": malformed coordinate");
          return;
        }
        line.pts.push_back({c[1].get<double>(), c[0].get<double>()});
      }
      if (line.pts.size() < 2) {
        net.diagnostics.push_back("feature " + std::to_string(idx) +
                                  ": fewer than 2 vertices, rejected");
        return;
      }
      lines.push_back(std::move(line));
    };

    if (gtype == "LineString") {
      add_line(geom.value("coordinates", nlohmann::json::array()));
    } else if (gtype == "MultiLineString") {
      for (const auto& part : geom.value("coordinates", nlohmann::json::array())) add_line(part);
    } else {
      net.diagnostics.push_back("feature " + std::to_string(idx) + ": geometry type '" + gtype +
                                "' skipped");
    }
  }

  // Count vertex usage to find graph nodes: any vertex used more than once,
  // plus every line endpoint.
  std::unordered_map<VertexKey, int, VertexKeyHash> usage;
  for (const auto& line : lines)
    for (const auto& p : line.pts) ++usage[key_of(p)];

  auto is_node = [&](const LatLon& p) { return usage.at(key_of(p)) >= 2; };

  for (const auto& line : lines) {
    size_t piece_start = 0;
    for (size_t i = 1; i < line.pts.size(); ++i) {
      bool cut = (i + 1 == line.pts.size()) || is_node(line.pts[i]);
      if (!cut) continue;
      std::vector<LatLon> piece(line.pts.begin() + piece_start, line.pts.begin() + i + 1);
      piece_start = i;
      double len_m = polyline_length_m(piece);
      if (len_m <= 0.0) {
        net.diagnostics.push_back("zero-length piece dropped (tag '" + line.tag + "')");
        continue;
      }
      AtomicSegment seg;
      seg.id = static_cast<std::int64_t>(net.segments.size());
      seg.polyline = std::move(piece);
      seg.length_miles = len_m / kMetersPerMile;
      seg.raw_tag = line.tag;
      seg.functional_class = classes.classify(line.tag);
      net.segments.push_back(std::move(seg));
    }
  }

  // Splitting must leave no shared vertex strictly inside a segment.
  for (const auto& seg : net.segments)
    for (size_t i = 1; i + 1 < seg.polyline.size(); ++i)
      if (is_node(seg.polyline[i]))
        throw DataError("internal: segment " + std::to_string(seg.id) +
                        " still has an interior intersection");

  return net;
}

Network load_network(const std::string& path, const FunctionalClassMap& classes) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open network file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("network file '" + path + "' is not valid JSON: " + e.what());
  }
  return build_graph(j, classes);
}

// ---- SegmentIndex ----

SegmentIndex::SegmentIndex(const std::vector<AtomicSegment>& segments, double cell_m)
    : segments_(segments) {
  if (segments_.empty()) return;
  double max_lat = -1e9, max_lon = -1e9;
  min_lat_ = 1e9;
  min_lon_ = 1e9;
  for (const auto& s : segments_)
    for (const auto& p : s.polyline) {
      min_lat_ = std::min(min_lat_, p.lat);
      min_lon_ = std::min(min_lon_, p.lon);
      max_lat = std::max(max_lat, p.lat);
      max_lon = std::max(max_lon, p.lon);
    }
  double mid_lat = (min_lat_ + max_lat) / 2;
  double coslat = std::max(0.01, std::cos(mid_lat * kDegToRad));
  cell_deg_lat_ = cell_m / (kEarthRadiusM * kDegToRad);
  cell_deg_lon_ = cell_m / (kEarthRadiusM * coslat * kDegToRad);
  rows_ = static_cast<int>((max_lat - min_lat_) / cell_deg_lat_) + 1;
  cols_ = static_cast<int>((max_lon - min_lon_) / cell_deg_lon_) + 1;
  cells_.assign(static_cast<size_t>(rows_) * cols_, {});

  for (const auto& s : segments_) {
    double lo_lat = 1e9, lo_lon = 1e9, hi_lat = -1e9, hi_lon = -1e9;
    for (const auto& p : s.polyline) {
      lo_lat = std::min(lo_lat, p.lat);
      lo_lon = std::min(lo_lon, p.lon);
      hi_lat = std::max(hi_lat, p.lat);
      hi_lon = std::max(hi_lon, p.lon);
    }
    int r0 = static_cast<int>((lo_lat - min_lat_) / cell_deg_lat_);
    int r1 = static_cast<int>((hi_lat - min_lat_) / cell_deg_lat_);
    int c0 = static_cast<int>((lo_lon - min_lon_) / cell_deg_lon_);
    int c1 = static_cast<int>((hi_lon - min_lon_) / cell_deg_lon_);
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c)
        cells_[static_cast<size_t>(r) * cols_ + c].push_back(static_cast<std::int32_t>(s.id));
  }
}

std::pair<int, int> SegmentIndex::cell_of(const LatLon& p) const {
  int r = static_cast<int>(std::floor((p.lat - min_lat_) / cell_deg_lat_));
  int c = static_cast<int>(std::floor((p.lon - min_lon_) / cell_deg_lon_));
  return {r, c};
}

std::optional<SnapResult> SegmentIndex::snap(const LatLon& p, double max_snap_m) const {
  if (segments_.empty()) throw DataError("snap on an empty segment graph");
  auto [pr, pc] = cell_of(p);
  int reach_r = static_cast<int>(max_snap_m / (cell_deg_lat_ * kEarthRadiusM * kDegToRad)) + 1;
  int reach_c = reach_r;  // cells are square in meters by construction

  std::vector<std::int32_t> candidates;
  for (int r = pr - reach_r; r <= pr + reach_r; ++r) {
    if (r < 0 || r >= rows_) continue;
    for (int c = pc - reach_c; c <= pc + reach_c; ++c) {
      if (c < 0 || c >= cols_) continue;
      const auto& bucket = cells_[static_cast<size_t>(r) * cols_ + c];
      candidates.insert(candidates.end(), bucket.begin(), bucket.end());
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  SnapResult best;
  best.distance_m = std::numeric_limits<double>::infinity();
  for (std::int32_t id : candidates) {  // ascending id: strict < keeps lowest on ties
    double d = point_to_polyline_m(p, segments_[static_cast<size_t>(id)].polyline);
    if (d < best.distance_m) {
      best.distance_m = d;
      best.segment_id = id;
    }
  }
  if (best.segment_id < 0 || best.distance_m > max_snap_m) return std::nullopt;
  return best;
}

// ---- polygons ----

bool polygon_contains(const NamedPolygon& poly, const LatLon& p) {
  bool inside = false;
  size_t n = poly.ring.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const LatLon& a = poly.ring[i];
    const LatLon& b = poly.ring[j];
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      double x = (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon;
      if (p.lon < x) inside = !inside;
    }
  }
  return inside;
}

std::vector<NamedPolygon> parse_polygons(const nlohmann::json& fc) {
  std::vector<NamedPolygon> out;
  if (!fc.is_object() || !fc.contains("features"))
    throw DataError("polygon input is not a GeoJSON FeatureCollection");
  for (const auto& feat : fc.at("features")) {
    const auto& geom = feat.value("geometry", nlohmann::json::object());
    if (geom.value("type", "") != "Polygon") continue;
    NamedPolygon poly;
    if (feat.contains("properties") && feat["properties"].is_object())
      poly.name = feat["properties"].value("name", "");
    const auto& rings = geom.value("coordinates", nlohmann::json::array());
    if (rings.empty()) continue;
    for (const auto& c : rings[0]) poly.ring.push_back({c[1].get<double>(), c[0].get<double>()});
    if (poly.ring.size() >= 3 && poly.ring.front() == poly.ring.back()) poly.ring.pop_back();
    if (poly.ring.size() >= 3) out.push_back(std::move(poly));
  }
  return out;
}

}  // namespace scootsense::geo
