// Regenerates the synthetic two-campus scenario under data/campus/.
// Usage: make_campus [output_dir]

#include <cmath>
#include <cstdio>
#include <string>

#include <nlohmann/json.hpp>

#include "scootsense/io.hpp"
#include "scootsense/metrics.hpp"

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kLat0 = 45.0000;
constexpr double kLon0 = -93.0000;
constexpr double kSpacingM = 110.0;

double dlat(double meters) { return meters / 111194.93; }
double dlon(double meters) { return meters / (111194.93 * std::cos(kLat0 * 3.14159265 / 180)); }

struct Grid {
  double lat0, lon0;
  int rows, cols;
  std::pair<double, double> node(int r, int c) const {
    return {lat0 + dlat(kSpacingM) * r, lon0 + dlon(kSpacingM) * c};
  }
};

void add_line(json& features, const std::string& highway,
              std::initializer_list<std::pair<double, double>> pts) {
  json f;
  f["type"] = "Feature";
  f["properties"] = {{"highway", highway}};
  json coords = json::array();
  for (const auto& [lat, lon] : pts) coords.push_back({lon, lat});
  f["geometry"] = {{"type", "LineString"}, {"coordinates", coords}};
  features.push_back(f);
}

const char* row_class(int r, int rows) {
  if (r == 0 || r == rows - 1) return "primary";
  switch (r % 4) {
    case 1: return "residential";
    case 2: return "footway";
    case 3: return "tertiary";
    default: return "residential";
  }
}

const char* col_class(int c, int cols) {
  if (c == 0 || c == cols - 1) return "secondary";
  switch (c % 4) {
    case 1: return "service";
    case 2: return "path";
    case 3: return "residential";
    default: return "service";
  }
}

void emit_grid(json& features, const Grid& g) {
  for (int r = 0; r < g.rows; ++r)
    for (int c = 0; c + 1 < g.cols; ++c)
      add_line(features, row_class(r, g.rows), {g.node(r, c), g.node(r, c + 1)});
  for (int c = 0; c < g.cols; ++c)
    for (int r = 0; r + 1 < g.rows; ++r)
      add_line(features, col_class(c, g.cols), {g.node(r, c), g.node(r + 1, c)});
}

json campus_polygon(const Grid& g, const std::string& name) {
  double pad_lat = dlat(80), pad_lon = dlon(80);
  auto [lat_a, lon_a] = g.node(0, 0);
  auto [lat_b, lon_b] = g.node(g.rows - 1, g.cols - 1);
  json f;
  f["type"] = "Feature";
  f["properties"] = {{"name", name}};
  f["geometry"] = {{"type", "Polygon"},
                   {"coordinates",
                    {{{lon_a - pad_lon, lat_a - pad_lat},
                      {lon_b + pad_lon, lat_a - pad_lat},
                      {lon_b + pad_lon, lat_b + pad_lat},
                      {lon_a - pad_lon, lat_b + pad_lat},
                      {lon_a - pad_lon, lat_a - pad_lat}}}}};
  return f;
}

}  // namespace

int main(int argc, char** argv) {
  std::string out_dir = argc > 1 ? argv[1] : "data/campus";

  Grid main_campus{kLat0, kLon0, 6, 8};
  // downtown grid sits ~2 km southeast, joined by an arterial connector
  Grid downtown{kLat0 - dlat(2000), kLon0 + dlon(2200), 4, 4};

  json features = json::array();
  emit_grid(features, main_campus);
  emit_grid(features, downtown);
  // connector: main campus SE corner to downtown NW corner, with a bend
  auto a = main_campus.node(0, main_campus.cols - 1);
  auto b = downtown.node(downtown.rows - 1, 0);
  add_line(features, "primary", {a, {b.first, a.second}, b});

  json network;
  network["type"] = "FeatureCollection";
  network["features"] = features;
  scootsense::io::write_file(out_dir + "/network.geojson", network.dump(1) + "\n");

  json campuses;
  campuses["type"] = "FeatureCollection";
  campuses["features"] = {campus_polygon(main_campus, "main"),
                          campus_polygon(downtown, "downtown")};
  scootsense::io::write_file(out_dir + "/campuses.geojson", campuses.dump(1) + "\n");

  // --- POIs and weekly class schedule ---
  using scootsense::metrics::PoiEvent;
  using scootsense::metrics::PoiKind;
  using scootsense::metrics::PoiSession;
  auto at = [](const Grid& g, int r, int c) {
    auto [lat, lon] = g.node(r, c);
    return scootsense::geo::LatLon{lat, lon};
  };
  auto hm = [](int h, int m) { return std::int32_t((h * 60 + m) * 60 * 1000); };

  std::vector<PoiEvent> pois;
  auto add_poi = [&](std::string id, PoiKind kind, scootsense::geo::LatLon loc, double magnitude,
                     std::vector<PoiSession> schedule = {}) {
    PoiEvent p;
    p.poi_id = std::move(id);
    p.kind = kind;
    p.location = loc;
    p.magnitude = magnitude;
    p.schedule = std::move(schedule);
    pois.push_back(std::move(p));
  };

  // generators: student housing, transit, parking
  add_poi("housing_north", PoiKind::Generator, at(main_campus, 5, 1), 10);
  add_poi("housing_east", PoiKind::Generator, at(main_campus, 4, 6), 8);
  add_poi("bus_main", PoiKind::Generator, at(main_campus, 0, 3), 6);
  add_poi("parking_west", PoiKind::Generator, at(main_campus, 2, 0), 5);
  add_poi("housing_downtown", PoiKind::Generator, at(downtown, 3, 3), 5);
  add_poi("bus_downtown", PoiKind::Generator, at(downtown, 0, 1), 4);

  // attractors: classroom buildings with weekly sessions
  std::vector<PoiSession> sched_a, sched_b, sched_c, sched_rec, sched_lib;
  for (int d : {1, 3, 5}) {  // MWF
    sched_a.push_back({d, hm(9, 0), hm(9, 50)});
    sched_a.push_back({d, hm(11, 0), hm(11, 50)});
    sched_a.push_back({d, hm(13, 0), hm(13, 50)});
    sched_b.push_back({d, hm(10, 0), hm(10, 50)});
    sched_b.push_back({d, hm(14, 0), hm(14, 50)});
  }
  for (int d : {2, 4}) {  // TuTh
    sched_a.push_back({d, hm(9, 30), hm(10, 45)});
    sched_a.push_back({d, hm(12, 30), hm(13, 45)});
    sched_a.push_back({d, hm(15, 0), hm(16, 15)});
    sched_b.push_back({d, hm(11, 0), hm(12, 15)});
    sched_b.push_back({d, hm(14, 0), hm(15, 15)});
    sched_b.push_back({d, hm(18, 0), hm(20, 30)});
    sched_c.push_back({d, hm(9, 30), hm(10, 45)});
    sched_c.push_back({d, hm(18, 0), hm(20, 30)});
  }
  for (int d = 1; d <= 5; ++d) sched_lib.push_back({d, hm(12, 0), hm(16, 0)});
  for (int d = 1; d <= 6; ++d) sched_rec.push_back({d, hm(17, 0), hm(19, 0)});

  add_poi("classroom_a", PoiKind::Attractor, at(main_campus, 3, 3), 9, sched_a);
  add_poi("classroom_b", PoiKind::Attractor, at(main_campus, 2, 5), 7, sched_b);
  add_poi("library", PoiKind::Both, at(main_campus, 3, 4), 5, sched_lib);
  add_poi("rec_center", PoiKind::Both, at(main_campus, 1, 2), 4, sched_rec);
  add_poi("classroom_downtown", PoiKind::Attractor, at(downtown, 1, 2), 6, sched_c);

  std::ostringstream poi_csv;
  scootsense::io::write_poi_csv(poi_csv, pois);
  scootsense::io::write_file(out_dir + "/pois.csv", poi_csv.str());

  scootsense::io::write_file(out_dir + "/provider_rules.ini",
                             "# Ordered fingerprint rules: first match wins.\n"
                             "[rule]\n"
                             "provider = bird\n"
                             "match = regex\n"
                             "pattern = Bird[- ][A-Z0-9]+\n"
                             "\n"
                             "[rule]\n"
                             "provider = lime\n"
                             "match = substring\n"
                             "pattern = lime\n"
                             "\n"
                             "[rule]\n"
                             "provider = blueduck\n"
                             "match = substring\n"
                             "pattern = blueduck\n"
                             "\n"
                             "[baselines]\n"
                             "bird = -60.5\n"
                             "lime = -46.25\n"
                             "blueduck = -60.5  # same vehicle hardware class as Bird\n"
                             "default = -60.5\n");

  ordered_json pipeline;
  pipeline["network"] = "network.geojson";
  pipeline["schedule"] = "pois.csv";
  pipeline["provider_rules"] = "provider_rules.ini";
  pipeline["campus_polygons"] = "campuses.geojson";
  pipeline["out_dir"] = "out";
  pipeline["timezone"] = "-05:00";
  pipeline["detector"] = {{"window_s", 1.0},
                          {"overlap", 0.8},
                          {"min_packets", 4},
                          {"merge_gap_s", 300.0},
                          {"max_per_day", 4}};
  pipeline["snap_max_m"] = 25.0;
  pipeline["path_loss_exponent"] = 2.0;
  pipeline["split_rule"] = "floor";
  pipeline["mem_mode"] = "mean_of_ratios";
  pipeline["pem_formula"] = "mem_share";
  ordered_json sim;
  sim["seed"] = 2026;
  sim["n_pedestrians"] = 20;
  sim["n_scooters"] = 50;
  sim["parked_fraction"] = 0.5;
  sim["duration_days"] = 7;
  sim["start_date"] = "2026-04-06";
  sim["timezone"] = "-05:00";
  sim["advertisement_interval_s"] = 0.25;
  sim["rssi_noise_sigma_db"] = 4.0;
  sim["path_loss_exponent"] = 2.0;
  sim["reception_curve"] = {{0.0, 0.95}, {25.0, 0.9}, {45.0, 0.15}, {60.0, 0.05}, {80.0, 0.0}};
  sim["attendance_scale"] = 0.9;
  sim["scooter_trip_scale"] = 0.35;
  sim["answer_fraction"] = 0.85;
  sim["startle_fraction"] = 0.6;
  sim["startle_delta_bpm"] = 20.0;
  pipeline["sim"] = sim;
  scootsense::io::write_file(out_dir + "/pipeline.json", pipeline.dump(2) + "\n");

  std::printf("wrote scenario to %s\n", out_dir.c_str());
  return 0;
}
