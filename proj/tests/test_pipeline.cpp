#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scootsense/geo.hpp"
#include "scootsense/io.hpp"
#include "scootsense/pipeline.hpp"

using namespace scootsense;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Scenario {
  fs::path dir;

  explicit Scenario(const std::string& name) {
    dir = fs::temp_directory_path() / ("scootsense_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scenario() { fs::remove_all(dir); }

  std::string path(const std::string& name) const { return (dir / name).string(); }

  void write_minimal_inputs() {
    json street = {{"type", "Feature"},
                   {"properties", {{"highway", "footway"}}},
                   {"geometry",
                    {{"type", "LineString"},
                     {"coordinates", {{-93.0, 45.0}, {-92.9957, 45.0}}}}}};  // ~340 m
    json fc = {{"type", "FeatureCollection"}, {"features", {street}}};
    io::write_file(path("network.geojson"), fc.dump());

    std::ostringstream pois;
    pois << "poi_id,kind,lat,lon,magnitude,day_of_week,start,end\n";
    pois << "home,Generator,45.0,-93.0,4,,,\n";
    for (const char* day : {"Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"})
      pois << "dest,Attractor,45.0,-92.9957,4," << day << ",10:00,15:00\n";
    io::write_file(path("pois.csv"), pois.str());

    json cfg;
    cfg["network"] = "network.geojson";
    cfg["schedule"] = "pois.csv";
    cfg["out_dir"] = "out";
    cfg["timezone"] = "-05:00";
    cfg["sim"] = {{"seed", 5},          {"n_pedestrians", 2},
                  {"n_scooters", 3},    {"parked_fraction", 1.0},
                  {"duration_days", 1}, {"start_date", "2026-04-06"},
                  {"timezone", "-05:00"}, {"active_start", "06:00"},
                  {"active_end", "16:00"}};
    io::write_file(path("pipeline.json"), cfg.dump(2));
  }
};

int cli(std::initializer_list<std::string> args) {
  return pipeline::run_cli(std::vector<std::string>(args));
}

}  // namespace

TEST_CASE("pipeline config parsing and path resolution") {
  Scenario sc("config");
  sc.write_minimal_inputs();
  auto cfg = pipeline::PipelineConfig::from_file(sc.path("pipeline.json"));
  CHECK(cfg.network_path == sc.path("network.geojson"));
  CHECK(cfg.out_dir == sc.path("out"));
  CHECK(cfg.receptions_path == sc.path("out/receptions.jsonl"));
  CHECK(cfg.detector.window_length_s == 1.0);

  io::write_file(sc.path("bad.json"), "{ not json");
  CHECK_THROWS_AS(pipeline::PipelineConfig::from_file(sc.path("bad.json")), ConfigError);
  CHECK_THROWS_AS(pipeline::PipelineConfig::from_file(sc.path("nope.json")), ConfigError);
}

TEST_CASE("simulate -> detect -> analyze -> score smoke run") {
  Scenario sc("smoke");
  sc.write_minimal_inputs();
  std::string cfg = sc.path("pipeline.json");

  CHECK(cli({"--config", cfg, "simulate"}) == 0);
  CHECK(fs::exists(sc.path("out/receptions.jsonl")));
  CHECK(fs::exists(sc.path("out/feedback.csv")));
  CHECK(fs::exists(sc.path("out/truth.csv")));

  CHECK(cli({"--config", cfg, "detect"}) == 0);
  CHECK(fs::exists(sc.path("out/encounters.csv")));
  {
    std::ifstream in(sc.path("out/encounters.csv"));
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "participant_id,device_id,provider,start_iso,end_iso,packet_count,max_rssi_db,lat,lon");
  }

  CHECK(cli({"--config", cfg, "filter-feedback"}) == 0);
  CHECK(fs::exists(sc.path("out/feedback_filtered.csv")));

  CHECK(cli({"--config", cfg, "analyze"}) == 0);
  for (const char* name :
       {"metrics.csv", "hist_space_ep.csv", "hist_time_ep.csv", "hist_spacetime_ep.csv",
        "histogram_summary.json", "rssi_groups.csv", "schedule_correlation.json",
        "heatmap.geojson", "direction_matrix.json", "segments.csv", "analyze_summary.json"})
    CHECK_MESSAGE(fs::exists(sc.path(std::string("out/") + name)), name);

  // PEM columns sum to 100 +/- 0.2 when encounters exist
  std::ifstream metrics_in(sc.path("out/metrics.csv"));
  std::string line;
  std::getline(metrics_in, line);  // header
  double pem_p_sum = 0;
  bool has_classes = false;
  while (std::getline(metrics_in, line)) {
    auto f = io::split_csv_line(line);
    if (f[0] == "Total" || f[0] == "Unmatched") continue;
    has_classes = true;
    if (!f[5].empty()) pem_p_sum += io::parse_double(f[5]);
  }
  CHECK(has_classes);
  std::ifstream enc_in(sc.path("out/encounters.csv"));
  auto encounters = io::read_encounters_csv(enc_in);
  if (!encounters.empty()) CHECK(std::abs(pem_p_sum - 100.0) <= 0.2);

  auto summary = io::read_json_file(sc.path("out/analyze_summary.json"));
  CHECK(summary.at("zone_universe").get<std::int64_t>() ==
        summary.at("segments").get<std::int64_t>() * 68);

  CHECK(cli({"--config", cfg, "score"}) == 0);
  CHECK(fs::exists(sc.path("out/score.json")));
}

TEST_CASE("missing input paths exit with code 2") {
  Scenario sc("missing");
  sc.write_minimal_inputs();
  json cfg;
  cfg["network"] = "does_not_exist.geojson";
  cfg["schedule"] = "pois.csv";
  cfg["out_dir"] = "out";
  cfg["sim"] = {{"seed", 1}};
  io::write_file(sc.path("broken.json"), cfg.dump());
  CHECK(cli({"--config", sc.path("broken.json"), "simulate"}) == 2);
  CHECK(cli({"--config", sc.path("nonexistent_config.json"), "simulate"}) == 2);
}

TEST_CASE("empty receptions file detects zero encounters with exit 0") {
  Scenario sc("empty");
  sc.write_minimal_inputs();
  io::write_file(sc.path("out/receptions.jsonl"), "");
  CHECK(cli({"--config", sc.path("pipeline.json"), "detect"}) == 0);
  std::ifstream in(sc.path("out/encounters.csv"));
  std::string header, extra;
  CHECK(std::getline(in, header));
  CHECK(!std::getline(in, extra));
}

TEST_CASE("malformed reception lines exit with code 1") {
  Scenario sc("malformed");
  sc.write_minimal_inputs();
  io::write_file(sc.path("out/receptions.jsonl"), "this is not json\n");
  CHECK(cli({"--config", sc.path("pipeline.json"), "detect"}) == 1);
}

TEST_CASE("detector flags override the config") {
  Scenario sc("flags");
  sc.write_minimal_inputs();
  // an impossible combination rejected at validation time -> config error
  CHECK(cli({"--config", sc.path("pipeline.json"), "--overlap", "1.5", "detect"}) == 2);
}

TEST_CASE("unknown timezone exits with a config error") {
  Scenario sc("tz");
  sc.write_minimal_inputs();
  CHECK(cli({"--config", sc.path("pipeline.json"), "--timezone", "Mars/Olympus", "simulate"}) == 2);
}
