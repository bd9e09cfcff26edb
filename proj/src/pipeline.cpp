#include "scootsense/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "scootsense/errors.hpp"
#include "scootsense/feedback.hpp"
#include "scootsense/geo.hpp"
#include "scootsense/io.hpp"
#include "scootsense/sim.hpp"

namespace scootsense::pipeline {

namespace fs = std::filesystem;

namespace {

std::string resolve(const std::string& base, const std::string& path) {
  if (path.empty()) return path;
  fs::path p(path);
  if (p.is_absolute()) return path;
  return (fs::path(base) / p).lexically_normal().string();
}

std::string out_path(const PipelineConfig& c, const std::string& name) {
  return (fs::path(c.out_dir) / name).string();
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j, const std::string& base_dir) {
  PipelineConfig c;
  c.network_path = resolve(base_dir, j.value("network", ""));
  c.schedule_path = resolve(base_dir, j.value("schedule", ""));
  c.provider_rules_path = resolve(base_dir, j.value("provider_rules", ""));
  c.campus_polygons_path = resolve(base_dir, j.value("campus_polygons", ""));
  c.receptions_path = resolve(base_dir, j.value("receptions", ""));
  c.feedback_path = resolve(base_dir, j.value("feedback", ""));
  c.truth_path = resolve(base_dir, j.value("truth", ""));
  c.encounters_path = resolve(base_dir, j.value("encounters", ""));
  c.out_dir = resolve(base_dir, j.value("out_dir", "out"));
  c.timezone = j.value("timezone", c.timezone);

  if (j.contains("detector")) {
    const auto& d = j.at("detector");
    c.detector.window_length_s = d.value("window_s", c.detector.window_length_s);
    c.detector.overlap_fraction = d.value("overlap", c.detector.overlap_fraction);
    c.detector.min_packets_per_window = d.value("min_packets", c.detector.min_packets_per_window);
    c.detector.merge_gap_s = d.value("merge_gap_s", c.detector.merge_gap_s);
    c.detector.max_encounters_per_scooter_per_day =
        d.value("max_per_day", c.detector.max_encounters_per_scooter_per_day);
  }
  c.snap_max_m = j.value("snap_max_m", c.snap_max_m);
  c.path_loss_exponent = j.value("path_loss_exponent", c.path_loss_exponent);

  std::string split = j.value("split_rule", "floor");
  if (split == "floor")
    c.split_rule = bins::HalfSplitRule::Floor;
  else if (split == "ceil")
    c.split_rule = bins::HalfSplitRule::Ceil;
  else
    throw ConfigError("config: split_rule must be floor or ceil");

  std::string memmode = j.value("mem_mode", "mean_of_ratios");
  if (memmode == "mean_of_ratios")
    c.mem_mode = metrics::MemMode::MeanOfRatios;
  else if (memmode == "ratio_of_totals")
    c.mem_mode = metrics::MemMode::RatioOfTotals;
  else
    throw ConfigError("config: mem_mode must be mean_of_ratios or ratio_of_totals");

  std::string pemf = j.value("pem_formula", "mem_share");
  if (pemf == "mem_share")
    c.pem_formula = PemFormula::MemShare;
  else if (pemf == "tes_share")
    c.pem_formula = PemFormula::TesShare;
  else
    throw ConfigError("config: pem_formula must be mem_share or tes_share");

  if (j.contains("sim")) c.sim = j.at("sim");
  c.apply_output_defaults();
  return c;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return from_json(j, fs::path(path).parent_path().string());
}

void PipelineConfig::apply_output_defaults() {
  if (receptions_path.empty()) receptions_path = out_path(*this, "receptions.jsonl");
  if (feedback_path.empty()) feedback_path = out_path(*this, "feedback.csv");
  if (truth_path.empty()) truth_path = out_path(*this, "truth.csv");
  if (encounters_path.empty()) encounters_path = out_path(*this, "encounters.csv");
}

namespace {

ble::ProviderTable load_providers(const PipelineConfig& c) {
  if (c.provider_rules_path.empty()) return ble::ProviderTable();
  return ble::ProviderTable::from_ini_file(c.provider_rules_path);
}

void require_path(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("config: missing ") + what + " path");
  if (!fs::exists(path))
    throw ConfigError(std::string(what) + " file does not exist: " + path);
}

std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace

void cmd_simulate(const PipelineConfig& config) {
  require_path(config.network_path, "network");
  require_path(config.schedule_path, "schedule");
  sim::SimConfig sc = sim::SimConfig::from_json(config.sim);
  if (!config.sim.contains("timezone")) sc.timezone = config.timezone;

  auto network = geo::load_network(config.network_path);
  std::ifstream poi_in(config.schedule_path);
  auto pois = io::read_poi_csv(poi_in);
  auto providers = load_providers(config);

  auto result = sim::simulate(sc, network, pois, providers);

  {
    std::ostringstream ss;
    io::write_receptions_jsonl(ss, result.receptions);
    io::write_file(out_path(config, "receptions.jsonl"), ss.str());
  }
  {
    std::ostringstream ss;
    io::write_feedback_csv(ss, result.feedback);
    io::write_file(out_path(config, "feedback.csv"), ss.str());
  }
  {
    std::ostringstream ss;
    io::write_truth_csv(ss, result.truth);
    io::write_file(out_path(config, "truth.csv"), ss.str());
  }
  nlohmann::ordered_json summary;
  summary["tool"] = kToolVersion;
  summary["receptions"] = result.stats.receptions;
  summary["feedbacks"] = result.stats.feedbacks;
  summary["moving_feedbacks"] = result.stats.moving_feedbacks;
  summary["prompts"] = result.stats.prompts;
  summary["truth_encounters"] = result.stats.truth_encounters;
  summary["seed"] = sc.seed;
  io::write_file(out_path(config, "sim_summary.json"), json_text(summary));

  std::cout << "simulate: " << result.stats.receptions << " receptions, "
            << result.stats.feedbacks << " feedbacks, " << result.stats.truth_encounters
            << " truth encounters -> " << config.out_dir << "\n";
}

void cmd_detect(const PipelineConfig& config) {
  require_path(config.receptions_path, "receptions");
  auto providers = load_providers(config);
  std::ifstream in(config.receptions_path);
  if (!in) throw ConfigError("cannot open receptions file: " + config.receptions_path);
  auto receptions = io::read_receptions_jsonl(in);
  auto streams = detect::partition_by_receiver(receptions);
  auto result = detect::detect_corpus(streams, config.detector, providers);

  {
    std::ostringstream ss;
    io::write_encounters_csv(ss, result.encounters);
    io::write_file(out_path(config, "encounters.csv"), ss.str());
  }
  nlohmann::ordered_json summary;
  summary["tool"] = kToolVersion;
  summary["unique_scooters_seen"] = result.summary.unique_scooters_seen;
  summary["scooters_with_encounters"] = result.summary.scooters_with_encounters;
  summary["total_encounters"] = result.summary.total_encounters;
  io::write_file(out_path(config, "detect_summary.json"), json_text(summary));

  std::cout << "detect: " << result.summary.total_encounters << " encounters with "
            << result.summary.scooters_with_encounters << " of "
            << result.summary.unique_scooters_seen << " scooters -> "
            << out_path(config, "encounters.csv") << "\n";
}

void cmd_filter_feedback(const PipelineConfig& config) {
  require_path(config.feedback_path, "feedback");
  std::ifstream in(config.feedback_path);
  auto records = io::read_feedback_csv(in);
  auto filtered = fb::filter_study_window(records);
  std::ostringstream ss;
  io::write_feedback_csv(ss, filtered);
  io::write_file(out_path(config, "feedback_filtered.csv"), ss.str());
  std::cout << "filter-feedback: " << filtered.size() << " of " << records.size()
            << " records kept -> " << out_path(config, "feedback_filtered.csv") << "\n";
}

namespace {

struct PlacedSet {
  std::vector<bins::PlacedEncounter> placed;
  std::int64_t unmatched = 0;
  std::int64_t out_of_window = 0;
};

PlacedSet place_points(const std::vector<std::optional<geo::LatLon>>& points,
                       const std::vector<Timestamp>& times, const geo::SegmentIndex& index,
                       double snap_max_m) {
  PlacedSet set;
  set.placed.reserve(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    bins::PlacedEncounter pe;
    if (points[i]) {
      auto snapped = index.snap(*points[i], snap_max_m);
      if (snapped) pe.segment_id = snapped->segment_id;
    }
    if (pe.segment_id == bins::kUnmatchedSegment) ++set.unmatched;
    pe.bin = bins::bin_time(times[i]);
    if (!pe.bin) ++set.out_of_window;
    set.placed.push_back(pe);
  }
  return set;
}

std::string class_label(geo::FunctionalClass c) {
  switch (c) {
    case geo::FunctionalClass::Arterial: return "Arterial Streets";
    case geo::FunctionalClass::Collector: return "Collector Streets";
    case geo::FunctionalClass::Local: return "Local Streets";
    case geo::FunctionalClass::SharedUsePath: return "Shared-use Paths";
    case geo::FunctionalClass::Sidewalk: return "Sidewalks";
    case geo::FunctionalClass::Other: return "Other/Unclassified";
  }
  return "Other/Unclassified";
}

std::string fmt1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

void write_histogram_csv(const PipelineConfig& config, const std::string& name,
                         const bins::FrequencyDistribution& fd) {
  std::ostringstream ss;
  ss << "key,count\n";
  for (const auto& [key, count] : fd.count_per_key) ss << key << ',' << count << '\n';
  io::write_file(out_path(config, name), ss.str());
}

nlohmann::ordered_json histogram_summary(const bins::FrequencyDistribution& fd) {
  nlohmann::ordered_json j;
  j["universe"] = fd.universe;
  j["nonzero_keys"] = static_cast<std::int64_t>(fd.count_per_key.size());
  j["zero_keys"] = fd.universe - static_cast<std::int64_t>(fd.count_per_key.size());
  j["encounters_counted"] = fd.counted;
  j["encounters_excluded"] = fd.excluded;
  j["max_count"] = fd.max_count();
  j["p50"] = fd.percentile(0.50);
  j["p90"] = fd.percentile(0.90);
  j["p95"] = fd.percentile(0.95);
  j["p99"] = fd.percentile(0.99);
  nlohmann::ordered_json hist;
  for (const auto& [count, keys] : fd.count_histogram())
    hist[std::to_string(count)] = keys;
  j["count_histogram"] = hist;
  return j;
}

}  // namespace

void cmd_analyze(const PipelineConfig& config) {
  require_path(config.network_path, "network");
  require_path(config.encounters_path, "encounters");

  auto network = geo::load_network(config.network_path);
  if (network.segments.empty()) throw DataError("analyze: network produced no segments");
  geo::SegmentIndex index(network.segments);
  const auto n_segments = static_cast<std::int64_t>(network.segments.size());

  // E_P: predicted encounters from the detector.
  std::ifstream enc_in(config.encounters_path);
  auto encounters = io::read_encounters_csv(enc_in);

  // E_O: in-window Bird/Lime feedback.
  std::vector<fb::FeedbackRecord> feedback_all, feedback;
  if (!config.feedback_path.empty() && fs::exists(config.feedback_path)) {
    std::ifstream fb_in(config.feedback_path);
    feedback_all = io::read_feedback_csv(fb_in);
    feedback = fb::filter_study_window(feedback_all);
  }

  std::vector<std::optional<geo::LatLon>> ep_points;
  std::vector<Timestamp> ep_times;
  for (const auto& e : encounters) {
    ep_points.push_back(e.gps);
    ep_times.push_back(e.start);
  }
  auto ep = place_points(ep_points, ep_times, index, config.snap_max_m);

  std::vector<std::optional<geo::LatLon>> eo_points;
  std::vector<Timestamp> eo_times;
  for (const auto& r : feedback) {
    eo_points.push_back(r.gps);
    eo_times.push_back(r.timestamp);
  }
  auto eo = place_points(eo_points, eo_times, index, config.snap_max_m);

  // in-window placed sets for the spatial table (paper reports 06:00-23:00)
  auto in_window = [](const PlacedSet& set) {
    std::vector<bins::PlacedEncounter> out;
    for (const auto& p : set.placed)
      if (p.bin) out.push_back(p);
    return out;
  };
  auto ep_window = in_window(ep);
  auto eo_window = in_window(eo);

  auto tes_p = metrics::tes(ep_window, network.segments);
  auto tes_o = metrics::tes(eo_window, network.segments);
  auto mem_p = metrics::mem(tes_p, network.segments, config.mem_mode);
  auto mem_o = metrics::mem(tes_o, network.segments, config.mem_mode);

  std::map<geo::FunctionalClass, double> pem_p, pem_o;
  bool pem_defined = true;
  try {
    pem_p = config.pem_formula == PemFormula::MemShare ? metrics::pem(mem_p.per_class)
                                                       : metrics::pem_tes_share(tes_p);
    pem_o = config.pem_formula == PemFormula::MemShare ? metrics::pem(mem_o.per_class)
                                                       : metrics::pem_tes_share(tes_o);
  } catch (const DataError&) {
    pem_defined = false;  // no encounters at all
  }

  // metrics.csv mirrors the functional-classification table layout
  {
    std::ostringstream ss;
    ss << "class,TES_P,TES_O,MEM_P,MEM_O,PEM_P,PEM_O\n";
    double mem_sum_p = 0, mem_sum_o = 0;
    int mem_n = 0;
    for (int c = 0; c < geo::kFunctionalClassCount; ++c) {
      auto cls = static_cast<geo::FunctionalClass>(c);
      if (!mem_p.per_class.count(cls)) continue;
      ss << class_label(cls) << ',' << tes_p.per_class.at(cls) << ',' << tes_o.per_class.at(cls)
         << ',' << fmt1(mem_p.per_class.at(cls)) << ',' << fmt1(mem_o.per_class.at(cls)) << ','
         << (pem_defined ? fmt1(pem_p.at(cls)) : "") << ','
         << (pem_defined ? fmt1(pem_o.at(cls)) : "") << '\n';
      mem_sum_p += mem_p.per_class.at(cls);
      mem_sum_o += mem_o.per_class.at(cls);
      ++mem_n;
    }
    if (ep.unmatched + eo.unmatched > 0)
      ss << "Unmatched," << tes_p.unmatched << ',' << tes_o.unmatched << ",,,,\n";
    if (mem_n > 0)
      ss << "Total," << tes_p.total_matched << ',' << tes_o.total_matched << ','
         << fmt1(mem_sum_p / mem_n) << ',' << fmt1(mem_sum_o / mem_n) << ','
         << (pem_defined ? "100.0" : "") << ',' << (pem_defined ? "100.0" : "") << '\n';
    io::write_file(out_path(config, "metrics.csv"), ss.str());
  }

  // frequency distributions + high/low split + RSSI comparison
  nlohmann::ordered_json hists;
  for (auto keying : {bins::Keying::Space, bins::Keying::Time, bins::Keying::SpaceTime}) {
    const char* kname = keying == bins::Keying::Space
                            ? "space"
                            : (keying == bins::Keying::Time ? "time" : "spacetime");
    auto fd_p = bins::frequency_distribution(ep.placed, keying, n_segments);
    auto fd_o = bins::frequency_distribution(eo.placed, keying, n_segments);
    write_histogram_csv(config, std::string("hist_") + kname + "_ep.csv", fd_p);
    write_histogram_csv(config, std::string("hist_") + kname + "_eo.csv", fd_o);
    hists[std::string(kname) + "_ep"] = histogram_summary(fd_p);
    hists[std::string(kname) + "_eo"] = histogram_summary(fd_o);
  }
  io::write_file(out_path(config, "histogram_summary.json"), json_text(hists));

  {
    std::ostringstream ss;
    ss << "keying,provider,group,n,mean,median,q1,q3\n";
    for (auto keying : {bins::Keying::Space, bins::Keying::Time, bins::Keying::SpaceTime}) {
      const char* kname = keying == bins::Keying::Space
                              ? "space"
                              : (keying == bins::Keying::Time ? "time" : "spacetime");
      auto split = bins::split_high_low(ep.placed, keying, n_segments, config.split_rule);
      auto rows = metrics::rssi_group_comparison(encounters, split.encounter_group);
      for (const auto& row : rows) {
        ss << kname << ',' << ble::to_string(row.provider) << ','
           << (row.group == bins::Group::High ? "high" : "low") << ',';
        if (row.stats) {
          ss << row.stats->n << ',' << io::format_double(row.stats->mean) << ','
             << io::format_double(row.stats->median) << ',' << io::format_double(row.stats->q1)
             << ',' << io::format_double(row.stats->q3);
        } else {
          ss << "0,,,,";
        }
        ss << '\n';
      }
    }
    io::write_file(out_path(config, "rssi_groups.csv"), ss.str());
  }

  // schedule correlation (E_P against the class schedule)
  nlohmann::ordered_json corr;
  if (!config.schedule_path.empty() && fs::exists(config.schedule_path)) {
    std::ifstream poi_in(config.schedule_path);
    auto pois = io::read_poi_csv(poi_in);
    auto hourly = metrics::hourly_encounter_counts(encounters);
    auto sc = metrics::schedule_correlation(hourly, pois);
    corr["spearman"] = sc.spearman ? nlohmann::json(*sc.spearman) : nlohmann::json(nullptr);
    corr["defined"] = sc.spearman.has_value();
    auto rows = nlohmann::json::array();
    for (const auto& row : sc.rows)
      rows.push_back({{"hour_of_week", row.hour_of_week},
                      {"encounters", row.encounters},
                      {"classes", row.classes}});
    corr["bins"] = rows;
    io::write_file(out_path(config, "schedule_correlation.json"), json_text(corr));
  }

  // heat-map export: per-segment counts with sparse per-bin breakdowns
  {
    std::vector<geo::NamedPolygon> campuses;
    if (!config.campus_polygons_path.empty() && fs::exists(config.campus_polygons_path)) {
      campuses = geo::parse_polygons(io::read_json_file(config.campus_polygons_path));
    }
    std::vector<std::map<int, std::int64_t>> bins_p(network.segments.size()),
        bins_o(network.segments.size());
    for (const auto& p : ep_window)
      if (p.segment_id >= 0) ++bins_p[static_cast<size_t>(p.segment_id)][p.bin->index];
    for (const auto& p : eo_window)
      if (p.segment_id >= 0) ++bins_o[static_cast<size_t>(p.segment_id)][p.bin->index];

    nlohmann::ordered_json fc;
    fc["type"] = "FeatureCollection";
    auto features = nlohmann::ordered_json::array();
    for (const auto& seg : network.segments) {
      auto i = static_cast<size_t>(seg.id);
      std::int64_t tp = tes_p.per_segment[i], to = tes_o.per_segment[i];
      if (tp + to == 0) continue;
      nlohmann::ordered_json f;
      f["type"] = "Feature";
      nlohmann::ordered_json geom;
      geom["type"] = "LineString";
      auto coords = nlohmann::json::array();
      for (const auto& pt : seg.polyline) coords.push_back({pt.lon, pt.lat});
      geom["coordinates"] = coords;
      f["geometry"] = geom;
      nlohmann::ordered_json props;
      props["segment_id"] = seg.id;
      props["functional_class"] = std::string(geo::to_string(seg.functional_class));
      props["tes_p"] = tp;
      props["tes_o"] = to;
      nlohmann::ordered_json bp, bo;
      for (const auto& [bin, count] : bins_p[i]) bp[std::to_string(bin)] = count;
      for (const auto& [bin, count] : bins_o[i]) bo[std::to_string(bin)] = count;
      props["bins_p"] = bp;
      props["bins_o"] = bo;
      if (!campuses.empty()) {
        geo::LatLon mid = seg.polyline[seg.polyline.size() / 2];
        std::string campus;
        for (const auto& poly : campuses)
          if (geo::polygon_contains(poly, mid)) {
            campus = poly.name;
            break;
          }
        props["campus"] = campus;
      }
      f["properties"] = props;
      features.push_back(f);
    }
    fc["features"] = features;
    io::write_file(out_path(config, "heatmap.geojson"), fc.dump(1) + "\n");
  }

  // direction matrix + heart-rate startle analysis over E_O
  {
    auto matrix = fb::summarize_direction_matrix(feedback);
    nlohmann::ordered_json j;
    j["stationary"] = matrix.stationary;
    j["moving_front_toward"] = matrix.front_toward;
    j["moving_front_away"] = matrix.front_away;
    j["moving_behind_toward"] = matrix.behind_toward;
    j["moving_behind_away"] = matrix.behind_away;
    j["moving_incomplete"] = matrix.moving_incomplete;
    j["total"] = matrix.total();
    io::write_file(out_path(config, "direction_matrix.json"), json_text(j));
  }

  nlohmann::ordered_json startle;
  if (!config.receptions_path.empty() && fs::exists(config.receptions_path)) {
    std::ifstream rec_in(config.receptions_path);
    auto receptions = io::read_receptions_jsonl(rec_in);
    std::map<std::string, std::vector<double>> hr_samples;
    for (const auto& r : receptions)
      if (r.heart_rate_bpm) hr_samples[r.receiver_id].push_back(*r.heart_rate_bpm);
    std::map<std::string, fb::HeartRateProfile> profiles;
    for (auto& [pid, samples] : hr_samples) {
      auto prof = fb::build_profile(samples);
      prof.participant_id = pid;
      profiles[pid] = prof;
    }
    std::int64_t moving_total = 0, moving_elevated = 0, stationary_elevated = 0,
                 stationary_total = 0, unknown = 0;
    for (const auto& rec : feedback) {
      auto it = profiles.find(rec.participant_id);
      if (it == profiles.end()) {
        ++unknown;
        continue;
      }
      auto cls = fb::classify_startle(rec, it->second);
      if (cls == fb::Startle::Unknown) {
        ++unknown;
        continue;
      }
      if (rec.q_moving) {
        ++moving_total;
        if (cls == fb::Startle::Elevated) ++moving_elevated;
      } else {
        ++stationary_total;
        if (cls == fb::Startle::Elevated) ++stationary_elevated;
      }
    }
    startle["participants_profiled"] = static_cast<std::int64_t>(profiles.size());
    startle["moving_total"] = moving_total;
    startle["moving_elevated"] = moving_elevated;
    startle["moving_elevated_fraction"] =
        moving_total > 0 ? nlohmann::json(static_cast<double>(moving_elevated) /
                                          static_cast<double>(moving_total))
                         : nlohmann::json(nullptr);
    startle["stationary_total"] = stationary_total;
    startle["stationary_elevated"] = stationary_elevated;
    startle["unclassified"] = unknown;
    io::write_file(out_path(config, "startle.json"), json_text(startle));
  }

  {
    std::ostringstream ss;
    io::write_segments_csv(ss, network.segments);
    io::write_file(out_path(config, "segments.csv"), ss.str());
  }

  std::int64_t zone_universe = n_segments * bins::kQuarterSlotsPerDay;
  nlohmann::ordered_json summary;
  summary["tool"] = kToolVersion;
  summary["segments"] = n_segments;
  summary["zone_universe"] = zone_universe;
  summary["encounters_ep"] = static_cast<std::int64_t>(encounters.size());
  summary["encounters_eo"] = static_cast<std::int64_t>(feedback.size());
  summary["feedback_raw"] = static_cast<std::int64_t>(feedback_all.size());
  summary["ep_unmatched"] = ep.unmatched;
  summary["eo_unmatched"] = eo.unmatched;
  summary["ep_out_of_window"] = ep.out_of_window;
  summary["eo_out_of_window"] = eo.out_of_window;
  io::write_file(out_path(config, "analyze_summary.json"), json_text(summary));

  std::cout << "analyze: " << encounters.size() << " E_P / " << feedback.size()
            << " E_O over " << n_segments << " segments; zone universe = " << n_segments << " x "
            << bins::kQuarterSlotsPerDay << " = " << zone_universe << "\n";
  if (encounters.empty()) std::cout << "warning: no encounters; metrics are all zero\n";
}

void cmd_score(const PipelineConfig& config) {
  require_path(config.truth_path, "truth");
  require_path(config.encounters_path, "encounters");
  std::ifstream truth_in(config.truth_path);
  auto truth = io::read_truth_csv(truth_in);
  std::ifstream enc_in(config.encounters_path);
  auto detected = io::read_encounters_csv(enc_in);
  auto score = sim::score_detector(truth, detected);

  nlohmann::ordered_json j;
  j["tool"] = kToolVersion;
  j["precision"] = score.precision;
  j["recall"] = score.recall;
  j["truth_total"] = score.truth_total;
  j["detected_total"] = score.detected_total;
  j["matched_truth"] = score.matched_truth;
  j["matched_detected"] = score.matched_detected;
  j["precision_by_convention"] = score.precision_by_convention;
  j["recall_by_convention"] = score.recall_by_convention;
  io::write_file(out_path(config, "score.json"), json_text(j));

  std::cout << "score: precision=" << score.precision << " recall=" << score.recall << " ("
            << score.matched_truth << "/" << score.truth_total << " truth matched)\n";
}

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"e-scooter/pedestrian encounter detection and analytics"};
  app.require_subcommand(1);

  std::string config_path, out_dir, timezone;
  std::optional<std::uint64_t> seed;
  std::optional<double> window_s, overlap, merge_gap_s;
  std::optional<int> min_packets, max_per_day;

  app.add_option("--config", config_path, "pipeline config JSON")->required();
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--seed", seed, "simulation seed (overrides config)");
  app.add_option("--timezone", timezone, "IANA name or fixed offset (overrides config)");
  app.add_option("--window-s", window_s, "detector window length, seconds");
  app.add_option("--overlap", overlap, "detector window overlap fraction");
  app.add_option("--min-packets", min_packets, "packets per window threshold");
  app.add_option("--merge-gap-s", merge_gap_s, "encounter merge gap, seconds");
  app.add_option("--max-per-day", max_per_day, "per-scooter daily encounter cap");

  auto* sub_sim = app.add_subcommand("simulate", "run the synthetic field generator");
  auto* sub_detect = app.add_subcommand("detect", "detect encounters in a reception log");
  auto* sub_filter = app.add_subcommand("filter-feedback", "apply the study-window filter");
  auto* sub_analyze = app.add_subcommand("analyze", "spatio-temporal safety analytics");
  auto* sub_score = app.add_subcommand("score", "score detections against ground truth");

  std::vector<const char*> argv;
  argv.push_back("scootsense");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    PipelineConfig config = PipelineConfig::from_file(config_path);
    if (!out_dir.empty()) {
      config.out_dir = out_dir;
      config.receptions_path.clear();
      config.feedback_path.clear();
      config.truth_path.clear();
      config.encounters_path.clear();
      config.apply_output_defaults();
    }
    if (!timezone.empty()) config.timezone = timezone;
    if (seed) config.sim["seed"] = *seed;
    if (!timezone.empty()) config.sim["timezone"] = timezone;
    if (window_s) config.detector.window_length_s = *window_s;
    if (overlap) config.detector.overlap_fraction = *overlap;
    if (min_packets) config.detector.min_packets_per_window = *min_packets;
    if (merge_gap_s) config.detector.merge_gap_s = *merge_gap_s;
    if (max_per_day) config.detector.max_encounters_per_scooter_per_day = *max_per_day;
    config.detector.validate();
    Timezone::parse(config.timezone);

    if (sub_sim->parsed()) cmd_simulate(config);
    if (sub_detect->parsed()) cmd_detect(config);
    if (sub_filter->parsed()) cmd_filter_feedback(config);
    if (sub_analyze->parsed()) cmd_analyze(config);
    if (sub_score->parsed()) cmd_score(config);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace scootsense::pipeline
