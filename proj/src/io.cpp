#include "scootsense/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scootsense/errors.hpp"

namespace scootsense::io {

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

double parse_double(std::string_view s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw DataError("bad number: '" + std::string(s) + "'");
  return v;
}

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw DataError("bad integer: '" + std::string(s) + "'");
  return v;
}

std::string csv_field(std::string_view v) {
  if (v.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(v);
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

nlohmann::json read_json_file(const std::string& path) {
  std::string text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("file '" + path + "' is not valid JSON: " + e.what());
  }
}

// ---- receptions ----

void write_receptions_jsonl(std::ostream& out, std::span<const ble::BleReception> receptions) {
  for (const auto& r : receptions) {
    nlohmann::ordered_json j;
    j["timestamp"] = format_iso8601(r.timestamp);
    j["device_id"] = r.device_id;
    j["payload"] = ble::hex_encode(r.payload);
    j["rssi_db"] = r.rssi_db;
    j["receiver_id"] = r.receiver_id;
    if (r.gps) {
      j["gps"] = {{"lat", r.gps->pos.lat},
                  {"lon", r.gps->pos.lon},
                  {"accuracy_m", r.gps->accuracy_m}};
    }
    if (r.heart_rate_bpm) j["heart_rate_bpm"] = *r.heart_rate_bpm;
    out << j.dump() << '\n';
  }
}

std::vector<ble::BleReception> read_receptions_jsonl(std::istream& in) {
  std::vector<ble::BleReception> out;
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto fail = [&](const std::string& what) {
      throw DataError("receptions line " + std::to_string(lineno) + ": " + what);
    };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("invalid JSON: ") + e.what());
    }
    try {
      ble::BleReception r;
      r.timestamp = parse_iso8601(j.at("timestamp").get<std::string>());
      r.device_id = j.at("device_id").get<std::string>();
      r.payload = ble::hex_decode(j.at("payload").get<std::string>());
      r.rssi_db = j.at("rssi_db").get<double>();
      r.receiver_id = j.at("receiver_id").get<std::string>();
      if (j.contains("gps") && !j["gps"].is_null()) {
        ble::GpsFix fix;
        fix.pos.lat = j["gps"].at("lat").get<double>();
        fix.pos.lon = j["gps"].at("lon").get<double>();
        fix.accuracy_m = j["gps"].value("accuracy_m", 0.0);
        r.gps = fix;
      }
      if (j.contains("heart_rate_bpm") && !j["heart_rate_bpm"].is_null())
        r.heart_rate_bpm = j["heart_rate_bpm"].get<double>();
      ble::validate(r);
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("missing or mistyped field: ") + e.what());
    } catch (const DataError& e) {
      fail(e.what());
    }
  }
  return out;
}

// ---- feedback ----

namespace {

const char* kFeedbackHeader =
    "participant_id,iso_time,lat,lon,provider,q_moving,q_in_front,q_toward,heart_rate_bpm,"
    "answered_within_s";

std::string yesno(bool v) { return v ? "yes" : "no"; }

std::optional<bool> parse_yesno(std::string_view s, std::int64_t lineno) {
  if (s.empty()) return std::nullopt;
  if (s == "yes" || s == "Yes" || s == "true" || s == "1") return true;
  if (s == "no" || s == "No" || s == "false" || s == "0") return false;
  throw DataError("feedback line " + std::to_string(lineno) + ": bad yes/no value '" +
                  std::string(s) + "'");
}

}  // namespace

void write_feedback_csv(std::ostream& out, std::span<const fb::FeedbackRecord> records) {
  out << kFeedbackHeader << '\n';
  for (const auto& r : records) {
    out << csv_field(r.participant_id) << ',' << format_iso8601(r.timestamp) << ','
        << format_double(r.gps.lat) << ',' << format_double(r.gps.lon) << ','
        << ble::to_string(r.provider) << ',' << yesno(r.q_moving) << ','
        << (r.q_in_front ? yesno(*r.q_in_front) : "") << ','
        << (r.q_toward ? yesno(*r.q_toward) : "") << ','
        << (r.heart_rate_bpm ? format_double(*r.heart_rate_bpm) : "") << ','
        << format_double(r.answered_within_s) << '\n';
  }
}

std::vector<fb::FeedbackRecord> read_feedback_csv(std::istream& in) {
  std::vector<fb::FeedbackRecord> out;
  std::string line;
  std::int64_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    auto f = split_csv_line(line);
    if (f.size() != 10)
      throw DataError("feedback line " + std::to_string(lineno) + ": expected 10 fields, got " +
                      std::to_string(f.size()));
    try {
      fb::FeedbackRecord r;
      r.participant_id = f[0];
      r.timestamp = parse_iso8601(f[1]);
      r.gps.lat = parse_double(f[2]);
      r.gps.lon = parse_double(f[3]);
      auto p = ble::provider_from_string(f[4]);
      if (!p) throw DataError("unknown provider '" + f[4] + "'");
      r.provider = *p;
      auto moving = parse_yesno(f[5], lineno);
      if (!moving) throw DataError("q_moving must be yes or no");
      r.q_moving = *moving;
      r.q_in_front = parse_yesno(f[6], lineno);
      r.q_toward = parse_yesno(f[7], lineno);
      if (!f[8].empty()) r.heart_rate_bpm = parse_double(f[8]);
      r.answered_within_s = parse_double(f[9]);
      fb::validate(r);
      out.push_back(std::move(r));
    } catch (const DataError& e) {
      throw DataError("feedback line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

// ---- encounters ----

namespace {
const char* kEncounterHeader =
    "participant_id,device_id,provider,start_iso,end_iso,packet_count,max_rssi_db,lat,lon";
}

void write_encounters_csv(std::ostream& out, std::span<const detect::Encounter> encounters) {
  out << kEncounterHeader << '\n';
  for (const auto& e : encounters) {
    out << csv_field(e.participant_id) << ',' << csv_field(e.device_id) << ','
        << ble::to_string(e.provider) << ',' << format_iso8601(e.start) << ','
        << format_iso8601(e.end) << ',' << e.packet_count << ',' << format_double(e.max_rssi_db)
        << ',' << (e.gps ? format_double(e.gps->lat) : "") << ','
        << (e.gps ? format_double(e.gps->lon) : "") << '\n';
  }
}

std::vector<detect::Encounter> read_encounters_csv(std::istream& in) {
  std::vector<detect::Encounter> out;
  std::string line;
  std::int64_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    auto f = split_csv_line(line);
    if (f.size() != 9)
      throw DataError("encounters line " + std::to_string(lineno) + ": expected 9 fields");
    try {
      detect::Encounter e;
      e.participant_id = f[0];
      e.device_id = f[1];
      auto p = ble::provider_from_string(f[2]);
      if (!p) throw DataError("unknown provider '" + f[2] + "'");
      e.provider = *p;
      e.start = parse_iso8601(f[3]);
      e.end = parse_iso8601(f[4]);
      e.packet_count = static_cast<int>(parse_int(f[5]));
      e.max_rssi_db = parse_double(f[6]);
      if (!f[7].empty() && !f[8].empty())
        e.gps = geo::LatLon{parse_double(f[7]), parse_double(f[8])};
      out.push_back(std::move(e));
    } catch (const DataError& err) {
      throw DataError("encounters line " + std::to_string(lineno) + ": " + err.what());
    }
  }
  return out;
}

// ---- truth ----

void write_truth_csv(std::ostream& out, std::span<const sim::GroundTruthEncounter> truth) {
  out << "participant_id,device_id,start_iso,end_iso,min_distance_ft\n";
  for (const auto& t : truth) {
    out << csv_field(t.participant_id) << ',' << csv_field(t.device_id) << ','
        << format_iso8601(t.start) << ',' << format_iso8601(t.end) << ','
        << format_double(t.min_distance_ft) << '\n';
  }
}

std::vector<sim::GroundTruthEncounter> read_truth_csv(std::istream& in) {
  std::vector<sim::GroundTruthEncounter> out;
  std::string line;
  std::int64_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    auto f = split_csv_line(line);
    if (f.size() != 5)
      throw DataError("truth line " + std::to_string(lineno) + ": expected 5 fields");
    try {
      sim::GroundTruthEncounter t;
      t.participant_id = f[0];
      t.device_id = f[1];
      t.start = parse_iso8601(f[2]);
      t.end = parse_iso8601(f[3]);
      t.min_distance_ft = parse_double(f[4]);
      out.push_back(std::move(t));
    } catch (const DataError& err) {
      throw DataError("truth line " + std::to_string(lineno) + ": " + err.what());
    }
  }
  return out;
}

// ---- POIs ----

void write_poi_csv(std::ostream& out, std::span<const metrics::PoiEvent> pois) {
  out << "poi_id,kind,lat,lon,magnitude,day_of_week,start,end\n";
  for (const auto& poi : pois) {
    auto prefix = [&]() {
      out << csv_field(poi.poi_id) << ',' << metrics::to_string(poi.kind) << ','
          << format_double(poi.location.lat) << ',' << format_double(poi.location.lon) << ','
          << format_double(poi.magnitude) << ',';
    };
    if (poi.schedule.empty()) {
      prefix();
      out << ",,\n";
      continue;
    }
    for (const auto& s : poi.schedule) {
      prefix();
      char hhmm_a[16], hhmm_b[16];
      std::snprintf(hhmm_a, sizeof hhmm_a, "%02d:%02d", int(s.start_ms / kMsPerHour),
                    int(s.start_ms / kMsPerMinute % 60));
      std::snprintf(hhmm_b, sizeof hhmm_b, "%02d:%02d", int(s.end_ms / kMsPerHour),
                    int(s.end_ms / kMsPerMinute % 60));
      out << weekday_name(s.iso_weekday) << ',' << hhmm_a << ',' << hhmm_b << '\n';
    }
  }
}

std::vector<metrics::PoiEvent> read_poi_csv(std::istream& in) {
  std::vector<metrics::PoiEvent> out;
  std::map<std::string, size_t> index;
  std::string line;
  std::int64_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    auto f = split_csv_line(line);
    if (f.size() != 8)
      throw DataError("poi line " + std::to_string(lineno) + ": expected 8 fields");
    try {
      auto it = index.find(f[0]);
      if (it == index.end()) {
        metrics::PoiEvent poi;
        poi.poi_id = f[0];
        auto kind = metrics::poi_kind_from_string(f[1]);
        if (!kind) throw DataError("unknown POI kind '" + f[1] + "'");
        poi.kind = *kind;
        poi.location.lat = parse_double(f[2]);
        poi.location.lon = parse_double(f[3]);
        poi.magnitude = parse_double(f[4]);
        index[poi.poi_id] = out.size();
        out.push_back(std::move(poi));
        it = index.find(f[0]);
      }
      if (!f[5].empty()) {
        metrics::PoiSession s;
        auto wd = parse_weekday(f[5]);
        if (!wd) throw DataError("unknown weekday '" + f[5] + "'");
        s.iso_weekday = *wd;
        s.start_ms = parse_hhmm_ms(f[6]);
        s.end_ms = parse_hhmm_ms(f[7]);
        out[it->second].schedule.push_back(s);
      }
    } catch (const DataError& err) {
      throw DataError("poi line " + std::to_string(lineno) + ": " + err.what());
    }
  }
  for (const auto& poi : out) metrics::validate(poi);
  return out;
}

void write_segments_csv(std::ostream& out, const std::vector<geo::AtomicSegment>& segments) {
  out << "segment_id,functional_class,raw_tag,length_miles,n_vertices\n";
  for (const auto& s : segments) {
    out << s.id << ',' << geo::to_string(s.functional_class) << ',' << csv_field(s.raw_tag) << ','
        << format_double(s.length_miles) << ',' << s.polyline.size() << '\n';
  }
}

}  // namespace scootsense::io
