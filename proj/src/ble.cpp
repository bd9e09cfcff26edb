#include "scootsense/ble.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "scootsense/errors.hpp"

namespace scootsense::ble {

std::string_view to_string(Provider p) {
  switch (p) {
    case Provider::Bird: return "Bird";
    case Provider::Lime: return "Lime";
    case Provider::BlueDuck: return "BlueDuck";
    case Provider::Unknown: return "Unknown";
  }
  return "Unknown";
}

std::optional<Provider> provider_from_string(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "bird") return Provider::Bird;
  if (lower == "lime") return Provider::Lime;
  if (lower == "blueduck" || lower == "blue duck" || lower == "blue_duck")
    return Provider::BlueDuck;
  if (lower == "unknown") return Provider::Unknown;
  return std::nullopt;
}

void validate(const BleReception& r, const char* context) {
  auto fail = [&](const std::string& what) {
    throw DataError(std::string(context) + ": " + what + " (device " + r.device_id + ")");
  };
  if (!(r.rssi_db < 0)) fail("rssi_db must be negative");
  if (r.device_id.empty()) fail("device_id is empty");
  if (r.receiver_id.empty()) fail("receiver_id is empty");
  if (r.gps) {
    if (r.gps->pos.lat < -90 || r.gps->pos.lat > 90) fail("gps latitude out of range");
    if (r.gps->pos.lon < -180 || r.gps->pos.lon > 180) fail("gps longitude out of range");
  }
  if (r.heart_rate_bpm && !(*r.heart_rate_bpm > 25 && *r.heart_rate_bpm < 250))
    fail("heart_rate_bpm out of range");
}

// ---- payload helpers ----

std::string hex_encode(std::span<const std::uint8_t> bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xF]);
  }
  return out;
}

std::vector<std::uint8_t> hex_decode(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2 != 0) throw DataError("hex payload has odd length");
  std::vector<std::uint8_t> out;
  out.reserve(hex.size() / 2);
  for (size_t i = 0; i < hex.size(); i += 2) {
    int hi = nibble(hex[i]), lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) throw DataError("invalid hex digit in payload");
    out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
  }
  return out;
}

std::optional<std::string> decode_local_name(std::span<const std::uint8_t> payload) {
  size_t i = 0;
  while (i < payload.size()) {
    std::uint8_t len = payload[i];
    if (len == 0 || i + 1 + len > payload.size()) break;  // malformed tail: stop
    std::uint8_t type = payload[i + 1];
    if (type == 0x08 || type == 0x09) {  // shortened / complete local name
      return std::string(reinterpret_cast<const char*>(payload.data() + i + 2), len - 1);
    }
    i += 1 + len;
  }
  return std::nullopt;
}

std::vector<std::uint8_t> make_advertisement(std::string_view local_name) {
  std::vector<std::uint8_t> out = {0x02, 0x01, 0x06};  // flags: LE general discoverable
  out.push_back(static_cast<std::uint8_t>(local_name.size() + 1));
  out.push_back(0x09);
  out.insert(out.end(), local_name.begin(), local_name.end());
  return out;
}

// ---- ProviderTable ----

namespace {

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

ProviderTable::ProviderTable() {
  set_rules({{Provider::Bird, MatchKind::Substring, "bird"},
             {Provider::Lime, MatchKind::Substring, "lime"},
             {Provider::BlueDuck, MatchKind::Substring, "blueduck"},
             {Provider::BlueDuck, MatchKind::Substring, "blue duck"}});
}

void ProviderTable::set_rules(std::vector<ProviderRule> rules) {
  rules_ = std::move(rules);
  compiled_.clear();
  compiled_.reserve(rules_.size());
  for (const auto& r : rules_) {
    if (r.kind == MatchKind::Regex) {
      try {
        compiled_.emplace_back(std::regex(r.pattern, std::regex::icase | std::regex::ECMAScript));
      } catch (const std::regex_error& e) {
        throw ConfigError("bad provider rule regex '" + r.pattern + "': " + e.what());
      }
    } else {
      compiled_.emplace_back(std::nullopt);
    }
  }
}

Provider ProviderTable::classify_name(std::string_view local_name) const {
  std::string lower = to_lower(local_name);
  for (size_t i = 0; i < rules_.size(); ++i) {
    const auto& rule = rules_[i];
    if (rule.kind == MatchKind::Substring) {
      if (lower.find(to_lower(rule.pattern)) != std::string::npos) return rule.provider;
    } else {
      if (std::regex_search(local_name.begin(), local_name.end(), *compiled_[i]))
        return rule.provider;
    }
  }
  return Provider::Unknown;
}

Provider ProviderTable::classify(std::span<const std::uint8_t> payload) const {
  auto name = decode_local_name(payload);
  if (!name) return Provider::Unknown;
  return classify_name(*name);
}

double ProviderTable::one_foot_rssi_db(Provider p) const {
  if (p == Provider::Unknown) return default_baseline_db_;
  return baseline_db_[static_cast<size_t>(p)];
}

void ProviderTable::set_one_foot_rssi_db(Provider p, double db) {
  if (p == Provider::Unknown)
    default_baseline_db_ = db;
  else
    baseline_db_[static_cast<size_t>(p)] = db;
}

namespace {

std::string trim(std::string_view s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string_view::npos) return "";
  return std::string(s.substr(a, b - a + 1));
}

}  // namespace

// Grammar: '#'/';' comments; repeated ordered [rule] sections with keys
// provider/match/pattern; one [baselines] section with bird/lime/blueduck/default.
ProviderTable ProviderTable::from_ini_text(const std::string& text) {
  ProviderTable table;
  std::vector<ProviderRule> rules;

  std::istringstream in(text);
  std::string line;
  std::string section;
  ProviderRule current;
  bool in_rule = false;
  int lineno = 0;

  auto flush_rule = [&]() {
    if (!in_rule) return;
    if (current.provider == Provider::Unknown || current.pattern.empty())
      throw ConfigError("provider rule missing provider or pattern");
    rules.push_back(current);
    current = ProviderRule{};
    in_rule = false;
  };

  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError("provider rules line " + std::to_string(lineno) + ": bad section");
      flush_rule();
      section = to_lower(trim(t.substr(1, t.size() - 2)));
      if (section == "rule")
        in_rule = true;
      else if (section != "baselines")
        throw ConfigError("provider rules line " + std::to_string(lineno) + ": unknown section [" +
                          section + "]");
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("provider rules line " + std::to_string(lineno) + ": expected key = value");
    std::string key = to_lower(trim(t.substr(0, eq)));
    std::string value = trim(t.substr(eq + 1));

    if (section == "rule") {
      if (key == "provider") {
        auto p = provider_from_string(value);
        if (!p || *p == Provider::Unknown)
          throw ConfigError("provider rules line " + std::to_string(lineno) +
                            ": unknown provider '" + value + "'");
        current.provider = *p;
      } else if (key == "match") {
        if (value == "substring")
          current.kind = MatchKind::Substring;
        else if (value == "regex")
          current.kind = MatchKind::Regex;
        else
          throw ConfigError("provider rules line " + std::to_string(lineno) +
                            ": match must be substring or regex");
      } else if (key == "pattern") {
        current.pattern = value;
      } else {
        throw ConfigError("provider rules line " + std::to_string(lineno) + ": unknown key '" +
                          key + "'");
      }
    } else if (section == "baselines") {
      double db = 0;
      try {
        db = std::stod(value);
      } catch (...) {
        throw ConfigError("provider rules line " + std::to_string(lineno) + ": bad baseline value");
      }
      if (!(db < 0))
        throw ConfigError("provider rules line " + std::to_string(lineno) +
                          ": baseline must be negative dB");
      if (key == "default") {
        table.default_baseline_db_ = db;
      } else {
        auto p = provider_from_string(key);
        if (!p || *p == Provider::Unknown)
          throw ConfigError("provider rules line " + std::to_string(lineno) +
                            ": unknown baseline provider '" + key + "'");
        table.baseline_db_[static_cast<size_t>(*p)] = db;
      }
    } else {
      throw ConfigError("provider rules line " + std::to_string(lineno) +
                        ": key outside a section");
    }
  }
  flush_rule();
  if (!rules.empty()) table.set_rules(std::move(rules));
  return table;
}

ProviderTable ProviderTable::from_ini_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open provider rules file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_ini_text(ss.str());
}

// ---- proximity ----

std::string_view to_string(ProximityClass c) {
  switch (c) {
    case ProximityClass::WithinOneFoot: return "WithinOneFoot";
    case ProximityClass::Near: return "Near";
    case ProximityClass::Far: return "Far";
  }
  return "Far";
}

double estimate_distance_ft(double rssi_db, double one_foot_rssi_db, double path_loss_exponent) {
  if (rssi_db >= 0) throw DataError("estimate_distance: rssi_db must be negative");
  if (path_loss_exponent < 1.5 || path_loss_exponent > 4.0)
    throw ConfigError("estimate_distance: path_loss_exponent must be in [1.5, 4.0]");
  return std::pow(10.0, (one_foot_rssi_db - rssi_db) / (10.0 * path_loss_exponent));
}

Proximity proximity_class(double rssi_db, Provider p, const ProviderTable& table,
                          double path_loss_exponent, double far_threshold_ft) {
  double baseline = table.one_foot_rssi_db(p);
  double dist_ft = estimate_distance_ft(rssi_db, baseline, path_loss_exponent);
  if (p == Provider::Unknown) {
    // No trusted baseline: never WithinOneFoot, and flag the estimate.
    return {dist_ft > far_threshold_ft ? ProximityClass::Far : ProximityClass::Near, true};
  }
  if (rssi_db >= baseline) return {ProximityClass::WithinOneFoot, false};
  if (dist_ft > far_threshold_ft) return {ProximityClass::Far, false};
  return {ProximityClass::Near, false};
}

}  // namespace scootsense::ble
