#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <vector>

#include "scootsense/geo.hpp"
#include "scootsense/time.hpp"

namespace scootsense::ble {

enum class Provider { Bird, Lime, BlueDuck, Unknown };
inline constexpr std::array<Provider, 3> kKnownProviders = {Provider::Bird, Provider::Lime,
                                                            Provider::BlueDuck};

std::string_view to_string(Provider p);
std::optional<Provider> provider_from_string(std::string_view s);

struct GpsFix {
  geo::LatLon pos;
  double accuracy_m = 0.0;
};

// One captured BLE advertisement.
struct BleReception {
  Timestamp timestamp;
  std::string device_id;
  std::vector<std::uint8_t> payload;
  double rssi_db = 0.0;
  std::string receiver_id;
  std::optional<GpsFix> gps;
  std::optional<double> heart_rate_bpm;
};

// Throws DataError on invariant violations (rssi >= 0, bad coordinates, ...).
void validate(const BleReception& r, const char* context = "reception");

// ---- advertising payload helpers ----

std::string hex_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> hex_decode(std::string_view hex);  // throws DataError

// Walks the AD structures and returns the shortened/complete local name, if any.
std::optional<std::string> decode_local_name(std::span<const std::uint8_t> payload);

// Flags AD structure + complete local name; the inverse of decode_local_name.
std::vector<std::uint8_t> make_advertisement(std::string_view local_name);

// ---- provider fingerprinting ----

enum class MatchKind { Substring, Regex };

struct ProviderRule {
  Provider provider = Provider::Unknown;
  MatchKind kind = MatchKind::Substring;
  std::string pattern;
};

// Ordered fingerprint rules plus per-provider one-foot RSSI baselines.
// Rules are data, loaded from an INI-style file (see docs/provider_rules in
// the README); the compiled-in defaults cover Bird, Lime and Blue Duck names.
class ProviderTable {
 public:
  ProviderTable();  // default rules and baselines

  static ProviderTable from_ini_text(const std::string& text);  // throws ConfigError
  static ProviderTable from_ini_file(const std::string& path);  // throws ConfigError

  // First matching rule wins; undecodable payloads map to Unknown.
  Provider classify(std::span<const std::uint8_t> payload) const;
  Provider classify_name(std::string_view local_name) const;

  double one_foot_rssi_db(Provider p) const;  // Unknown -> default baseline
  void set_one_foot_rssi_db(Provider p, double db);
  double default_one_foot_rssi_db() const { return default_baseline_db_; }

  const std::vector<ProviderRule>& rules() const { return rules_; }
  void set_rules(std::vector<ProviderRule> rules);

 private:
  std::vector<ProviderRule> rules_;
  std::vector<std::optional<std::regex>> compiled_;  // parallel to rules_
  std::array<double, 3> baseline_db_{-60.5, -46.25, -60.5};
  double default_baseline_db_ = -60.5;
};

// ---- proximity ----

enum class ProximityClass { WithinOneFoot, Near, Far };
std::string_view to_string(ProximityClass c);

struct Proximity {
  ProximityClass cls = ProximityClass::Far;
  bool low_confidence = false;  // set when the provider baseline is unknown
};

// Log-distance path-loss model anchored at the one-foot baseline:
//   d = 1 ft * 10^((one_foot_rssi - rssi) / (10 * n))
double estimate_distance_ft(double rssi_db, double one_foot_rssi_db,
                            double path_loss_exponent);  // throws on bad inputs

Proximity proximity_class(double rssi_db, Provider p, const ProviderTable& table,
                          double path_loss_exponent = 2.0, double far_threshold_ft = 25.0);

}  // namespace scootsense::ble
