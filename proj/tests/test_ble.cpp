#include <doctest.h>

#include <cmath>
#include <random>

#include "scootsense/ble.hpp"
#include "scootsense/errors.hpp"

using namespace scootsense;
using ble::Provider;

TEST_CASE("advertisement local-name round trip") {
  auto payload = ble::make_advertisement("Lime-AB12");
  auto name = ble::decode_local_name(payload);
  REQUIRE(name.has_value());
  CHECK(*name == "Lime-AB12");

  CHECK(!ble::decode_local_name({}).has_value());
  std::vector<std::uint8_t> flags_only = {0x02, 0x01, 0x06};
  CHECK(!ble::decode_local_name(flags_only).has_value());
  std::vector<std::uint8_t> truncated = {0x0A, 0x09, 'L'};  // length overruns payload
  CHECK(!ble::decode_local_name(truncated).has_value());
}

TEST_CASE("hex encoding round trip") {
  std::vector<std::uint8_t> bytes = {0x02, 0x01, 0x06, 0xff, 0x00};
  CHECK(ble::hex_encode(bytes) == "020106ff00");
  CHECK(ble::hex_decode("020106FF00") == bytes);
  CHECK_THROWS_AS(ble::hex_decode("abc"), DataError);
  CHECK_THROWS_AS(ble::hex_decode("zz"), DataError);
}

TEST_CASE("provider classification follows the rule list") {
  ble::ProviderTable table;
  CHECK(table.classify(ble::make_advertisement("Lime-X123")) == Provider::Lime);
  CHECK(table.classify(ble::make_advertisement("BIRD 774")) == Provider::Bird);
  CHECK(table.classify(ble::make_advertisement("BlueDuck-01")) == Provider::BlueDuck);
  CHECK(table.classify(ble::make_advertisement("JBL Speaker")) == Provider::Unknown);
  CHECK(table.classify({}) == Provider::Unknown);  // empty payload

  // classification is pure: same payload, same result
  auto payload = ble::make_advertisement("Lime-X123");
  for (int i = 0; i < 10; ++i) CHECK(table.classify(payload) == Provider::Lime);
}

TEST_CASE("configured regex rules match naming conventions") {
  auto table = ble::ProviderTable::from_ini_text(
      "[rule]\n"
      "provider = bird\n"
      "match = regex\n"
      "pattern = Bird-[A-Z0-9]{4}\n"
      "[rule]\n"
      "provider = lime\n"
      "match = substring\n"
      "pattern = lime\n"
      "[baselines]\n"
      "bird = -61.0\n"
      "default = -58.0\n");
  CHECK(table.classify(ble::make_advertisement("Bird-XY12")) == Provider::Bird);
  CHECK(table.classify(ble::make_advertisement("Bird-xy")) == Provider::Unknown);
  CHECK(table.classify(ble::make_advertisement("LimeBike")) == Provider::Lime);
  CHECK(table.one_foot_rssi_db(Provider::Bird) == -61.0);
  CHECK(table.one_foot_rssi_db(Provider::Lime) == -46.25);  // untouched default
  CHECK(table.one_foot_rssi_db(Provider::Unknown) == -58.0);
}

TEST_CASE("rule order decides the first match") {
  auto table = ble::ProviderTable::from_ini_text(
      "[rule]\nprovider = lime\nmatch = substring\npattern = scooter\n"
      "[rule]\nprovider = bird\nmatch = substring\npattern = scooter\n");
  CHECK(table.classify_name("scooter 42") == Provider::Lime);
}

TEST_CASE("bad rule files are rejected") {
  CHECK_THROWS_AS(ble::ProviderTable::from_ini_text("[rule]\nprovider = tesla\npattern = x\n"),
                  ConfigError);
  CHECK_THROWS_AS(ble::ProviderTable::from_ini_text("[rule]\nprovider = bird\n"), ConfigError);
  CHECK_THROWS_AS(ble::ProviderTable::from_ini_text("[rule]\nprovider = bird\nmatch = glob\npattern = x\n"),
                  ConfigError);
  CHECK_THROWS_AS(ble::ProviderTable::from_ini_text("[baselines]\nbird = 10\n"), ConfigError);
  CHECK_THROWS_AS(ble::ProviderTable::from_ini_text("key = outside\n"), ConfigError);
  CHECK_THROWS_AS(ble::ProviderTable::from_ini_text("[rule]\nprovider = bird\nmatch = regex\npattern = [\n"),
                  ConfigError);
}

TEST_CASE("default one-foot baselines") {
  ble::ProviderTable table;
  CHECK(table.one_foot_rssi_db(Provider::Bird) == -60.5);
  CHECK(table.one_foot_rssi_db(Provider::Lime) == -46.25);
}

TEST_CASE("estimate_distance anchors at one foot") {
  ble::ProviderTable table;
  CHECK(ble::estimate_distance_ft(-60.5, table.one_foot_rssi_db(Provider::Bird), 2.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ble::estimate_distance_ft(-46.25, table.one_foot_rssi_db(Provider::Lime), 2.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ble::estimate_distance_ft(-80.5, table.one_foot_rssi_db(Provider::Bird), 2.0) ==
        doctest::Approx(10.0).epsilon(1e-12));

  // brute-force tabulation of the closed form over an rssi grid
  for (double rssi = -100; rssi < -31; rssi += 0.5) {
    double expected = std::pow(10.0, (-60.5 - rssi) / (10.0 * 2.0));
    CHECK(ble::estimate_distance_ft(rssi, -60.5, 2.0) == doctest::Approx(expected).epsilon(1e-12));
  }

  CHECK_THROWS_AS(ble::estimate_distance_ft(1.0, -60.5, 2.0), DataError);
  CHECK_THROWS_AS(ble::estimate_distance_ft(-60.5, -60.5, 1.0), ConfigError);
  CHECK_THROWS_AS(ble::estimate_distance_ft(-60.5, -60.5, 5.0), ConfigError);
}

TEST_CASE("estimate_distance is strictly monotone decreasing in rssi") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-100.0, -31.0);
  for (int i = 0; i < 2000; ++i) {
    double a = d(rng), b = d(rng);
    if (a == b) continue;
    if (a < b) std::swap(a, b);  // a is the stronger signal
    CHECK(ble::estimate_distance_ft(a, -60.5, 2.0) < ble::estimate_distance_ft(b, -60.5, 2.0));
  }
}

TEST_CASE("proximity classes around the baselines") {
  ble::ProviderTable table;
  auto bird = ble::proximity_class(-60.5, Provider::Bird, table);
  CHECK(bird.cls == ble::ProximityClass::WithinOneFoot);
  CHECK(!bird.low_confidence);
  auto lime = ble::proximity_class(-46.25, Provider::Lime, table);
  CHECK(lime.cls == ble::ProximityClass::WithinOneFoot);

  CHECK(ble::proximity_class(-60.6, Provider::Bird, table).cls == ble::ProximityClass::Near);
  CHECK(ble::proximity_class(-46.35, Provider::Lime, table).cls == ble::ProximityClass::Near);
  // -95 dB on Bird inverts to ~53 ft with n = 2, beyond the 25 ft threshold
  CHECK(ble::estimate_distance_ft(-95.0, -60.5, 2.0) > 25.0);
  CHECK(ble::proximity_class(-95.0, Provider::Bird, table).cls == ble::ProximityClass::Far);

  // baseline equivalence property: WithinOneFoot iff rssi >= baseline
  for (double rssi = -70.0; rssi < -40.0; rssi += 0.25) {
    for (Provider p : ble::kKnownProviders) {
      auto got = ble::proximity_class(rssi, p, table);
      CHECK((got.cls == ble::ProximityClass::WithinOneFoot) ==
            (rssi >= table.one_foot_rssi_db(p)));
    }
  }
}

TEST_CASE("unknown provider is low confidence and never WithinOneFoot") {
  ble::ProviderTable table;
  auto strong = ble::proximity_class(-40.0, Provider::Unknown, table);
  CHECK(strong.low_confidence);
  CHECK(strong.cls == ble::ProximityClass::Near);
  auto weak = ble::proximity_class(-99.0, Provider::Unknown, table);
  CHECK(weak.low_confidence);
  CHECK(weak.cls == ble::ProximityClass::Far);
}

TEST_CASE("reception validation") {
  ble::BleReception r;
  r.device_id = "aa:bb";
  r.receiver_id = "P001";
  r.rssi_db = -60;
  CHECK_NOTHROW(ble::validate(r));
  r.rssi_db = 1.0;
  CHECK_THROWS_AS(ble::validate(r), DataError);
  r.rssi_db = -60;
  r.gps = ble::GpsFix{{91.0, 0.0}, 1.0};
  CHECK_THROWS_AS(ble::validate(r), DataError);
  r.gps = ble::GpsFix{{45.0, -93.0}, 1.0};
  r.heart_rate_bpm = 20.0;
  CHECK_THROWS_AS(ble::validate(r), DataError);
  r.heart_rate_bpm = 72.0;
  CHECK_NOTHROW(ble::validate(r));
}
