#include <doctest.h>

#include <random>

#include "scootsense/errors.hpp"
#include "scootsense/feedback.hpp"

using namespace scootsense;
using fb::FeedbackRecord;

namespace {

Timestamp at(std::int64_t epoch_ms) { return {epoch_ms, -300}; }

FeedbackRecord record(const char* iso, ble::Provider provider = ble::Provider::Lime,
                      bool moving = false) {
  FeedbackRecord r;
  r.participant_id = "P001";
  r.timestamp = parse_iso8601(iso);
  r.gps = {45.0, -93.0};
  r.provider = provider;
  r.q_moving = moving;
  if (moving) {
    r.q_in_front = true;
    r.q_toward = false;
  }
  r.answered_within_s = 10;
  return r;
}

}  // namespace

TEST_CASE("prompt gating accepts at most one event per window") {
  std::vector<Timestamp> events = {at(0), at(600'000), at(900'000)};
  auto accepted = fb::gate_prompts(events, 900.0);
  REQUIRE(accepted.size() == 2);
  CHECK(accepted[0].epoch_ms == 0);
  CHECK(accepted[1].epoch_ms == 900'000);

  CHECK(fb::gate_prompts(std::vector<Timestamp>{at(0)}, 900.0).size() == 1);
  CHECK(fb::gate_prompts(std::vector<Timestamp>{}, 900.0).empty());
}

TEST_CASE("random events in one hour pass the greedy oracle") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::int64_t> times;
    std::uniform_int_distribution<std::int64_t> in_hour(0, 3'600'000 - 1);
    for (int i = 0; i < 100; ++i) times.push_back(in_hour(rng));
    std::sort(times.begin(), times.end());
    std::vector<Timestamp> events;
    for (auto t : times) events.push_back(at(t));

    auto accepted = fb::gate_prompts(events, 900.0);
    CHECK(accepted.size() <= 5);  // one per 15 minutes in a one-hour span

    // literal greedy replay
    std::vector<std::int64_t> expected;
    for (auto t : times)
      if (expected.empty() || t - expected.back() >= 900'000) expected.push_back(t);
    REQUIRE(accepted.size() == expected.size());
    for (size_t i = 0; i < accepted.size(); ++i) CHECK(accepted[i].epoch_ms == expected[i]);
    for (size_t i = 1; i < accepted.size(); ++i)
      CHECK(accepted[i].epoch_ms - accepted[i - 1].epoch_ms >= 900'000);
  }
}

TEST_CASE("study window filter: time bounds and provider exclusion") {
  std::vector<FeedbackRecord> records = {
      record("2026-04-06T05:59:00.000-05:00"),                           // too early
      record("2026-04-06T06:00:00.000-05:00"),                           // kept
      record("2026-04-06T22:59:59.999-05:00", ble::Provider::Bird),      // kept
      record("2026-04-06T23:00:00.000-05:00"),                           // boundary: dropped
      record("2026-04-06T12:00:00.000-05:00", ble::Provider::BlueDuck),  // provider: dropped
      record("2026-04-06T12:00:00.000-05:00", ble::Provider::Unknown),   // provider: dropped
  };
  auto kept = fb::filter_study_window(records);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].timestamp.ms_of_local_day() == 6 * kMsPerHour);

  // idempotent
  auto twice = fb::filter_study_window(kept);
  CHECK(twice.size() == kept.size());
}

TEST_CASE("profile of constant samples collapses to one bin") {
  std::vector<double> samples(40, 70.0);
  auto profile = fb::build_profile(samples);
  CHECK(!profile.low_confidence);
  CHECK(profile.band_low <= 70.0);
  CHECK(profile.band_high >= 70.0);
  CHECK(profile.band_high - profile.band_low == doctest::Approx(5.0));  // one bin width
}

TEST_CASE("bimodal samples center the band on the dominant mode") {
  std::vector<double> samples;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> lo(60, 1.5), hi(100, 1.5);
  for (int i = 0; i < 300; ++i) samples.push_back(lo(rng));
  for (int i = 0; i < 120; ++i) samples.push_back(hi(rng));
  auto profile = fb::build_profile(samples);
  double center = (profile.band_low + profile.band_high) / 2;
  CHECK(center > 50.0);
  CHECK(center < 75.0);
}

TEST_CASE("uniform samples place the modal bin inside the range") {
  std::vector<double> samples;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(55.0, 75.0);
  for (int i = 0; i < 500; ++i) samples.push_back(u(rng));
  auto profile = fb::build_profile(samples);
  CHECK(profile.band_low >= 50.0);  // clamped to bin-aligned sample range
  CHECK(profile.band_high <= 80.0);
  CHECK(profile.band_low < profile.band_high);
}

TEST_CASE("too few samples degrade to a low-confidence range band") {
  std::vector<double> samples = {60, 61, 62, 90};
  auto profile = fb::build_profile(samples);
  CHECK(profile.low_confidence);
  CHECK(profile.band_low == 60);
  CHECK(profile.band_high == 90);
  CHECK_THROWS_AS(fb::build_profile(std::vector<double>{}), DataError);
}

TEST_CASE("startle classification against the personal band") {
  fb::HeartRateProfile profile;
  profile.band_low = 65;
  profile.band_high = 80;

  auto rec = record("2026-04-06T12:00:00.000-05:00", ble::Provider::Lime, true);
  rec.heart_rate_bpm = 81.0;
  CHECK(fb::classify_startle(rec, profile) == fb::Startle::Elevated);
  rec.heart_rate_bpm = 80.0;
  CHECK(fb::classify_startle(rec, profile) == fb::Startle::Normal);
  rec.heart_rate_bpm = 50.0;  // below the band still reads Normal
  CHECK(fb::classify_startle(rec, profile) == fb::Startle::Normal);
  rec.heart_rate_bpm.reset();
  CHECK(fb::classify_startle(rec, profile) == fb::Startle::Unknown);
}

TEST_CASE("startle depends only on heart rate and band_high") {
  fb::HeartRateProfile profile;
  profile.band_low = 65;
  profile.band_high = 80;
  auto rec = record("2026-04-06T12:00:00.000-05:00", ble::Provider::Lime, true);
  rec.heart_rate_bpm = 85.0;
  auto baseline = fb::classify_startle(rec, profile);

  auto mutated = rec;
  mutated.participant_id = "P042";
  mutated.timestamp = parse_iso8601("2026-04-07T08:00:00.000-05:00");
  mutated.gps = {12.0, 8.0};
  mutated.provider = ble::Provider::Bird;
  mutated.q_moving = false;
  mutated.q_in_front.reset();
  mutated.q_toward.reset();
  mutated.answered_within_s = 59;
  CHECK(fb::classify_startle(mutated, profile) == baseline);

  auto wider = profile;
  wider.band_low = 0;  // band_low is irrelevant to Elevated
  CHECK(fb::classify_startle(rec, wider) == baseline);
}

TEST_CASE("direction matrix tabulates moving combinations") {
  std::vector<FeedbackRecord> records;
  for (int i = 0; i < 10; ++i) records.push_back(record("2026-04-06T12:00:00.000-05:00"));
  auto stationary_only = fb::summarize_direction_matrix(records);
  CHECK(stationary_only.stationary == 10);
  CHECK(stationary_only.moving_complete() == 0);

  auto add_moving = [&](bool front, bool toward, int n) {
    for (int i = 0; i < n; ++i) {
      auto r = record("2026-04-06T12:00:00.000-05:00", ble::Provider::Bird, true);
      r.q_in_front = front;
      r.q_toward = toward;
      records.push_back(r);
    }
  };
  add_moving(true, true, 3);
  add_moving(true, false, 4);
  add_moving(false, true, 5);
  add_moving(false, false, 6);
  auto matrix = fb::summarize_direction_matrix(records);
  CHECK(matrix.front_toward == 3);
  CHECK(matrix.front_away == 4);
  CHECK(matrix.behind_toward == 5);
  CHECK(matrix.behind_away == 6);
  CHECK(matrix.moving_complete() == 18);
  CHECK(matrix.total() == 28);

  // direct group-by oracle on random records
  std::mt19937_64 rng(12);
  std::vector<FeedbackRecord> random_records;
  std::int64_t cells[2][2] = {{0, 0}, {0, 0}};
  std::int64_t still = 0;
  for (int i = 0; i < 500; ++i) {
    bool moving = rng() % 2;
    auto r = record("2026-04-06T12:00:00.000-05:00", ble::Provider::Bird, moving);
    if (moving) {
      bool front = rng() % 2, toward = rng() % 2;
      r.q_in_front = front;
      r.q_toward = toward;
      ++cells[front][toward];
    } else {
      ++still;
    }
    random_records.push_back(r);
  }
  auto m = fb::summarize_direction_matrix(random_records);
  CHECK(m.stationary == still);
  CHECK(m.front_toward == cells[1][1]);
  CHECK(m.front_away == cells[1][0]);
  CHECK(m.behind_toward == cells[0][1]);
  CHECK(m.behind_away == cells[0][0]);
}

TEST_CASE("record validation enforces the questionnaire invariants") {
  auto ok = record("2026-04-06T12:00:00.000-05:00");
  CHECK_NOTHROW(fb::validate(ok));

  auto bad = ok;
  bad.q_in_front = true;  // stationary records cannot carry direction answers
  CHECK_THROWS_AS(fb::validate(bad), DataError);

  bad = ok;
  bad.answered_within_s = 61;  // the prompt disappears after a minute
  CHECK_THROWS_AS(fb::validate(bad), DataError);

  bad = ok;
  bad.heart_rate_bpm = 300.0;
  CHECK_THROWS_AS(fb::validate(bad), DataError);
}
