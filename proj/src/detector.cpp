#include "scootsense/detector.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "scootsense/errors.hpp"

namespace scootsense::detect {

void DetectorParams::validate() const {
  if (window_length_s <= 0) throw ConfigError("detector: window_length_s must be positive");
  if (overlap_fraction < 0 || overlap_fraction >= 1)
    throw ConfigError("detector: overlap_fraction must be in [0, 1)");
  if (stride_ms() <= 0) throw ConfigError("detector: window stride rounds to zero");
  if (min_packets_per_window < 1)
    throw ConfigError("detector: min_packets_per_window must be >= 1");
  if (max_encounters_per_scooter_per_day < 1)
    throw ConfigError("detector: max_encounters_per_scooter_per_day must be >= 1");
  if (merge_gap_s <= window_length_s)
    throw ConfigError("detector: merge_gap_s must exceed window_length_s");
}

namespace {

struct IndexRange {
  size_t lo, hi;  // [lo, hi)
};

// Member packets of an encounter: the union of the packet index ranges of the
// merged potential windows. Ranges arrive ordered by lo.
struct PendingEncounter {
  std::vector<IndexRange> ranges;
  size_t last_idx = 0;  // index of the last member packet

  void add(size_t lo, size_t hi) {
    if (!ranges.empty() && lo <= ranges.back().hi) {
      ranges.back().hi = std::max(ranges.back().hi, hi);
    } else {
      ranges.push_back({lo, hi});
    }
    last_idx = hi - 1;
  }
};

Encounter finalize(const PendingEncounter& pe, std::span<const ble::BleReception* const> pkts,
                   const ble::ProviderTable& providers) {
  Encounter e;
  const ble::BleReception* first = pkts[pe.ranges.front().lo];
  const ble::BleReception* last = pkts[pe.last_idx];
  e.participant_id = first->receiver_id;
  e.device_id = first->device_id;
  e.start = first->timestamp;
  e.end = last->timestamp;

  const ble::BleReception* max_pkt = nullptr;
  const ble::BleReception* first_fix = nullptr;
  int count = 0;
  for (const auto& r : pe.ranges) {
    for (size_t i = r.lo; i < r.hi; ++i) {
      const ble::BleReception* p = pkts[i];
      ++count;
      if (!max_pkt || p->rssi_db > max_pkt->rssi_db) max_pkt = p;
      if (!first_fix && p->gps) first_fix = p;
      if (e.provider == ble::Provider::Unknown)
        e.provider = providers.classify(p->payload);
    }
  }
  e.packet_count = count;
  e.max_rssi_db = max_pkt->rssi_db;
  if (max_pkt->gps)
    e.gps = max_pkt->gps->pos;
  else if (first_fix)
    e.gps = first_fix->gps->pos;
  return e;
}

// One device partition: enumerate windows with a two-pointer sweep, merge
// potential windows, then finalize.
void detect_device(std::span<const ble::BleReception* const> pkts, const DetectorParams& params,
                   const ble::ProviderTable& providers, std::vector<Encounter>& out) {
  const std::int64_t win = params.window_ms();
  const std::int64_t stride = params.stride_ms();
  const std::int64_t merge_gap = params.merge_gap_ms();
  const size_t n = pkts.size();
  if (n == 0) return;

  const std::int64_t t0 = pkts.front()->timestamp.epoch_ms;
  const std::int64_t t_last = pkts.back()->timestamp.epoch_ms;

  std::optional<PendingEncounter> pending;
  size_t lo = 0, hi = 0;
  for (std::int64_t ws = t0; ws <= t_last; ws += stride) {
    while (lo < n && pkts[lo]->timestamp.epoch_ms < ws) ++lo;
    if (hi < lo) hi = lo;
    while (hi < n && pkts[hi]->timestamp.epoch_ms < ws + win) ++hi;
    if (hi - lo < static_cast<size_t>(params.min_packets_per_window)) continue;

    if (pending) {
      std::int64_t gap = pkts[lo]->timestamp.epoch_ms - pkts[pending->last_idx]->timestamp.epoch_ms;
      if (gap < merge_gap) {
        pending->add(lo, hi);
        continue;
      }
      out.push_back(finalize(*pending, pkts, providers));
      pending.reset();
    }
    pending.emplace();
    pending->add(lo, hi);
  }
  if (pending) out.push_back(finalize(*pending, pkts, providers));
}

std::int64_t cap_day(const Encounter& e, const DetectorParams& params) {
  std::int64_t off = params.day_offset_min ? *params.day_offset_min : e.start.offset_min;
  return floor_div(e.start.epoch_ms + off * kMsPerMinute, kMsPerDay);
}

}  // namespace

std::vector<Encounter> detect_encounters(std::span<const ble::BleReception> stream,
                                         const DetectorParams& params,
                                         const ble::ProviderTable& providers) {
  params.validate();
  std::vector<Encounter> out;
  if (stream.empty()) return out;

  const std::string& participant = stream.front().receiver_id;
  for (size_t i = 0; i < stream.size(); ++i) {
    if (stream[i].receiver_id != participant)
      throw DataError("detect_encounters: stream mixes participants '" + participant + "' and '" +
                      stream[i].receiver_id + "'");
    if (i > 0 && stream[i].timestamp.epoch_ms < stream[i - 1].timestamp.epoch_ms)
      throw DataError("detect_encounters: stream is not sorted by timestamp (packet " +
                      std::to_string(i) + ")");
  }

  // Partition by device, preserving time order.
  std::map<std::string_view, std::vector<const ble::BleReception*>> by_device;
  for (const auto& r : stream) by_device[r.device_id].push_back(&r);

  for (const auto& [device, pkts] : by_device) {
    (void)device;
    detect_device(pkts, params, providers, out);
  }

  std::sort(out.begin(), out.end(), [](const Encounter& a, const Encounter& b) {
    if (a.start.epoch_ms != b.start.epoch_ms) return a.start.epoch_ms < b.start.epoch_ms;
    return a.device_id < b.device_id;
  });

  // Per (device, local day) cap, applied chronologically.
  std::map<std::pair<std::string_view, std::int64_t>, int> day_counts;
  std::vector<Encounter> kept;
  kept.reserve(out.size());
  for (auto& e : out) {
    int& c = day_counts[{e.device_id, cap_day(e, params)}];
    if (c < params.max_encounters_per_scooter_per_day) {
      ++c;
      kept.push_back(std::move(e));
    }
  }
  return kept;
}

CorpusResult detect_corpus(
    std::span<const std::pair<std::string, std::vector<ble::BleReception>>> streams,
    const DetectorParams& params, const ble::ProviderTable& providers) {
  CorpusResult result;
  std::set<std::string> participants;
  std::set<std::string> devices_seen;
  std::set<std::string> devices_with_encounters;

  for (const auto& [participant, stream] : streams) {
    if (!participants.insert(participant).second)
      throw DataError("detect_corpus: duplicate participant id '" + participant + "'");
    for (const auto& r : stream) {
      if (r.receiver_id != participant)
        throw DataError("detect_corpus: stream for '" + participant +
                        "' contains receiver_id '" + r.receiver_id + "'");
      devices_seen.insert(r.device_id);
    }
    auto found = detect_encounters(stream, params, providers);
    for (auto& e : found) {
      devices_with_encounters.insert(e.device_id);
      result.encounters.push_back(std::move(e));
    }
  }

  std::sort(result.encounters.begin(), result.encounters.end(),
            [](const Encounter& a, const Encounter& b) {
              if (a.start.epoch_ms != b.start.epoch_ms) return a.start.epoch_ms < b.start.epoch_ms;
              if (a.participant_id != b.participant_id) return a.participant_id < b.participant_id;
              return a.device_id < b.device_id;
            });

  result.summary.unique_scooters_seen = static_cast<std::int64_t>(devices_seen.size());
  result.summary.scooters_with_encounters =
      static_cast<std::int64_t>(devices_with_encounters.size());
  result.summary.total_encounters = static_cast<std::int64_t>(result.encounters.size());
  return result;
}

std::vector<std::pair<std::string, std::vector<ble::BleReception>>> partition_by_receiver(
    std::span<const ble::BleReception> receptions) {
  std::map<std::string, std::vector<ble::BleReception>> groups;
  for (const auto& r : receptions) groups[r.receiver_id].push_back(r);
  std::vector<std::pair<std::string, std::vector<ble::BleReception>>> out;
  out.reserve(groups.size());
  for (auto& [k, v] : groups) out.emplace_back(k, std::move(v));
  return out;
}

}  // namespace scootsense::detect
