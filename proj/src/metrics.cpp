#include "scootsense/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scootsense/errors.hpp"

namespace scootsense::metrics {

std::string_view to_string(PoiKind k) {
  switch (k) {
    case PoiKind::Attractor: return "Attractor";
    case PoiKind::Generator: return "Generator";
    case PoiKind::Both: return "Both";
  }
  return "Both";
}

std::optional<PoiKind> poi_kind_from_string(std::string_view s) {
  if (s == "Attractor" || s == "attractor") return PoiKind::Attractor;
  if (s == "Generator" || s == "generator") return PoiKind::Generator;
  if (s == "Both" || s == "both") return PoiKind::Both;
  return std::nullopt;
}

void validate(const PoiEvent& poi) {
  if (poi.poi_id.empty()) throw DataError("poi: empty id");
  if (poi.magnitude < 0) throw DataError("poi " + poi.poi_id + ": negative magnitude");
  for (const auto& s : poi.schedule) {
    if (s.iso_weekday < 1 || s.iso_weekday > 7)
      throw DataError("poi " + poi.poi_id + ": bad weekday");
    if (!(s.start_ms < s.end_ms))
      throw DataError("poi " + poi.poi_id + ": session start must precede end");
  }
}

TesResult tes(std::span<const bins::PlacedEncounter> placed,
              const std::vector<geo::AtomicSegment>& segments) {
  TesResult result;
  result.per_segment.assign(segments.size(), 0);
  for (int c = 0; c < geo::kFunctionalClassCount; ++c)
    result.per_class[static_cast<geo::FunctionalClass>(c)] = 0;
  for (const auto& p : placed) {
    if (p.segment_id == bins::kUnmatchedSegment) {
      ++result.unmatched;
      continue;
    }
    if (p.segment_id < 0 || p.segment_id >= static_cast<std::int64_t>(segments.size()))
      throw DataError("tes: segment id out of range");
    ++result.per_segment[static_cast<size_t>(p.segment_id)];
    ++result.per_class[segments[static_cast<size_t>(p.segment_id)].functional_class];
    ++result.total_matched;
  }
  return result;
}

MemResult mem(const TesResult& tes_result, const std::vector<geo::AtomicSegment>& segments,
              MemMode mode) {
  MemResult result;
  std::map<geo::FunctionalClass, std::pair<double, std::int64_t>> acc;  // sum, n
  std::map<geo::FunctionalClass, std::pair<double, double>> totals;     // enc, miles
  for (const auto& seg : segments) {
    if (seg.length_miles <= 0)
      throw DataError("mem: segment " + std::to_string(seg.id) + " has non-positive length");
    double t = static_cast<double>(tes_result.per_segment.at(static_cast<size_t>(seg.id)));
    auto& a = acc[seg.functional_class];
    a.first += t / seg.length_miles;
    a.second += 1;
    auto& tot = totals[seg.functional_class];
    tot.first += t;
    tot.second += seg.length_miles;
  }
  for (int c = 0; c < geo::kFunctionalClassCount; ++c) {
    auto cls = static_cast<geo::FunctionalClass>(c);
    auto it = acc.find(cls);
    if (it == acc.end()) {
      result.warnings.push_back("class " + std::string(geo::to_string(cls)) +
                                " has no segments; MEM omitted");
      continue;
    }
    if (mode == MemMode::MeanOfRatios)
      result.per_class[cls] = it->second.first / static_cast<double>(it->second.second);
    else
      result.per_class[cls] = totals[cls].first / totals[cls].second;
  }
  return result;
}

std::map<geo::FunctionalClass, double> pem(const std::map<geo::FunctionalClass, double>& mem) {
  double total = 0;
  for (const auto& [cls, v] : mem) {
    (void)cls;
    total += v;
  }
  if (!(total > 0)) throw DataError("pem: all MEM values are zero");
  std::map<geo::FunctionalClass, double> out;
  for (const auto& [cls, v] : mem) out[cls] = 100.0 * v / total;
  return out;
}

std::map<geo::FunctionalClass, double> pem_tes_share(const TesResult& tes_result) {
  double total = static_cast<double>(tes_result.total_matched);
  if (!(total > 0)) throw DataError("pem: no matched encounters");
  std::map<geo::FunctionalClass, double> out;
  for (const auto& [cls, v] : tes_result.per_class)
    out[cls] = 100.0 * static_cast<double>(v) / total;
  return out;
}

double quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DataError("quantile of empty sample");
  if (sorted.size() == 1) return sorted[0];
  double h = (static_cast<double>(sorted.size()) - 1) * p;
  size_t lo = static_cast<size_t>(std::floor(h));
  size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = h - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

std::vector<RssiGroupRow> rssi_group_comparison(std::span<const detect::Encounter> encounters,
                                                std::span<const bins::Group> groups) {
  if (encounters.size() != groups.size())
    throw DataError("rssi_group_comparison: group vector does not match encounters");
  std::vector<RssiGroupRow> rows;
  for (ble::Provider p : ble::kKnownProviders) {
    for (bins::Group g : {bins::Group::Low, bins::Group::High}) {
      std::vector<double> values;
      for (size_t i = 0; i < encounters.size(); ++i)
        if (encounters[i].provider == p && groups[i] == g)
          values.push_back(encounters[i].max_rssi_db);
      RssiGroupRow row{p, g, std::nullopt};
      if (!values.empty()) {
        std::sort(values.begin(), values.end());
        GroupStats stats;
        stats.n = static_cast<std::int64_t>(values.size());
        stats.mean = std::accumulate(values.begin(), values.end(), 0.0) /
                     static_cast<double>(values.size());
        stats.median = quantile(values, 0.5);
        stats.q1 = quantile(values, 0.25);
        stats.q3 = quantile(values, 0.75);
        row.stats = stats;
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::array<std::int64_t, bins::kHourSlotsPerWeek> scheduled_class_counts(
    std::span<const PoiEvent> pois) {
  std::array<std::int64_t, bins::kHourSlotsPerWeek> counts{};
  for (const auto& poi : pois) {
    for (const auto& s : poi.schedule) {
      for (int h = 0; h < bins::kHourSlotsPerDay; ++h) {
        std::int64_t bin_start = bins::kWindowStartMs + std::int64_t{h} * kMsPerHour;
        std::int64_t bin_end = bin_start + kMsPerHour;
        if (s.start_ms < bin_end && s.end_ms > bin_start)
          ++counts[static_cast<size_t>((s.iso_weekday - 1) * bins::kHourSlotsPerDay + h)];
      }
    }
  }
  return counts;
}

std::array<std::int64_t, bins::kHourSlotsPerWeek> hourly_encounter_counts(
    std::span<const detect::Encounter> encounters) {
  std::array<std::int64_t, bins::kHourSlotsPerWeek> counts{};
  for (const auto& e : encounters) {
    auto h = bins::hour_of_week(e.start);
    if (h) ++counts[static_cast<size_t>(*h)];
  }
  return counts;
}

std::optional<double> spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) return std::nullopt;
  auto ranks = [](std::span<const double> v) {
    std::vector<size_t> order(v.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t x, size_t y) { return v[x] < v[y]; });
    std::vector<double> r(v.size());
    size_t i = 0;
    while (i < order.size()) {
      size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2 + 1;
      for (size_t k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  std::vector<double> ra = ranks(a), rb = ranks(b);
  double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / static_cast<double>(ra.size());
  double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / static_cast<double>(rb.size());
  double cov = 0, va = 0, vb = 0;
  for (size_t i = 0; i < ra.size(); ++i) {
    double da = ra[i] - ma, db = rb[i] - mb;
    cov += da * db;
    va += da * da;
    vb += db * db;
  }
  if (va <= 0 || vb <= 0) return std::nullopt;  // constant series
  return cov / std::sqrt(va * vb);
}

ScheduleCorrelation schedule_correlation(
    const std::array<std::int64_t, bins::kHourSlotsPerWeek>& hourly_encounters,
    std::span<const PoiEvent> pois) {
  auto classes = scheduled_class_counts(pois);
  ScheduleCorrelation result;
  std::vector<double> enc, cls;
  enc.reserve(bins::kHourSlotsPerWeek);
  cls.reserve(bins::kHourSlotsPerWeek);
  for (int h = 0; h < bins::kHourSlotsPerWeek; ++h) {
    result.rows.push_back({h, hourly_encounters[static_cast<size_t>(h)],
                           classes[static_cast<size_t>(h)]});
    enc.push_back(static_cast<double>(hourly_encounters[static_cast<size_t>(h)]));
    cls.push_back(static_cast<double>(classes[static_cast<size_t>(h)]));
  }
  result.spearman = spearman(enc, cls);
  return result;
}

}  // namespace scootsense::metrics
