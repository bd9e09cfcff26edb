#include "scootsense/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "scootsense/errors.hpp"

namespace scootsense::sim {

namespace {
constexpr double kMphToMps = 0.44704;
}

double capture_probability(std::span<const CurvePoint> curve, double distance_ft) {
  if (curve.empty()) return 0.0;
  if (distance_ft <= curve.front().distance_ft) return curve.front().probability;
  for (size_t i = 1; i < curve.size(); ++i) {
    if (distance_ft <= curve[i].distance_ft) {
      const auto& a = curve[i - 1];
      const auto& b = curve[i];
      double t = (distance_ft - a.distance_ft) / (b.distance_ft - a.distance_ft);
      return a.probability + t * (b.probability - a.probability);
    }
  }
  return 0.0;  // silent beyond the last control point
}

std::vector<CurvePoint> default_reception_curve() {
  return {{0.0, 0.95}, {20.0, 0.95}, {60.0, 0.05}, {150.0, 0.05}};
}

void SimConfig::validate() const {
  auto bad = [](const std::string& what) { throw ConfigError("sim config: " + what); };
  if (n_pedestrians < 0 || n_scooters < 0) bad("agent counts must be non-negative");
  if (parked_fraction < 0 || parked_fraction > 1) bad("parked_fraction must be in [0, 1]");
  if (advertisement_interval_s <= 0) bad("advertisement_interval_s must be positive");
  if (tick_s <= 0) bad("tick_s must be positive");
  if (detector_min_packets >= 1 &&
      advertisement_interval_s > detector_window_s / detector_min_packets + 1e-9)
    bad("advertisement_interval_s " + std::to_string(advertisement_interval_s) +
        " makes a close pass undetectable (needs <= " +
        std::to_string(detector_window_s / detector_min_packets) + " s)");
  if (path_loss_exponent < 1.5 || path_loss_exponent > 4.0)
    bad("path_loss_exponent must be in [1.5, 4.0]");
  if (reception_curve.empty()) bad("reception_curve must have control points");
  for (size_t i = 0; i < reception_curve.size(); ++i) {
    const auto& pt = reception_curve[i];
    if (pt.probability < 0 || pt.probability > 1) bad("reception probabilities must be in [0, 1]");
    if (pt.distance_ft < 0) bad("reception distances must be non-negative");
    if (i > 0 && pt.distance_ft <= reception_curve[i - 1].distance_ft)
      bad("reception curve distances must be strictly increasing");
  }
  if (duration_days < 1) bad("duration_days must be >= 1");
  if (pedestrian_speed_mph <= 0) bad("pedestrian_speed_mph must be positive");
  if (scooter_speed_mph <= 0 || scooter_speed_mph > 15.5)
    bad("scooter_speed_mph must be in (0, 15.5]");
  if (active_start_ms < 0 || active_end_ms > kMsPerDay || active_start_ms >= active_end_ms)
    bad("active window must satisfy 0 <= start < end <= 24h");
  if (answer_fraction < 0 || answer_fraction > 1) bad("answer_fraction must be in [0, 1]");
  if (startle_fraction < 0 || startle_fraction > 1) bad("startle_fraction must be in [0, 1]");
  if (truth_distance_ft <= 0 || truth_min_duration_s <= 0) bad("truth parameters must be positive");
  if (hot_corridor_halfwidth_ft > base_corridor_halfwidth_ft)
    bad("hot corridor cannot be wider than the base corridor");
  if (hot_corridor_halfwidth_ft <= 0) bad("corridor half-widths must be positive");
  if (dwell_offset_min_ft > dwell_offset_max_ft || dwell_offset_min_ft < 0)
    bad("dwell offsets must satisfy 0 <= min <= max");
  double mix = 0;
  for (const auto& [p, w] : provider_mix) {
    if (p == ble::Provider::Unknown) bad("provider_mix cannot contain Unknown");
    if (w < 0) bad("provider_mix weights must be non-negative");
    mix += w;
  }
  if (!(mix > 0)) bad("provider_mix weights must sum to a positive value");
  parse_civil_date(start_date);
  Timezone::parse(timezone);
}

SimConfig SimConfig::from_json(const nlohmann::json& j) {
  SimConfig c;
  c.seed = j.value("seed", c.seed);
  c.n_pedestrians = j.value("n_pedestrians", c.n_pedestrians);
  c.n_scooters = j.value("n_scooters", c.n_scooters);
  c.parked_fraction = j.value("parked_fraction", c.parked_fraction);
  c.advertisement_interval_s = j.value("advertisement_interval_s", c.advertisement_interval_s);
  c.rssi_noise_sigma_db = j.value("rssi_noise_sigma_db", c.rssi_noise_sigma_db);
  c.path_loss_exponent = j.value("path_loss_exponent", c.path_loss_exponent);
  if (j.contains("reception_curve")) {
    c.reception_curve.clear();
    for (const auto& pt : j.at("reception_curve"))
      c.reception_curve.push_back({pt.at(0).get<double>(), pt.at(1).get<double>()});
  }
  c.duration_days = j.value("duration_days", c.duration_days);
  c.start_date = j.value("start_date", c.start_date);
  c.timezone = j.value("timezone", c.timezone);
  if (j.contains("active_start")) c.active_start_ms = parse_hhmm_ms(j.at("active_start").get<std::string>());
  if (j.contains("active_end")) c.active_end_ms = parse_hhmm_ms(j.at("active_end").get<std::string>());
  c.pedestrian_speed_mph = j.value("pedestrian_speed_mph", c.pedestrian_speed_mph);
  c.scooter_speed_mph = j.value("scooter_speed_mph", c.scooter_speed_mph);
  c.tick_s = j.value("tick_s", c.tick_s);
  c.attendance_scale = j.value("attendance_scale", c.attendance_scale);
  c.scooter_trip_scale = j.value("scooter_trip_scale", c.scooter_trip_scale);
  c.answer_fraction = j.value("answer_fraction", c.answer_fraction);
  c.startle_fraction = j.value("startle_fraction", c.startle_fraction);
  c.startle_delta_bpm = j.value("startle_delta_bpm", c.startle_delta_bpm);
  c.prompt_min_interval_s = j.value("prompt_min_interval_s", c.prompt_min_interval_s);
  c.gps_noise_sigma_m = j.value("gps_noise_sigma_m", c.gps_noise_sigma_m);
  c.truth_distance_ft = j.value("truth_distance_ft", c.truth_distance_ft);
  c.truth_min_duration_s = j.value("truth_min_duration_s", c.truth_min_duration_s);
  c.base_corridor_halfwidth_ft = j.value("base_corridor_halfwidth_ft", c.base_corridor_halfwidth_ft);
  c.hot_corridor_halfwidth_ft = j.value("hot_corridor_halfwidth_ft", c.hot_corridor_halfwidth_ft);
  c.hot_traversal_percentile = j.value("hot_traversal_percentile", c.hot_traversal_percentile);
  c.dwell_offset_min_ft = j.value("dwell_offset_min_ft", c.dwell_offset_min_ft);
  c.dwell_offset_max_ft = j.value("dwell_offset_max_ft", c.dwell_offset_max_ft);
  if (j.contains("provider_mix")) {
    c.provider_mix.clear();
    for (const auto& [name, w] : j.at("provider_mix").items()) {
      auto p = ble::provider_from_string(name);
      if (!p) throw ConfigError("sim config: unknown provider '" + name + "' in provider_mix");
      c.provider_mix[*p] = w.get<double>();
    }
  }
  c.detector_window_s = j.value("detector_window_s", c.detector_window_s);
  c.detector_min_packets = j.value("detector_min_packets", c.detector_min_packets);
  return c;
}

nlohmann::json SimConfig::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["n_pedestrians"] = n_pedestrians;
  j["n_scooters"] = n_scooters;
  j["parked_fraction"] = parked_fraction;
  j["advertisement_interval_s"] = advertisement_interval_s;
  j["rssi_noise_sigma_db"] = rssi_noise_sigma_db;
  j["path_loss_exponent"] = path_loss_exponent;
  auto curve = nlohmann::json::array();
  for (const auto& pt : reception_curve) curve.push_back({pt.distance_ft, pt.probability});
  j["reception_curve"] = curve;
  j["duration_days"] = duration_days;
  j["start_date"] = start_date;
  j["timezone"] = timezone;
  j["pedestrian_speed_mph"] = pedestrian_speed_mph;
  j["scooter_speed_mph"] = scooter_speed_mph;
  j["tick_s"] = tick_s;
  j["attendance_scale"] = attendance_scale;
  j["scooter_trip_scale"] = scooter_trip_scale;
  j["answer_fraction"] = answer_fraction;
  j["startle_fraction"] = startle_fraction;
  j["startle_delta_bpm"] = startle_delta_bpm;
  nlohmann::json mix;
  for (const auto& [p, w] : provider_mix) mix[std::string(ble::to_string(p))] = w;
  j["provider_mix"] = mix;
  return j;
}

// ---------------------------------------------------------------------------
// internal world model
// ---------------------------------------------------------------------------

namespace {

using geo::LatLon;

struct NodeGraph {
  std::vector<LatLon> nodes;
  struct Edge {
    int to;
    int seg_id;
    double len_m;
  };
  std::vector<std::vector<Edge>> adj;
};

struct VertexKey {
  std::int64_t a, b;
  bool operator<(const VertexKey& o) const { return a != o.a ? a < o.a : b < o.b; }
};

VertexKey key_of(const LatLon& p) {
  return {static_cast<std::int64_t>(std::llround(p.lat * 1e7)),
          static_cast<std::int64_t>(std::llround(p.lon * 1e7))};
}

NodeGraph build_node_graph(const geo::Network& net) {
  NodeGraph g;
  std::map<VertexKey, int> ids;
  auto node_id = [&](const LatLon& p) {
    auto [it, inserted] = ids.try_emplace(key_of(p), static_cast<int>(g.nodes.size()));
    if (inserted) {
      g.nodes.push_back(p);
      g.adj.emplace_back();
    }
    return it->second;
  };
  for (const auto& seg : net.segments) {
    int a = node_id(seg.polyline.front());
    int b = node_id(seg.polyline.back());
    double len = seg.length_miles * geo::kMetersPerMile;
    g.adj[static_cast<size_t>(a)].push_back({b, static_cast<int>(seg.id), len});
    g.adj[static_cast<size_t>(b)].push_back({a, static_cast<int>(seg.id), len});
  }
  return g;
}

// Street geometry of a node-to-node route: concatenated segment polylines.
struct RouteGeom {
  std::vector<LatLon> pts;
  std::vector<int> edge_seg;  // per edge, atomic segment id
  double total_m = 0;
};

struct Leg {
  std::int64_t depart_ms = 0, arrive_ms = 0;
  double speed_mps = 1.0;
  std::vector<LatLon> pts;
  std::vector<double> cum_m;
  std::vector<int> edge_seg;       // -1 for off-street connectors
  std::vector<double> edge_lat_m;  // signed lateral offset per edge
};

struct Timeline {
  std::vector<Leg> legs;
  std::vector<LatLon> dwell;  // dwell[i] is the position before leg i; size legs+1
  std::vector<std::pair<double, double>> facing;  // east/north while dwelling
};

struct PosSample {
  LatLon pos;
  bool moving = false;
  double east = 1.0, north = 0.0;  // unit heading
  double speed_mps = 0.0;
};

PosSample position_at(const Timeline& tl, std::int64_t t_ms) {
  PosSample out;
  size_t n = tl.legs.size();
  size_t i = 0;
  while (i < n && tl.legs[i].depart_ms <= t_ms) ++i;
  // i = first leg departing after t; candidate active leg is i-1.
  if (i == 0) {
    out.pos = tl.dwell[0];
    std::tie(out.east, out.north) = tl.facing[0];
    return out;
  }
  const Leg& leg = tl.legs[i - 1];
  if (t_ms >= leg.arrive_ms) {
    out.pos = tl.dwell[i];
    std::tie(out.east, out.north) = tl.facing[i];
    return out;
  }
  double s = static_cast<double>(t_ms - leg.depart_ms) / 1000.0 * leg.speed_mps;
  s = std::clamp(s, 0.0, leg.cum_m.back());
  size_t e = static_cast<size_t>(std::upper_bound(leg.cum_m.begin(), leg.cum_m.end(), s) -
                                 leg.cum_m.begin());
  e = std::clamp<size_t>(e, 1, leg.cum_m.size() - 1) - 1;
  double span = leg.cum_m[e + 1] - leg.cum_m[e];
  double frac = span > 0 ? (s - leg.cum_m[e]) / span : 0.0;
  const LatLon& a = leg.pts[e];
  const LatLon& b = leg.pts[e + 1];
  LatLon base{a.lat + frac * (b.lat - a.lat), a.lon + frac * (b.lon - a.lon)};
  double east, north;
  geo::segment_direction(a, b, east, north);
  double lat_m = leg.edge_lat_m[e];
  out.pos = lat_m != 0.0 ? geo::offset_point(base, -north * lat_m, east * lat_m) : base;
  out.moving = true;
  out.east = east;
  out.north = north;
  out.speed_mps = leg.speed_mps;
  return out;
}

// Binary-search variant of position_at for hot loops.
PosSample position_at_fast(const Timeline& tl, std::int64_t t_ms) {
  if (tl.legs.empty()) {
    PosSample out;
    out.pos = tl.dwell[0];
    std::tie(out.east, out.north) = tl.facing[0];
    return out;
  }
  return position_at(tl, t_ms);
}

struct DijkstraResult {
  std::vector<double> dist;
  std::vector<int> prev_node;
  std::vector<int> prev_seg;
};

DijkstraResult dijkstra(const NodeGraph& g, int source) {
  size_t n = g.nodes.size();
  DijkstraResult r;
  r.dist.assign(n, std::numeric_limits<double>::infinity());
  r.prev_node.assign(n, -1);
  r.prev_seg.assign(n, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  r.dist[static_cast<size_t>(source)] = 0;
  pq.push({0, source});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > r.dist[static_cast<size_t>(u)]) continue;
    for (const auto& e : g.adj[static_cast<size_t>(u)]) {
      double nd = d + e.len_m;
      if (nd < r.dist[static_cast<size_t>(e.to)]) {
        r.dist[static_cast<size_t>(e.to)] = nd;
        r.prev_node[static_cast<size_t>(e.to)] = u;
        r.prev_seg[static_cast<size_t>(e.to)] = e.seg_id;
        pq.push({nd, e.to});
      }
    }
  }
  return r;
}

RouteGeom extract_route(const geo::Network& net, const NodeGraph& g, const DijkstraResult& from,
                        int source, int target) {
  std::vector<std::pair<int, int>> rev;  // (node, seg used to reach it)
  int cur = target;
  while (cur != source) {
    rev.push_back({cur, from.prev_seg[static_cast<size_t>(cur)]});
    cur = from.prev_node[static_cast<size_t>(cur)];
    if (cur < 0) throw DataError("route extraction failed");
  }
  RouteGeom route;
  route.pts.push_back(g.nodes[static_cast<size_t>(source)]);
  int at = source;
  for (auto it = rev.rbegin(); it != rev.rend(); ++it) {
    const auto& seg = net.segments[static_cast<size_t>(it->second)];
    std::vector<LatLon> poly = seg.polyline;
    if (key_of(poly.front()).a != key_of(g.nodes[static_cast<size_t>(at)]).a ||
        key_of(poly.front()).b != key_of(g.nodes[static_cast<size_t>(at)]).b)
      std::reverse(poly.begin(), poly.end());
    for (size_t k = 1; k < poly.size(); ++k) {
      route.pts.push_back(poly[k]);
      route.edge_seg.push_back(static_cast<int>(seg.id));
    }
    at = it->first;
  }
  route.total_m = geo::polyline_length_m(route.pts);
  return route;
}

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine);
  }
  double normal(double mean, double sigma) {
    return std::normal_distribution<double>(mean, sigma)(engine);
  }
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {  // inclusive
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine);
  }
  int pick_side() { return uniform() < 0.5 ? -1 : 1; }
};

struct Visit {
  int poi = -1;
  std::int64_t start_ms = 0, end_ms = 0;  // epoch
};

struct PedState {
  std::string id;
  double speed_mps = 1.3;
  int home_poi = 0;
  double resting_bpm = 72;
  std::vector<Visit> visits;
  Timeline timeline;
  // live state
  std::int64_t last_prompt_ms = std::numeric_limits<std::int64_t>::min() / 2;
  std::vector<std::pair<std::int64_t, std::int64_t>> hr_boosts;
};

struct ScooterState {
  std::string device_id;
  ble::Provider provider = ble::Provider::Unknown;
  std::vector<std::uint8_t> payload;
  bool parked = false;
  double speed_mps = 4.0;
  std::int64_t phase_ms = 0;
  int home_poi = 0;  // overnight/idle location
  std::vector<Visit> visits;
  Timeline timeline;
};

struct PairState {
  std::int64_t start_ms = 0, last_ms = 0;
  double min_ft = 1e18;
  bool open = false;
  bool prompted = false;
};

std::string random_mac(Rng& rng) {
  char buf[18];
  std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x",
                unsigned(rng.uniform_int(0, 255)), unsigned(rng.uniform_int(0, 255)),
                unsigned(rng.uniform_int(0, 255)), unsigned(rng.uniform_int(0, 255)),
                unsigned(rng.uniform_int(0, 255)), unsigned(rng.uniform_int(0, 255)));
  return buf;
}

std::string random_suffix(Rng& rng, int len) {
  static const char* alphabet = "ABCDEFGHJKLMNPQRSTUVWXYZ0123456789";
  std::string s;
  for (int i = 0; i < len; ++i) s += alphabet[rng.uniform_int(0, 33)];
  return s;
}

std::string local_name_for(ble::Provider p, Rng& rng) {
  switch (p) {
    case ble::Provider::Bird: return "Bird-" + random_suffix(rng, 4);
    case ble::Provider::Lime: return "Lime-" + random_suffix(rng, 4);
    case ble::Provider::BlueDuck: return "BlueDuck-" + random_suffix(rng, 4);
    default: return "SCOOTER-" + random_suffix(rng, 4);
  }
}

// Flat bucket grid over the deployment bbox for pedestrian lookups.
class PedGrid {
 public:
  PedGrid(LatLon lo, LatLon hi, double cell_m) {
    lo_ = lo;
    double coslat = std::max(0.05, std::cos((lo.lat + hi.lat) / 2 * 3.14159265358979 / 180));
    cell_lat_ = cell_m / 111194.93;
    cell_lon_ = cell_m / (111194.93 * coslat);
    rows_ = static_cast<int>((hi.lat - lo.lat) / cell_lat_) + 3;
    cols_ = static_cast<int>((hi.lon - lo.lon) / cell_lon_) + 3;
    buckets_.resize(static_cast<size_t>(rows_) * cols_);
  }

  void clear() {
    for (int idx : touched_) buckets_[static_cast<size_t>(idx)].clear();
    touched_.clear();
  }

  void insert(int ped, const LatLon& p) {
    int idx = index_of(p);
    if (buckets_[static_cast<size_t>(idx)].empty()) touched_.push_back(idx);
    buckets_[static_cast<size_t>(idx)].push_back(ped);
  }

  void gather(const LatLon& p, int reach, std::vector<int>& out) const {
    auto [r, c] = cell_of(p);
    for (int dr = -reach; dr <= reach; ++dr) {
      int rr = r + dr;
      if (rr < 0 || rr >= rows_) continue;
      for (int dc = -reach; dc <= reach; ++dc) {
        int cc = c + dc;
        if (cc < 0 || cc >= cols_) continue;
        const auto& b = buckets_[static_cast<size_t>(rr) * cols_ + cc];
        out.insert(out.end(), b.begin(), b.end());
      }
    }
  }

  double cell_m_lat() const { return cell_lat_ * 111194.93; }

 private:
  std::pair<int, int> cell_of(const LatLon& p) const {
    int r = std::clamp(static_cast<int>((p.lat - lo_.lat) / cell_lat_) + 1, 0, rows_ - 1);
    int c = std::clamp(static_cast<int>((p.lon - lo_.lon) / cell_lon_) + 1, 0, cols_ - 1);
    return {r, c};
  }
  int index_of(const LatLon& p) const {
    auto [r, c] = cell_of(p);
    return r * cols_ + c;
  }

  LatLon lo_;
  double cell_lat_ = 0, cell_lon_ = 0;
  int rows_ = 0, cols_ = 0;
  std::vector<std::vector<int>> buckets_;
  std::vector<int> touched_;
};

}  // namespace

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

SimResult simulate(const SimConfig& config, const geo::Network& network,
                   std::span<const metrics::PoiEvent> pois, const ble::ProviderTable& providers) {
  config.validate();
  if (network.segments.empty()) throw ConfigError("sim: network has no segments");
  if (pois.empty()) throw ConfigError("sim: at least one POI is required");

  SimResult result;
  Rng rng(config.seed);
  Timezone tz = Timezone::parse(config.timezone);
  std::int64_t start_day = parse_civil_date(config.start_date);

  const std::int64_t tick_ms = std::max<std::int64_t>(1, std::llround(config.tick_s * 1000));
  std::int64_t adv_ms = std::max<std::int64_t>(
      tick_ms, std::llround(config.advertisement_interval_s * 1000 / static_cast<double>(tick_ms)) *
                   tick_ms);
  const std::int64_t truth_min_ms = std::llround(config.truth_min_duration_s * 1000);
  const std::int64_t close_gap_ms = std::max<std::int64_t>(1000, 3 * adv_ms);
  const std::int64_t prompt_gap_ms = std::llround(config.prompt_min_interval_s * 1000);
  const double max_range_ft = config.reception_curve.back().distance_ft;
  const double max_range_m = geo::feet_to_m(max_range_ft);

  NodeGraph graph = build_node_graph(network);

  // POI -> nearest node.
  std::vector<int> poi_node(pois.size());
  for (size_t i = 0; i < pois.size(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t n = 0; n < graph.nodes.size(); ++n) {
      double d = geo::haversine_m(pois[i].location, graph.nodes[n]);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(n);
      }
    }
    poi_node[i] = best;
  }

  // Reachability: every POI pair must connect.
  std::vector<DijkstraResult> routes_from(pois.size());
  for (size_t i = 0; i < pois.size(); ++i) routes_from[i] = dijkstra(graph, poi_node[i]);
  {
    std::string offending;
    int listed = 0;
    for (size_t i = 0; i < pois.size(); ++i)
      for (size_t j = i + 1; j < pois.size(); ++j)
        if (poi_node[i] != poi_node[j] &&
            !std::isfinite(routes_from[i].dist[static_cast<size_t>(poi_node[j])])) {
          if (listed++ < 20)
            offending += (offending.empty() ? "" : ", ") + pois[i].poi_id + "<->" + pois[j].poi_id;
        }
    if (!offending.empty())
      throw ConfigError("sim: unreachable POI pairs: " + offending);
  }

  auto route_between = [&](int poi_a, int poi_b) {
    return extract_route(network, graph, routes_from[static_cast<size_t>(poi_a)],
                         poi_node[static_cast<size_t>(poi_a)],
                         poi_node[static_cast<size_t>(poi_b)]);
  };

  // Deployment bbox (padded) for the pedestrian grid.
  LatLon bb_lo{1e9, 1e9}, bb_hi{-1e9, -1e9};
  for (const auto& seg : network.segments)
    for (const auto& p : seg.polyline) {
      bb_lo.lat = std::min(bb_lo.lat, p.lat);
      bb_lo.lon = std::min(bb_lo.lon, p.lon);
      bb_hi.lat = std::max(bb_hi.lat, p.lat);
      bb_hi.lon = std::max(bb_hi.lon, p.lon);
    }
  bb_lo = geo::offset_point(bb_lo, -300, -300);
  bb_hi = geo::offset_point(bb_hi, 300, 300);

  // --- agents ---

  std::vector<int> generator_pois, attractor_pois;
  for (size_t i = 0; i < pois.size(); ++i) {
    if (pois[i].kind != metrics::PoiKind::Attractor) generator_pois.push_back(static_cast<int>(i));
    if (pois[i].kind != metrics::PoiKind::Generator) attractor_pois.push_back(static_cast<int>(i));
  }
  if (generator_pois.empty())
    for (size_t i = 0; i < pois.size(); ++i) generator_pois.push_back(static_cast<int>(i));

  auto weighted_poi = [&](const std::vector<int>& ids) {
    double total = 0;
    for (int i : ids) total += std::max(0.1, pois[static_cast<size_t>(i)].magnitude);
    double x = rng.uniform(0, total);
    for (int i : ids) {
      x -= std::max(0.1, pois[static_cast<size_t>(i)].magnitude);
      if (x <= 0) return i;
    }
    return ids.back();
  };

  std::vector<PedState> peds(static_cast<size_t>(config.n_pedestrians));
  for (int i = 0; i < config.n_pedestrians; ++i) {
    auto& p = peds[static_cast<size_t>(i)];
    char buf[16];
    std::snprintf(buf, sizeof buf, "P%03d", i + 1);
    p.id = buf;
    p.speed_mps = config.pedestrian_speed_mph * kMphToMps * rng.uniform(0.85, 1.15);
    p.home_poi = weighted_poi(generator_pois);
    p.resting_bpm = std::clamp(rng.normal(72, 6), 55.0, 95.0);
  }

  int n_parked = static_cast<int>(std::lround(config.n_scooters * config.parked_fraction));
  std::vector<ScooterState> scooters(static_cast<size_t>(config.n_scooters));
  double total_len_m = 0;
  for (const auto& seg : network.segments) total_len_m += seg.length_miles * geo::kMetersPerMile;

  auto random_point_on_network = [&]() {
    double x = rng.uniform(0, total_len_m);
    for (const auto& seg : network.segments) {
      double len = seg.length_miles * geo::kMetersPerMile;
      if (x <= len) {
        // interpolate x meters along the segment polyline
        double acc = 0;
        for (size_t k = 1; k < seg.polyline.size(); ++k) {
          double d = geo::haversine_m(seg.polyline[k - 1], seg.polyline[k]);
          if (acc + d >= x && d > 0) {
            double frac = (x - acc) / d;
            const auto& a = seg.polyline[k - 1];
            const auto& b = seg.polyline[k];
            LatLon base{a.lat + frac * (b.lat - a.lat), a.lon + frac * (b.lon - a.lon)};
            double east, north;
            geo::segment_direction(a, b, east, north);
            double lat_m = geo::feet_to_m(rng.uniform(2, 9)) * rng.pick_side();
            return geo::offset_point(base, -north * lat_m, east * lat_m);
          }
          acc += d;
        }
        return seg.polyline.back();
      }
      x -= len;
    }
    return network.segments.front().polyline.front();
  };

  auto parked_point_near_poi = [&](int poi_idx) {
    // walk a short distance from the POI node along a random incident edge
    int node = poi_node[static_cast<size_t>(poi_idx)];
    const auto& edges = graph.adj[static_cast<size_t>(node)];
    if (edges.empty()) return random_point_on_network();
    const auto& e = edges[static_cast<size_t>(rng.uniform_int(0, static_cast<std::int64_t>(edges.size()) - 1))];
    const auto& seg = network.segments[static_cast<size_t>(e.seg_id)];
    std::vector<LatLon> poly = seg.polyline;
    VertexKey nk = key_of(graph.nodes[static_cast<size_t>(node)]);
    if (!(key_of(poly.front()).a == nk.a && key_of(poly.front()).b == nk.b))
      std::reverse(poly.begin(), poly.end());
    double along = geo::feet_to_m(rng.uniform(15, 80));
    double acc = 0;
    for (size_t k = 1; k < poly.size(); ++k) {
      double d = geo::haversine_m(poly[k - 1], poly[k]);
      if (acc + d >= along && d > 0) {
        double frac = (along - acc) / d;
        LatLon base{poly[k - 1].lat + frac * (poly[k].lat - poly[k - 1].lat),
                    poly[k - 1].lon + frac * (poly[k].lon - poly[k - 1].lon)};
        double east, north;
        geo::segment_direction(poly[k - 1], poly[k], east, north);
        double lat_m = geo::feet_to_m(rng.uniform(2, 9)) * rng.pick_side();
        return geo::offset_point(base, -north * lat_m, east * lat_m);
      }
      acc += d;
    }
    return poly.back();
  };

  auto weighted_provider = [&]() {
    double total = 0;
    for (const auto& [p, w] : config.provider_mix) total += w;
    double x = rng.uniform(0, total);
    for (const auto& [p, w] : config.provider_mix) {
      x -= w;
      if (x <= 0) return p;
    }
    return config.provider_mix.rbegin()->first;
  };

  for (int i = 0; i < config.n_scooters; ++i) {
    auto& s = scooters[static_cast<size_t>(i)];
    s.device_id = random_mac(rng);
    s.provider = weighted_provider();
    s.payload = ble::make_advertisement(local_name_for(s.provider, rng));
    s.parked = i < n_parked;
    s.speed_mps = config.scooter_speed_mph * kMphToMps * rng.uniform(0.8, 1.2);
    s.phase_ms = rng.uniform_int(0, adv_ms / tick_ms - 1) * tick_ms;
    s.home_poi = weighted_poi(generator_pois);
  }

  // --- demand: enroll agents into scheduled sessions ---

  auto day_epoch = [&](int day, std::int64_t local_ms_of_day) {
    return tz.from_local((start_day + day) * kMsPerDay + local_ms_of_day).epoch_ms;
  };

  struct SessionInstance {
    int poi;
    std::int64_t start_ms, end_ms;  // epoch
  };
  std::vector<SessionInstance> sessions;
  for (int day = 0; day < config.duration_days; ++day) {
    int weekday = iso_weekday_of_day(start_day + day);
    for (int pi : attractor_pois) {
      for (const auto& sess : pois[static_cast<size_t>(pi)].schedule) {
        if (sess.iso_weekday != weekday) continue;
        sessions.push_back({pi, day_epoch(day, sess.start_ms), day_epoch(day, sess.end_ms)});
      }
    }
  }
  std::sort(sessions.begin(), sessions.end(), [](const auto& a, const auto& b) {
    return a.start_ms != b.start_ms ? a.start_ms < b.start_ms : a.poi < b.poi;
  });

  auto conflicts = [](const std::vector<Visit>& visits, std::int64_t start, std::int64_t end) {
    for (const auto& v : visits)
      if (start - 90 * kMsPerMinute < v.end_ms && end > v.start_ms - 90 * kMsPerMinute)
        return true;
    return false;
  };

  auto enroll = [&](auto& agents, double scale, const SessionInstance& sess) {
    int want = static_cast<int>(std::lround(pois[static_cast<size_t>(sess.poi)].magnitude * scale));
    if (want <= 0) return;
    std::vector<int> free;
    for (size_t a = 0; a < agents.size(); ++a)
      if (!conflicts(agents[a].visits, sess.start_ms, sess.end_ms))
        free.push_back(static_cast<int>(a));
    // deterministic partial shuffle
    for (size_t k = 0; k + 1 < free.size(); ++k) {
      size_t j = static_cast<size_t>(rng.uniform_int(static_cast<std::int64_t>(k),
                                                     static_cast<std::int64_t>(free.size()) - 1));
      std::swap(free[k], free[j]);
    }
    for (int k = 0; k < want && k < static_cast<int>(free.size()); ++k)
      agents[static_cast<size_t>(free[k])].visits.push_back({sess.poi, sess.start_ms, sess.end_ms});
  };

  for (const auto& sess : sessions) {
    enroll(peds, config.attendance_scale, sess);
    // mobile scooters enroll too (a rider takes one to the session)
    int want = static_cast<int>(
        std::lround(pois[static_cast<size_t>(sess.poi)].magnitude * config.scooter_trip_scale));
    if (want > 0) {
      std::vector<int> free;
      for (size_t a = 0; a < scooters.size(); ++a)
        if (!scooters[a].parked && !conflicts(scooters[a].visits, sess.start_ms, sess.end_ms))
          free.push_back(static_cast<int>(a));
      for (size_t k = 0; k + 1 < free.size(); ++k) {
        size_t j = static_cast<size_t>(rng.uniform_int(static_cast<std::int64_t>(k),
                                                       static_cast<std::int64_t>(free.size()) - 1));
        std::swap(free[k], free[j]);
      }
      for (int k = 0; k < want && k < static_cast<int>(free.size()); ++k)
        scooters[static_cast<size_t>(free[k])].visits.push_back(
            {sess.poi, sess.start_ms, sess.end_ms});
    }
  }

  // --- timelines (geometry first, lateral offsets after popularity) ---

  struct PlannedLeg {
    int from_poi, to_poi;
    std::int64_t depart_ms;
  };

  auto interior_point = [&](int poi_idx) {
    double ang = rng.uniform(0, 2 * 3.14159265358979);
    double r = geo::feet_to_m(rng.uniform(config.dwell_offset_min_ft, config.dwell_offset_max_ft));
    return geo::offset_point(graph.nodes[static_cast<size_t>(poi_node[static_cast<size_t>(poi_idx)])],
                             std::cos(ang) * r, std::sin(ang) * r);
  };

  auto street_park_point = [&](const RouteGeom& route) {
    size_t e = route.pts.size() - 1;
    double east, north;
    geo::segment_direction(route.pts[e - 1], route.pts[e], east, north);
    double lat_m = geo::feet_to_m(rng.uniform(2, 9)) * rng.pick_side();
    return geo::offset_point(route.pts.back(), -north * lat_m, east * lat_m);
  };

  std::vector<int> traversals(network.segments.size(), 0);

  auto build_timeline = [&](auto& agent, bool pedestrian) {
    std::sort(agent.visits.begin(), agent.visits.end(),
              [](const Visit& a, const Visit& b) { return a.start_ms < b.start_ms; });
    Timeline tl;
    int cur_poi = agent.home_poi;
    LatLon cur_dwell = pedestrian ? interior_point(cur_poi)
                                  : graph.nodes[static_cast<size_t>(poi_node[static_cast<size_t>(cur_poi)])];
    tl.dwell.push_back(cur_dwell);
    tl.facing.push_back({1.0, 0.0});
    std::int64_t free_at = std::numeric_limits<std::int64_t>::min() / 2;

    std::vector<Visit> stops = agent.visits;
    if (pedestrian && !stops.empty()) {
      // go home after the last session
      Visit home;
      home.poi = agent.home_poi;
      home.start_ms = stops.back().end_ms + rng.uniform_int(60, 600) * 1000;
      home.end_ms = home.start_ms;
      stops.push_back(home);
    }

    for (const auto& visit : stops) {
      if (visit.poi == cur_poi) {
        continue;  // already there
      }
      RouteGeom route = route_between(cur_poi, visit.poi);
      if (route.pts.size() < 2) continue;
      Leg leg;
      leg.speed_mps = agent.speed_mps;
      LatLon dest_dwell = pedestrian ? interior_point(visit.poi) : street_park_point(route);
      // assemble points: dwell -> street polyline -> dest dwell
      leg.pts.push_back(cur_dwell);
      leg.edge_seg.push_back(-1);
      for (size_t k = 0; k < route.pts.size(); ++k) {
        if (k > 0) leg.edge_seg.push_back(route.edge_seg[k - 1]);
        leg.pts.push_back(route.pts[k]);
      }
      leg.pts.push_back(dest_dwell);
      leg.edge_seg.push_back(-1);

      leg.cum_m.resize(leg.pts.size());
      leg.cum_m[0] = 0;
      for (size_t k = 1; k < leg.pts.size(); ++k)
        leg.cum_m[k] = leg.cum_m[k - 1] + geo::haversine_m(leg.pts[k - 1], leg.pts[k]);
      std::int64_t travel_ms =
          static_cast<std::int64_t>(leg.cum_m.back() / leg.speed_mps * 1000.0);
      std::int64_t slack = rng.uniform_int(120, 420) * 1000;
      std::int64_t depart = visit.start_ms - travel_ms - slack;
      if (depart < free_at) depart = free_at + 30'000;
      depart = depart / tick_ms * tick_ms;
      leg.depart_ms = depart;
      leg.arrive_ms = depart + travel_ms;
      free_at = std::max(visit.end_ms, leg.arrive_ms);

      for (int seg : leg.edge_seg)
        if (seg >= 0) ++traversals[static_cast<size_t>(seg)];

      tl.legs.push_back(std::move(leg));
      tl.dwell.push_back(dest_dwell);
      tl.facing.push_back({1.0, 0.0});
      cur_poi = visit.poi;
      cur_dwell = dest_dwell;
    }
    agent.timeline = std::move(tl);
  };

  for (auto& p : peds) build_timeline(p, true);
  for (auto& s : scooters) {
    if (s.parked) {
      Timeline tl;
      bool near_poi = rng.uniform() < 0.6 && !attractor_pois.empty();
      tl.dwell.push_back(near_poi ? parked_point_near_poi(weighted_poi(attractor_pois))
                                  : random_point_on_network());
      tl.facing.push_back({1.0, 0.0});
      s.timeline = std::move(tl);
    } else {
      build_timeline(s, false);
    }
  }

  // Corridor width per segment: hot (busy) segments squeeze traffic together.
  std::vector<double> corridor_halfwidth_ft(network.segments.size(),
                                            config.base_corridor_halfwidth_ft);
  {
    std::vector<int> busy;
    for (int t : traversals)
      if (t > 0) busy.push_back(t);
    if (!busy.empty()) {
      std::sort(busy.begin(), busy.end());
      size_t idx = static_cast<size_t>(
          std::min(static_cast<double>(busy.size() - 1),
                   std::floor(config.hot_traversal_percentile * static_cast<double>(busy.size()))));
      int threshold = std::max(busy[idx], 2);
      for (size_t sgi = 0; sgi < traversals.size(); ++sgi)
        if (traversals[sgi] >= threshold)
          corridor_halfwidth_ft[sgi] = config.hot_corridor_halfwidth_ft;
    }
  }

  // Lateral offsets: one draw per run of consecutive same-segment edges.
  auto assign_laterals = [&](Timeline& tl) {
    for (auto& leg : tl.legs) {
      leg.edge_lat_m.assign(leg.edge_seg.size(), 0.0);
      int prev_seg = -2;
      double cur = 0.0;
      for (size_t e = 0; e < leg.edge_seg.size(); ++e) {
        int seg = leg.edge_seg[e];
        if (seg < 0) {
          cur = 0.0;
        } else if (seg != prev_seg) {
          double w = corridor_halfwidth_ft[static_cast<size_t>(seg)];
          cur = geo::feet_to_m(rng.uniform(0.8, w)) * rng.pick_side();
        }
        leg.edge_lat_m[e] = cur;
        prev_seg = seg;
      }
    }
  };
  for (auto& p : peds) assign_laterals(p.timeline);
  for (auto& s : scooters) assign_laterals(s.timeline);

  // --- emission / capture / truth loop ---

  PedGrid grid(bb_lo, bb_hi, 60.0);
  int reach = static_cast<int>(std::ceil((max_range_m + 15.0) / 60.0)) + 1;

  std::unordered_map<std::int64_t, PairState> pair_state;
  double startle_credit = 0.0;

  auto hr_at = [&](const PedState& p, std::int64_t t) {
    double boost = 0;
    for (const auto& [b0, b1] : p.hr_boosts) {
      if (t >= b0 && t <= b1) {
        std::int64_t plateau = b0 + (b1 - b0) * 2 / 3;
        boost = t <= plateau ? config.startle_delta_bpm
                             : config.startle_delta_bpm *
                                   static_cast<double>(b1 - t) / static_cast<double>(b1 - plateau);
        break;
      }
    }
    return p.resting_bpm + boost;
  };

  auto finalize_pair = [&](std::int64_t key, PairState& st) {
    if (!st.open) return;
    st.open = false;
    if (st.last_ms - st.start_ms + adv_ms < truth_min_ms) return;
    int ped_idx = static_cast<int>(key / 100000);
    int sc_idx = static_cast<int>(key % 100000);
    GroundTruthEncounter t;
    t.participant_id = peds[static_cast<size_t>(ped_idx)].id;
    t.device_id = scooters[static_cast<size_t>(sc_idx)].device_id;
    t.start = tz.at(st.start_ms);
    t.end = tz.at(st.last_ms);
    t.min_distance_ft = st.min_ft;
    result.truth.push_back(std::move(t));
  };

  std::vector<PosSample> ped_pos(peds.size());
  std::vector<int> candidates;

  for (int day = 0; day < config.duration_days; ++day) {
    std::int64_t frame0 = day_epoch(day, config.active_start_ms);
    std::int64_t frame_end = day_epoch(day, config.active_end_ms);

    for (std::int64_t frame = frame0; frame < frame_end; frame += adv_ms) {
      grid.clear();
      for (size_t pi = 0; pi < peds.size(); ++pi) {
        ped_pos[pi] = position_at_fast(peds[pi].timeline, frame);
        grid.insert(static_cast<int>(pi), ped_pos[pi].pos);
      }

      for (size_t si = 0; si < scooters.size(); ++si) {
        auto& sc = scooters[si];
        std::int64_t t_e = frame + sc.phase_ms;
        if (t_e >= frame_end) continue;
        PosSample sc_pos = position_at_fast(sc.timeline, t_e);

        candidates.clear();
        grid.gather(sc_pos.pos, reach, candidates);
        if (candidates.empty()) continue;
        std::sort(candidates.begin(), candidates.end());

        for (int pi : candidates) {
          PosSample pp = position_at_fast(peds[static_cast<size_t>(pi)].timeline, t_e);
          double d_m = geo::haversine_m(sc_pos.pos, pp.pos);
          if (d_m > max_range_m + 1.0) continue;
          double d_ft = geo::m_to_feet(d_m);

          // ground truth tracking
          if (d_ft <= config.truth_distance_ft) {
            std::int64_t key = static_cast<std::int64_t>(pi) * 100000 +
                               static_cast<std::int64_t>(si);
            auto& st = pair_state[key];
            if (st.open && t_e - st.last_ms > close_gap_ms) finalize_pair(key, st);
            if (!st.open) {
              st.open = true;
              st.prompted = false;
              st.start_ms = t_e;
              st.min_ft = d_ft;
            }
            st.last_ms = t_e;
            st.min_ft = std::min(st.min_ft, d_ft);

            if (!st.prompted && st.last_ms - st.start_ms + adv_ms >= truth_min_ms) {
              st.prompted = true;
              auto& ped = peds[static_cast<size_t>(pi)];
              if (t_e - ped.last_prompt_ms >= prompt_gap_ms) {
                ped.last_prompt_ms = t_e;
                ++result.stats.prompts;
                if (rng.uniform() < config.answer_fraction) {
                  std::int64_t delay_ms = rng.uniform_int(2000, 45000);
                  std::int64_t t_ans = t_e + delay_ms;
                  bool moving = sc_pos.moving && sc_pos.speed_mps > 0.5 * kMphToMps;
                  fb::FeedbackRecord rec;
                  rec.participant_id = ped.id;
                  rec.timestamp = tz.at(t_ans);
                  rec.provider = sc.provider;
                  rec.q_moving = moving;
                  if (moving) {
                    ++result.stats.moving_feedbacks;
                    // line of sight: scooter bearing vs. pedestrian heading
                    double to_e, to_n;
                    geo::segment_direction(pp.pos, sc_pos.pos, to_e, to_n);
                    double dot = to_e * pp.east + to_n * pp.north;
                    rec.q_in_front = dot >= 0;
                    PosSample sc_next = position_at_fast(sc.timeline, t_e + 500);
                    PosSample pp_next =
                        position_at_fast(peds[static_cast<size_t>(pi)].timeline, t_e + 500);
                    rec.q_toward = geo::haversine_m(sc_next.pos, pp_next.pos) < d_m;
                    startle_credit += config.startle_fraction;
                    if (startle_credit >= 1.0) {
                      startle_credit -= 1.0;
                      ped.hr_boosts.push_back({t_e, t_e + 180'000});
                      ++result.stats.startled_planted;
                    }
                  }
                  PosSample ans_pos = position_at_fast(ped.timeline, t_ans);
                  LatLon noisy = geo::offset_point(ans_pos.pos,
                                                   rng.normal(0, config.gps_noise_sigma_m),
                                                   rng.normal(0, config.gps_noise_sigma_m));
                  rec.gps = noisy;
                  rec.heart_rate_bpm =
                      std::clamp(hr_at(ped, t_ans) + rng.normal(0, 3), 26.0, 249.0);
                  rec.answered_within_s = static_cast<double>(delay_ms) / 1000.0;
                  result.feedback.push_back(std::move(rec));
                }
              }
            }
          }

          // capture draw
          double p_capture = capture_probability(config.reception_curve, d_ft);
          if (p_capture <= 0) continue;
          if (rng.uniform() >= p_capture) continue;

          double baseline = providers.one_foot_rssi_db(sc.provider);
          double noise = std::clamp(rng.normal(0, config.rssi_noise_sigma_db),
                                    -3 * config.rssi_noise_sigma_db,
                                    3 * config.rssi_noise_sigma_db);
          double rssi = baseline -
                        10.0 * config.path_loss_exponent * std::log10(std::max(d_ft, 1.0)) + noise;
          rssi = std::min(rssi, -0.1);

          ble::BleReception r;
          r.timestamp = tz.at(t_e);
          r.device_id = sc.device_id;
          r.payload = sc.payload;
          r.rssi_db = rssi;
          r.receiver_id = peds[static_cast<size_t>(pi)].id;
          ble::GpsFix fix;
          fix.pos = geo::offset_point(pp.pos, rng.normal(0, config.gps_noise_sigma_m),
                                      rng.normal(0, config.gps_noise_sigma_m));
          // keep exact position when noise is disabled
          if (config.gps_noise_sigma_m <= 0) fix.pos = pp.pos;
          fix.accuracy_m = std::max(1.0, config.gps_noise_sigma_m);
          r.gps = fix;
          r.heart_rate_bpm = std::clamp(
              hr_at(peds[static_cast<size_t>(pi)], t_e) + rng.normal(0, 3), 26.0, 249.0);
          result.receptions.push_back(std::move(r));
        }
      }
    }

    // day boundary: close all open truth intervals
    for (auto& [key, st] : pair_state) finalize_pair(key, st);
    pair_state.clear();
  }

  std::sort(result.receptions.begin(), result.receptions.end(),
            [](const ble::BleReception& a, const ble::BleReception& b) {
              if (a.timestamp.epoch_ms != b.timestamp.epoch_ms)
                return a.timestamp.epoch_ms < b.timestamp.epoch_ms;
              if (a.receiver_id != b.receiver_id) return a.receiver_id < b.receiver_id;
              return a.device_id < b.device_id;
            });
  std::sort(result.feedback.begin(), result.feedback.end(),
            [](const fb::FeedbackRecord& a, const fb::FeedbackRecord& b) {
              if (a.timestamp.epoch_ms != b.timestamp.epoch_ms)
                return a.timestamp.epoch_ms < b.timestamp.epoch_ms;
              return a.participant_id < b.participant_id;
            });
  std::sort(result.truth.begin(), result.truth.end(),
            [](const GroundTruthEncounter& a, const GroundTruthEncounter& b) {
              if (a.start.epoch_ms != b.start.epoch_ms) return a.start.epoch_ms < b.start.epoch_ms;
              if (a.participant_id != b.participant_id) return a.participant_id < b.participant_id;
              return a.device_id < b.device_id;
            });

  result.stats.receptions = static_cast<std::int64_t>(result.receptions.size());
  result.stats.feedbacks = static_cast<std::int64_t>(result.feedback.size());
  result.stats.truth_encounters = static_cast<std::int64_t>(result.truth.size());
  return result;
}

Score score_detector(std::span<const GroundTruthEncounter> truth,
                     std::span<const detect::Encounter> detected) {
  Score score;
  score.truth_total = static_cast<std::int64_t>(truth.size());
  score.detected_total = static_cast<std::int64_t>(detected.size());

  std::map<std::pair<std::string_view, std::string_view>, std::vector<size_t>> truth_index;
  for (size_t i = 0; i < truth.size(); ++i)
    truth_index[{truth[i].participant_id, truth[i].device_id}].push_back(i);

  std::vector<bool> truth_matched(truth.size(), false);
  std::int64_t matched_detected = 0;
  for (const auto& d : detected) {
    auto it = truth_index.find({d.participant_id, d.device_id});
    bool any = false;
    if (it != truth_index.end()) {
      for (size_t ti : it->second) {
        const auto& t = truth[ti];
        if (d.start.epoch_ms <= t.end.epoch_ms && t.start.epoch_ms <= d.end.epoch_ms) {
          truth_matched[ti] = true;
          any = true;
        }
      }
    }
    if (any) ++matched_detected;
  }
  score.matched_detected = matched_detected;
  score.matched_truth = std::count(truth_matched.begin(), truth_matched.end(), true);

  if (score.detected_total == 0) {
    score.precision = 1.0;
    score.precision_by_convention = true;
  } else {
    score.precision = static_cast<double>(score.matched_detected) /
                      static_cast<double>(score.detected_total);
  }
  if (score.truth_total == 0) {
    score.recall = 1.0;
    score.recall_by_convention = true;
  } else {
    score.recall =
        static_cast<double>(score.matched_truth) / static_cast<double>(score.truth_total);
  }
  return score;
}

}  // namespace scootsense::sim
