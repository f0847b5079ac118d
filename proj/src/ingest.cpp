#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "fairmatch/harness.hpp"
#include "fairmatch/random.hpp"
#include "json.hpp"

namespace fairmatch {
namespace {

constexpr const char* kTripHeader = "driver_id,pickup_lat,pickup_lon,drop_lat,drop_lon,trip_length,timestamp";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::size_t line, const char* field) {
  double value = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw std::invalid_argument("trip CSV line " + std::to_string(line) + ": bad " + field + " '" + s + "'");
  }
  return value;
}

struct Bin {
  long lat = 0;
  long lon = 0;
  auto operator<=>(const Bin&) const = default;
};

Bin bin_of(double lat, double lon, const IngestConfig& cfg) {
  return {static_cast<long>(std::floor((lat - cfg.box.lat_min) / cfg.grid_step)),
          static_cast<long>(std::floor((lon - cfg.box.lon_min) / cfg.grid_step))};
}

// Marks round(fraction * n) of n items as advantaged, chosen by a shuffle.
std::vector<char> sample_advantaged(std::size_t n, double fraction, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[uniform_index(rng, i)]);
  const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  std::vector<char> adv(n, 0);
  for (std::size_t i = 0; i < k; ++i) adv[idx[i]] = 1;
  return adv;
}

}  // namespace

std::vector<TripRecord> read_trips_csv(std::istream& in) {
  std::vector<TripRecord> out;
  std::string line;
  std::size_t lineno = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line.rfind("driver_id", 0) == 0) continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 7) {
      throw std::invalid_argument("trip CSV line " + std::to_string(lineno) + ": expected 7 fields, got " +
                                  std::to_string(f.size()));
    }
    TripRecord r;
    r.driver_id = f[0];
    r.pickup_lat = parse_number(f[1], lineno, "pickup_lat");
    r.pickup_lon = parse_number(f[2], lineno, "pickup_lon");
    r.drop_lat = parse_number(f[3], lineno, "drop_lat");
    r.drop_lon = parse_number(f[4], lineno, "drop_lon");
    r.trip_length = parse_number(f[5], lineno, "trip_length");
    r.timestamp = parse_number(f[6], lineno, "timestamp");
    if (r.trip_length < 0.0) {
      throw std::invalid_argument("trip CSV line " + std::to_string(lineno) + ": negative trip_length");
    }
    out.push_back(std::move(r));
  }
  if (in.bad()) throw std::runtime_error("failed reading trip CSV");
  return out;
}

std::vector<TripRecord> load_trips_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trip file " + path);
  return read_trips_csv(in);
}

void write_trips_csv(std::ostream& out, const std::vector<TripRecord>& records) {
  out << kTripHeader << '\n';
  for (const auto& r : records) {
    out << r.driver_id << ',' << format_number(r.pickup_lat) << ',' << format_number(r.pickup_lon) << ','
        << format_number(r.drop_lat) << ',' << format_number(r.drop_lon) << ',' << format_number(r.trip_length)
        << ',' << format_number(r.timestamp) << '\n';
  }
}

void validate_ingest_config(const IngestConfig& cfg) {
  auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!(cfg.grid_step > 0.0)) throw std::invalid_argument("grid_step must be positive");
  if (!(cfg.box.lat_min < cfg.box.lat_max && cfg.box.lon_min < cfg.box.lon_max)) {
    throw std::invalid_argument("bounding box must have min < max");
  }
  if (!unit(cfg.advantaged_fraction)) throw std::invalid_argument("advantaged_fraction must lie in [0,1]");
  if (!unit(cfg.pe_adv_adv) || !unit(cfg.pe_dis_dis) || !unit(cfg.pe_mixed)) {
    throw std::invalid_argument("success probabilities must lie in [0,1]");
  }
  if (cfg.driver_patience < 1) throw std::invalid_argument("driver_patience must be at least 1");
  if (cfg.rider_patience_choices.empty() ||
      std::any_of(cfg.rider_patience_choices.begin(), cfg.rider_patience_choices.end(), [](int p) { return p < 1; })) {
    throw std::invalid_argument("rider_patience_choices must be a nonempty list of values >= 1");
  }
  if (cfg.vicinity_radius < 0) throw std::invalid_argument("vicinity_radius must be nonnegative");
  if (!(cfg.distance_per_degree > 0.0)) throw std::invalid_argument("distance_per_degree must be positive");
  if (cfg.utility_shift && !(*cfg.utility_shift >= 0.0)) {
    throw std::invalid_argument("utility_shift must be nonnegative");
  }
}

IngestConfig ingest_config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("ingest config: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("ingest config must be a JSON object");
  IngestConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "grid_step") cfg.grid_step = value.get<double>();
      else if (key == "advantaged_fraction") cfg.advantaged_fraction = value.get<double>();
      else if (key == "pe_adv_adv") cfg.pe_adv_adv = value.get<double>();
      else if (key == "pe_dis_dis") cfg.pe_dis_dis = value.get<double>();
      else if (key == "pe_mixed") cfg.pe_mixed = value.get<double>();
      else if (key == "driver_patience") cfg.driver_patience = value.get<int>();
      else if (key == "rider_patience_choices") cfg.rider_patience_choices = value.get<std::vector<int>>();
      else if (key == "vicinity_radius") cfg.vicinity_radius = value.get<int>();
      else if (key == "distance_per_degree") cfg.distance_per_degree = value.get<double>();
      else if (key == "utility_shift") {
        if (!value.is_null()) cfg.utility_shift = value.get<double>();
      } else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "bounding_box") {
        for (const auto& [bk, bv] : value.items()) {
          if (bk == "lat_min") cfg.box.lat_min = bv.get<double>();
          else if (bk == "lat_max") cfg.box.lat_max = bv.get<double>();
          else if (bk == "lon_min") cfg.box.lon_min = bv.get<double>();
          else if (bk == "lon_max") cfg.box.lon_max = bv.get<double>();
          else throw std::invalid_argument("ingest config: unknown bounding_box key '" + bk + "'");
        }
      } else {
        throw std::invalid_argument("ingest config: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("ingest config: ") + e.what());
  }
  validate_ingest_config(cfg);
  return cfg;
}

IngestResult ingest_trips(const std::vector<TripRecord>& records, const IngestConfig& cfg) {
  validate_ingest_config(cfg);
  IngestResult result;

  std::map<std::string, int> driver_index;
  std::map<std::pair<Bin, Bin>, int> type_index;
  std::vector<std::string> driver_names;
  std::vector<int> type_count;
  std::vector<double> type_length;
  int kept = 0;
  for (const auto& r : records) {
    if (!cfg.box.contains(r.pickup_lat, r.pickup_lon) || !cfg.box.contains(r.drop_lat, r.drop_lon)) {
      ++result.dropped;
      continue;
    }
    ++kept;
    if (driver_index.emplace(r.driver_id, static_cast<int>(driver_names.size())).second) {
      driver_names.push_back(r.driver_id);
    }
    const Bin start = bin_of(r.pickup_lat, r.pickup_lon, cfg);
    const Bin end = bin_of(r.drop_lat, r.drop_lon, cfg);
    const auto [it, fresh] = type_index.emplace(std::pair{start, end}, static_cast<int>(type_count.size()));
    if (fresh) {
      type_count.push_back(0);
      type_length.push_back(0.0);
    }
    const auto v = static_cast<std::size_t>(it->second);
    ++type_count[v];
    type_length[v] += r.trip_length;
  }
  if (kept == 0) throw std::invalid_argument("ingest: no trip record inside the bounding box");

  Rng rng = make_rng(cfg.seed);
  Instance& inst = result.instance;
  inst.arrival_model = ArrivalModel::Kiid;
  inst.horizon = kept;
  inst.groups = {"advantaged", "disadvantaged"};

  const std::vector<char> adv_u = sample_advantaged(driver_names.size(), cfg.advantaged_fraction, rng);
  const std::vector<char> adv_v = sample_advantaged(type_count.size(), cfg.advantaged_fraction, rng);
  for (std::size_t u = 0; u < driver_names.size(); ++u) {
    inst.offline.push_back({static_cast<int>(u), adv_u[u] ? 0 : 1, cfg.driver_patience});
  }
  for (std::size_t v = 0; v < type_count.size(); ++v) {
    OnlineType t;
    t.id = static_cast<int>(v);
    t.group = adv_v[v] ? 0 : 1;
    t.patience = cfg.rider_patience_choices[uniform_index(rng, cfg.rider_patience_choices.size())];
    t.p = static_cast<double>(type_count[v]) / kept;
    inst.online.push_back(std::move(t));
  }

  const int side = 2 * cfg.vicinity_radius + 1;
  std::vector<double> dist;
  for (std::size_t u = 0; u < inst.offline.size(); ++u) {
    for (std::size_t v = 0; v < inst.online.size(); ++v) {
      const auto cell = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(side * side)));
      const double dlat = (cell / side - cfg.vicinity_radius) * cfg.grid_step;
      const double dlon = (cell % side - cfg.vicinity_radius) * cfg.grid_step;
      dist.push_back((std::abs(dlat) + std::abs(dlon)) * cfg.distance_per_degree);
      Edge e;
      e.u = static_cast<int>(u);
      e.v = static_cast<int>(v);
      const bool au = adv_u[u] != 0;
      const bool av = adv_v[v] != 0;
      e.success_prob = au && av ? cfg.pe_adv_adv : (!au && !av ? cfg.pe_dis_dis : cfg.pe_mixed);
      e.w_op = type_length[v] / type_count[v];
      inst.edges.push_back(e);
    }
  }
  const double shift = cfg.utility_shift.value_or(dist.empty() ? 0.0 : *std::max_element(dist.begin(), dist.end()));
  inst.utility_shift = shift;
  for (std::size_t e = 0; e < inst.edges.size(); ++e) {
    Edge& edge = inst.edges[e];
    edge.w_on = shift - dist[e];
    edge.w_off = edge.w_op - dist[e] + shift;
  }
  require_valid(inst);
  return result;
}

std::vector<TripRecord> synthetic_trips(const SyntheticTripConfig& cfg) {
  if (cfg.drivers < 1 || cfg.types < 1 || cfg.hotspots < 1 || !(cfg.spread >= 0.0) || !(cfg.grid_step > 0.0) ||
      !(cfg.city_radius >= 0.0)) {
    throw std::invalid_argument("synthetic trips: counts and grid step must be positive, spread and radius >= 0");
  }
  if (!cfg.box.contains(cfg.center_lat, cfg.center_lon)) {
    throw std::invalid_argument("synthetic trips: city center lies outside the bounding box");
  }
  Rng rng = make_rng(cfg.seed);
  const BoundingBox& box = cfg.box;
  std::vector<std::pair<double, double>> spots;
  for (int h = 0; h < cfg.hotspots; ++h) {
    const double lat = cfg.center_lat + (2.0 * uniform01(rng) - 1.0) * cfg.city_radius;
    const double lon = cfg.center_lon + (2.0 * uniform01(rng) - 1.0) * cfg.city_radius;
    spots.emplace_back(lat, lon);
  }
  std::normal_distribution<double> noise(0.0, cfg.spread);
  auto point = [&](std::size_t h) {
    const double lat = std::clamp(spots[h].first + noise(rng), box.lat_min, box.lat_max);
    const double lon = std::clamp(spots[h].second + noise(rng), box.lon_min, box.lon_max);
    return std::pair{lat, lon};
  };

  IngestConfig keying;
  keying.grid_step = cfg.grid_step;
  keying.box = box;
  std::map<std::pair<Bin, Bin>, int> seen;
  std::vector<TripRecord> out;
  double clock = 0.0;
  while (static_cast<int>(seen.size()) < cfg.types) {
    if (static_cast<int>(out.size()) >= cfg.max_records) {
      throw std::runtime_error("synthetic trips: only " + std::to_string(seen.size()) + " distinct types after " +
                               std::to_string(cfg.max_records) + " records");
    }
    TripRecord r;
    const int k = static_cast<int>(out.size());
    r.driver_id = "d" + std::to_string(k < cfg.drivers ? k : static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(cfg.drivers))));
    const auto [plat, plon] = point(uniform_index(rng, spots.size()));
    const auto [dlat, dlon] = point(uniform_index(rng, spots.size()));
    const auto key = std::pair{bin_of(plat, plon, keying), bin_of(dlat, dlon, keying)};
    r.pickup_lat = plat;
    r.pickup_lon = plon;
    r.drop_lat = dlat;
    r.drop_lon = dlon;
    r.trip_length = std::max(0.1, (std::abs(plat - dlat) + std::abs(plon - dlon)) * keying.distance_per_degree);
    clock += 30.0 + 60.0 * uniform01(rng);
    r.timestamp = std::floor(clock);
    seen.emplace(key, 0);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace fairmatch
