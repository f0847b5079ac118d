#pragma once

// Instance generation (trip-record ingestion, synthetic trips, hardness
// fixtures), experiment orchestration and ratio reports.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairmatch/algorithms.hpp"
#include "fairmatch/benchmarks.hpp"
#include "fairmatch/kernels.hpp"
#include "fairmatch/model.hpp"

namespace fairmatch {

// ---------------------------------------------------------------------------
// Trip records

struct TripRecord {
  std::string driver_id;
  double pickup_lat = 0.0;
  double pickup_lon = 0.0;
  double drop_lat = 0.0;
  double drop_lon = 0.0;
  double trip_length = 0.0;
  double timestamp = 0.0;  ///< seconds
};

/// CSV with header driver_id,pickup_lat,pickup_lon,drop_lat,drop_lon,trip_length,timestamp.
/// Throws std::runtime_error on I/O failure and std::invalid_argument on a
/// malformed line (the message carries the line number).
[[nodiscard]] std::vector<TripRecord> read_trips_csv(std::istream& in);
[[nodiscard]] std::vector<TripRecord> load_trips_csv(const std::string& path);
void write_trips_csv(std::ostream& out, const std::vector<TripRecord>& records);

struct BoundingBox {
  double lat_min = 40.4;
  double lat_max = 40.95;
  double lon_min = -75.0;
  double lon_max = -73.0;

  [[nodiscard]] bool contains(double lat, double lon) const {
    return lat >= lat_min && lat <= lat_max && lon >= lon_min && lon <= lon_max;
  }
};

struct IngestConfig {
  double grid_step = 0.005;  ///< degrees
  BoundingBox box;
  double advantaged_fraction = 0.7;
  double pe_adv_adv = 0.6;
  double pe_dis_dis = 0.3;
  double pe_mixed = 0.1;
  int driver_patience = 3;
  std::vector<int> rider_patience_choices{1, 2};
  /// Driver positions are drawn from the (2r+1)^2 grid points within r steps
  /// of the pickup bin center.
  int vicinity_radius = 4;
  /// Converts degree-space Manhattan distance to trip-length units.
  double distance_per_degree = 69.0;
  /// Added to rider and driver utilities; defaults to the largest distance.
  std::optional<double> utility_shift;
  std::uint64_t seed = 0;
};

/// Throws std::invalid_argument on out-of-range fields.
void validate_ingest_config(const IngestConfig& cfg);

/// Reads the fields present in a JSON object, keeping defaults for the rest;
/// unknown keys are rejected with std::invalid_argument.
[[nodiscard]] IngestConfig ingest_config_from_json(const std::string& text);

struct IngestResult {
  Instance instance;
  int dropped = 0;  ///< records outside the bounding box
};

/// Drivers become offline vertices, requests become KIID types keyed by
/// (pickup bin, drop-off bin) with p_v = count / T and T = number of kept
/// records. The bipartite graph is complete. Throws std::invalid_argument
/// when no record survives the box filter.
[[nodiscard]] IngestResult ingest_trips(const std::vector<TripRecord>& records, const IngestConfig& cfg);

struct SyntheticTripConfig {
  int drivers = 49;
  int types = 172;      ///< records are drawn until this many distinct types exist
  int hotspots = 8;
  double center_lat = 40.75;
  double center_lon = -73.97;
  double city_radius = 0.08;  ///< hotspots lie within this many degrees of the center
  double spread = 0.01;       ///< standard deviation around a hotspot, degrees
  double grid_step = 0.005;
  BoundingBox box;
  int max_records = 100000;
  std::uint64_t seed = 0;
};

/// Clustered trips around random hotspots near the city center. Throws
/// std::runtime_error if `types` distinct types are not reached within
/// `max_records` draws.
[[nodiscard]] std::vector<TripRecord> synthetic_trips(const SyntheticTripConfig& cfg);

// ---------------------------------------------------------------------------
// Hardness fixtures

/// Complete 3x3 instance with p_e = 1, unit patience, p_v = 1/3 and
/// singleton groups on both sides; w^O, w^U, w^V are three permutation
/// matrices with disjoint supports. Throws unless T is a positive multiple
/// of 3.
[[nodiscard]] Instance make_hardness_group_instance(int horizon);

/// Group-versus-individual fixture. Offline: two offline vertices in one
/// group, one certain arrival, w^U = 1 and L. Online: one offline vertex and
/// two rounds whose certain arrivals (one online group) get w^V = 1 and L.
/// Throws unless L > 0.
[[nodiscard]] Instance make_hardness_indiv_group_instance(double L, Side side);

// ---------------------------------------------------------------------------
// Experiments

enum class Algo { Tsf, TsfKad, GreedyO, GreedyR, GreedyD };

[[nodiscard]] const char* to_string(Algo a);
/// Accepts tsf, tsf-kad, greedy-o, greedy-r, greedy-d.
[[nodiscard]] Algo parse_algo(const std::string& name);
[[nodiscard]] bool uses_weights(Algo a);

struct AlgoConfig {
  Algo algo = Algo::Tsf;
  Weights weights;
  int rho_simulations = kDefaultRhoSimulations;
  double lambda = kDefaultLambda;
  /// Guide the algorithm by LPs solved with w^U = w^V = 1 while still
  /// measuring the real utilities.
  bool unit_weight_lp = false;
};

struct ExperimentOptions {
  int trials = 100;
  std::uint64_t seed = 0;
  Execution exec = Execution::Parallel;
};

struct ObjectiveRatio {
  Objective objective = Objective::Operator;
  double empirical = 0.0;
  double std_error = 0.0;  ///< of the empirical mean
  double optimum = 0.0;
  std::optional<double> ratio;  ///< empty when the optimum is 0
};

struct RatioReport {
  AlgoConfig config;
  int trials = 0;
  std::uint64_t seed = 0;
  std::array<ObjectiveRatio, 3> objectives;
  long long clamped_probes = 0;  ///< TSF-KAD only
  std::vector<std::string> warnings;
};

/// Benchmarks and transformed views of one instance, built on demand and
/// shared across configurations.
class ExperimentContext {
 public:
  explicit ExperimentContext(Instance inst, Execution exec = Execution::Parallel);

  [[nodiscard]] const Instance& instance() const { return inst_; }
  /// Fragmented KIID view (KIID input only) and its benchmarks.
  const Instance& fragmented();
  const BenchmarkBundle& kiid_bundle();
  const BenchmarkBundle& kiid_unit_bundle();
  /// KAD view (as_kad of the fragmented view for KIID input) and its benchmarks.
  const Instance& kad();
  const BenchmarkBundle& kad_bundle();
  const BenchmarkBundle& kad_unit_bundle();
  /// Instance on which a configuration is simulated and measured.
  const Instance& simulation_instance(Algo a);
  /// Benchmarks used as the ratio denominators of a configuration.
  const BenchmarkBundle& reference_bundle(Algo a);

 private:
  Instance inst_;
  Execution exec_;
  std::optional<Instance> fragmented_, kad_;
  std::optional<BenchmarkBundle> kiid_, kiid_unit_, kad_bundle_, kad_unit_;
};

/// Traces of one configuration; TSF-KAD estimates rho first (seeded from
/// opts.seed) and adds its clamp count to `clamped` when given.
[[nodiscard]] std::vector<RunTrace> simulate(ExperimentContext& ctx, const AlgoConfig& cfg,
                                             const ExperimentOptions& opts, long long* clamped = nullptr);

/// Every configuration runs the same trial seeds, so sweeps share random
/// arrival sequences. Reports come back in configuration order.
[[nodiscard]] std::vector<RatioReport> run_experiment(ExperimentContext& ctx, const std::vector<AlgoConfig>& configs,
                                                      const ExperimentOptions& opts);
[[nodiscard]] std::vector<RatioReport> run_experiment(const Instance& inst, const std::vector<AlgoConfig>& configs,
                                                      const ExperimentOptions& opts);

/// Builds a report from traces measured on `inst` against `bundle`.
[[nodiscard]] RatioReport make_report(const Instance& inst, const BenchmarkBundle& bundle, const AlgoConfig& cfg,
                                      std::span<const RunTrace> traces, const ExperimentOptions& opts);

/// alpha in {start, start+step, ..., stop} with beta = gamma = (1 - alpha)/2.
[[nodiscard]] std::vector<AlgoConfig> alpha_sweep(double start, double stop, double step, Algo algo = Algo::Tsf);
/// Parses "start:stop:step".
[[nodiscard]] std::vector<double> parse_range(const std::string& text);

/// Same instance with every w^U and w^V set to 1.
[[nodiscard]] Instance with_unit_fairness_weights(const Instance& inst);

enum class ReportFormat { Json, Csv };

[[nodiscard]] ReportFormat parse_format(const std::string& name);

/// CSV columns: algo, alpha, beta, gamma, objective, empirical, optimum,
/// ratio, stderr; one row per (report, objective). "na" marks a ratio with
/// a zero optimum and the weights of weightless algorithms. Throws
/// std::invalid_argument on an empty report list.
void emit_report(const std::vector<RatioReport>& reports, ReportFormat format, std::ostream& out);
/// Throws std::runtime_error when the file cannot be written.
void emit_report(const std::vector<RatioReport>& reports, ReportFormat format, const std::string& path);

/// Shortest round-trip decimal form.
[[nodiscard]] std::string format_number(double x);

struct Correlation {
  double rho = 0.0;
  double p_value = 1.0;  ///< two-sided, t approximation
};

/// Spearman rank correlation with average ranks for ties. Throws
/// std::invalid_argument for fewer than 3 pairs or mismatched lengths.
[[nodiscard]] Correlation spearman(std::span<const double> x, std::span<const double> y);

}  // namespace fairmatch
