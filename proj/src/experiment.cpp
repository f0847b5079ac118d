#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include <boost/math/distributions/students_t.hpp>

#include "fairmatch/baselines.hpp"
#include "fairmatch/harness.hpp"
#include "fairmatch/trials.hpp"
#include "json.hpp"

namespace fairmatch {
namespace {

constexpr std::uint64_t kRhoStream = 0x72686f;

constexpr std::array kObjectives{Objective::Operator, Objective::OfflineFair, Objective::OnlineFair};

// Grid points snapped to 1e-12 so 0.1 * 3 prints as 0.3.
double snap(double x) { return std::round(x * 1e12) / 1e12; }

}  // namespace

const char* to_string(Algo a) {
  switch (a) {
    case Algo::Tsf: return "tsf";
    case Algo::TsfKad: return "tsf-kad";
    case Algo::GreedyO: return "greedy-o";
    case Algo::GreedyR: return "greedy-r";
    case Algo::GreedyD: return "greedy-d";
  }
  return "?";
}

Algo parse_algo(const std::string& name) {
  for (Algo a : {Algo::Tsf, Algo::TsfKad, Algo::GreedyO, Algo::GreedyR, Algo::GreedyD}) {
    if (name == to_string(a)) return a;
  }
  throw std::invalid_argument("unknown algorithm '" + name + "' (tsf, tsf-kad, greedy-o, greedy-r, greedy-d)");
}

bool uses_weights(Algo a) { return a == Algo::Tsf || a == Algo::TsfKad; }

Instance with_unit_fairness_weights(const Instance& inst) {
  Instance out = inst;
  for (auto& e : out.edges) {
    e.w_off = 1.0;
    e.w_on = 1.0;
  }
  return out;
}

// ---------------------------------------------------------------------------

ExperimentContext::ExperimentContext(Instance inst, Execution exec) : inst_(std::move(inst)), exec_(exec) {
  require_valid(inst_);
}

const Instance& ExperimentContext::fragmented() {
  if (inst_.arrival_model != ArrivalModel::Kiid) throw std::invalid_argument("fragmented view needs a KIID instance");
  if (!fragmented_) fragmented_ = is_fragmented(inst_) ? inst_ : fragment_types(inst_);
  return *fragmented_;
}

const BenchmarkBundle& ExperimentContext::kiid_bundle() {
  if (!kiid_) {
    kiid_ = is_fragmented(inst_) ? benchmarks(fragmented(), exec_) : fragmented_benchmarks(inst_, fragmented(), exec_);
  }
  return *kiid_;
}

const BenchmarkBundle& ExperimentContext::kiid_unit_bundle() {
  if (!kiid_unit_) {
    const Instance unit = with_unit_fairness_weights(inst_);
    const Instance unit_frag = with_unit_fairness_weights(fragmented());
    kiid_unit_ = is_fragmented(unit) ? benchmarks(unit_frag, exec_) : fragmented_benchmarks(unit, unit_frag, exec_);
  }
  return *kiid_unit_;
}

const Instance& ExperimentContext::kad() {
  if (!kad_) kad_ = inst_.arrival_model == ArrivalModel::Kad ? inst_ : as_kad(fragmented());
  return *kad_;
}

const BenchmarkBundle& ExperimentContext::kad_bundle() {
  if (!kad_bundle_) kad_bundle_ = benchmarks(kad(), exec_);
  return *kad_bundle_;
}

const BenchmarkBundle& ExperimentContext::kad_unit_bundle() {
  if (!kad_unit_) kad_unit_ = benchmarks(with_unit_fairness_weights(kad()), exec_);
  return *kad_unit_;
}

const Instance& ExperimentContext::simulation_instance(Algo a) {
  if (inst_.arrival_model == ArrivalModel::Kad) {
    if (a == Algo::Tsf) throw std::invalid_argument("tsf needs a KIID instance; use tsf-kad");
    return inst_;
  }
  return a == Algo::TsfKad ? kad() : fragmented();
}

const BenchmarkBundle& ExperimentContext::reference_bundle(Algo a) {
  if (inst_.arrival_model == ArrivalModel::Kad) {
    if (a == Algo::Tsf) throw std::invalid_argument("tsf needs a KIID instance; use tsf-kad");
    return kad_bundle();
  }
  return a == Algo::TsfKad ? kad_bundle() : kiid_bundle();
}

// ---------------------------------------------------------------------------

std::vector<RunTrace> simulate(ExperimentContext& ctx, const AlgoConfig& cfg, const ExperimentOptions& opts,
                               long long* clamped) {
  if (opts.trials < 1) throw std::invalid_argument("trials must be at least 1");
  validate_weights(cfg.weights);
  const Instance& inst = ctx.simulation_instance(cfg.algo);
  switch (cfg.algo) {
    case Algo::Tsf: {
      const BenchmarkBundle& guide = cfg.unit_weight_lp ? ctx.kiid_unit_bundle() : ctx.kiid_bundle();
      const TsfPolicy policy(inst, guide, cfg.weights);
      return run_trials(opts.trials, opts.seed, [&](std::uint64_t s) { return policy.run(s); }, opts.exec);
    }
    case Algo::TsfKad: {
      const BenchmarkBundle& guide = cfg.unit_weight_lp ? ctx.kad_unit_bundle() : ctx.kad_bundle();
      const TsfKadPolicy policy(inst, guide, cfg.weights, cfg.lambda);
      const RhoTable rho = estimate_rho(policy, cfg.rho_simulations, derive_seed(opts.seed, kRhoStream), opts.exec);
      auto traces = run_trials(opts.trials, opts.seed, [&](std::uint64_t s) { return policy.run(rho, s); }, opts.exec);
      if (clamped) {
        for (const auto& t : traces) *clamped += t.clamped_probes;
      }
      return traces;
    }
    case Algo::GreedyO:
      return run_trials(opts.trials, opts.seed, [&](std::uint64_t s) { return greedy_o(inst, s); }, opts.exec);
    case Algo::GreedyR:
      return run_trials(opts.trials, opts.seed, [&](std::uint64_t s) { return greedy_r(inst, s); }, opts.exec);
    case Algo::GreedyD:
      return run_trials(opts.trials, opts.seed, [&](std::uint64_t s) { return greedy_d(inst, s); }, opts.exec);
  }
  throw std::logic_error("unhandled algorithm");
}

RatioReport make_report(const Instance& inst, const BenchmarkBundle& bundle, const AlgoConfig& cfg,
                        std::span<const RunTrace> traces, const ExperimentOptions& opts) {
  const ObjectiveEstimate est = evaluate_objectives(inst, traces);
  RatioReport rep;
  rep.config = cfg;
  rep.trials = static_cast<int>(traces.size());
  rep.seed = opts.seed;
  rep.warnings = bundle.warnings;
  const std::array<const Estimate*, 3> values{&est.profit, &est.offline_group, &est.online_group};
  for (std::size_t k = 0; k < 3; ++k) {
    ObjectiveRatio& r = rep.objectives[k];
    r.objective = kObjectives[k];
    r.empirical = values[k]->mean;
    r.std_error = values[k]->std_error;
    r.optimum = bundle.opt(kObjectives[k]);
    if (r.optimum > 1e-12) r.ratio = r.empirical / r.optimum;
  }
  for (const auto& t : traces) rep.clamped_probes += t.clamped_probes;
  return rep;
}

std::vector<RatioReport> run_experiment(ExperimentContext& ctx, const std::vector<AlgoConfig>& configs,
                                        const ExperimentOptions& opts) {
  std::vector<RatioReport> reports;
  reports.reserve(configs.size());
  for (const auto& cfg : configs) {
    const auto traces = simulate(ctx, cfg, opts);
    reports.push_back(make_report(ctx.simulation_instance(cfg.algo), ctx.reference_bundle(cfg.algo), cfg, traces, opts));
  }
  return reports;
}

std::vector<RatioReport> run_experiment(const Instance& inst, const std::vector<AlgoConfig>& configs,
                                        const ExperimentOptions& opts) {
  ExperimentContext ctx(inst, opts.exec);
  return run_experiment(ctx, configs, opts);
}

std::vector<double> parse_range(const std::string& text) {
  double v[3];
  std::size_t pos = 0;
  for (int k = 0; k < 3; ++k) {
    const std::size_t end = k < 2 ? text.find(':', pos) : text.size();
    if (end == std::string::npos) throw std::invalid_argument("range must be start:stop:step, got '" + text + "'");
    const char* first = text.data() + pos;
    const char* last = text.data() + end;
    const auto [ptr, ec] = std::from_chars(first, last, v[k]);
    if (ec != std::errc{} || ptr != last) throw std::invalid_argument("bad number in range '" + text + "'");
    pos = end + 1;
  }
  const auto [start, stop, step] = std::tuple{v[0], v[1], v[2]};
  if (!(step > 0.0) || stop < start) throw std::invalid_argument("range needs step > 0 and stop >= start");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(std::min(stop, snap(start + static_cast<double>(i) * step)));
  return out;
}

std::vector<AlgoConfig> alpha_sweep(double start, double stop, double step, Algo algo) {
  std::vector<AlgoConfig> out;
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  for (long i = 0; i <= n; ++i) {
    const double a = std::min(stop, snap(start + static_cast<double>(i) * step));
    AlgoConfig cfg;
    cfg.algo = algo;
    cfg.weights = {a, snap((1.0 - a) / 2.0), snap((1.0 - a) / 2.0)};
    out.push_back(cfg);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reports

std::string format_number(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

ReportFormat parse_format(const std::string& name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  throw std::invalid_argument("format must be json or csv, got '" + name + "'");
}

namespace {

std::string algo_label(const AlgoConfig& cfg) {
  std::string s = to_string(cfg.algo);
  if (cfg.unit_weight_lp) s += "-unit-lp";
  return s;
}

}  // namespace

void emit_report(const std::vector<RatioReport>& reports, ReportFormat format, std::ostream& out) {
  if (reports.empty()) throw std::invalid_argument("no reports to emit");
  if (format == ReportFormat::Csv) {
    out << "algo,alpha,beta,gamma,objective,empirical,optimum,ratio,stderr\n";
    for (const auto& r : reports) {
      const bool w = uses_weights(r.config.algo);
      for (const auto& o : r.objectives) {
        out << algo_label(r.config) << ',' << (w ? format_number(r.config.weights.alpha) : "na") << ','
            << (w ? format_number(r.config.weights.beta) : "na") << ','
            << (w ? format_number(r.config.weights.gamma) : "na") << ',' << to_string(o.objective) << ','
            << format_number(o.empirical) << ',' << format_number(o.optimum) << ','
            << (o.ratio ? format_number(*o.ratio) : "na") << ',' << format_number(o.std_error) << '\n';
      }
    }
  } else {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
      nlohmann::ordered_json j;
      j["algo"] = algo_label(r.config);
      if (uses_weights(r.config.algo)) {
        j["alpha"] = r.config.weights.alpha;
        j["beta"] = r.config.weights.beta;
        j["gamma"] = r.config.weights.gamma;
      } else {
        j["alpha"] = j["beta"] = j["gamma"] = "na";
      }
      j["trials"] = r.trials;
      j["seed"] = r.seed;
      if (r.config.algo == Algo::TsfKad) {
        j["lambda"] = r.config.lambda;
        j["rho_simulations"] = r.config.rho_simulations;
        j["clamped_probes"] = r.clamped_probes;
      }
      nlohmann::ordered_json objs = nlohmann::ordered_json::array();
      for (const auto& o : r.objectives) {
        nlohmann::ordered_json oj;
        oj["objective"] = to_string(o.objective);
        oj["empirical"] = o.empirical;
        oj["optimum"] = o.optimum;
        if (o.ratio) {
          oj["ratio"] = *o.ratio;
        } else {
          oj["ratio"] = "na";
        }
        oj["stderr"] = o.std_error;
        objs.push_back(std::move(oj));
      }
      j["objectives"] = std::move(objs);
      if (!r.warnings.empty()) j["warnings"] = r.warnings;
      arr.push_back(std::move(j));
    }
    out << arr.dump(2) << '\n';
  }
  if (!out) throw std::runtime_error("failed writing report");
}

void emit_report(const std::vector<RatioReport>& reports, ReportFormat format, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  emit_report(reports, format, out);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> rank(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace

Correlation spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
  if (x.size() < 3) throw std::invalid_argument("spearman: at least 3 pairs required");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  Correlation c;
  if (sxx == 0.0 || syy == 0.0) return c;  // a constant series carries no rank information
  c.rho = sxy / std::sqrt(sxx * syy);
  if (std::abs(c.rho) >= 1.0) {
    c.p_value = 0.0;
    return c;
  }
  const double df = n - 2.0;
  const double t = c.rho * std::sqrt(df / (1.0 - c.rho * c.rho));
  const boost::math::students_t dist(df);
  c.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  return c;
}

}  // namespace fairmatch
