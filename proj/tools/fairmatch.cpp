// Command-line front end. Exit codes: 0 success, 1 invalid input, 2 runtime
// failure. Data goes to --output (default stdout), diagnostics to stderr.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fairmatch/algorithms.hpp"
#include "fairmatch/benchmarks.hpp"
#include "fairmatch/harness.hpp"
#include "fairmatch/instance_io.hpp"
#include "fairmatch/kernels.hpp"

namespace fm = fairmatch;

namespace {

struct Global {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string output;
  std::string format = "json";
};

struct RunArgs {
  std::string instance;
  std::string algo = "tsf";
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  int trials = 100;
  int rho_sims = fm::kDefaultRhoSimulations;
  double lambda = fm::kDefaultLambda;
  bool unit_lp = false;
  std::string alphas = "0:1:0.1";
  bool ablation = false;
  bool primal = false;
};

struct IngestArgs {
  std::string trips;
  std::string config;
};

struct HardnessArgs {
  std::string kind = "group";
  int horizon = 3;
  double L = 100.0;
  std::string side = "offline";
};

struct SynthArgs {
  fm::SyntheticTripConfig cfg;
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open " + path + " for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  void close() {
    stream().flush();
    if (!stream()) throw std::runtime_error("failed writing output");
  }

 private:
  std::ofstream file_;
};

// Splices the flags of JSON manifests (--config FILE) in front of the
// remaining command-line flags, so explicit flags override file values.
// Inside `ingest`, --config names the ingestion config instead.
std::vector<std::string> expand_manifests(int argc, char** argv, const std::vector<std::string>& subcommands) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::vector<std::string> out;
  std::vector<std::string> injected;
  std::string sub;
  std::size_t sub_pos = std::string::npos;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    std::string file;
    const bool is_config = a == "--config" || a.rfind("--config=", 0) == 0;
    if (is_config && sub != "ingest") {
      if (a == "--config") {
        if (i + 1 >= args.size()) throw CLI::ParseError("--config requires a file", CLI::ExitCodes::ArgumentMismatch);
        file = args[++i];
      } else {
        file = a.substr(9);
      }
      std::ifstream in(file);
      if (!in) throw CLI::ParseError("cannot read config file " + file, CLI::ExitCodes::FileError);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw CLI::ParseError("config file " + file + ": " + e.what(), CLI::ExitCodes::ValidationError);
      }
      if (!j.is_object()) throw CLI::ParseError("config file must hold a JSON object", CLI::ExitCodes::ValidationError);
      for (const auto& [key, value] : j.items()) {
        if (value.is_boolean()) {
          if (value.get<bool>()) injected.push_back("--" + key);
        } else if (value.is_string()) {
          injected.push_back("--" + key);
          injected.push_back(value.get<std::string>());
        } else if (value.is_number()) {
          injected.push_back("--" + key);
          injected.push_back(value.dump());
        } else {
          throw CLI::ParseError("config key '" + key + "' must be a string, number or boolean",
                                CLI::ExitCodes::ValidationError);
        }
      }
      continue;
    }
    if (sub.empty() && std::find(subcommands.begin(), subcommands.end(), a) != subcommands.end()) {
      sub = a;
      sub_pos = out.size() + 1;
    }
    out.push_back(a);
  }
  if (!injected.empty()) {
    // Right after the subcommand name, or first when there is none yet.
    const std::size_t at = sub_pos == std::string::npos ? 0 : sub_pos;
    out.insert(out.begin() + static_cast<std::ptrdiff_t>(at), injected.begin(), injected.end());
  }
  return out;
}

fm::AlgoConfig algo_config(const RunArgs& a) {
  fm::AlgoConfig cfg;
  cfg.algo = fm::parse_algo(a.algo);
  cfg.weights = {a.alpha, a.beta, a.gamma};
  cfg.rho_simulations = a.rho_sims;
  cfg.lambda = a.lambda;
  cfg.unit_weight_lp = a.unit_lp;
  if (fm::uses_weights(cfg.algo)) fm::validate_weights(cfg.weights);
  if (cfg.rho_simulations < 1) throw std::invalid_argument("--rho-sims must be at least 1");
  if (!(cfg.lambda > 0.0 && cfg.lambda <= 1.0)) throw std::invalid_argument("--lambda must lie in (0,1]");
  return cfg;
}

void print_bench(const fm::Instance& inst, bool primal, std::ostream& out) {
  const fm::BenchmarkBundle b = fm::benchmarks(inst);
  nlohmann::ordered_json j;
  j["opt_op"] = b.opt_op;
  j["opt_off"] = b.opt_off;
  j["opt_on"] = b.opt_on;
  if (primal) {
    j["rounds"] = b.x_star.rounds;
    j["x_star"] = b.x_star.edge_values;
    j["y_star"] = b.y_star.edge_values;
    j["z_star"] = b.z_star.edge_values;
  }
  if (!b.warnings.empty()) j["warnings"] = b.warnings;
  for (const auto& w : b.warnings) std::cerr << "warning: " << w << '\n';
  out << j.dump(2) << '\n';
}

fm::Instance read_instance(const std::string& path) {
  try {
    return fm::load_instance(path);
  } catch (const std::runtime_error& e) {
    // Unreadable files are input errors from the caller's point of view.
    throw std::invalid_argument(e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-sided fair online matching: LP benchmarks, online algorithms, experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--seed", g.seed, "Root random seed")->default_val(0)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--threads", g.threads, "Worker threads (0 = runtime default)")
      ->check(CLI::NonNegativeNumber)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("-o,--output,--out", g.output, "Output file (default stdout)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--format", g.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_help_flag("-h,--help", "Print help");
  app.footer("Any flag may also come from a JSON manifest given with --config FILE; explicit flags win.");

  RunArgs r;
  IngestArgs ia;
  HardnessArgs ha;
  SynthArgs sa;
  constexpr auto last = CLI::MultiOptionPolicy::TakeLast;

  auto* bench = app.add_subcommand("bench", "Solve the three benchmark LPs of an instance");
  bench->add_option("instance,--instance", r.instance, "Instance JSON")->required()->multi_option_policy(last);
  bench->add_flag("--primal", r.primal, "Include the primal edge vectors");

  auto add_algo_flags = [&](CLI::App* sub, bool weights) {
    sub->add_option("instance,--instance", r.instance, "Instance JSON")->required()->multi_option_policy(last);
    sub->add_option("--trials", r.trials, "Trials per configuration")->check(CLI::PositiveNumber)->multi_option_policy(last);
    sub->add_option("--rho-sims", r.rho_sims, "Simulations for rho estimation (tsf-kad)")->multi_option_policy(last);
    sub->add_option("--lambda", r.lambda, "Scaling lambda (tsf-kad)")->multi_option_policy(last);
    sub->add_flag("--unit-weight-lp", r.unit_lp, "Guide by LPs solved with unit fairness utilities");
    if (weights) {
      sub->add_option("--alpha", r.alpha, "Operator weight")->multi_option_policy(last);
      sub->add_option("--beta", r.beta, "Offline-fairness weight")->multi_option_policy(last);
      sub->add_option("--gamma", r.gamma, "Online-fairness weight")->multi_option_policy(last);
    }
  };
  auto* run = app.add_subcommand("run", "Simulate one algorithm and report competitive ratios");
  add_algo_flags(run, true);
  run->add_option("--algo", r.algo, "tsf, tsf-kad, greedy-o, greedy-r, greedy-d")->required()->multi_option_policy(last);

  auto* sweep = app.add_subcommand("sweep", "Sweep alpha with beta = gamma = (1 - alpha)/2");
  add_algo_flags(sweep, false);
  sweep->add_option("--algo", r.algo, "tsf or tsf-kad")->multi_option_policy(last);
  sweep->add_option("--alphas", r.alphas, "start:stop:step")->multi_option_policy(last);

  auto* compare = app.add_subcommand("compare", "TSF with unit weights against the greedy baselines");
  add_algo_flags(compare, false);
  compare->add_flag("--ablation", r.ablation, "Add equal-weight TSF guided by unit-utility LPs");

  auto* ingest = app.add_subcommand("ingest", "Build an instance from a trip CSV");
  ingest->add_option("trips,--trips", ia.trips, "Trip CSV")->required()->multi_option_policy(last);
  ingest->add_option("--config", ia.config, "Ingestion config JSON")->multi_option_policy(last);

  auto* hardness = app.add_subcommand("hardness", "Write a hardness fixture instance");
  hardness->add_option("--kind", ha.kind, "group or indiv")->check(CLI::IsMember({"group", "indiv"}))->multi_option_policy(last);
  hardness->add_option("--horizon", ha.horizon, "Horizon of the group fixture (multiple of 3)")->multi_option_policy(last);
  hardness->add_option("--L", ha.L, "Weight L of the indiv fixture")->multi_option_policy(last);
  hardness->add_option("--side", ha.side, "offline or online")->check(CLI::IsMember({"offline", "online"}))->multi_option_policy(last);

  auto* synth = app.add_subcommand("synth", "Generate synthetic clustered trip records as CSV");
  synth->add_option("--drivers", sa.cfg.drivers, "Number of drivers")
      ->check(CLI::PositiveNumber)->multi_option_policy(last);
  synth->add_option("--types", sa.cfg.types, "Distinct request types to reach")
      ->check(CLI::PositiveNumber)->multi_option_policy(last);
  synth->add_option("--hotspots", sa.cfg.hotspots, "Trip clusters")
      ->check(CLI::PositiveNumber)->multi_option_policy(last);
  synth->add_option("--spread", sa.cfg.spread, "Cluster standard deviation, degrees")
      ->check(CLI::NonNegativeNumber)->multi_option_policy(last);
  synth->add_option("--grid-step", sa.cfg.grid_step, "Bin size, degrees")
      ->check(CLI::PositiveNumber)->multi_option_policy(last);

  if (argc < 2) {
    std::cerr << app.help();
    return 1;
  }

  try {
    std::vector<std::string> args =
        expand_manifests(argc, argv, {"bench", "run", "sweep", "compare", "ingest", "hardness", "synth"});
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (e.get_name() == "RequiredError" && app.get_subcommands().empty()) std::cerr << app.help();
    return 1;
  }

  try {
    if (g.threads > 0) fm::set_worker_threads(g.threads);
    const fm::ReportFormat format = fm::parse_format(g.format);
    fm::ExperimentOptions opts;
    opts.trials = r.trials;
    opts.seed = g.seed;

    if (bench->parsed()) {
      const fm::Instance inst = read_instance(r.instance);
      Output out(g.output);
      print_bench(inst, r.primal, out.stream());
      out.close();
    } else if (run->parsed()) {
      const fm::AlgoConfig cfg = algo_config(r);
      const fm::Instance inst = read_instance(r.instance);
      const auto reports = fm::run_experiment(inst, {cfg}, opts);
      Output out(g.output);
      fm::emit_report(reports, format, out.stream());
      out.close();
    } else if (sweep->parsed()) {
      RunArgs base = r;
      const fm::AlgoConfig proto = algo_config(base);
      if (!fm::uses_weights(proto.algo)) throw std::invalid_argument("sweep needs tsf or tsf-kad");
      const std::vector<double> alphas = fm::parse_range(r.alphas);
      if (alphas.front() < 0.0 || alphas.back() > 1.0) throw std::invalid_argument("--alphas values must lie in [0,1]");
      std::vector<fm::AlgoConfig> configs;
      for (auto cfg : fm::alpha_sweep(alphas.front(), alphas.back(), alphas.size() > 1 ? alphas[1] - alphas[0] : 1.0, proto.algo)) {
        cfg.rho_simulations = proto.rho_simulations;
        cfg.lambda = proto.lambda;
        cfg.unit_weight_lp = proto.unit_weight_lp;
        configs.push_back(cfg);
      }
      const fm::Instance inst = read_instance(r.instance);
      const auto reports = fm::run_experiment(inst, configs, opts);
      if (reports.size() >= 3) {
        std::vector<double> x, y;
        for (const auto& rep : reports) {
          x.push_back(rep.config.weights.alpha);
          y.push_back(rep.objectives[0].ratio.value_or(0.0));
        }
        const auto c = fm::spearman(x, y);
        std::cerr << "spearman(alpha, profit ratio) = " << fm::format_number(c.rho)
                  << ", p = " << fm::format_number(c.p_value) << '\n';
      }
      Output out(g.output);
      fm::emit_report(reports, format, out.stream());
      out.close();
    } else if (compare->parsed()) {
      fm::AlgoConfig base = algo_config(r);
      std::vector<fm::AlgoConfig> configs;
      for (const fm::Weights w : {fm::Weights{1, 0, 0}, fm::Weights{0, 1, 0}, fm::Weights{0, 0, 1}}) {
        fm::AlgoConfig cfg = base;
        cfg.algo = fm::Algo::Tsf;
        cfg.weights = w;
        cfg.unit_weight_lp = false;
        configs.push_back(cfg);
      }
      for (const fm::Algo a : {fm::Algo::GreedyO, fm::Algo::GreedyD, fm::Algo::GreedyR}) {
        fm::AlgoConfig cfg;
        cfg.algo = a;
        configs.push_back(cfg);
      }
      if (r.ablation) {
        for (bool unit : {false, true}) {
          fm::AlgoConfig cfg = base;
          cfg.algo = fm::Algo::Tsf;
          cfg.weights = {1.0 / 3, 1.0 / 3, 1.0 / 3};
          cfg.unit_weight_lp = unit;
          configs.push_back(cfg);
        }
      }
      const fm::Instance inst = read_instance(r.instance);
      const auto reports = fm::run_experiment(inst, configs, opts);
      Output out(g.output);
      fm::emit_report(reports, format, out.stream());
      out.close();
    } else if (ingest->parsed()) {
      fm::IngestConfig cfg;
      if (!ia.config.empty()) {
        std::ifstream in(ia.config);
        if (!in) throw std::invalid_argument("cannot read ingest config " + ia.config);
        std::stringstream ss;
        ss << in.rdbuf();
        cfg = fm::ingest_config_from_json(ss.str());
      }
      if (app.get_option("--seed")->count() > 0) cfg.seed = g.seed;
      std::vector<fm::TripRecord> trips;
      try {
        trips = fm::load_trips_csv(ia.trips);
      } catch (const std::runtime_error& e) {
        throw std::invalid_argument(e.what());
      }
      const fm::IngestResult res = fm::ingest_trips(trips, cfg);
      if (res.dropped > 0) std::cerr << "dropped " << res.dropped << " records outside the bounding box\n";
      std::cerr << "ingested " << res.instance.offline.size() << " drivers, " << res.instance.online.size()
                << " request types, horizon " << res.instance.horizon << ", utility shift "
                << fm::format_number(res.instance.utility_shift) << '\n';
      Output out(g.output);
      out.stream() << fm::instance_to_json(res.instance).dump(2) << '\n';
      out.close();
    } else if (hardness->parsed()) {
      const fm::Instance inst =
          ha.kind == "group"
              ? fm::make_hardness_group_instance(ha.horizon)
              : fm::make_hardness_indiv_group_instance(ha.L, ha.side == "online" ? fm::Side::Online : fm::Side::Offline);
      Output out(g.output);
      out.stream() << fm::instance_to_json(inst).dump(2) << '\n';
      out.close();
    } else if (synth->parsed()) {
      sa.cfg.seed = g.seed;
      const auto trips = fm::synthetic_trips(sa.cfg);
      Output out(g.output);
      fm::write_trips_csv(out.stream(), trips);
      out.close();
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
