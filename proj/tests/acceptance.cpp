// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "fairmatch/algorithms.hpp"
#include "fairmatch/baselines.hpp"
#include "fairmatch/harness.hpp"
#include "fairmatch/rounding.hpp"
#include "fairmatch/trials.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace fairmatch;

namespace {

constexpr double kE = std::numbers::e;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& check) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
}

double ratio_se(const ObjectiveRatio& o) { return o.optimum > 0.0 ? o.std_error / o.optimum : 0.0; }

std::string algo_name(const RatioReport& r) {
  std::string s = to_string(r.config.algo);
  if (uses_weights(r.config.algo)) {
    s += fmt("(%.3g,%.3g,%.3g)", r.config.weights.alpha, r.config.weights.beta, r.config.weights.gamma);
  }
  return s;
}

/// Every reported objective; checked against its optimum at the end.
std::vector<std::pair<std::string, ObjectiveRatio>> all_objectives;

void collect(const std::string& where, const RatioReport& r) {
  for (const auto& o : r.objectives) all_objectives.emplace_back(where + "/" + algo_name(r), o);
}

/// Two certain rounds: v0 first, v1 second, both adjacent to u0 and u1.
Instance two_round_kad() {
  Instance inst;
  inst.arrival_model = ArrivalModel::Kad;
  inst.horizon = 2;
  inst.groups = {"a", "b"};
  inst.offline = {{0, 0, 1}, {1, 1, 1}};
  OnlineType v0, v1;
  v0.id = 0;
  v0.p_t = {1.0, 0.0};
  v1.id = 1;
  v1.group = 1;
  v1.p_t = {0.0, 1.0};
  inst.online = {v0, v1};
  inst.edges = {{0, 0, 1.0, 3.0, 1.0, 2.0}, {1, 0, 1.0, 1.0, 2.0, 1.0}, {0, 1, 1.0, 2.0, 1.0, 1.0},
                {1, 1, 1.0, 1.0, 1.0, 3.0}};
  return inst;
}

std::vector<AlgoConfig> every_algorithm(const std::vector<Weights>& sweep, int rho_sims) {
  std::vector<AlgoConfig> cfgs;
  for (const Weights& w : sweep) {
    cfgs.push_back({Algo::Tsf, w});
    cfgs.push_back({Algo::TsfKad, w, rho_sims});
  }
  for (const Algo a : {Algo::GreedyO, Algo::GreedyR, Algo::GreedyD}) cfgs.push_back({a, {}});
  return cfgs;
}

std::vector<Weights> five_point_sweep() {
  std::vector<Weights> out;
  for (const auto& c : alpha_sweep(0.0, 1.0, 0.25)) out.push_back(c.weights);
  return out;
}

}  // namespace

int main() {
  set_worker_threads(0);

  report(1, "dependent rounding marginals, degree, negative correlation", [] {
    const std::vector<double> x{0.3, 0.3, 0.4};
    const int n = 200000;
    Rng rng = make_rng(1);
    int marg[3] = {0, 0, 0}, pair[3] = {0, 0, 0}, bad_sum = 0;
    for (int i = 0; i < n; ++i) {
      const auto r = dependent_round(x, rng);
      bad_sum += r.count() != 1;
      for (int k = 0; k < 3; ++k) marg[k] += r.bits[static_cast<std::size_t>(k)];
      pair[0] += r.bits[0] && r.bits[1];
      pair[1] += r.bits[0] && r.bits[2];
      pair[2] += r.bits[1] && r.bits[2];
    }
    Outcome o;
    o.pass = bad_sum == 0;
    double worst_marg = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double p = x[static_cast<std::size_t>(k)];
      const double z = std::abs(marg[k] / double(n) - p) / testing::binomial_se(p, n);
      worst_marg = std::max(worst_marg, z);
      o.pass = o.pass && z <= 3.0;
    }
    const int pi[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    double worst_pair = -1e9;
    for (int k = 0; k < 3; ++k) {
      const double bound = x[static_cast<std::size_t>(pi[k][0])] * x[static_cast<std::size_t>(pi[k][1])];
      const double excess = (pair[k] / double(n) - bound) / testing::binomial_se(bound, n);
      worst_pair = std::max(worst_pair, excess);
      o.pass = o.pass && excess <= 3.0;
    }
    o.detail = fmt("max |z| marginal %.2f, sums != 1: %d, max pair excess %.2f sigma", worst_marg, bad_sum, worst_pair);
    return o;
  });

  report(2, "benchmark LP optima of the hardness fixtures", [] {
    const auto g = benchmarks(make_hardness_group_instance(3));
    const Instance t5 = make_hardness_indiv_group_instance(100.0, Side::Offline);
    const auto b5 = benchmarks(t5);
    const double group_total = b5.opt_off * static_cast<double>(t5.offline.size());
    const double indiv = individual_optima(t5).offline;
    Outcome o;
    o.pass = std::abs(g.opt_op - 3) <= 1e-6 && std::abs(g.opt_off - 1) <= 1e-6 && std::abs(g.opt_on - 1) <= 1e-6 &&
             std::abs(group_total - 100) <= 1e-6 && std::abs(indiv - 100.0 / 101.0) <= 1e-6;
    o.detail = fmt("group fixture (%.9g, %.9g, %.9g); L=100 group total %.9g (per member %.9g), individual %.9g",
                   g.opt_op, g.opt_off, g.opt_on, group_total, b5.opt_off, indiv);
    return o;
  });

  // One 50k-trial TSF run on the T = 9 fixture serves criteria 3, 8 and 11.
  ExperimentContext hard9(make_hardness_group_instance(9));
  const AlgoConfig third{Algo::Tsf, {1.0 / 3, 1.0 / 3, 1.0 / 3}};
  const ExperimentOptions opts9{.trials = 50000, .seed = 3};
  std::vector<RunTrace> traces9;

  report(3, "TSF lower bound on the group hardness fixture (T=9, 50k trials)", [&] {
    traces9 = simulate(hard9, third, opts9);
    const auto r = make_report(hard9.simulation_instance(Algo::Tsf), hard9.reference_bundle(Algo::Tsf), third,
                               traces9, opts9);
    collect("hardness-T9", r);
    const double floor = (1.0 / 3) / (2 * kE);
    Outcome o;
    std::string parts;
    for (const auto& obj : r.objectives) {
      const double ratio = obj.ratio.value_or(0.0);
      o.pass = o.pass && ratio >= floor - 3.0 * ratio_se(obj);
      parts += fmt(" %s %.4f", to_string(obj.objective), ratio);
    }
    o.detail = fmt("floor %.4f;", floor) + parts;
    return o;
  });

  report(4, "TSF-KAD lower bound with exact availabilities (2 rounds, 50k trials)", [] {
    const Instance inst = two_round_kad();
    const auto bundle = benchmarks(inst);
    const Weights w{1, 0, 0};
    const auto exact = oracle::exact_tsf_kad(inst, bundle, w, 0.5);
    const auto rho = oracle::to_rho_table(inst, exact, w, 0.5);
    const TsfKadPolicy policy(inst, bundle, w);
    const int n = 50000;
    const auto traces = run_trials(n, 4, [&](std::uint64_t s) { return policy.run(rho, s); });
    const AlgoConfig cfg{Algo::TsfKad, w};
    const auto r = make_report(inst, bundle, cfg, traces, {.trials = n, .seed = 4});
    collect("two-round", r);
    const auto& profit = r.objectives[0];
    Outcome o;
    o.pass = profit.ratio && *profit.ratio >= 0.5 - 3.0 * ratio_se(profit);
    double min_rho = 1.0;
    for (std::size_t u = 0; u < inst.offline.size(); ++u) {
      for (int t = 0; t < inst.horizon; ++t) {
        int free = 0;
        for (const auto& tr : traces) free += departure_rounds(inst, tr)[u] > t;
        const double f = free / double(n);
        min_rho = std::min(min_rho, f);
        o.pass = o.pass && f >= 0.5 - 3.0 * testing::binomial_se(0.5, n);
      }
    }
    o.detail = fmt("profit ratio %.4f (se %.4f), min empirical rho %.4f", profit.ratio.value_or(0.0), ratio_se(profit),
                   min_rho);
    return o;
  });

  report(5, "three-objective hardness: ratio sum <= 1 for every algorithm and weight", [] {
    Outcome o;
    double worst = 0.0;
    std::string worst_name;
    for (const int T : {3, 9}) {
      ExperimentContext ctx(make_hardness_group_instance(T));
      const auto reports = run_experiment(ctx, every_algorithm(five_point_sweep(), 2000), {.trials = 20000, .seed = 5});
      for (const auto& r : reports) {
        collect(fmt("hardness-T%d", T), r);
        double sum = 0.0, se = 0.0;
        for (const auto& obj : r.objectives) {
          sum += obj.ratio.value_or(0.0);
          se += ratio_se(obj);  // bounds the standard deviation of the sum
        }
        if (sum > worst) {
          worst = sum;
          worst_name = fmt("T=%d ", T) + algo_name(r);
        }
        o.pass = o.pass && sum <= 1.0 + 3.0 * se;
      }
    }
    o.detail = fmt("largest sum %.4f by ", worst) + worst_name;
    return o;
  });

  report(6, "group-vs-individual hardness (L=100): ratio sum <= 1 + 2/L", [] {
    const double L = 100.0;
    Outcome o;
    double worst = 0.0;
    std::string worst_name;
    for (const Side side : {Side::Offline, Side::Online}) {
      ExperimentContext ctx(make_hardness_indiv_group_instance(L, side));
      const auto ind = individual_optima(ctx.instance());
      std::vector<AlgoConfig> cfgs = every_algorithm(five_point_sweep(), 2000);
      if (side == Side::Online) std::erase_if(cfgs, [](const AlgoConfig& c) { return c.algo == Algo::Tsf; });
      const ExperimentOptions opts{.trials = 20000, .seed = 6};
      for (const auto& cfg : cfgs) {
        const auto traces = simulate(ctx, cfg, opts);
        const Instance& sim = ctx.simulation_instance(cfg.algo);
        const auto r = make_report(sim, ctx.reference_bundle(cfg.algo), cfg, traces, opts);
        collect(side == Side::Offline ? "indiv-offline" : "indiv-online", r);
        const auto est = evaluate_objectives(sim, traces);
        const ObjectiveRatio& group = r.objectives[side == Side::Offline ? 1 : 2];
        const Estimate& indiv = side == Side::Offline ? est.offline_individual : est.online_individual;
        const double ind_opt = side == Side::Offline ? ind.offline : ind.online;
        const double sum = group.ratio.value_or(0.0) + indiv.mean / ind_opt;
        const double se = ratio_se(group) + indiv.std_error / ind_opt;
        if (indiv.mean > ind_opt + 3.0 * indiv.std_error + 1e-9) o.pass = false;
        if (sum > worst) {
          worst = sum;
          worst_name = std::string(side == Side::Offline ? "offline " : "online ") + algo_name(r);
        }
        o.pass = o.pass && sum <= 1.0 + 2.0 / L + 3.0 * se;
      }
    }
    o.detail = fmt("bound %.4f, largest sum %.4f by ", 1.0 + 2.0 / L, worst) + worst_name;
    return o;
  });

  report(7, "individual-to-group reduction on 20 random instances", [] {
    Outcome o;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const int nu = 1 + static_cast<int>(seed % 3);
      const int nv = 1 + static_cast<int>((seed / 3) % 3);
      const Instance inst = seed % 2 == 0 ? testing::random_kiid(700 + seed, nu, nv, true)
                                          : testing::random_kad(700 + seed, nu, nv, 1 + static_cast<int>(seed % 3));
      const auto direct = individual_optima(inst);
      const auto via = benchmarks(reduce_individual_to_group(inst));
      worst = std::max({worst, std::abs(via.opt_off - direct.offline), std::abs(via.opt_on - direct.online)});
    }
    o.pass = worst <= 1e-6;
    o.detail = fmt("max |direct - reduced| = %.3g", worst);
    return o;
  });

  // Synthetic NYC-like instance shared by criteria 9 and 10.
  ExperimentContext nyc([] {
    IngestConfig cfg;
    cfg.seed = 1;
    return ingest_trips(synthetic_trips({}), cfg).instance;
  }());
  std::vector<RatioReport> sweep_reports;

  report(9, "weight sweep trend on the synthetic NYC-like instance", [&] {
    const auto cfgs = alpha_sweep(0.0, 1.0, 0.1);
    sweep_reports = run_experiment(nyc, cfgs, {.trials = 100, .seed = 9});
    std::vector<double> alphas, profit;
    Outcome o;
    for (const auto& r : sweep_reports) {
      collect("nyc", r);
      alphas.push_back(r.config.weights.alpha);
      profit.push_back(r.objectives[0].ratio.value_or(0.0));
      for (const auto& obj : r.objectives) {
        const double floor = r.config.weights.of(obj.objective) / (2 * kE);
        o.pass = o.pass && obj.ratio.value_or(0.0) >= floor - 3.0 * ratio_se(obj);
      }
    }
    const auto c = spearman(alphas, profit);
    o.pass = o.pass && c.rho > 0.0 && c.p_value < 0.05;
    o.detail = fmt("|U|=%zu |V|=%zu, spearman %.3f (p %.2g), profit ratio %.3f -> %.3f", nyc.instance().offline.size(),
                   nyc.instance().online.size(), c.rho, c.p_value, profit.front(), profit.back());
    return o;
  });

  report(10, "TSF against greedy baselines on the synthetic NYC-like instance", [&] {
    const std::vector<AlgoConfig> cfgs{{Algo::Tsf, {1, 0, 0}}, {Algo::GreedyO, {}}, {Algo::Tsf, {0, 0, 1}},
                                       {Algo::GreedyR, {}}};
    const auto r = run_experiment(nyc, cfgs, {.trials = 100, .seed = 10});
    for (const auto& x : r) collect("nyc", x);
    const double tsf_op = r[0].objectives[0].ratio.value_or(0.0);
    const double go = r[1].objectives[0].ratio.value_or(0.0);
    const double tsf_on = r[2].objectives[2].ratio.value_or(0.0);
    const double gr = r[3].objectives[2].ratio.value_or(0.0);
    Outcome o;
    o.pass = tsf_op > go && tsf_on > gr;
    o.detail = fmt("profit TSF %.3f vs Greedy-O %.3f (diff %+.3f); rider fairness TSF %.3f vs Greedy-R %.3f (diff %+.3f)",
                   tsf_op, go, tsf_op - go, tsf_on, gr, tsf_on - gr);
    return o;
  });

  report(8, "no empirical objective exceeds its LP optimum", [] {
    Outcome o;
    double worst = -1e9;
    std::string worst_name;
    for (const auto& [name, obj] : all_objectives) {
      const double excess = obj.empirical - obj.optimum;
      const double z = obj.std_error > 0.0 ? excess / obj.std_error : (excess > 1e-9 ? 1e9 : 0.0);
      if (z > worst) {
        worst = z;
        worst_name = name + "/" + to_string(obj.objective);
      }
      o.pass = o.pass && excess <= 3.0 * obj.std_error + 1e-9;
    }
    o.detail = fmt("%zu objectives checked, largest excess %.2f se at ", all_objectives.size(), worst) + worst_name;
    return o;
  });

  report(11, "TSF availability floor on the group hardness fixture (T=9, 50k trials)", [&] {
    const Instance& inst = hard9.simulation_instance(Algo::Tsf);
    const int T = inst.horizon;
    const std::size_t nu = inst.offline.size();
    std::vector<int> free(nu * static_cast<std::size_t>(T), 0);
    for (const auto& tr : traces9) {
      const auto dep = departure_rounds(inst, tr);
      for (std::size_t u = 0; u < nu; ++u) {
        for (int t = 0; t < T; ++t) free[u * static_cast<std::size_t>(T) + static_cast<std::size_t>(t)] += dep[u] > t;
      }
    }
    const double n = static_cast<double>(traces9.size());
    Outcome o;
    o.pass = !traces9.empty();
    double worst = 1e9;
    for (std::size_t u = 0; u < nu; ++u) {
      for (int t = 0; t < T; ++t) {
        const double f = free[u * static_cast<std::size_t>(T) + static_cast<std::size_t>(t)] / n;
        const double floor = oracle::availability_floor(t + 1, T);
        worst = std::min(worst, f - floor);
        o.pass = o.pass && f >= floor - 3.0 * testing::binomial_se(floor, n);
      }
    }
    o.detail = fmt("%zu (u,t) pairs, smallest margin over the floor %+.4f", nu * static_cast<std::size_t>(T), worst);
    return o;
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
