#include <algorithm>

#include "doctest.h"
#include "fairmatch/benchmarks.hpp"
#include "fairmatch/harness.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace fairmatch;

TEST_CASE("KIID LP on a single edge") {
  const auto lp = build_kiid_lp(testing::single_edge(), Objective::Operator);
  const auto s = solve_benchmark(lp);
  CHECK(s.lp.objective_value == doctest::Approx(1.0));
  CHECK(s.value(0) == doctest::Approx(1.0));
}

TEST_CASE("group hardness fixture at T = 3: (3, 1, 1)") {
  const auto b = benchmarks(make_hardness_group_instance(3));
  CHECK(b.opt_op == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(b.opt_off == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(b.opt_on == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(b.warnings.empty());
}

TEST_CASE("group hardness fixture at T = 9 (fragmented)") {
  const Instance inst = fragment_types(make_hardness_group_instance(9));
  const auto b = benchmarks(inst);
  CHECK(b.opt_op == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(b.opt_off == doctest::Approx(1.0).epsilon(1e-9));
  // Each singleton online group has n_v = 3 and can collect utility at most
  // 1 in total, so the per-arrival optimum is 1/3.
  CHECK(b.opt_on == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(b.opt_on * 3.0 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("all-zero utilities give zero benchmarks") {
  Instance inst = make_hardness_group_instance(3);
  for (auto& e : inst.edges) e.w_op = e.w_off = e.w_on = 0.0;
  const auto b = benchmarks(inst);
  CHECK(b.opt_op == 0.0);
  CHECK(b.opt_off == 0.0);
  CHECK(b.opt_on == 0.0);
}

TEST_CASE("fragmented form rejects unfragmented input") {
  CHECK_THROWS_AS((void)build_kiid_lp(make_hardness_group_instance(9), Objective::Operator), std::invalid_argument);
  CHECK_NOTHROW((void)build_kiid_lp(make_hardness_group_instance(9), Objective::Operator, KiidForm::Aggregated));
  CHECK_THROWS_AS((void)build_kiid_lp(as_kad(testing::single_edge()), Objective::Operator), std::invalid_argument);
}

TEST_CASE("KAD LP on a single edge") {
  const Instance inst = as_kad(testing::single_edge(1.0, 5.0));
  const auto s = solve_benchmark(build_kad_lp(inst, Objective::Operator));
  CHECK(s.lp.objective_value == doctest::Approx(5.0));
}

TEST_CASE("KAD LP requires p_e = 1") {
  CHECK_THROWS_AS((void)build_kad_lp(as_kad(testing::single_edge(0.5)), Objective::Operator), std::invalid_argument);
}

TEST_CASE("offline group-vs-individual fixture, L = 100") {
  const Instance inst = make_hardness_indiv_group_instance(100.0, Side::Offline);
  const auto kad = solve_benchmark(build_kad_lp(as_kad(inst), Objective::OfflineFair));
  // One group of two vertices: per-capita optimum L/2, group total L.
  CHECK(kad.lp.objective_value == doctest::Approx(50.0));
  CHECK(2.0 * kad.lp.objective_value == doctest::Approx(100.0));
  const auto b = benchmarks(inst);
  CHECK(b.opt_off == doctest::Approx(50.0));
  const auto ind = individual_optima(inst);
  CHECK(ind.offline == doctest::Approx(100.0 / 101.0).epsilon(1e-9));
}

TEST_CASE("offline group-vs-individual fixture, L = 1 is symmetric") {
  const auto ind = individual_optima(make_hardness_indiv_group_instance(1.0, Side::Offline));
  CHECK(ind.offline == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("online group-vs-individual fixture mirrors the offline one") {
  const Instance inst = make_hardness_indiv_group_instance(100.0, Side::Online);
  const auto b = benchmarks(inst);
  CHECK(b.opt_on == doctest::Approx(50.0));  // total L over sum n_v = 2
  CHECK(individual_optima(inst).online == doctest::Approx(100.0 / 101.0).epsilon(1e-9));
}

TEST_CASE("two certain rounds, one offline vertex: operator optimum is the heavier edge") {
  Instance inst = make_hardness_indiv_group_instance(1.0, Side::Online);
  inst.edges[0].w_op = 2.0;
  inst.edges[1].w_op = 7.0;
  const auto s = solve_benchmark(build_kad_lp(inst, Objective::Operator));
  CHECK(s.lp.objective_value == doctest::Approx(7.0));
  CHECK(s.value(1, 1) == doctest::Approx(1.0));
  // Round 0 carries no variable for the type that never arrives then.
  const auto lp = build_kad_lp(inst, Objective::Operator);
  CHECK(lp.edge_var[0 * 2 + 1] == -1);
  CHECK(lp.edge_var[1 * 2 + 0] == -1);
}

TEST_CASE("benchmark LPs of small instances agree with vertex enumeration") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    // 3 edges at most: 3 variables for the operator LP, 4 with eta.
    Instance inst = testing::random_kiid(seed, 2, 2, seed % 2 == 0, 0.6);
    if (inst.edges.size() > 3) inst.edges.resize(3);
    for (const Objective o : {Objective::Operator, Objective::OfflineFair, Objective::OnlineFair}) {
      const auto lp = build_kiid_lp(inst, o);
      const auto s = solve_benchmark(lp);
      const auto want = oracle::vertex_enumeration(lp.program);
      REQUIRE(want);
      CHECK(s.lp.objective_value == doctest::Approx(want->value).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("optimal benchmark solutions are feasible and the max-min linearization is exact") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Instance kiid = testing::random_kiid(seed, 4, 5, false);
    const Instance kad = testing::random_kad(seed, 3, 3, 3);
    for (const Instance* inst : {&kiid, &kad}) {
      for (const Objective o : {Objective::OfflineFair, Objective::OnlineFair}) {
        const auto lp = inst->arrival_model == ArrivalModel::Kiid ? build_kiid_lp(*inst, o) : build_kad_lp(*inst, o);
        const auto s = solve_benchmark(lp);
        CHECK(max_violation(lp.program, s.lp.values) <= 1e-6);
        const Side side = o == Objective::OfflineFair ? Side::Offline : Side::Online;
        CHECK(min_group_average(*inst, lp, s, side) == doctest::Approx(s.lp.objective_value).epsilon(1e-6).scale(1.0));
      }
    }
  }
}

TEST_CASE("degenerate groups are dropped with a warning") {
  Instance inst = testing::single_edge();
  inst.groups.push_back("empty");
  const auto lp = build_kiid_lp(inst, Objective::OfflineFair);
  REQUIRE(lp.program.warnings.size() == 1);
  CHECK(lp.program.warnings[0].find("empty") != std::string::npos);
  CHECK(solve_benchmark(lp).lp.objective_value == doctest::Approx(1.0));
}

TEST_CASE("fragmented_benchmarks spreads the aggregated solution over unit copies") {
  Instance inst = testing::random_kiid(11, 4, 3, false);
  inst.horizon = 6;
  for (auto& v : inst.online) v.p = 1.0 / 3.0;  // n_v = 2
  const Instance frag = fragment_types(inst);
  const auto spread = fragmented_benchmarks(inst, frag);
  const auto direct = benchmarks(frag);
  CHECK(spread.opt_op == doctest::Approx(direct.opt_op).epsilon(1e-7));
  CHECK(spread.opt_off == doctest::Approx(direct.opt_off).epsilon(1e-7));
  CHECK(spread.opt_on == doctest::Approx(direct.opt_on).epsilon(1e-7));
  for (const Objective o : {Objective::Operator, Objective::OfflineFair, Objective::OnlineFair}) {
    const auto lp = build_kiid_lp(frag, o);
    std::vector<double> x(static_cast<std::size_t>(lp.program.num_variables()), 0.0);
    for (std::size_t e = 0; e < frag.edges.size(); ++e) {
      x[static_cast<std::size_t>(lp.edge_var[e])] = spread.solution(o).edge_values[e];
    }
    if (lp.eta >= 0) x[static_cast<std::size_t>(lp.eta)] = spread.opt(o);
    CHECK(max_violation(lp.program, x) <= 1e-7);
    CHECK(evaluate_objective(lp.program, x) == doctest::Approx(direct.opt(o)).epsilon(1e-7));
  }
}

TEST_CASE("benchmark solves are identical serially and in parallel") {
  const Instance inst = testing::random_kiid(21, 6, 8, false);
  const auto a = benchmarks(inst, Execution::Serial);
  const auto b = benchmarks(inst, Execution::Parallel);
  CHECK(a.x_star.edge_values == b.x_star.edge_values);
  CHECK(a.y_star.edge_values == b.y_star.edge_values);
  CHECK(a.z_star.edge_values == b.z_star.edge_values);
}
