#include "doctest.h"
#include "fairmatch/baselines.hpp"
#include "support.hpp"

using namespace fairmatch;

namespace {

/// One type with patience `dv` adjacent to every offline vertex; weights per edge.
Instance fan(std::vector<double> w_op, std::vector<double> w_on, std::vector<double> w_off, int dv,
             std::vector<GroupId> groups) {
  Instance inst;
  inst.groups = {"g1", "g2"};
  for (std::size_t u = 0; u < w_op.size(); ++u) inst.offline.push_back({static_cast<int>(u), groups[u], 1});
  OnlineType v;
  v.p = 1.0;
  v.patience = dv;
  inst.online = {v};
  for (std::size_t u = 0; u < w_op.size(); ++u) {
    inst.edges.push_back({static_cast<int>(u), 0, 1.0, w_op[u], w_off[u], w_on[u]});
  }
  return inst;
}

/// Two certain rounds: u0 (g1, w^U = 10 in round 0) raises g1's average to 5.
/// Round 1's type is adjacent to u2 in g1 and, when `with_g2`, to u1 in g2.
Instance greedy_d_fixture(bool with_g2) {
  Instance inst;
  inst.arrival_model = ArrivalModel::Kad;
  inst.horizon = 2;
  inst.groups = {"g1", "g2"};
  inst.offline = {{0, 0, 1}, {1, 1, 1}, {2, 0, 1}};
  OnlineType v0, v1;
  v0.id = 0;
  v0.p_t = {1.0, 0.0};
  v1.id = 1;
  v1.p_t = {0.0, 1.0};
  inst.online = {v0, v1};
  inst.edges = {{0, 0, 1.0, 1.0, 10.0, 1.0}, {2, 1, 1.0, 1.0, 100.0, 1.0}};
  if (with_g2) inst.edges.push_back({1, 1, 1.0, 1.0, 1.0, 1.0});
  return inst;
}

int first_probe_offline(const Instance& inst, const RunTrace& t, std::size_t round) {
  return inst.edges[static_cast<std::size_t>(t.events[round].probes.at(0).edge)].u;
}

}  // namespace

TEST_CASE("greedy baselines on a single edge probe it") {
  const Instance inst = testing::single_edge();
  for (auto* algo : {&greedy_o, &greedy_r, &greedy_d}) {
    const auto t = (*algo)(inst, 0);
    REQUIRE(t.events[0].probes.size() == 1);
    CHECK(t.events[0].probes[0].edge == 0);
  }
}

TEST_CASE("greedy-o follows p*w^O, greedy-r follows p*w^V") {
  const Instance inst = fan({1.0, 2.0}, {2.0, 1.0}, {0.0, 0.0}, 2, {0, 0});
  const auto o = greedy_o(inst, 1);
  REQUIRE(o.events[0].probes.size() == 1);
  CHECK(o.events[0].probes[0].edge == 1);
  CHECK(o.events[0].probes[0].success);
  const auto r = greedy_r(inst, 1);
  REQUIRE(r.events[0].probes.size() == 1);
  CHECK(r.events[0].probes[0].edge == 0);
}

TEST_CASE("greedy-o ranks by the product with the success probability") {
  Instance inst = fan({1.0, 3.0}, {1.0, 1.0}, {0.0, 0.0}, 1, {0, 0});
  inst.edges[1].success_prob = 0.2;  // 0.6 < 1.0
  CHECK(greedy_o(inst, 0).events[0].probes[0].edge == 0);
}

TEST_CASE("greedy ties go to the lower edge index") {
  const Instance inst = fan({1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}, 2, {0, 0});
  CHECK(greedy_o(inst, 0).events[0].probes[0].edge == 0);
  CHECK(greedy_r(inst, 0).events[0].probes[0].edge == 0);
  CHECK(greedy_d(inst, 0).events[0].probes[0].edge == 0);
}

TEST_CASE("greedy probes continue after failures up to the arrival patience") {
  Instance inst = fan({3.0, 2.0, 1.0}, {3.0, 2.0, 1.0}, {3.0, 2.0, 1.0}, 2, {0, 0, 0});
  for (auto& e : inst.edges) e.success_prob = 0.0;
  for (auto* algo : {&greedy_o, &greedy_r, &greedy_d}) {
    const auto t = (*algo)(inst, 0);
    REQUIRE(t.events[0].probes.size() == 2);
    CHECK(t.events[0].probes[0].edge == 0);
    CHECK(t.events[0].probes[1].edge == 1);
  }
}

TEST_CASE("greedy-d with all groups at zero breaks ties by group id") {
  // u0 in g2 has the larger w^U, but g1 (id 0) goes first.
  const Instance inst = fan({1.0, 1.0}, {1.0, 1.0}, {5.0, 1.0}, 1, {1, 0});
  CHECK(first_probe_offline(inst, greedy_d(inst, 0), 0) == 1);
}

TEST_CASE("greedy-d probes the worst-off group") {
  const Instance inst = greedy_d_fixture(true);
  const auto t = greedy_d(inst, 0);
  REQUIRE(t.events[0].probes.size() == 1);
  CHECK(t.events[0].probes[0].success);
  // g1 averages 10 / 2 = 5, g2 averages 0.
  CHECK(first_probe_offline(inst, t, 1) == 1);
}

TEST_CASE("greedy-d falls back to the next group when the worst has no neighbor") {
  const Instance inst = greedy_d_fixture(false);
  const auto t = greedy_d(inst, 0);
  REQUIRE(t.events[1].probes.size() == 1);
  CHECK(first_probe_offline(inst, t, 1) == 2);
}

TEST_CASE("baseline traces respect the episode invariants and are reproducible") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Instance kiid = testing::random_kiid(seed, 5, 7, false);
    const Instance kad = testing::random_kad(seed, 4, 4, 5);
    for (const Instance* inst : {&kiid, &kad}) {
      for (auto* algo : {&greedy_o, &greedy_r, &greedy_d}) {
        for (std::uint64_t s = 0; s < 50; ++s) {
          const auto t = (*algo)(*inst, s);
          CHECK(check_trace(*inst, t).empty());
          CHECK(testing::same_trace(t, (*algo)(*inst, s)));
        }
      }
    }
  }
}
