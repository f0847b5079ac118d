#include <cmath>

#include "doctest.h"
#include "fairmatch/lp.hpp"
#include "fairmatch/random.hpp"
#include "oracles.hpp"

using namespace fairmatch;

TEST_CASE("maximize x over [0,1]") {
  LpProgram p;
  const int x = p.add_variable("x", 0.0, 1.0, 1.0);
  const auto s = solve_lp(p);
  REQUIRE(s.optimal());
  CHECK(s.values[static_cast<std::size_t>(x)] == 1.0);
  CHECK(s.objective_value == 1.0);
}

TEST_CASE("max-min of two bounds") {
  LpProgram p;
  const int eta = p.add_variable("eta", 0.0, kInf, 1.0);
  p.add_constraint({{eta, 1.0}}, Relation::LessEqual, 0.3);
  p.add_constraint({{eta, 1.0}}, Relation::LessEqual, 0.7);
  const auto s = solve_lp(p);
  REQUIRE(s.optimal());
  CHECK(s.objective_value == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("infeasible and unbounded programs are reported") {
  LpProgram inf;
  const int x = inf.add_variable("x", 0.0, 1.0, 1.0);
  inf.add_constraint({{x, 1.0}}, Relation::GreaterEqual, 2.0);
  CHECK(solve_lp(inf).status == LpStatus::Infeasible);

  LpProgram unb;
  const int y = unb.add_variable("y", 0.0, kInf, 1.0);
  const int z = unb.add_variable("z", 0.0, kInf, 0.0);
  unb.add_constraint({{y, 1.0}, {z, -1.0}}, Relation::LessEqual, 1.0);
  CHECK(solve_lp(unb).status == LpStatus::Unbounded);
}

TEST_CASE("equality, >= rows, negative rhs and shifted lower bounds") {
  LpProgram p;
  const int a = p.add_variable("a", -1.0, 3.0, 1.0);
  const int b = p.add_variable("b", 0.5, 2.0, 2.0);
  p.add_constraint({{a, 1.0}, {b, 1.0}}, Relation::Equal, 2.5);
  p.add_constraint({{a, 1.0}, {b, -1.0}}, Relation::GreaterEqual, -1.0);
  p.add_constraint({{a, -1.0}}, Relation::LessEqual, -0.25);  // a >= 0.25
  const auto s = solve_lp(p);
  REQUIRE(s.optimal());
  // b as large as possible: a - b >= -1 and a + b = 2.5 give b <= 1.75.
  CHECK(s.values[static_cast<std::size_t>(b)] == doctest::Approx(1.75));
  CHECK(s.values[static_cast<std::size_t>(a)] == doctest::Approx(0.75));
  CHECK(max_violation(p, s.values) <= 1e-9);
}

TEST_CASE("ill-formed programs throw") {
  LpProgram p;
  p.add_variable("x", 1.0, 0.0);
  CHECK_FALSE(check_program(p).empty());
  CHECK_THROWS_AS((void)solve_lp(p), std::invalid_argument);

  LpProgram q;
  q.add_variable("x", 0.0, 1.0);
  q.add_constraint({{3, 1.0}}, Relation::LessEqual, 1.0);
  CHECK_THROWS_AS((void)solve_lp(q), std::invalid_argument);

  LpProgram r;
  r.add_variable("x", -kInf, 1.0);
  CHECK_THROWS_AS((void)solve_lp(r), std::invalid_argument);
}

TEST_CASE("random small LPs agree with vertex enumeration") {
  Rng rng = make_rng(2024);
  int solved = 0, infeasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    LpProgram p;
    const int n = 1 + static_cast<int>(uniform_index(rng, 4));
    for (int j = 0; j < n; ++j) {
      const double lo = uniform01(rng) < 0.3 ? -uniform01(rng) : 0.0;
      p.add_variable("x" + std::to_string(j), lo, lo + 0.5 + 2.0 * uniform01(rng), 2.0 * uniform01(rng) - 0.7);
    }
    const int m = 1 + static_cast<int>(uniform_index(rng, 5));
    for (int i = 0; i < m; ++i) {
      std::vector<Term> terms;
      for (int j = 0; j < n; ++j) {
        if (uniform01(rng) < 0.7) terms.push_back({j, 2.0 * uniform01(rng) - 0.5});
      }
      const double r = uniform01(rng);
      const Relation rel = r < 0.6 ? Relation::LessEqual : (r < 0.85 ? Relation::GreaterEqual : Relation::Equal);
      p.add_constraint(std::move(terms), rel, 2.0 * uniform01(rng) - 0.3);
    }
    const auto want = oracle::vertex_enumeration(p);
    const auto got = solve_lp(p, {.execution = Execution::Serial});
    if (!want) {
      CHECK(got.status == LpStatus::Infeasible);
      ++infeasible;
      continue;
    }
    REQUIRE(got.optimal());
    CHECK(got.objective_value == doctest::Approx(want->value).epsilon(1e-8).scale(1.0));
    CHECK(max_violation(p, got.values) <= 1e-6);
    CHECK(evaluate_objective(p, got.values) == doctest::Approx(got.objective_value).epsilon(1e-9).scale(1.0));
    ++solved;
  }
  CHECK(solved > 100);
  CHECK(infeasible > 5);
}

TEST_CASE("degenerate programs terminate") {
  // Many redundant rows through the same vertex.
  LpProgram p;
  const int x = p.add_variable("x", 0.0, kInf, 1.0);
  const int y = p.add_variable("y", 0.0, kInf, 1.0);
  for (int k = 1; k <= 30; ++k) {
    const double a = 1.0 + k * 0.01;
    p.add_constraint({{x, a}, {y, 1.0}}, Relation::LessEqual, a);
    p.add_constraint({{x, 1.0}, {y, a}}, Relation::LessEqual, a);
  }
  const auto s = solve_lp(p);
  REQUIRE(s.optimal());
  CHECK(max_violation(p, s.values) <= 1e-9);
  const auto v = oracle::vertex_enumeration(p);
  REQUIRE(v);
  CHECK(s.objective_value == doctest::Approx(v->value));
}

TEST_CASE("solver is deterministic and the parallel pivot path matches the serial one") {
  Rng rng = make_rng(5);
  LpProgram p;
  const int n = 400;
  for (int j = 0; j < n; ++j) p.add_variable("x" + std::to_string(j), 0.0, 1.0, uniform01(rng));
  for (int i = 0; i < 200; ++i) {
    std::vector<Term> row;
    for (int j = 0; j < n; ++j) {
      if (uniform01(rng) < 0.2) row.push_back({j, uniform01(rng)});
    }
    p.add_constraint(std::move(row), Relation::LessEqual, 1.0 + uniform01(rng));
  }
  const auto a = solve_lp(p, {.execution = Execution::Serial});
  const auto b = solve_lp(p, {.execution = Execution::Parallel});
  const auto c = solve_lp(p, {.execution = Execution::Serial});
  REQUIRE(a.optimal());
  CHECK(a.values == b.values);
  CHECK(a.values == c.values);
  CHECK(a.iterations == b.iterations);
  CHECK(max_violation(p, a.values) <= 1e-6);
}
