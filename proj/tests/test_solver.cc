// Tests for the SAT backends: the built-in conflict-driven solver
// against a truth-table oracle, pigeonhole refutations, timeouts, and
// the external-solver bridge (including its distrust of bogus models).

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "filtermin/encode.hh"
#include "filtermin/solver.hh"

using namespace filtermin;

namespace {

CnfInstance make_cnf(int num_vars, std::vector<std::vector<int>> clauses) {
  CnfInstance cnf;
  cnf.num_vars = num_vars;
  cnf.clauses = std::move(clauses);
  return cnf;
}

// Exhaustive truth-table satisfiability for small instances.
bool brute_sat(const CnfInstance& cnf) {
  REQUIRE(cnf.num_vars <= 20);
  for (uint32_t mask = 0; mask < (1u << cnf.num_vars); ++mask) {
    std::vector<bool> model(cnf.num_vars + 1, false);
    for (int v = 1; v <= cnf.num_vars; ++v)
      model[v] = mask & (1u << (v - 1));
    if (model_satisfies(cnf, model))
      return true;
  }
  return false;
}

CnfInstance random_cnf(std::mt19937& rng, int num_vars, int num_clauses,
                       int max_len) {
  CnfInstance cnf;
  cnf.num_vars = num_vars;
  for (int c = 0; c < num_clauses; ++c) {
    int len = 1 + static_cast<int>(rng() % max_len);
    std::vector<int> clause;
    for (int l = 0; l < len; ++l) {
      int v = 1 + static_cast<int>(rng() % num_vars);
      clause.push_back((rng() % 2) ? v : -v);
    }
    cnf.clauses.push_back(std::move(clause));
  }
  return cnf;
}

// "m pigeons into n holes": unsatisfiable iff m > n, and a classic
// generator of long conflict chains.
CnfInstance pigeonhole(int pigeons, int holes) {
  CnfInstance cnf;
  cnf.num_vars = pigeons * holes;
  auto var = [holes](int p, int h) { return p * holes + h + 1; };
  for (int p = 0; p < pigeons; ++p) {
    std::vector<int> at_least;
    for (int h = 0; h < holes; ++h) at_least.push_back(var(p, h));
    cnf.clauses.push_back(std::move(at_least));
  }
  for (int h = 0; h < holes; ++h)
    for (int p = 0; p < pigeons; ++p)
      for (int q = p + 1; q < pigeons; ++q)
        cnf.clauses.push_back({-var(p, h), -var(q, h)});
  return cnf;
}

// Writes a fake external "solver" that ignores its input and prints a
// canned answer; returns the backend string that runs it.
std::string fake_solver(const std::string& name, const std::string& body) {
  std::string path = "fake_solver_" + name + ".sh";
  std::ofstream out(path);
  out << "#!/bin/sh\n" << body << "\n";
  out.close();
  return "exec:sh " + path;
}

}  // namespace

TEST_CASE("trivial formulas") {
  CHECK(solve(make_cnf(0, {})).status == SolveStatus::kSat);
  CHECK(solve(make_cnf(2, {})).status == SolveStatus::kSat);
  CHECK(solve(make_cnf(1, {{}})).status == SolveStatus::kUnsat);
  CHECK(solve(make_cnf(1, {{1}, {-1}})).status == SolveStatus::kUnsat);
  SolveResult r = solve(make_cnf(2, {{1}, {-1, 2}}));
  REQUIRE(r.status == SolveStatus::kSat);
  CHECK(r.model[1]);
  CHECK(r.model[2]);
}

TEST_CASE("the builtin solver agrees with a truth table on random formulas") {
  std::mt19937 rng(12345);
  int sat_seen = 0, unsat_seen = 0;
  for (int trial = 0; trial < 300; ++trial) {
    int vars = 3 + static_cast<int>(rng() % 10);
    int clauses = 2 + static_cast<int>(rng() % (3 * vars));
    CnfInstance cnf = random_cnf(rng, vars, clauses, 3);
    bool expect = brute_sat(cnf);
    SolveResult r = solve(cnf);
    CAPTURE(trial, vars, clauses);
    REQUIRE(r.status != SolveStatus::kUnknown);
    CHECK((r.status == SolveStatus::kSat) == expect);
    if (r.status == SolveStatus::kSat) {
      CHECK(model_satisfies(cnf, r.model));
      ++sat_seen;
    } else {
      ++unsat_seen;
    }
  }
  // The mix must actually exercise both outcomes.
  CHECK(sat_seen > 30);
  CHECK(unsat_seen > 30);
}

TEST_CASE("pigeonhole instances are refuted and satisfied correctly") {
  CHECK(solve(pigeonhole(5, 4)).status == SolveStatus::kUnsat);
  CHECK(solve(pigeonhole(6, 5)).status == SolveStatus::kUnsat);
  SolveResult fit = solve(pigeonhole(5, 5));
  REQUIRE(fit.status == SolveStatus::kSat);
  CHECK(model_satisfies(pigeonhole(5, 5), fit.model));
}

TEST_CASE("a tiny timeout yields unknown, not a wrong answer") {
  SolverOptions opts;
  opts.timeout_seconds = 1e-6;
  SolveResult r = solve(pigeonhole(9, 8), opts);
  CHECK(r.status == SolveStatus::kUnknown);
  CHECK(r.detail.find("timeout") != std::string::npos);
}

TEST_CASE("instances beyond the builtin caps are refused, not ground") {
  SolverOptions opts;
  opts.max_builtin_vars = 5;
  SolveResult r = solve(make_cnf(6, {{1, 2}}), opts);
  CHECK(r.status == SolveStatus::kUnknown);
  CHECK_FALSE(r.detail.empty());
}

TEST_CASE("phase hints steer decisions without constraining the answer") {
  // No clauses: every decision follows the hint exactly.
  CnfInstance cnf = make_cnf(3, {});
  SolverOptions opts;
  opts.phase_hint = {false, true, false, true};
  SolveResult r = solve(cnf, opts);
  REQUIRE(r.status == SolveStatus::kSat);
  CHECK(r.model == opts.phase_hint);

  // A hint that is not a solution must not make the solver wrong.
  CnfInstance hard = make_cnf(2, {{1}, {2}});
  opts.phase_hint = {false, false, false};
  SolveResult s = solve(hard, opts);
  REQUIRE(s.status == SolveStatus::kSat);
  CHECK(model_satisfies(hard, s.model));

  // A wrong-sized hint is ignored.
  opts.phase_hint = {false};
  CHECK(solve(hard, opts).status == SolveStatus::kSat);
}

TEST_CASE("unknown backend strings are rejected") {
  CHECK_THROWS_AS(solve(make_cnf(1, {{1}}), SolverOptions{.backend = "magic"}),
                  std::invalid_argument);
}

TEST_CASE("the default backend comes from the environment") {
  // Not set (or empty) means builtin; the CLI threads this through.
  if (const char* prev = std::getenv("FILTERMIN_SOLVER"); prev == nullptr) {
    CHECK(default_solver_backend() == "builtin");
    setenv("FILTERMIN_SOLVER", "exec:foo", 1);
    CHECK(default_solver_backend() == "exec:foo");
    unsetenv("FILTERMIN_SOLVER");
  }
}

TEST_CASE("external solver bridge parses s and v lines") {
  // A canned correct answer for the fixed formula (x1) & (~x2).
  CnfInstance cnf = make_cnf(2, {{1}, {-2}});
  std::string good = fake_solver("good", "echo 's SATISFIABLE'; echo 'v 1 -2 0'");
  SolveResult r = solve(cnf, SolverOptions{.backend = good});
  REQUIRE(r.status == SolveStatus::kSat);
  CHECK(r.model[1]);
  CHECK_FALSE(r.model[2]);
  std::remove("fake_solver_good.sh");
}

TEST_CASE("bogus external models are discarded rather than trusted") {
  CnfInstance cnf = make_cnf(1, {{1}});
  std::string liar = fake_solver("liar", "echo 's SATISFIABLE'; echo 'v -1 0'");
  SolveResult r = solve(cnf, SolverOptions{.backend = liar});
  CHECK(r.status == SolveStatus::kUnknown);
  CHECK(r.detail.find("does not satisfy") != std::string::npos);
  std::remove("fake_solver_liar.sh");
}

TEST_CASE("an external solver that prints nothing useful yields unknown") {
  CnfInstance cnf = make_cnf(1, {{1}});
  std::string mute = fake_solver("mute", "echo 'c nothing to see'");
  SolveResult r = solve(cnf, SolverOptions{.backend = mute});
  CHECK(r.status == SolveStatus::kUnknown);
  CHECK(r.detail.find("no s-line") != std::string::npos);
  std::remove("fake_solver_mute.sh");
}
