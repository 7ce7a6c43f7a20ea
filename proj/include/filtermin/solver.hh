// solver.hh -- SAT backends: a built-in conflict-driven (CDCL) procedure
// and a bridge to an external DIMACS solver subprocess.
//
// This file is part of filtermin, distributed under the MIT license.

#pragma once

#include <string>
#include <vector>

#include "filtermin/encode.hh"

namespace filtermin {

enum class SolveStatus { kSat, kUnsat, kUnknown };

struct SolveResult {
  SolveStatus status = SolveStatus::kUnknown;
  // 1-based assignment, size num_vars+1, meaningful only when kSat.
  std::vector<bool> model;
  std::string detail;   // why kUnknown, or backend diagnostics
  double seconds = 0.0;
};

struct SolverOptions {
  // "builtin", or "exec:<command>" to pipe DIMACS through an external
  // solver expected to print standard `s ...`/`v ...` result lines.
  std::string backend = "builtin";
  double timeout_seconds = 0.0;  // 0 = no limit
  // The built-in procedure refuses larger instances rather than grind.
  size_t max_builtin_vars = 4'000'000;
  size_t max_builtin_clauses = 20'000'000;
  // Initial decision polarities for the builtin solver, 1-based and
  // ignored unless it has exactly num_vars+1 entries.  A near-solution
  // (say, the incumbent cover during the descending search) steers the
  // solver into a good region without constraining it.
  std::vector<bool> phase_hint;
};

// Backend chosen by the FILTERMIN_SOLVER environment variable when set,
// "builtin" otherwise.
std::string default_solver_backend();

// True iff the (1-based) assignment satisfies every clause.  Models
// returned by solve() are always checked with this before being trusted;
// an external solver emitting a bogus model yields kUnknown, never a
// wrong answer.
bool model_satisfies(const CnfInstance& cnf, const std::vector<bool>& model);

SolveResult solve(const CnfInstance& cnf, const SolverOptions& opts = {});

}  // namespace filtermin
