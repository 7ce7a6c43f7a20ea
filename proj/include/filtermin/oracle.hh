// oracle.hh -- brute-force reference minimizer and solution checker.
// Deliberately shares no search machinery with the SAT pipeline: faces
// come from direct subset enumeration, covers from exhaustive branching.
//
// This file is part of filtermin, distributed under the MIT license.

#pragma once

#include <cstddef>

#include "filtermin/cover.hh"
#include "filtermin/filter.hh"

namespace filtermin {

struct OracleOptions {
  int max_states = 10;  // refuse larger inputs; the search is exponential
};

struct OracleResult {
  int minimal_size = -1;
  Cover witness_cover;
  Filter minimal_filter;
  size_t explored = 0;  // partial covers visited, for test diagnostics
};

// Exact minimum by iterative deepening over the cover size.  For each
// budget k, branch on which face covers the lowest uncovered state; at
// fully-covered leaves with constraint violations, additionally branch on
// faces containing the violated target set (a minimum cover may need
// parts that cover nothing new).  Throws std::invalid_argument when the
// input exceeds max_states or is not deterministic.
OracleResult brute_force_minimize(const Filter& f,
                                  const OracleOptions& opts = {});

struct SolutionVerdict {
  DeterminismCheck determinism;
  SimulationVerdict simulation;
  int size = 0;
  bool ok() const { return determinism.deterministic && simulation.holds; }
};

// Is `candidate` a correct replacement for `f`?  Checks exactly the two
// defining properties: determinism, and that every observation string f
// can experience is processed by candidate with a subset of f's outputs.
SolutionVerdict verify_solution(const Filter& f, const Filter& candidate);

}  // namespace filtermin
