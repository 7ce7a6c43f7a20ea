// instances.hh -- built-in example filters, parametric instance families,
// and seeded random filter generation.
//
// This file is part of filtermin, distributed under the MIT license.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "filtermin/filter.hh"

namespace filtermin {

// A specific assignment of one output label per (multi-outputting) state,
// and the minimal size of the filter restricted to that assignment.
struct ChoiceClaim {
  std::map<std::string, std::string> choice;  // state name -> label name
  int minimal_size = 0;
};

// Documented properties of a built-in instance, frozen into the library
// so tests can assert them.
struct InstanceSpec {
  std::string name;
  std::string description;
  std::optional<int> minimal_size;
  std::optional<size_t> zipper_count;
  std::optional<int> choice_min;  // best single-output restriction
  std::optional<int> choice_max;  // worst single-output restriction
  std::vector<ChoiceClaim> choice_claims;
  // Every minimum-size cover overlaps (is not a partition).
  bool nonpartition_minimum = false;
  // Quotienting by compatibility classes yields a nondeterministic filter.
  bool class_merge_nondeterministic = false;
};

struct BuiltinInstance {
  Filter filter;
  InstanceSpec spec;
};

// Built-in instances by name; throws std::invalid_argument for unknown
// names.  Includes "counterexample-nd" (pairwise-compatible states whose
// classwise merge breaks determinism), "counterexample-nd-merged" (that
// broken merge, for inspection), "split-choice" (committing to either
// output early costs states versus keeping both), and "drone" (a small
// patrol scenario with two dual-capability regions).
BuiltinInstance builtin(const std::string& name);
std::vector<std::string> builtin_names();

// n rows of m states each, plus a shared entry state and two terminal
// states reachable from every row's tail.  Each row has its own output
// label; the terminals carry all row labels.  Minimal covers reuse the
// terminals across rows, so the joint minimum (n+1+...) beats every
// single-output restriction.  Requires n >= 1, m >= 2.
Filter gen_nxm(int n, int m);

struct GridExit {
  int row = 0;
  int col = 0;
};

struct GridOptions {
  // Cells that are exits.  Boundary cells are "outer" exits, interior
  // cells "inner" exits.  Empty means a default placement with both kinds
  // present and some row containing both.
  std::vector<GridExit> exits;
};

// Tracking a walker on an n-by-n grid who drifts at most one row per
// step while its column is unobserved; the filter reports whether the
// walker could be at an outer exit, an inner exit, or neither.  Row
// announcements collapse beliefs to full rows, so distinct beliefs never
// share successors and the zipper constraint set is empty: minimization
// reduces to covering the compatibility complex.  States scale linearly
// in n.  Requires n >= 2.
Filter gen_grid(int n, const GridOptions& opts = {});

struct RandomFilterOptions {
  int num_states = 6;
  int num_obs = 3;
  int num_labels = 3;
  int max_outputs_per_state = 1;  // > 1 yields multi-outputting states
  bool acyclic = false;           // edges only from lower to higher ids
  // Percentage of occupied (state, observation) slots that also get a
  // second target, making the filter nondeterministic.
  int nondet_percent = 0;
  uint64_t seed = 1;
};

// Fully reachable random filter: a random spanning structure guarantees
// reachability, then extra edges are sprinkled in without violating
// determinism; nondet_percent > 0 then doubles up some transitions.
// Same seed, same filter.
Filter random_filter(const RandomFilterOptions& opts);

}  // namespace filtermin
