// minimize.hh -- the end-to-end exact minimizer: complex, zipper
// constraints, descending-k SAT search, decoding, verification.  Also the
// stepwise merge heuristic kept around for comparison.
//
// This file is part of filtermin, distributed under the MIT license.

#pragma once

#include <string>
#include <vector>

#include "filtermin/compat.hh"
#include "filtermin/cover.hh"
#include "filtermin/encode.hh"
#include "filtermin/filter.hh"
#include "filtermin/solver.hh"
#include "filtermin/zipper.hh"

namespace filtermin {

// How a probed value of k was resolved.
enum class KStatus {
  kSat,                // solver found a model; decoded cover validated
  kUnsat,              // solver refuted k
  kSatByConstruction,  // a concrete cover of this size was exhibited
  kUnsatByBound,       // below a certified lower bound; solver skipped
  kUnknown,            // gave up (timeout or solver failure)
};

struct KOutcome {
  int k = 0;
  KStatus status = KStatus::kUnknown;
  int decoded_size = -1;  // nonempty parts after redundancy pruning
  double t_encode = 0.0;
  double t_solve = 0.0;
};

struct MinimizeOptions {
  EncodeOptions encoding;
  bool binary_search = false;  // default: linear descent with down-jumps
  SolverOptions solver;
  ComplexOptions complex;
  ZipperOptions zippers;
  // Reject multi-outputting inputs instead of handling them.
  bool require_single_output = false;
  // Cap for minimize_so_by_choice_enumeration.
  size_t max_choices = 4096;
};

struct MinimizeReport {
  Filter minimal_filter;
  Cover cover;
  int minimal_size = -1;
  // True when minimality itself is proven: refutation at minimal_size-1,
  // a matching lower bound, or minimal_size == 1.
  bool certified = false;
  std::string certificate;  // "refutation" | "lower-bound" | "floor" | ""
  int lower_bound = 1;
  std::vector<KOutcome> outcomes;  // in probe order
  std::vector<std::string> warnings;

  size_t zipper_count = 0;    // as generated
  size_t zippers_encoded = 0; // after equivalence-preserving reduction
  bool zippers_complete = true;
  double t_zipper = 0.0;  // complex + constraint generation
  double t_encode = 0.0;
  double t_solve = 0.0;

  // Re-checked against the *original* input, before any determinization
  // or pruning the pipeline applied.
  DeterminismCheck determinism;
  SimulationVerdict simulation;
};

// Exact minimization.  Determinizes and prunes the input if needed (with
// warnings), builds the compatibility complex and zipper constraints,
// then searches k downward from |states|.  Cheap certificates are used
// where they apply: the all-singletons cover at k = t, a greedy cover of
// maximal faces (repaired to satisfy the constraints) as a starting
// upper bound, and a lower bound from an independent set of the
// incompatibility relation.  Every SAT answer is decoded and re-validated
// from scratch; the result filter must pass the determinism and
// simulation checks against the original input or minimize throws.
MinimizeReport minimize(const Filter& f, const MinimizeOptions& opts = {});

// Minimum over all single-output restrictions of a multi-outputting
// filter: every state is pinned to one of its output labels, each
// restriction minimized separately.  Demonstrates how committing to
// outputs early can cost states versus minimize() on the original.
// Warnings carry the per-choice sizes.
MinimizeReport minimize_so_by_choice_enumeration(
    const Filter& f, const MinimizeOptions& opts = {});

// Merge a partition's classes into one state each; transitions are
// unioned, outputs are unioned.  The result need not be deterministic.
Filter quotient_filter(const Filter& f, const Cover& partition);

// Quotient by connected components of the compatibility graph --
// the obvious-but-wrong merge that motivates covers.
Filter merge_by_compatibility_classes(const Filter& f);

struct BaselineReport {
  Filter filter;    // the merged quotient, valid or not
  Cover partition;  // greedy coloring classes
  int size = 0;
  DeterminismCheck determinism;
  SimulationVerdict simulation;  // against the input
};

// The classic stepwise heuristic for single-outputting filters: compute
// pairwise compatibility, greedily partition into mutually compatible
// classes (first fit in state order), merge, and repeat on the result
// until no round merges anything or a merge breaks determinism.  Returns
// the final filter with verdicts attached; callers decide what a failed
// check means.  Throws std::invalid_argument on multi-outputting input.
BaselineReport baseline_stepwise_heuristic(const Filter& f);

}  // namespace filtermin
