// zipper.hh -- zipper constraints: the side conditions a cover must meet
// so that merging states preserves determinism.
//
// This file is part of filtermin, distributed under the MIT license.

#pragma once

#include <cstddef>

#include "filtermin/compat.hh"
#include "filtermin/filter.hh"

namespace filtermin {

// "If some part of the cover contains all of u_set, some part must
// contain all of w_set", where w_set is the set of obs-successors of
// u_set's members.  Constraints are only stored with |u_set| >= 2 and
// |w_set| >= 2: a smaller u_set can never be strictly contained in the
// way that matters (a singleton is contained in some part of every
// cover), and a smaller w_set is contained in some part of every cover.
struct ZipperConstraint {
  StateSet u_set;
  StateSet w_set;
  ObsId obs = -1;

  friend bool operator==(const ZipperConstraint& a, const ZipperConstraint& b) {
    return a.u_set == b.u_set && a.obs == b.obs && a.w_set == b.w_set;
  }
  friend bool operator<(const ZipperConstraint& a, const ZipperConstraint& b) {
    if (a.u_set != b.u_set)
      return a.u_set < b.u_set;
    if (a.obs != b.obs)
      return a.obs < b.obs;
    return a.w_set < b.w_set;
  }
};

// The set of states some member of u transitions to under y.
StateSet successor_set(const Filter& f, const StateSet& u, ObsId y);

struct ZipperOptions {
  // Stop once this many constraints have been generated; the result is
  // then marked incomplete.  The constraint count is worst-case
  // exponential in the number of states.
  size_t max_constraints = 1'000'000;
  // Subsets are enumerated over the members of a face that actually move
  // under the observation at hand (members without an edge only dilute
  // u_set and are subsumed by the constraint on the moving core).  When
  // more than this many members move, full enumeration is replaced by
  // pairwise constraints for that face/observation and the result is
  // marked incomplete.
  size_t max_split_members = 16;
};

struct ZipperSet {
  std::vector<ZipperConstraint> constraints;  // canonically sorted
  bool complete = true;   // false when generation was truncated by a cap
  size_t faces_scanned = 0;  // subsets examined across all maximal faces
};

// All constraints (U, W)_y with U a face of the complex, |U| >= 2,
// W = successor_set(F, U, y) and |W| >= 2.  U ranges over subsets of
// maximal faces, deduplicated globally by (U, y).  Subsets containing
// members with no y-edge are omitted: such a constraint is implied by
// the one on the members that do move.  A face/observation pair whose
// movers all land on one state is skipped wholesale, since every subset
// then has a singleton successor set.  When a cap trips, `complete` is
// false and the returned constraints are a sound subset: anything they
// rule out is genuinely ruled out, but a cover satisfying them is not
// guaranteed safe and must be checked against the filter directly.
// Throws std::invalid_argument when f is not deterministic.
ZipperSet generate_zippers(const Filter& f, const SimplicialComplex& complex,
                           const ZipperOptions& opts = {});

// Logically equivalent subset of a constraint system, for encoding:
// drops constraints with w_set inside u_set (a part hosting u_set then
// hosts w_set itself), merges constraints that differ only in the
// observation, and keeps only the inclusion-minimal u_sets per w_set
// (hosting a superset implies hosting the subset, so the subset's
// constraint subsumes).  Every cover satisfies the reduced system iff it
// satisfies the original.
std::vector<ZipperConstraint> reduce_zippers(
    const std::vector<ZipperConstraint>& zs);

// Formats as `U{a,b} -y-> W{c,d}`.
std::string format_zipper(const Filter& f, const ZipperConstraint& z);
std::string format_zippers(const Filter& f,
                           const std::vector<ZipperConstraint>& zs);

}  // namespace filtermin
