// cover.hh -- covers of a filter's states by group-compatible parts,
// the filter a cover induces, and the cover a smaller filter induces.
//
// This file is part of filtermin, distributed under the MIT license.

#pragma once

#include <optional>
#include <string>

#include "filtermin/compat.hh"
#include "filtermin/filter.hh"
#include "filtermin/zipper.hh"

namespace filtermin {

// A collection of nonempty state sets.  Parts may overlap: overlapping
// parts are how minimization expresses splitting one input state into
// several output states.  Stored canonically: each part sorted, parts
// sorted, duplicates removed.
struct Cover {
  std::vector<StateSet> parts;

  size_t size() const { return parts.size(); }
  friend bool operator==(const Cover& a, const Cover& b) {
    return a.parts == b.parts;
  }
};

Cover make_cover(std::vector<StateSet> parts);

// True when every part is a face of the complex and the parts jointly
// cover 0..num_vertices-1.  `reason`, when non-null, receives a short
// description of the first failure.
bool is_valid_cover(const SimplicialComplex& complex, const Cover& cover,
                    std::string* reason = nullptr);

// Checks "if some part contains U then some part contains W" for every
// constraint; returns the first violated constraint or nullopt.
std::optional<ZipperConstraint> cover_satisfies(
    const Cover& cover, const std::vector<ZipperConstraint>& zippers);

// Builds the filter the cover induces: one state per part, named by
// joining member names with '+'; the output of a part is the
// intersection of its members' outputs; for each part and observation
// under which any member moves, a single edge to a part containing all
// of the members' successors.  The result is deterministic and output
// simulates f whenever the preconditions hold.
//
// Preconditions (violations throw std::invalid_argument naming the
// failed check and a witness): f deterministic with every state covered;
// every part group compatible; every needed successor set contained in
// some part (guaranteed when the cover satisfies the zipper constraints).
//
// Ties are broken deterministically: among parts containing all
// successors, the canonically least part is chosen; of the parts
// containing f's initial state, the canonically least becomes the single
// initial state (keeping several would forfeit determinism when the
// initial state is split).
Filter induce_filter(const Filter& f, const Cover& cover);

// The correspondence cover: part K_{v'} = states of f that some
// observation string reaches together with v' in fprime.  Computed by a
// joint search over state pairs from the two initial states.  Parts for
// fprime-states nothing corresponds to are dropped.  Both filters must be
// deterministic; the result covers f's reachable states.
Cover induced_cover(const Filter& f, const Filter& fprime);

// One part per line, members space-separated.
std::string format_cover(const Filter& f, const Cover& cover);
Cover parse_cover(const Filter& f, const std::string& text);

}  // namespace filtermin
