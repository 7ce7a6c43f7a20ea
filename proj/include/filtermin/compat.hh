// compat.hh -- pairwise and group compatibility of filter states, the
// compatibility graph, and the simplicial complex of group-compatible
// sets.
//
// This file is part of filtermin, distributed under the MIT license.

#pragma once

#include <cstddef>
#include <map>
#include <memory>

#include "filtermin/filter.hh"

namespace filtermin {

// Result of a single-pair compatibility test.  When the pair is
// incompatible, `counterexample` is a shortest common extension on which
// the reached states disagree.
struct PairVerdict {
  bool compatible = false;
  ObsString counterexample;
};

// Two states of a deterministic filter are compatible when the states
// reached from them agree on outputs for every common extension.
// Implemented as a level-order search over pairs of live states; a branch
// where either side crashes imposes no further conditions.
// Throws std::invalid_argument when f is not deterministic.
PairVerdict pairwise_compatible(const Filter& f, StateId v, StateId w);

// Undirected graph over the filter's states.  Two base relations are
// supported; they coincide on single-outputting filters:
//  - OutputAgreement: every jointly reached pair has equal output sets
//    (the relation pairwise_compatible tests);
//  - SharedOutput: every jointly reached pair has overlapping output
//    sets, i.e. the two-element sets that group_compatible accepts.
class CompatibilityGraph {
 public:
  enum class Relation { OutputAgreement, SharedOutput };

  // All-pairs construction by backward propagation: seed with pairs whose
  // own outputs already violate the base relation, then propagate
  // incompatibility to predecessors sharing an observation.  O(|V|^2·|Y|).
  static CompatibilityGraph build(const Filter& f, Relation rel);

  int num_vertices() const { return num_vertices_; }
  bool edge(StateId v, StateId w) const;
  const StateSet& neighbors(StateId v) const { return neighbors_[v]; }
  size_t num_edges() const { return num_edges_; }

  std::string to_dot(const Filter& f) const;

 private:
  int num_vertices_ = 0;
  size_t num_edges_ = 0;
  std::vector<char> adj_;  // row-major |V|^2 incidence
  std::vector<StateSet> neighbors_;
};

// The compatibility graph in the usual sense: OutputAgreement edges.
CompatibilityGraph compatibility_graph(const Filter& f);

// Result of a group-compatibility test.  When the set is not group
// compatible, `counterexample` leads to `reached`, a jointly reached set
// whose members share no output label.
struct GroupVerdict {
  bool compatible = false;
  ObsString counterexample;
  StateSet reached;
};

// A state set U of a deterministic filter is group compatible when along
// every observation string traceable from at least one member, the states
// reached from the members share a common output label.  Crashed members
// drop out; a singleton (or crashed-empty) configuration is always fine
// because outputs are nonempty.  Implemented as a level-order search over
// configurations starting at U.
// Throws std::invalid_argument when f is not deterministic or U is empty.
GroupVerdict group_compatible(const Filter& f, const StateSet& u);

// Memoizing wrapper around group_compatible with two fast paths: a
// precomputed SharedOutput pair graph rejects sets with an incompatible
// pair without any search, and on single-outputting filters the pair
// check is exact (group compatibility degenerates to mutual pairwise
// compatibility), so the search is skipped entirely.
class GroupOracle {
 public:
  explicit GroupOracle(const Filter& f);

  bool is_group_compatible(const StateSet& u) const;
  const CompatibilityGraph& pair_graph() const { return pairs_; }
  bool exact_pairwise() const { return single_outputting_; }

 private:
  const Filter& f_;
  CompatibilityGraph pairs_;
  bool single_outputting_ = false;
  mutable std::map<StateSet, bool> cache_;
  // Verdicts for individual configurations ("is every configuration
  // reachable from here output-consistent?"), shared across queries:
  // the searches launched for overlapping state sets traverse largely
  // the same configurations.
  mutable std::map<StateSet, bool> config_safe_;
};

// Downward-closed family of group-compatible sets, stored by its maximal
// faces.  Singletons are always group compatible, so every vertex occurs
// in at least one maximal face.
struct SimplicialComplex {
  int num_vertices = 0;
  std::vector<StateSet> maximal_faces;  // canonically sorted, mutually incomparable

  bool is_face(const StateSet& u) const;
  size_t max_face_size() const;
};

struct ComplexOptions {
  // Abort (std::runtime_error) rather than exhaust memory when the
  // complex has more maximal faces than this.
  size_t max_faces = 1'000'000;
};

// Enumerates all maximal group-compatible sets.  A small SAT search
// proposes candidate sets that avoid every known non-face and are not
// contained in any face found so far; each round then either grows the
// candidate into a new maximal face or shrinks it into a new minimal
// non-face, and unsatisfiability certifies completeness.  The work is
// proportional to the number of maximal faces plus the number of minimal
// non-faces, where subset-tree recursions degrade exponentially on large
// faces.
SimplicialComplex compatibility_complex(const Filter& f,
                                        const ComplexOptions& opts = {});
SimplicialComplex compatibility_complex(const Filter& f,
                                        const GroupOracle& oracle,
                                        const ComplexOptions& opts = {});

// One maximal face per line, members space-separated, sorted.
std::string format_complex(const Filter& f, const SimplicialComplex& complex);

}  // namespace filtermin
