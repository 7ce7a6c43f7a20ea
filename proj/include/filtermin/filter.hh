// filter.hh -- combinatorial filters: states, observations, outputs,
// transition tracing, determinization, and output simulation.
//
// This file is part of filtermin, distributed under the MIT license.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace filtermin {

using StateId = int32_t;
using ObsId = int32_t;
using LabelId = int32_t;

// Sorted, duplicate-free vectors double as small sets throughout the
// library: configs (sets of simultaneously possible states), cover parts,
// constraint sides, and output sets.
using StateSet = std::vector<StateId>;
using LabelSet = std::vector<LabelId>;
using ObsString = std::vector<ObsId>;

StateSet make_set(std::vector<int32_t> items);
bool set_contains(const StateSet& s, int32_t x);
bool is_subset(const StateSet& sub, const StateSet& super);
StateSet set_union(const StateSet& a, const StateSet& b);
StateSet set_intersection(const StateSet& a, const StateSet& b);

// A filter is a finite transition system whose edges carry sets of
// observations and whose states each carry a nonempty set of output
// labels.  Tracing an observation string through the (possibly
// nondeterministic) transition relation yields the set of states the
// system could be in; the union of their outputs is what the filter
// reports for that string.
//
// Filters are immutable once frozen; every algorithm in the library takes
// a const reference to a frozen filter.  Build one by adding states,
// transitions and initial states, then call freeze(), which sorts and
// deduplicates everything and builds the per-(state, observation)
// successor index.
class Filter {
 public:
  Filter() = default;

  // ---- construction ----
  StateId add_state(const std::string& name,
                    const std::vector<std::string>& outputs);
  ObsId intern_obs(const std::string& name);
  LabelId intern_label(const std::string& name);
  void add_transition(StateId from, StateId to, ObsId obs);
  void add_transition(const std::string& from, const std::string& to,
                      const std::string& obs);
  void mark_initial(StateId v);
  void mark_initial(const std::string& name);
  // Validates (nonempty state set, nonempty initial set, nonempty output
  // sets, ids in range) and builds derived indices.  Throws
  // std::invalid_argument on violations.
  void freeze();
  bool frozen() const { return frozen_; }

  // ---- basic introspection ----
  int num_states() const { return static_cast<int>(state_names_.size()); }
  int num_obs() const { return static_cast<int>(obs_names_.size()); }
  int num_labels() const { return static_cast<int>(label_names_.size()); }
  const std::string& state_name(StateId v) const { return state_names_[v]; }
  const std::string& obs_name(ObsId y) const { return obs_names_[y]; }
  const std::string& label_name(LabelId c) const { return label_names_[c]; }
  std::optional<StateId> find_state(const std::string& name) const;
  std::optional<ObsId> find_obs(const std::string& name) const;
  const StateSet& initial() const { return initial_; }
  const LabelSet& outputs(StateId v) const { return outputs_[v]; }
  // Successors of v under observation y, sorted.  Empty when no edge
  // carries y out of v.
  const StateSet& successors(StateId v, ObsId y) const;
  // The successor in a deterministic filter, or nullopt when v has no
  // y-edge.  Asserts there is at most one.
  std::optional<StateId> unique_successor(StateId v, ObsId y) const;
  // Edge view: all (to, observation set) pairs out of v, sorted by target.
  const std::vector<std::pair<StateId, ObsString>>& edges_from(StateId v) const;

  // Human-readable rendition of an observation string / state set.
  std::string format_string(const ObsString& s) const;
  std::string format_states(const StateSet& states) const;
  ObsString parse_string(const std::string& text) const;

  // ---- serialization ----
  static Filter from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static Filter load_file(const std::string& path);
  void save_file(const std::string& path) const;
  std::string to_dot() const;

 private:
  void check_frozen() const;

  bool frozen_ = false;
  std::vector<std::string> state_names_;
  std::vector<std::string> obs_names_;
  std::vector<std::string> label_names_;
  std::vector<LabelSet> outputs_;
  StateSet initial_;
  // Primary storage mirrors the mathematical shape of the transition
  // relation: per source state, a target -> observation-set list.
  std::vector<std::vector<std::pair<StateId, ObsString>>> edges_;
  // Derived: succ_[v][y] = sorted successor list.
  std::vector<std::vector<StateSet>> succ_;
};

// ---- tracing (the filter semantics) ----

// One transition step of a configuration.
StateSet step(const Filter& f, const StateSet& config, ObsId y);
// States possibly occupied after tracing s from the given configuration.
StateSet reached_from(const Filter& f, const StateSet& from, const ObsString& s);
// States possibly occupied after tracing s from a single state; empty
// exactly when s crashes from v.
StateSet reached_from(const Filter& f, StateId v, const ObsString& s);
// States possibly occupied after tracing s from the initial states.
StateSet reached(const Filter& f, const ObsString& s);
// Union of the outputs of all states reached by s; empty exactly when s
// crashes (leaves the filter's language).
LabelSet outputs_of(const Filter& f, const ObsString& s);
// Whether s is in the filter's language, i.e. reaches at least one state.
// The empty string is in the language of every filter.
bool in_language(const Filter& f, const ObsString& s);

// ---- determinism ----

struct DeterminismCheck {
  bool deterministic = false;
  // When not deterministic, one structural reason: either several initial
  // states, or a (state, observation) pair with two successors.
  std::string reason;
};
DeterminismCheck is_deterministic(const Filter& f);

// A shortest observation string witnessing reachable nondeterminism (one
// that leads to two or more simultaneously possible states), if any.
// Structural nondeterminism on unreachable states has no witness.
std::optional<ObsString> nondeterminism_witness(const Filter& f);

// Subset construction.  The result is deterministic, reachable by
// construction, and reports the same outputs for every observation
// string.  Generated states are named by joining the sorted member names
// with '+'.
Filter determinize(const Filter& f);

// ---- output simulation ----

// Checks that `candidate` can stand in for `reference`: every string in
// the reference's language must reach at least one state of the
// candidate, and the outputs the candidate reports for it must be a
// nonempty subset of those the reference reports.  The candidate's
// alphabet may be a subset of the reference's; symbols are matched by
// name.
struct SimulationVerdict {
  bool holds = false;
  ObsString counterexample;  // shortest violating string when !holds
  std::string detail;        // what went wrong on the counterexample
};
SimulationVerdict output_simulates(const Filter& candidate,
                                   const Filter& reference);

// ---- misc structure ----

// True when every state carries exactly one output label.
bool is_single_outputting(const Filter& f);

// States reachable from the initial set under any observation string.
StateSet reachable_states(const Filter& f);

// Copy of f without its unreachable states.  Names of dropped states are
// appended to `dropped` when non-null.
Filter prune_unreachable(const Filter& f, std::vector<std::string>* dropped = nullptr);

// Restriction of a filter to one output label per state ("choice"):
// choice[v] must be one of f's outputs at v.  Used to compare committing
// to outputs up front against keeping all options open.
Filter restrict_outputs(const Filter& f, const std::vector<LabelId>& choice);

}  // namespace filtermin
