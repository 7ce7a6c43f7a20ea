// compat.cc -- pairwise/group compatibility, the compatibility graph, and
// maximal-face enumeration for the group-compatibility complex.
//
// This file is part of filtermin, distributed under the MIT license.

#include "filtermin/compat.hh"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "filtermin/solver.hh"

namespace filtermin {

namespace {

void require_deterministic(const Filter& f, const char* who) {
  DeterminismCheck d = is_deterministic(f);
  if (!d.deterministic) {
    throw std::invalid_argument(std::string(who) +
                                " requires a deterministic filter: " + d.reason);
  }
}

// Rebuild the observation string leading to node `idx` from parent links.
template <typename Node>
ObsString path_to(const std::vector<Node>& nodes, size_t idx) {
  ObsString s;
  for (size_t at = idx; nodes[at].parent != size_t(-1); at = nodes[at].parent)
    s.push_back(nodes[at].via);
  std::reverse(s.begin(), s.end());
  return s;
}

bool outputs_conflict(const Filter& f, StateId a, StateId b,
                      CompatibilityGraph::Relation rel) {
  if (rel == CompatibilityGraph::Relation::OutputAgreement)
    return f.outputs(a) != f.outputs(b);
  return set_intersection(f.outputs(a), f.outputs(b)).empty();
}

// Successor configuration: members without a y-edge drop out.
StateSet config_step(const Filter& f, const StateSet& config, ObsId y) {
  StateSet next;
  for (StateId v : config)
    if (std::optional<StateId> v2 = f.unique_successor(v, y))
      next.push_back(*v2);
  return make_set(std::move(next));
}

}  // namespace

PairVerdict pairwise_compatible(const Filter& f, StateId v, StateId w) {
  require_deterministic(f, "pairwise_compatible");
  if (v < 0 || w < 0 || v >= f.num_states() || w >= f.num_states())
    throw std::invalid_argument("pairwise_compatible: state id out of range");

  struct Node {
    StateId a, b;
    size_t parent;
    ObsId via;
  };
  std::vector<Node> nodes;
  std::set<std::pair<StateId, StateId>> seen;
  auto norm = [](StateId a, StateId b) {
    return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
  };
  nodes.push_back({v, w, size_t(-1), -1});
  seen.insert(norm(v, w));

  for (size_t i = 0; i < nodes.size(); ++i) {
    Node n = nodes[i];  // copy: nodes may reallocate below
    if (f.outputs(n.a) != f.outputs(n.b))
      return {false, path_to(nodes, i)};
    if (n.a == n.b)
      continue;  // identical futures, nothing more to check
    for (ObsId y = 0; y < f.num_obs(); ++y) {
      std::optional<StateId> a2 = f.unique_successor(n.a, y);
      std::optional<StateId> b2 = f.unique_successor(n.b, y);
      if (!a2 || !b2)
        continue;  // one side crashes: no common extension this way
      if (seen.insert(norm(*a2, *b2)).second)
        nodes.push_back({*a2, *b2, i, y});
    }
  }
  return {true, {}};
}

CompatibilityGraph CompatibilityGraph::build(const Filter& f, Relation rel) {
  require_deterministic(f, "CompatibilityGraph::build");
  const int t = f.num_states();

  // bad[a*t+b]: some common extension of (a, b) reaches a conflicting
  // pair.  Seed with immediate conflicts, then propagate backwards until
  // a fixpoint: (a, b) is bad when both step to a bad pair under some y.
  std::vector<char> bad(size_t(t) * t, 0);
  for (StateId a = 0; a < t; ++a)
    for (StateId b = a + 1; b < t; ++b)
      if (outputs_conflict(f, a, b, rel))
        bad[size_t(a) * t + b] = bad[size_t(b) * t + a] = 1;

  bool changed = true;
  while (changed) {
    changed = false;
    for (StateId a = 0; a < t; ++a) {
      for (StateId b = a + 1; b < t; ++b) {
        if (bad[size_t(a) * t + b])
          continue;
        for (ObsId y = 0; y < f.num_obs(); ++y) {
          std::optional<StateId> a2 = f.unique_successor(a, y);
          std::optional<StateId> b2 = f.unique_successor(b, y);
          if (a2 && b2 && bad[size_t(*a2) * t + *b2]) {
            bad[size_t(a) * t + b] = bad[size_t(b) * t + a] = 1;
            changed = true;
            break;
          }
        }
      }
    }
  }

  CompatibilityGraph g;
  g.num_vertices_ = t;
  g.adj_.assign(size_t(t) * t, 0);
  g.neighbors_.assign(t, {});
  for (StateId a = 0; a < t; ++a) {
    for (StateId b = a + 1; b < t; ++b) {
      if (!bad[size_t(a) * t + b]) {
        g.adj_[size_t(a) * t + b] = g.adj_[size_t(b) * t + a] = 1;
        g.neighbors_[a].push_back(b);
        g.neighbors_[b].push_back(a);
        ++g.num_edges_;
      }
    }
  }
  return g;
}

bool CompatibilityGraph::edge(StateId v, StateId w) const {
  if (v == w || v < 0 || w < 0 || v >= num_vertices_ || w >= num_vertices_)
    return false;
  return adj_[size_t(v) * num_vertices_ + w] != 0;
}

std::string CompatibilityGraph::to_dot(const Filter& f) const {
  std::ostringstream out;
  out << "graph compatibility {\n";
  for (StateId v = 0; v < num_vertices_; ++v)
    out << "  n" << v << " [label=\"" << f.state_name(v) << "\"];\n";
  for (StateId v = 0; v < num_vertices_; ++v)
    for (StateId w : neighbors_[v])
      if (v < w)
        out << "  n" << v << " -- n" << w << ";\n";
  out << "}\n";
  return out.str();
}

CompatibilityGraph compatibility_graph(const Filter& f) {
  return CompatibilityGraph::build(f,
                                   CompatibilityGraph::Relation::OutputAgreement);
}

GroupVerdict group_compatible(const Filter& f, const StateSet& u) {
  require_deterministic(f, "group_compatible");
  if (u.empty())
    throw std::invalid_argument("group_compatible: empty state set");
  for (StateId v : u)
    if (v < 0 || v >= f.num_states())
      throw std::invalid_argument("group_compatible: state id out of range");

  struct Node {
    StateSet config;
    size_t parent;
    ObsId via;
  };
  std::vector<Node> nodes;
  std::set<StateSet> seen;
  nodes.push_back({u, size_t(-1), -1});
  seen.insert(u);

  for (size_t i = 0; i < nodes.size(); ++i) {
    StateSet config = nodes[i].config;  // copy: nodes may reallocate
    LabelSet common = f.outputs(config[0]);
    for (size_t j = 1; j < config.size() && !common.empty(); ++j)
      common = set_intersection(common, f.outputs(config[j]));
    if (common.empty())
      return {false, path_to(nodes, i), config};
    if (config.size() == 1)
      continue;  // singleton configurations can never conflict later
    for (ObsId y = 0; y < f.num_obs(); ++y) {
      StateSet next = config_step(f, config, y);
      if (next.empty())
        continue;
      if (seen.insert(next).second)
        nodes.push_back({std::move(next), i, y});
    }
  }
  return {true, {}, {}};
}

GroupOracle::GroupOracle(const Filter& f)
    : f_(f),
      pairs_(CompatibilityGraph::build(
          f, CompatibilityGraph::Relation::SharedOutput)),
      single_outputting_(is_single_outputting(f)) {}

bool GroupOracle::is_group_compatible(const StateSet& u) const {
  if (u.size() <= 1)
    return true;
  // Pairwise shared-output compatibility is necessary in general and
  // sufficient on single-outputting filters (a set of singleton output
  // sets has a common element exactly when all are pairwise equal).
  for (size_t i = 0; i < u.size(); ++i)
    for (size_t j = i + 1; j < u.size(); ++j)
      if (!pairs_.edge(u[i], u[j]))
        return false;
  if (single_outputting_ || u.size() == 2)
    return true;
  auto it = cache_.find(u);
  if (it != cache_.end())
    return it->second;

  // Search the reachable configurations, but share verdicts between
  // queries: a configuration whose whole reachable region was checked
  // once never needs expanding again, and a configuration known to reach
  // a conflict condemns every query that reaches it.
  bool ok = true;
  std::vector<StateSet> frontier{u};
  std::set<StateSet> queued{u};
  for (size_t i = 0; i < frontier.size() && ok; ++i) {
    const StateSet config = frontier[i];  // copy: frontier may reallocate
    auto memo = config_safe_.find(config);
    if (memo != config_safe_.end()) {
      ok = memo->second;
      continue;  // either doomed, or already known safe all the way down
    }
    LabelSet common = f_.outputs(config[0]);
    for (size_t j = 1; j < config.size() && !common.empty(); ++j)
      common = set_intersection(common, f_.outputs(config[j]));
    if (common.empty()) {
      config_safe_.emplace(config, false);
      ok = false;
      continue;
    }
    if (config.size() == 1)
      continue;  // singleton configurations can never conflict later
    for (ObsId y = 0; y < f_.num_obs(); ++y) {
      StateSet next = config_step(f_, config, y);
      if (next.empty())
        continue;
      if (queued.insert(next).second)
        frontier.push_back(std::move(next));
    }
  }
  if (ok)
    for (const StateSet& config : frontier)
      config_safe_.emplace(config, true);
  cache_.emplace(u, ok);
  return ok;
}

bool SimplicialComplex::is_face(const StateSet& u) const {
  if (u.empty())
    return true;
  if (u.size() == 1)
    return u[0] >= 0 && u[0] < num_vertices;
  for (const StateSet& m : maximal_faces)
    if (is_subset(u, m))
      return true;
  return false;
}

size_t SimplicialComplex::max_face_size() const {
  size_t best = 0;
  for (const StateSet& m : maximal_faces)
    best = std::max(best, m.size());
  return best;
}

SimplicialComplex compatibility_complex(const Filter& f,
                                        const ComplexOptions& opts) {
  GroupOracle oracle(f);
  return compatibility_complex(f, oracle, opts);
}

SimplicialComplex compatibility_complex(const Filter& f,
                                        const GroupOracle& oracle,
                                        const ComplexOptions& opts) {
  const int t = f.num_states();
  SimplicialComplex complex;
  complex.num_vertices = t;
  if (t == 0)
    return complex;

  // SAT-guided enumeration.  Variable v+1 says "vertex v is selected".
  // The clause set forbids supersets of the non-faces found so far and
  // subsets of the maximal faces found so far, so every model is new
  // material: a compatible model grows into an unseen maximal face, an
  // incompatible one shrinks into an unseen minimal non-face, and each
  // round records one of the two.  Unsatisfiability proves every maximal
  // face has been listed.  (A subset-tree recursion would visit all 2^m
  // subsets of an m-vertex face; this pays per face, not per subset.)
  const CompatibilityGraph& pairs = oracle.pair_graph();
  CnfInstance search;
  search.num_vars = t;
  for (StateId a = 0; a < t; ++a)
    for (StateId b = a + 1; b < t; ++b)
      if (!pairs.edge(a, b))
        search.clauses.push_back({-(a + 1), -(b + 1)});

  SolverOptions solver_opts;  // built-in backend, no time limit
  for (;;) {
    SolveResult proposed = solve(search, solver_opts);
    if (proposed.status == SolveStatus::kUnsat)
      break;
    if (proposed.status != SolveStatus::kSat)
      throw std::runtime_error(
          "compatibility_complex: proposal search failed: " + proposed.detail);
    StateSet s;
    for (StateId v = 0; v < t; ++v)
      if (proposed.model[v + 1])
        s.push_back(v);

    if (oracle.is_group_compatible(s)) {
      // Grow into a maximal face, in vertex order for determinism.
      for (StateId v = 0; v < t; ++v) {
        if (std::binary_search(s.begin(), s.end(), v))
          continue;
        StateSet grown = set_union(s, {v});
        if (oracle.is_group_compatible(grown))
          s = std::move(grown);
      }
      if (complex.maximal_faces.size() >= opts.max_faces)
        throw std::runtime_error(
            "compatibility_complex: more than " +
            std::to_string(opts.max_faces) +
            " maximal faces; raise ComplexOptions::max_faces to insist");
      std::vector<int> outside;
      for (StateId v = 0; v < t; ++v)
        if (!std::binary_search(s.begin(), s.end(), v))
          outside.push_back(v + 1);
      search.clauses.push_back(std::move(outside));
      complex.maximal_faces.push_back(std::move(s));
    } else {
      // Shrink into a minimal non-face.  Non-faces are upward closed and
      // faces downward closed, so a single pass in fixed order leaves a
      // set every proper subset of which is a face.
      for (size_t i = 0; i < s.size();) {
        StateSet trial = s;
        trial.erase(trial.begin() + i);
        if (!oracle.is_group_compatible(trial))
          s = std::move(trial);
        else
          ++i;
      }
      std::vector<int> blocked;
      for (StateId v : s)
        blocked.push_back(-(v + 1));
      search.clauses.push_back(std::move(blocked));
    }
  }

  std::sort(complex.maximal_faces.begin(), complex.maximal_faces.end());
  return complex;
}

std::string format_complex(const Filter& f, const SimplicialComplex& complex) {
  std::ostringstream out;
  for (const StateSet& m : complex.maximal_faces) {
    for (size_t i = 0; i < m.size(); ++i)
      out << (i ? " " : "") << f.state_name(m[i]);
    out << "\n";
  }
  return out.str();
}

}  // namespace filtermin
