// filter.cc -- core filter semantics and serialization.
//
// This file is part of filtermin, distributed under the MIT license.

#include "filtermin/filter.hh"

#include <algorithm>
#include <cassert>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace filtermin {

using nlohmann::json;

// ---------------------------------------------------------------------
// small sorted-vector set helpers
// ---------------------------------------------------------------------

StateSet make_set(std::vector<int32_t> items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

bool set_contains(const StateSet& s, int32_t x) {
  return std::binary_search(s.begin(), s.end(), x);
}

bool is_subset(const StateSet& sub, const StateSet& super) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

StateSet set_union(const StateSet& a, const StateSet& b) {
  StateSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

StateSet set_intersection(const StateSet& a, const StateSet& b) {
  StateSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

// ---------------------------------------------------------------------
// construction
// ---------------------------------------------------------------------

StateId Filter::add_state(const std::string& name,
                          const std::vector<std::string>& outputs) {
  if (frozen_)
    throw std::logic_error("add_state on a frozen filter");
  if (find_state(name))
    throw std::invalid_argument("duplicate state name: " + name);
  state_names_.push_back(name);
  LabelSet labels;
  for (const auto& o : outputs)
    labels.push_back(intern_label(o));
  outputs_.push_back(make_set(std::move(labels)));
  edges_.emplace_back();
  return static_cast<StateId>(state_names_.size()) - 1;
}

ObsId Filter::intern_obs(const std::string& name) {
  for (size_t i = 0; i < obs_names_.size(); ++i)
    if (obs_names_[i] == name)
      return static_cast<ObsId>(i);
  if (frozen_)
    throw std::logic_error("intern_obs on a frozen filter");
  obs_names_.push_back(name);
  return static_cast<ObsId>(obs_names_.size()) - 1;
}

LabelId Filter::intern_label(const std::string& name) {
  for (size_t i = 0; i < label_names_.size(); ++i)
    if (label_names_[i] == name)
      return static_cast<LabelId>(i);
  if (frozen_)
    throw std::logic_error("intern_label on a frozen filter");
  label_names_.push_back(name);
  return static_cast<LabelId>(label_names_.size()) - 1;
}

void Filter::add_transition(StateId from, StateId to, ObsId obs) {
  if (frozen_)
    throw std::logic_error("add_transition on a frozen filter");
  if (from < 0 || from >= num_states() || to < 0 || to >= num_states() ||
      obs < 0 || obs >= num_obs())
    throw std::invalid_argument("transition endpoint out of range");
  for (auto& [target, labels] : edges_[from]) {
    if (target == to) {
      labels.push_back(obs);
      return;
    }
  }
  edges_[from].push_back({to, {obs}});
}

void Filter::add_transition(const std::string& from, const std::string& to,
                            const std::string& obs) {
  auto f = find_state(from);
  auto t = find_state(to);
  if (!f || !t)
    throw std::invalid_argument("transition references unknown state: " +
                                (f ? to : from));
  add_transition(*f, *t, intern_obs(obs));
}

void Filter::mark_initial(StateId v) {
  if (frozen_)
    throw std::logic_error("mark_initial on a frozen filter");
  if (v < 0 || v >= num_states())
    throw std::invalid_argument("initial state out of range");
  initial_.push_back(v);
}

void Filter::mark_initial(const std::string& name) {
  auto v = find_state(name);
  if (!v)
    throw std::invalid_argument("initial state unknown: " + name);
  mark_initial(*v);
}

void Filter::freeze() {
  if (frozen_)
    return;
  if (state_names_.empty())
    throw std::invalid_argument("filter has no states");
  initial_ = make_set(std::move(initial_));
  if (initial_.empty())
    throw std::invalid_argument("filter has no initial state");
  for (StateId v = 0; v < num_states(); ++v) {
    if (outputs_[v].empty())
      throw std::invalid_argument("state " + state_names_[v] +
                                  " has an empty output set");
  }
  for (auto& row : edges_) {
    for (auto& [to, labels] : row)
      labels = make_set(std::move(labels));
    std::sort(row.begin(), row.end());
  }
  succ_.assign(num_states(), std::vector<StateSet>(num_obs()));
  for (StateId v = 0; v < num_states(); ++v)
    for (const auto& [to, labels] : edges_[v])
      for (ObsId y : labels)
        succ_[v][y].push_back(to);
  for (auto& row : succ_)
    for (auto& targets : row)
      targets = make_set(std::move(targets));
  frozen_ = true;
}

void Filter::check_frozen() const {
  if (!frozen_)
    throw std::logic_error("filter must be frozen before use");
}

// ---------------------------------------------------------------------
// introspection
// ---------------------------------------------------------------------

std::optional<StateId> Filter::find_state(const std::string& name) const {
  for (size_t i = 0; i < state_names_.size(); ++i)
    if (state_names_[i] == name)
      return static_cast<StateId>(i);
  return std::nullopt;
}

std::optional<ObsId> Filter::find_obs(const std::string& name) const {
  for (size_t i = 0; i < obs_names_.size(); ++i)
    if (obs_names_[i] == name)
      return static_cast<ObsId>(i);
  return std::nullopt;
}

const StateSet& Filter::successors(StateId v, ObsId y) const {
  check_frozen();
  return succ_[v][y];
}

std::optional<StateId> Filter::unique_successor(StateId v, ObsId y) const {
  const StateSet& s = successors(v, y);
  assert(s.size() <= 1);
  if (s.empty())
    return std::nullopt;
  return s.front();
}

const std::vector<std::pair<StateId, ObsString>>& Filter::edges_from(
    StateId v) const {
  check_frozen();
  return edges_[v];
}

std::string Filter::format_string(const ObsString& s) const {
  // Single-character observation names concatenate ("aac"); longer names
  // are dot-separated for readability.
  bool all_single = true;
  for (ObsId y : s)
    all_single = all_single && obs_names_[y].size() == 1;
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) {
    if (!all_single && i > 0)
      out += '.';
    out += obs_names_[s[i]];
  }
  return s.empty() ? "<empty>" : out;
}

std::string Filter::format_states(const StateSet& states) const {
  std::string out = "{";
  for (size_t i = 0; i < states.size(); ++i) {
    if (i > 0)
      out += ",";
    out += state_names_[states[i]];
  }
  return out + "}";
}

ObsString Filter::parse_string(const std::string& text) const {
  // Accepts the two shapes format_string produces: one character per
  // observation, or dot-separated names.  An empty string parses to the
  // empty observation string.
  ObsString out;
  if (text.empty() || text == "<empty>")
    return out;
  if (text.find('.') != std::string::npos) {
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, '.')) {
      auto y = find_obs(tok);
      if (!y)
        throw std::invalid_argument("unknown observation: " + tok);
      out.push_back(*y);
    }
    return out;
  }
  for (char c : text) {
    auto y = find_obs(std::string(1, c));
    if (!y)
      throw std::invalid_argument("unknown observation: " + std::string(1, c));
    out.push_back(*y);
  }
  return out;
}

// ---------------------------------------------------------------------
// tracing
// ---------------------------------------------------------------------

StateSet step(const Filter& f, const StateSet& config, ObsId y) {
  StateSet out;
  for (StateId v : config) {
    const StateSet& t = f.successors(v, y);
    out.insert(out.end(), t.begin(), t.end());
  }
  return make_set(std::move(out));
}

StateSet reached_from(const Filter& f, const StateSet& from, const ObsString& s) {
  StateSet config = from;
  for (ObsId y : s) {
    if (config.empty())
      break;
    config = step(f, config, y);
  }
  return config;
}

StateSet reached_from(const Filter& f, StateId v, const ObsString& s) {
  return reached_from(f, StateSet{v}, s);
}

StateSet reached(const Filter& f, const ObsString& s) {
  return reached_from(f, f.initial(), s);
}

LabelSet outputs_of(const Filter& f, const ObsString& s) {
  LabelSet out;
  for (StateId v : reached(f, s))
    out = set_union(out, f.outputs(v));
  return out;
}

bool in_language(const Filter& f, const ObsString& s) {
  return !reached(f, s).empty();
}

// ---------------------------------------------------------------------
// determinism
// ---------------------------------------------------------------------

DeterminismCheck is_deterministic(const Filter& f) {
  DeterminismCheck r;
  if (f.initial().size() != 1) {
    r.reason = "filter has " + std::to_string(f.initial().size()) +
               " initial states";
    return r;
  }
  for (StateId v = 0; v < f.num_states(); ++v) {
    for (ObsId y = 0; y < f.num_obs(); ++y) {
      const StateSet& t = f.successors(v, y);
      if (t.size() > 1) {
        r.reason = "state " + f.state_name(v) + " has " +
                   std::to_string(t.size()) + " successors under " +
                   f.obs_name(y);
        return r;
      }
    }
  }
  r.deterministic = true;
  return r;
}

std::optional<ObsString> nondeterminism_witness(const Filter& f) {
  // Level-order search over configurations, reconstructing the string
  // through parent links so the first hit is a shortest witness.
  struct Node {
    StateSet config;
    int parent;
    ObsId via;
  };
  std::vector<Node> nodes{{f.initial(), -1, -1}};
  std::map<StateSet, int> seen{{f.initial(), 0}};
  for (size_t i = 0; i < nodes.size(); ++i) {
    StateSet config = nodes[i].config;  // copy: nodes may reallocate
    if (config.size() >= 2) {
      ObsString s;
      for (int j = static_cast<int>(i); nodes[j].parent >= 0; j = nodes[j].parent)
        s.push_back(nodes[j].via);
      std::reverse(s.begin(), s.end());
      return s;
    }
    for (ObsId y = 0; y < f.num_obs(); ++y) {
      StateSet next = step(f, config, y);
      if (next.empty() || seen.count(next))
        continue;
      seen[next] = static_cast<int>(nodes.size());
      nodes.push_back({std::move(next), static_cast<int>(i), y});
    }
  }
  return std::nullopt;
}

Filter determinize(const Filter& f) {
  Filter out;
  std::map<StateSet, StateId> ids;
  std::vector<StateSet> configs;
  std::set<std::string> used_names;

  auto intern = [&](const StateSet& config) -> StateId {
    auto it = ids.find(config);
    if (it != ids.end())
      return it->second;
    std::vector<std::string> names;
    for (StateId v : config)
      names.push_back(f.state_name(v));
    std::sort(names.begin(), names.end());
    std::string name;
    for (size_t i = 0; i < names.size(); ++i)
      name += (i ? "+" : "") + names[i];
    while (used_names.count(name))
      name += "'";
    used_names.insert(name);
    LabelSet labels;
    for (StateId v : config)
      labels = set_union(labels, f.outputs(v));
    std::vector<std::string> outputs;
    for (LabelId c : labels)
      outputs.push_back(f.label_name(c));
    StateId id = out.add_state(name, outputs);
    ids[config] = id;
    configs.push_back(config);
    return id;
  };

  for (ObsId y = 0; y < f.num_obs(); ++y)
    out.intern_obs(f.obs_name(y));

  StateId start = intern(f.initial());
  out.mark_initial(start);
  for (StateId cur = 0; cur < static_cast<StateId>(configs.size()); ++cur) {
    for (ObsId y = 0; y < f.num_obs(); ++y) {
      StateSet next = step(f, configs[cur], y);
      if (next.empty())
        continue;
      StateId target = intern(next);
      out.add_transition(cur, target, y);
    }
  }
  out.freeze();
  return out;
}

// ---------------------------------------------------------------------
// output simulation
// ---------------------------------------------------------------------

SimulationVerdict output_simulates(const Filter& cand, const Filter& ref) {
  // Joint level-order trace of both filters over all observation strings
  // in ref's language, memoized on configuration pairs.  The observation
  // alphabets are matched by name; an observation missing from cand
  // simply crashes it there.
  SimulationVerdict r;
  std::vector<std::optional<ObsId>> obs_map(ref.num_obs());
  for (ObsId y = 0; y < ref.num_obs(); ++y)
    obs_map[y] = cand.find_obs(ref.obs_name(y));
  // Output labels are likewise matched by name.
  std::vector<LabelId> label_map(cand.num_labels(), -1);
  std::vector<bool> label_known(cand.num_labels(), false);
  for (LabelId c = 0; c < cand.num_labels(); ++c) {
    for (LabelId d = 0; d < ref.num_labels(); ++d) {
      if (cand.label_name(c) == ref.label_name(d)) {
        label_map[c] = d;
        label_known[c] = true;
        break;
      }
    }
  }

  struct Node {
    StateSet ref_config, cand_config;
    int parent;
    ObsId via;
  };
  std::vector<Node> nodes{{ref.initial(), cand.initial(), -1, -1}};
  std::map<std::pair<StateSet, StateSet>, int> seen{
      {{ref.initial(), cand.initial()}, 0}};

  auto string_to = [&](int i) {
    ObsString s;
    for (int j = i; nodes[j].parent >= 0; j = nodes[j].parent)
      s.push_back(nodes[j].via);
    std::reverse(s.begin(), s.end());
    return s;
  };

  for (size_t i = 0; i < nodes.size(); ++i) {
    StateSet rc = nodes[i].ref_config;
    StateSet cc = nodes[i].cand_config;
    // Only strings in ref's language constrain cand.
    if (!rc.empty()) {
      if (cc.empty()) {
        r.counterexample = string_to(static_cast<int>(i));
        r.detail = "string " + ref.format_string(r.counterexample) +
                   " crashes the candidate but is in the reference language";
        return r;
      }
      LabelSet ref_out;
      for (StateId v : rc)
        ref_out = set_union(ref_out, ref.outputs(v));
      for (StateId v : cc) {
        for (LabelId c : cand.outputs(v)) {
          if (!label_known[c] || !set_contains(ref_out, label_map[c])) {
            r.counterexample = string_to(static_cast<int>(i));
            r.detail = "on " + ref.format_string(r.counterexample) +
                       " the candidate may report " + cand.label_name(c) +
                       ", which the reference does not allow";
            return r;
          }
        }
      }
    }
    for (ObsId y = 0; y < ref.num_obs(); ++y) {
      StateSet nrc = rc.empty() ? StateSet{} : step(ref, rc, y);
      StateSet ncc;
      if (!cc.empty() && obs_map[y])
        ncc = step(cand, cc, *obs_map[y]);
      if (nrc.empty())
        continue;  // string left ref's language; nothing to check below it
      auto key = std::make_pair(nrc, ncc);
      if (seen.count(key))
        continue;
      seen[key] = static_cast<int>(nodes.size());
      nodes.push_back({std::move(nrc), std::move(ncc), static_cast<int>(i), y});
    }
  }
  r.holds = true;
  return r;
}

// ---------------------------------------------------------------------
// misc structure
// ---------------------------------------------------------------------

bool is_single_outputting(const Filter& f) {
  for (StateId v = 0; v < f.num_states(); ++v)
    if (f.outputs(v).size() != 1)
      return false;
  return true;
}

StateSet reachable_states(const Filter& f) {
  StateSet seen = f.initial();
  std::deque<StateId> todo(seen.begin(), seen.end());
  std::vector<bool> mark(f.num_states(), false);
  for (StateId v : seen)
    mark[v] = true;
  while (!todo.empty()) {
    StateId v = todo.front();
    todo.pop_front();
    for (const auto& [to, labels] : f.edges_from(v)) {
      (void)labels;
      if (!mark[to]) {
        mark[to] = true;
        todo.push_back(to);
      }
    }
  }
  StateSet out;
  for (StateId v = 0; v < f.num_states(); ++v)
    if (mark[v])
      out.push_back(v);
  return out;
}

Filter prune_unreachable(const Filter& f, std::vector<std::string>* dropped) {
  StateSet keep = reachable_states(f);
  if (static_cast<int>(keep.size()) == f.num_states())
    return f;
  Filter out;
  std::vector<StateId> remap(f.num_states(), -1);
  for (StateId v : keep) {
    std::vector<std::string> outputs;
    for (LabelId c : f.outputs(v))
      outputs.push_back(f.label_name(c));
    remap[v] = out.add_state(f.state_name(v), outputs);
  }
  for (ObsId y = 0; y < f.num_obs(); ++y)
    out.intern_obs(f.obs_name(y));
  for (StateId v = 0; v < f.num_states(); ++v) {
    if (remap[v] < 0) {
      if (dropped)
        dropped->push_back(f.state_name(v));
      continue;
    }
    for (const auto& [to, labels] : f.edges_from(v)) {
      if (remap[to] < 0)
        continue;  // edge into unreachable territory cannot exist, but be safe
      for (ObsId y : labels)
        out.add_transition(remap[v], remap[to], y);
    }
  }
  for (StateId v : f.initial())
    out.mark_initial(remap[v]);
  out.freeze();
  return out;
}

Filter restrict_outputs(const Filter& f, const std::vector<LabelId>& choice) {
  if (static_cast<int>(choice.size()) != f.num_states())
    throw std::invalid_argument("output choice must cover every state");
  Filter out;
  for (StateId v = 0; v < f.num_states(); ++v) {
    if (!set_contains(f.outputs(v), choice[v]))
      throw std::invalid_argument("output choice at " + f.state_name(v) +
                                  " is not one of its outputs");
    out.add_state(f.state_name(v), {f.label_name(choice[v])});
  }
  for (ObsId y = 0; y < f.num_obs(); ++y)
    out.intern_obs(f.obs_name(y));
  for (StateId v = 0; v < f.num_states(); ++v)
    for (const auto& [to, labels] : f.edges_from(v))
      for (ObsId y : labels)
        out.add_transition(v, to, y);
  for (StateId v : f.initial())
    out.mark_initial(v);
  out.freeze();
  return out;
}

// ---------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------

Filter Filter::from_json(const json& j) {
  if (!j.is_object())
    throw std::invalid_argument("filter document must be a JSON object");
  for (const char* key : {"states", "initial", "alphabet", "transitions",
                          "outputs"})
    if (!j.contains(key))
      throw std::invalid_argument(std::string("filter document lacks \"") +
                                  key + "\"");
  Filter f;
  const json& outputs = j.at("outputs");
  for (const auto& s : j.at("states")) {
    std::string name = s.get<std::string>();
    if (!outputs.contains(name))
      throw std::invalid_argument("state " + name + " has no outputs entry");
    std::vector<std::string> labels;
    for (const auto& c : outputs.at(name))
      labels.push_back(c.get<std::string>());
    f.add_state(name, labels);
  }
  for (const auto& y : j.at("alphabet"))
    f.intern_obs(y.get<std::string>());
  for (const auto& t : j.at("transitions")) {
    std::string from = t.at("from").get<std::string>();
    std::string to = t.at("to").get<std::string>();
    for (const auto& y : t.at("obs")) {
      std::string obs = y.get<std::string>();
      if (!f.find_obs(obs))
        throw std::invalid_argument("transition uses observation \"" + obs +
                                    "\" missing from the alphabet");
      f.add_transition(from, to, obs);
    }
  }
  for (const auto& s : j.at("initial"))
    f.mark_initial(s.get<std::string>());
  f.freeze();
  return f;
}

json Filter::to_json() const {
  check_frozen();
  json j;
  j["states"] = state_names_;
  json init = json::array();
  for (StateId v : initial_)
    init.push_back(state_names_[v]);
  j["initial"] = init;
  j["alphabet"] = obs_names_;
  json transitions = json::array();
  for (StateId v = 0; v < num_states(); ++v) {
    for (const auto& [to, labels] : edges_[v]) {
      json t;
      t["from"] = state_names_[v];
      t["to"] = state_names_[to];
      json obs = json::array();
      for (ObsId y : labels)
        obs.push_back(obs_names_[y]);
      t["obs"] = obs;
      transitions.push_back(t);
    }
  }
  j["transitions"] = transitions;
  json outputs = json::object();
  for (StateId v = 0; v < num_states(); ++v) {
    json labels = json::array();
    for (LabelId c : outputs_[v])
      labels.push_back(label_names_[c]);
    outputs[state_names_[v]] = labels;
  }
  j["outputs"] = outputs;
  return j;
}

Filter Filter::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  try {
    return from_json(j);
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void Filter::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open " + path + " for writing");
  out << to_json().dump(2) << "\n";
}

std::string Filter::to_dot() const {
  check_frozen();
  std::ostringstream out;
  out << "digraph filter {\n  rankdir=LR;\n  node [shape=ellipse];\n";
  out << "  __start [shape=point, label=\"\"];\n";
  for (StateId v = 0; v < num_states(); ++v) {
    out << "  s" << v << " [label=\"" << state_names_[v] << "\\n";
    for (size_t i = 0; i < outputs_[v].size(); ++i)
      out << (i ? "," : "") << label_names_[outputs_[v][i]];
    out << "\"";
    if (outputs_[v].size() > 1)
      out << ", peripheries=2";
    out << "];\n";
  }
  for (StateId v : initial_)
    out << "  __start -> s" << v << ";\n";
  for (StateId v = 0; v < num_states(); ++v) {
    for (const auto& [to, labels] : edges_[v]) {
      out << "  s" << v << " -> s" << to << " [label=\"";
      for (size_t i = 0; i < labels.size(); ++i)
        out << (i ? "," : "") << obs_names_[labels[i]];
      out << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace filtermin
