// cover.cc -- cover validation, the induced filter, and the induced cover.
//
// This file is part of filtermin, distributed under the MIT license.

#include "filtermin/cover.hh"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace filtermin {

Cover make_cover(std::vector<StateSet> parts) {
  Cover c;
  for (StateSet& p : parts) {
    StateSet s = make_set(std::move(p));
    if (!s.empty())
      c.parts.push_back(std::move(s));
  }
  std::sort(c.parts.begin(), c.parts.end());
  c.parts.erase(std::unique(c.parts.begin(), c.parts.end()), c.parts.end());
  return c;
}

bool is_valid_cover(const SimplicialComplex& complex, const Cover& cover,
                    std::string* reason) {
  auto fail = [reason](const std::string& why) {
    if (reason)
      *reason = why;
    return false;
  };
  std::vector<char> covered(complex.num_vertices, 0);
  for (const StateSet& part : cover.parts) {
    if (part.empty())
      return fail("cover contains an empty part");
    for (StateId v : part) {
      if (v < 0 || v >= complex.num_vertices)
        return fail("part contains out-of-range state id " + std::to_string(v));
      covered[v] = 1;
    }
    if (!complex.is_face(part)) {
      std::ostringstream out;
      out << "part {";
      for (size_t i = 0; i < part.size(); ++i)
        out << (i ? "," : "") << part[i];
      out << "} is not group compatible";
      return fail(out.str());
    }
  }
  for (int v = 0; v < complex.num_vertices; ++v)
    if (!covered[v])
      return fail("state " + std::to_string(v) + " is not covered");
  return true;
}

std::optional<ZipperConstraint> cover_satisfies(
    const Cover& cover, const std::vector<ZipperConstraint>& zippers) {
  auto some_part_contains = [&cover](const StateSet& s) {
    for (const StateSet& part : cover.parts)
      if (is_subset(s, part))
        return true;
    return false;
  };
  for (const ZipperConstraint& z : zippers)
    if (some_part_contains(z.u_set) && !some_part_contains(z.w_set))
      return z;
  return std::nullopt;
}

Filter induce_filter(const Filter& f, const Cover& cover_in) {
  DeterminismCheck det = is_deterministic(f);
  if (!det.deterministic)
    throw std::invalid_argument("induce_filter: input not deterministic: " +
                                det.reason);
  const Cover cover = make_cover(cover_in.parts);
  if (cover.parts.empty())
    throw std::invalid_argument("induce_filter: empty cover");

  std::vector<char> covered(f.num_states(), 0);
  for (const StateSet& part : cover.parts) {
    for (StateId v : part) {
      if (v < 0 || v >= f.num_states())
        throw std::invalid_argument(
            "induce_filter: part contains out-of-range state id " +
            std::to_string(v));
      covered[v] = 1;
    }
    GroupVerdict gv = group_compatible(f, part);
    if (!gv.compatible)
      throw std::invalid_argument(
          "induce_filter: part " + f.format_states(part) +
          " is not group compatible: string \"" +
          f.format_string(gv.counterexample) + "\" reaches " +
          f.format_states(gv.reached) + ", which share no output label");
  }
  for (StateId v = 0; v < f.num_states(); ++v)
    if (!covered[v])
      throw std::invalid_argument("induce_filter: state " + f.state_name(v) +
                                  " is not covered");

  // Parts are canonically sorted, so "first part that contains S" picks
  // the canonically least one -- both for transition targets and for the
  // initial part.  A fixed tie-break keeps the construction a function.
  auto least_part_containing = [&cover](const StateSet& s) -> int {
    for (size_t i = 0; i < cover.parts.size(); ++i)
      if (is_subset(s, cover.parts[i]))
        return static_cast<int>(i);
    return -1;
  };

  Filter out;
  std::set<std::string> used_names;
  for (const StateSet& part : cover.parts) {
    std::string name;
    for (size_t i = 0; i < part.size(); ++i)
      name += (i ? "+" : "") + f.state_name(part[i]);
    while (!used_names.insert(name).second)
      name += "'";
    LabelSet common = f.outputs(part[0]);
    for (size_t i = 1; i < part.size(); ++i)
      common = set_intersection(common, f.outputs(part[i]));
    std::vector<std::string> labels;
    for (LabelId c : common)
      labels.push_back(f.label_name(c));
    out.add_state(name, labels);
  }

  for (size_t p = 0; p < cover.parts.size(); ++p) {
    for (ObsId y = 0; y < f.num_obs(); ++y) {
      StateSet w = successor_set(f, cover.parts[p], y);
      if (w.empty())
        continue;
      int q = least_part_containing(w);
      if (q < 0)
        throw std::invalid_argument(
            "induce_filter: no part contains " + f.format_states(w) +
            ", the " + f.obs_name(y) + "-successors of part " +
            f.format_states(cover.parts[p]) +
            " (the cover violates a zipper constraint)");
      out.add_transition(static_cast<StateId>(p), static_cast<StateId>(q),
                         out.intern_obs(f.obs_name(y)));
    }
  }

  int init = least_part_containing(f.initial());
  if (init < 0)
    throw std::invalid_argument("induce_filter: no part contains the initial state");
  out.mark_initial(static_cast<StateId>(init));
  out.freeze();
  return out;
}

Cover induced_cover(const Filter& f, const Filter& fprime) {
  for (const Filter* g : {&f, &fprime}) {
    DeterminismCheck det = is_deterministic(*g);
    if (!det.deterministic)
      throw std::invalid_argument("induced_cover: input not deterministic: " +
                                  det.reason);
  }

  // Observation ids of fprime matching f's, by name; -1 where fprime
  // lacks the symbol (those strings leave fprime's language).
  std::vector<ObsId> other(f.num_obs(), -1);
  for (ObsId y = 0; y < f.num_obs(); ++y)
    if (std::optional<ObsId> y2 = fprime.find_obs(f.obs_name(y)))
      other[y] = *y2;

  std::vector<StateSet> member_sets(fprime.num_states());
  std::set<std::pair<StateId, StateId>> seen;
  std::vector<std::pair<StateId, StateId>> queue;
  queue.emplace_back(f.initial()[0], fprime.initial()[0]);
  seen.insert(queue[0]);
  for (size_t i = 0; i < queue.size(); ++i) {
    auto [a, b] = queue[i];
    member_sets[b].push_back(a);
    for (ObsId y = 0; y < f.num_obs(); ++y) {
      if (other[y] < 0)
        continue;
      std::optional<StateId> a2 = f.unique_successor(a, y);
      std::optional<StateId> b2 = fprime.unique_successor(b, other[y]);
      if (a2 && b2 && seen.insert({*a2, *b2}).second)
        queue.emplace_back(*a2, *b2);
    }
  }

  std::vector<StateSet> parts;
  for (StateSet& s : member_sets)
    if (!s.empty())
      parts.push_back(std::move(s));
  return make_cover(std::move(parts));
}

std::string format_cover(const Filter& f, const Cover& cover) {
  std::ostringstream out;
  for (const StateSet& part : cover.parts) {
    for (size_t i = 0; i < part.size(); ++i)
      out << (i ? " " : "") << f.state_name(part[i]);
    out << "\n";
  }
  return out.str();
}

Cover parse_cover(const Filter& f, const std::string& text) {
  std::vector<StateSet> parts;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream words(line);
    StateSet part;
    std::string word;
    while (words >> word) {
      std::optional<StateId> v = f.find_state(word);
      if (!v)
        throw std::invalid_argument("parse_cover: unknown state \"" + word +
                                    "\"");
      part.push_back(*v);
    }
    if (!part.empty())
      parts.push_back(std::move(part));
  }
  return make_cover(std::move(parts));
}

}  // namespace filtermin
