// zipper.cc -- generation of zipper constraints from the compatibility
// complex.
//
// This file is part of filtermin, distributed under the MIT license.

#include "filtermin/zipper.hh"

#include <set>
#include <sstream>

namespace filtermin {

StateSet successor_set(const Filter& f, const StateSet& u, ObsId y) {
  StateSet next;
  for (StateId v : u)
    for (StateId w : f.successors(v, y))
      next.push_back(w);
  return make_set(std::move(next));
}

ZipperSet generate_zippers(const Filter& f, const SimplicialComplex& complex,
                           const ZipperOptions& opts) {
  DeterminismCheck det = is_deterministic(f);
  if (!det.deterministic)
    throw std::invalid_argument("generate_zippers: " + det.reason);
  ZipperSet result;
  std::set<ZipperConstraint> dedup;
  // Overlapping maximal faces share sub-face/observation pairs; remember
  // which mover sets were already expanded so each is enumerated once.
  std::set<std::pair<StateSet, ObsId>> expanded;
  bool budget_left = true;

  auto emit = [&result, &dedup, &opts, &budget_left](StateSet u, StateSet w,
                                                     ObsId y) {
    if (dedup.size() >= opts.max_constraints) {
      result.complete = false;
      budget_left = false;
      return;
    }
    dedup.insert({std::move(u), std::move(w), y});
  };

  for (const StateSet& face : complex.maximal_faces) {
    if (!budget_left)
      break;
    if (face.size() < 2)
      continue;
    for (ObsId y = 0; y < f.num_obs() && budget_left; ++y) {
      // Only members with a y-edge can contribute to a successor set; a
      // subset with idle members is implied by its moving core, so
      // enumeration ranges over the movers alone.
      StateSet movers;
      for (StateId v : face)
        if (!f.successors(v, y).empty())
          movers.push_back(v);
      if (movers.size() < 2)
        continue;
      // If every mover lands on the same state, no subset splits: skip
      // without enumerating.  Families designed to be constraint-free
      // stay cheap this way.
      if (successor_set(f, movers, y).size() < 2)
        continue;
      if (!expanded.insert({movers, y}).second)
        continue;

      const size_t n = movers.size();
      if (n > opts.max_split_members) {
        // 2^n subsets is out of reach.  Fall back to the pairwise
        // constraints (a sound subset) and report the truncation.
        result.complete = false;
        for (size_t i = 0; i < n && budget_left; ++i)
          for (size_t j = i + 1; j < n && budget_left; ++j) {
            StateSet u{movers[i], movers[j]};
            StateSet w = successor_set(f, u, y);
            if (w.size() >= 2)
              emit(std::move(u), std::move(w), y);
          }
        continue;
      }

      std::vector<StateSet> succ(n);
      for (size_t i = 0; i < n; ++i)
        succ[i] = successor_set(f, {movers[i]}, y);
      for (size_t mask = 1; mask < (size_t(1) << n) && budget_left; ++mask) {
        if (__builtin_popcountll(mask) < 2)
          continue;
        ++result.faces_scanned;
        StateSet u, w;
        for (size_t i = 0; i < n; ++i)
          if (mask & (size_t(1) << i)) {
            u.push_back(movers[i]);
            w.insert(w.end(), succ[i].begin(), succ[i].end());
          }
        w = make_set(std::move(w));
        if (w.size() < 2)
          continue;
        emit(std::move(u), std::move(w), y);
      }
    }
  }

  result.constraints.assign(dedup.begin(), dedup.end());
  return result;
}

std::vector<ZipperConstraint> reduce_zippers(
    const std::vector<ZipperConstraint>& zs) {
  // Group the (u, w) pairs by w, dropping trivial and duplicate ones.
  std::map<StateSet, std::set<StateSet>> by_w;
  for (const ZipperConstraint& z : zs) {
    if (is_subset(z.w_set, z.u_set))
      continue;
    by_w[z.w_set].insert(z.u_set);
  }
  std::vector<ZipperConstraint> reduced;
  for (auto& [w, uniq] : by_w) {
    std::vector<StateSet> group(uniq.begin(), uniq.end());
    std::sort(group.begin(), group.end(),
              [](const StateSet& a, const StateSet& b) {
                return a.size() != b.size() ? a.size() < b.size() : a < b;
              });
    std::vector<StateSet> minimal;
    for (const StateSet& u : group) {
      bool dominated = false;
      for (const StateSet& kept : minimal)
        dominated = dominated || is_subset(kept, u);
      if (!dominated)
        minimal.push_back(u);
    }
    for (StateSet& u : minimal)
      reduced.push_back({std::move(u), w, -1});
  }
  std::sort(reduced.begin(), reduced.end());
  return reduced;
}

std::string format_zipper(const Filter& f, const ZipperConstraint& z) {
  std::ostringstream out;
  out << "U{";
  for (size_t i = 0; i < z.u_set.size(); ++i)
    out << (i ? "," : "") << f.state_name(z.u_set[i]);
  out << "} -" << (z.obs >= 0 ? f.obs_name(z.obs) : "*") << "-> W{";
  for (size_t i = 0; i < z.w_set.size(); ++i)
    out << (i ? "," : "") << f.state_name(z.w_set[i]);
  out << "}";
  return out.str();
}

std::string format_zippers(const Filter& f,
                           const std::vector<ZipperConstraint>& zs) {
  std::ostringstream out;
  for (const ZipperConstraint& z : zs)
    out << format_zipper(f, z) << "\n";
  return out.str();
}

}  // namespace filtermin
