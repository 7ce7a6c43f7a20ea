// oracle.cc -- exhaustive reference minimizer.  Everything here is
// derived straight from the definitions (subset enumeration, definitional
// group checks, exhaustive branching) so that the SAT pipeline has an
// independent implementation to be measured against.
//
// This file is part of filtermin, distributed under the MIT license.

#include "filtermin/oracle.hh"

#include <algorithm>
#include <stdexcept>

#include "filtermin/compat.hh"

namespace filtermin {

namespace {

using Mask = uint32_t;

StateSet mask_to_set(Mask m) {
  StateSet s;
  for (int v = 0; m; ++v, m >>= 1)
    if (m & 1)
      s.push_back(v);
  return s;
}

struct MaskZipper {
  Mask u = 0;
  Mask w = 0;
};

struct Search {
  const std::vector<Mask>* faces;
  const std::vector<std::vector<int>>* faces_with;  // per state
  const std::vector<MaskZipper>* zippers;
  int max_face_size;
  int num_states;
  size_t explored = 0;
  std::vector<int> chosen;

  // First constraint whose u-side is inside some chosen part while no
  // chosen part contains its w-side; -1 when none.
  int violated() const {
    for (size_t zi = 0; zi < zippers->size(); ++zi) {
      const MaskZipper& z = (*zippers)[zi];
      bool u_hosted = false, w_hosted = false;
      for (int fi : chosen) {
        const Mask fm = (*faces)[fi];
        u_hosted = u_hosted || (fm & z.u) == z.u;
        w_hosted = w_hosted || (fm & z.w) == z.w;
      }
      if (u_hosted && !w_hosted)
        return static_cast<int>(zi);
    }
    return -1;
  }

  bool run(Mask covered, int budget) {
    ++explored;
    const Mask all = (num_states == 32) ? ~Mask(0)
                                        : ((Mask(1) << num_states) - 1);
    if (covered == all) {
      const int zi = violated();
      if (zi < 0)
        return true;
      if (budget == 0)
        return false;
      // A minimum cover may need a part that covers nothing new, just to
      // host the w-side of a constraint another part triggers.
      const Mask w = (*zippers)[zi].w;
      for (size_t fi = 0; fi < faces->size(); ++fi) {
        if (((*faces)[fi] & w) != w)
          continue;
        if (std::find(chosen.begin(), chosen.end(), int(fi)) != chosen.end())
          continue;
        chosen.push_back(static_cast<int>(fi));
        if (run(covered, budget - 1))
          return true;
        chosen.pop_back();
      }
      return false;
    }
    if (budget == 0)
      return false;
    int uncovered = 0;
    for (int v = 0; v < num_states; ++v)
      if (!(covered & (Mask(1) << v)))
        ++uncovered;
    if ((uncovered + max_face_size - 1) / max_face_size > budget)
      return false;
    int lowest = 0;
    while (covered & (Mask(1) << lowest))
      ++lowest;
    for (int fi : (*faces_with)[lowest]) {
      chosen.push_back(fi);
      if (run(covered | (*faces)[fi], budget - 1))
        return true;
      chosen.pop_back();
    }
    return false;
  }
};

}  // namespace

OracleResult brute_force_minimize(const Filter& f, const OracleOptions& opts) {
  DeterminismCheck det = is_deterministic(f);
  if (!det.deterministic)
    throw std::invalid_argument("brute_force_minimize: input not deterministic: " +
                                det.reason);
  const int t = f.num_states();
  if (t > opts.max_states || t > 31)
    throw std::invalid_argument(
        "brute_force_minimize: " + std::to_string(t) +
        " states exceeds the oracle limit of " + std::to_string(opts.max_states));

  // All faces, by checking every subset against the definition.  Downward
  // closure prunes: a set with a non-face subset one smaller is skipped.
  std::vector<char> is_face_mask(size_t(1) << t, 0);
  std::vector<Mask> faces;
  std::vector<std::vector<int>> faces_with(t);
  for (Mask m = 1; m < (Mask(1) << t); ++m) {
    bool subsets_ok = true;
    for (int v = 0; v < t && subsets_ok; ++v)
      if (m & (Mask(1) << v)) {
        const Mask sub = m & ~(Mask(1) << v);
        subsets_ok = sub == 0 || is_face_mask[sub];
      }
    if (!subsets_ok)
      continue;
    if (!group_compatible(f, mask_to_set(m)).compatible)
      continue;
    is_face_mask[m] = 1;
    faces.push_back(m);
    for (int v = 0; v < t; ++v)
      if (m & (Mask(1) << v))
        faces_with[v].push_back(static_cast<int>(faces.size()) - 1);
  }

  int max_face_size = 1;
  for (Mask m : faces)
    max_face_size = std::max(max_face_size, __builtin_popcount(m));

  // Constraints straight from the definition: for every face with at
  // least two members and every observation, the set of successors, kept
  // when it also has at least two members.
  std::vector<MaskZipper> zippers;
  for (Mask m : faces) {
    if (__builtin_popcount(m) < 2)
      continue;
    const StateSet u = mask_to_set(m);
    for (ObsId y = 0; y < f.num_obs(); ++y) {
      Mask w = 0;
      for (StateId v : u)
        if (std::optional<StateId> v2 = f.unique_successor(v, y))
          w |= Mask(1) << *v2;
      if (__builtin_popcount(w) >= 2)
        zippers.push_back({m, w});
    }
  }

  Search search;
  search.faces = &faces;
  search.faces_with = &faces_with;
  search.zippers = &zippers;
  search.max_face_size = max_face_size;
  search.num_states = t;

  OracleResult result;
  for (int k = 1; k <= t; ++k) {
    search.chosen.clear();
    if (search.run(0, k)) {
      std::vector<StateSet> parts;
      for (int fi : search.chosen)
        parts.push_back(mask_to_set(faces[fi]));
      result.minimal_size = static_cast<int>(search.chosen.size());
      result.witness_cover = make_cover(std::move(parts));
      result.minimal_filter = induce_filter(f, result.witness_cover);
      result.explored = search.explored;
      return result;
    }
  }
  throw std::logic_error("brute_force_minimize: no cover found at k = |V|");
}

SolutionVerdict verify_solution(const Filter& f, const Filter& candidate) {
  SolutionVerdict v;
  v.determinism = is_deterministic(candidate);
  v.simulation = output_simulates(candidate, f);
  v.size = candidate.num_states();
  return v;
}

}  // namespace filtermin
