// encode.cc -- CNF construction for bounded-size cover search, minimal
// non-face enumeration, decoding, DIMACS output.
//
// This file is part of filtermin, distributed under the MIT license.

#include "filtermin/encode.hh"

#include <algorithm>
#include <ostream>
#include <set>
#include <stdexcept>

#include "filtermin/solver.hh"

namespace filtermin {

std::vector<StateSet> enumerate_minimal_nonfaces(
    const SimplicialComplex& complex, size_t max_work) {
  const int t = complex.num_vertices;
  size_t work = 0;
  auto spend = [&work, max_work](size_t amount) {
    work += amount;
    if (work > max_work)
      throw std::runtime_error(
          "enumerate_minimal_nonfaces: exceeded work cap of " +
          std::to_string(max_work));
  };

  // SAT-guided enumeration, paying per non-face found rather than per
  // subset of the large faces.  Variable v+1 says "vertex v selected".
  // A model must avoid every minimal non-face already found and lie
  // outside every maximal face, so it is a non-face containing only new
  // minimal non-faces; shrink and repeat until unsatisfiable, which
  // proves the list complete.
  std::vector<StateSet> nonfaces;
  CnfInstance search;
  search.num_vars = t;
  for (const StateSet& m : complex.maximal_faces) {
    std::vector<int> outside;
    for (StateId v = 0; v < t; ++v)
      if (!std::binary_search(m.begin(), m.end(), v))
        outside.push_back(v + 1);
    search.clauses.push_back(std::move(outside));
  }

  SolverOptions solver_opts;  // built-in backend, no time limit
  for (;;) {
    spend(1);
    SolveResult proposed = solve(search, solver_opts);
    if (proposed.status == SolveStatus::kUnsat)
      break;
    if (proposed.status != SolveStatus::kSat)
      throw std::runtime_error(
          "enumerate_minimal_nonfaces: proposal search failed: " +
          proposed.detail);
    StateSet s;
    for (StateId v = 0; v < t; ++v)
      if (proposed.model[v + 1])
        s.push_back(v);
    // Shrink to a minimal non-face: single pass suffices because faces
    // are downward closed.
    for (size_t i = 0; i < s.size();) {
      spend(1);
      StateSet trial = s;
      trial.erase(trial.begin() + i);
      if (!complex.is_face(trial))
        s = std::move(trial);
      else
        ++i;
    }
    std::vector<int> blocked;
    for (StateId v : s)
      blocked.push_back(-(v + 1));
    search.clauses.push_back(std::move(blocked));
    nonfaces.push_back(std::move(s));
  }

  std::sort(nonfaces.begin(), nonfaces.end());
  return nonfaces;
}

CnfInstance encode_k_cover(const SimplicialComplex& complex,
                           const std::vector<ZipperConstraint>& zippers,
                           int k, const EncodeOptions& opts) {
  if (k < 1)
    throw std::invalid_argument("encode_k_cover: k must be at least 1");
  const int t = complex.num_vertices;
  if (t < 1)
    throw std::invalid_argument("encode_k_cover: empty complex");

  CnfInstance cnf;
  cnf.num_states = t;
  cnf.num_parts = k;
  cnf.shared_z = opts.mode == EncodeMode::kMinimalNonface;

  size_t vars = size_t(t) * k;
  for (const ZipperConstraint& z : zippers) {
    cnf.z_first.push_back(static_cast<int>(vars));
    cnf.z_m.push_back(static_cast<int>(z.u_set.size()));
    vars += cnf.shared_z ? size_t(k) : size_t(k) * (k + z.u_set.size());
  }
  if (vars > size_t(1) << 31)
    throw std::runtime_error("encode_k_cover: variable count overflow");
  cnf.num_vars = static_cast<int>(vars);

  // 1. Every state sits in at least one part.  With symmetry breaking,
  // state v may only open parts up to v+1 (any cover can be renumbered
  // so that parts are introduced in order of their least member).
  for (StateId v = 0; v < t; ++v) {
    std::vector<int> clause;
    const int limit = opts.symmetry_breaking ? std::min(v + 1, k) : k;
    for (int i = 1; i <= limit; ++i)
      clause.push_back(cnf.r_var(v, i));
    cnf.clauses.push_back(std::move(clause));
  }

  // 2. No part contains an excluded set.
  auto exclude = [&cnf, k](const StateSet& s) {
    for (int i = 1; i <= k; ++i) {
      std::vector<int> clause;
      for (StateId u : s)
        clause.push_back(-cnf.r_var(u, i));
      cnf.clauses.push_back(std::move(clause));
    }
  };
  if (opts.mode == EncodeMode::kExhaustive) {
    if (t >= 63 || (size_t(1) << t) > opts.max_exhaustive_sets)
      throw std::runtime_error(
          "encode_k_cover: exhaustive mode scans 2^" + std::to_string(t) +
          " subsets, beyond the configured cap; use the minimal-nonface "
          "mode instead");
    for (size_t mask = 1; mask < (size_t(1) << t); ++mask) {
      if (__builtin_popcountll(mask) < 2)
        continue;  // singletons and the empty set are always faces
      StateSet s;
      for (int v = 0; v < t; ++v)
        if (mask & (size_t(1) << v))
          s.push_back(v);
      if (!complex.is_face(s))
        exclude(s);
    }
  } else {
    for (const StateSet& s :
         enumerate_minimal_nonfaces(complex, opts.max_nonface_work))
      exclude(s);
  }

  // 3. Zipper constraints.
  for (size_t c = 0; c < zippers.size(); ++c) {
    const ZipperConstraint& z = zippers[c];
    const int m = static_cast<int>(z.u_set.size());
    if (cnf.shared_z) {
      // Shared layout: z(c,j) means "part j contains all of w_set"; one
      // clause per part i says "u_set inside part i implies some z(c,j)".
      for (int j = 1; j <= k; ++j)
        for (StateId w : z.w_set)
          cnf.clauses.push_back(
              {-cnf.z_shared_var(static_cast<int>(c), j), cnf.r_var(w, j)});
      for (int i = 1; i <= k; ++i) {
        std::vector<int> clause;
        for (StateId u : z.u_set)
          clause.push_back(-cnf.r_var(u, i));
        for (int j = 1; j <= k; ++j)
          clause.push_back(cnf.z_shared_var(static_cast<int>(c), j));
        cnf.clauses.push_back(std::move(clause));
      }
    } else {
      // Per-(c, i) layout: either some selector z(c,i,j) points at a
      // part j that contains all of w_set, or some excuse z(c,i,k+q)
      // points at a member of u_set absent from part i.
      for (int i = 1; i <= k; ++i) {
        std::vector<int> alo;
        for (int l = 1; l <= k + m; ++l)
          alo.push_back(cnf.z_var(static_cast<int>(c), i, l));
        cnf.clauses.push_back(std::move(alo));
        for (int j = 1; j <= k; ++j)
          for (StateId w : z.w_set)
            cnf.clauses.push_back(
                {-cnf.z_var(static_cast<int>(c), i, j), cnf.r_var(w, j)});
        for (int q = 1; q <= m; ++q)
          cnf.clauses.push_back({-cnf.z_var(static_cast<int>(c), i, k + q),
                                 -cnf.r_var(z.u_set[q - 1], i)});
      }
    }
  }

  return cnf;
}

Cover decode_cover(const std::vector<bool>& model, const CnfInstance& cnf) {
  std::vector<StateSet> parts(cnf.num_parts);
  for (StateId v = 0; v < cnf.num_states; ++v)
    for (int i = 1; i <= cnf.num_parts; ++i) {
      const size_t var = cnf.r_var(v, i);
      if (var < model.size() && model[var])
        parts[i - 1].push_back(v);
    }
  return make_cover(std::move(parts));
}

void write_dimacs(std::ostream& out, const CnfInstance& cnf) {
  out << "c cover encoding: states=" << cnf.num_states
      << " parts=" << cnf.num_parts << " constraints=" << cnf.z_first.size()
      << "\n";
  out << "p cnf " << cnf.num_vars << " " << cnf.clauses.size() << "\n";
  for (const std::vector<int>& clause : cnf.clauses) {
    for (int lit : clause)
      out << lit << " ";
    out << "0\n";
  }
}

void write_varmap(std::ostream& out, const CnfInstance& cnf) {
  for (StateId v = 0; v < cnf.num_states; ++v)
    for (int i = 1; i <= cnf.num_parts; ++i)
      out << "R " << v << " " << i << " " << cnf.r_var(v, i) << "\n";
  for (size_t c = 0; c < cnf.z_first.size(); ++c) {
    if (cnf.shared_z) {
      for (int j = 1; j <= cnf.num_parts; ++j)
        out << "Z " << c << " 0 " << j << " "
            << cnf.z_shared_var(static_cast<int>(c), j) << "\n";
    } else {
      for (int i = 1; i <= cnf.num_parts; ++i)
        for (int l = 1; l <= cnf.num_parts + cnf.z_m[c]; ++l)
          out << "Z " << c << " " << i << " " << l << " "
              << cnf.z_var(static_cast<int>(c), i, l) << "\n";
    }
  }
}

}  // namespace filtermin
