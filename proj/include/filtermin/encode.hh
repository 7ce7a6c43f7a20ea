// encode.hh -- CNF encoding of "is there a cover of size <= k satisfying
// the zipper constraints", and decoding of satisfying assignments.
//
// This file is part of filtermin, distributed under the MIT license.

#pragma once

#include <cstddef>
#include <iosfwd>

#include "filtermin/compat.hh"
#include "filtermin/cover.hh"
#include "filtermin/zipper.hh"

namespace filtermin {

// A propositional formula in clause form, together with the meaning of
// its variables.  Variables are dense and 1-based:
//   R(v,i) = v*k + i    for state v in [0,t), part index i in [1..k]
//   Z(c,...)            auxiliary block per zipper constraint c, laid out
//                       sequentially after the R block.
// R(v,i) true means "state v is assigned to part i".  The exhaustive
// mode lays the Z block out per (constraint, part i): l in [1..k+m_c]
// with m_c = |u_set of c|, where Z(c,i,j) for j <= k selects a part j
// that swallows all of w_set and Z(c,i,k+q) the excuse "member u_q is
// not in part i".  The minimal-nonface mode shares one selector
// Z(c,j) = "part j contains all of w_set" across every i (shared_z
// set), which is materially smaller.
struct CnfInstance {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;

  int num_states = 0;  // t
  int num_parts = 0;   // k
  bool shared_z = false;
  std::vector<int> z_first;  // variable preceding constraint c's block
  std::vector<int> z_m;      // m_c per constraint

  int r_var(StateId v, int i) const { return v * num_parts + i; }
  // Per-(c, i) layout; only meaningful when !shared_z.
  int z_var(int c, int i, int l) const {
    return z_first[c] + (i - 1) * (num_parts + z_m[c]) + l;
  }
  // Shared layout; only meaningful when shared_z.
  int z_shared_var(int c, int j) const { return z_first[c] + j; }
};

enum class EncodeMode {
  // Exclude only the inclusion-minimal incompatible sets.  Equivalent by
  // downward closure, and the only tractable choice beyond toy sizes.
  kMinimalNonface,
  // Exclude every incompatible subset of the states outright, scanning
  // all 2^t subsets.  Kept because its variable and clause counts are
  // predictable in closed form; refuses to run when 2^t exceeds the cap.
  kExhaustive,
};

struct EncodeOptions {
  EncodeMode mode = EncodeMode::kMinimalNonface;
  // Restrict state v's at-least-one clause to parts 1..v+1.  Sound for
  // covers: any cover can be renumbered so that the first part to
  // introduce a new lowest-numbered state has the next free index.  Off
  // by default to keep formula counts predictable.
  bool symmetry_breaking = false;
  // kExhaustive refuses when 2^t exceeds this.
  size_t max_exhaustive_sets = size_t{1} << 22;
  // Cap on candidate sets examined while enumerating minimal non-faces.
  size_t max_nonface_work = 4'000'000;
};

// All inclusion-minimal sets that are not faces: the non-edges of the
// complex's 1-skeleton, plus larger sets all of whose proper subsets are
// faces.  The latter exist only when some pairwise-compatible set fails
// group compatibility.  Deterministic order.  Throws std::runtime_error
// when the face scan exceeds max_work.
std::vector<StateSet> enumerate_minimal_nonfaces(
    const SimplicialComplex& complex, size_t max_work = 4'000'000);

// Builds the formula that is satisfiable iff the complex has a cover of
// at most k parts (faces) satisfying every given zipper constraint.
// Clause groups, in deterministic order:
//   1. per state: at least one part,
//   2. per excluded set and part: not all members in that part,
//   3. per zipper constraint and part i: the auxiliary expansion of
//      "u_set inside part i implies some part j contains all of w_set".
// Throws std::invalid_argument for k < 1, std::runtime_error when a mode
// cap is exceeded.
CnfInstance encode_k_cover(const SimplicialComplex& complex,
                           const std::vector<ZipperConstraint>& zippers,
                           int k, const EncodeOptions& opts = {});

// Reads the R variables out of a model (1-based, as produced by the
// solvers), drops empty parts, canonicalizes.  The caller is expected to
// re-validate the result against the complex and the constraints; the
// decoder itself never trusts the assignment.
Cover decode_cover(const std::vector<bool>& model, const CnfInstance& cnf);

// DIMACS CNF, `p cnf <vars> <clauses>` then one clause per line.
void write_dimacs(std::ostream& out, const CnfInstance& cnf);
// Sidecar variable map: `R v i <var>` and `Z c i l <var>` lines.
void write_varmap(std::ostream& out, const CnfInstance& cnf);

}  // namespace filtermin
