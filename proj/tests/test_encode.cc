// Tests for the CNF encoding: the closed-form variable count of the
// expanded mode, agreement between the two modes, minimal non-face
// enumeration against a direct scan, decoding, and the DIMACS emitters.

#include <map>
#include <sstream>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "filtermin/compat.hh"
#include "filtermin/cover.hh"
#include "filtermin/encode.hh"
#include "filtermin/filter.hh"
#include "filtermin/instances.hh"
#include "filtermin/solver.hh"
#include "filtermin/zipper.hh"

using namespace filtermin;

namespace {

Filter deterministic_random(uint64_t seed, int states, int max_outputs) {
  RandomFilterOptions opts;
  opts.num_states = states;
  opts.num_obs = 3;
  opts.num_labels = 3;
  opts.max_outputs_per_state = max_outputs;
  opts.seed = seed;
  return random_filter(opts);
}

struct Pipeline {
  Filter f;
  SimplicialComplex complex;
  std::vector<ZipperConstraint> zippers;
};

Pipeline build(uint64_t seed, int states, int max_outputs) {
  Pipeline p;
  p.f = deterministic_random(seed, states, max_outputs);
  p.complex = compatibility_complex(p.f);
  p.zippers = generate_zippers(p.f, p.complex).constraints;
  return p;
}

// Direct minimal non-face scan: all subsets that are not faces while all
// of their proper subsets are.
std::vector<StateSet> brute_minimal_nonfaces(const SimplicialComplex& complex) {
  REQUIRE(complex.num_vertices <= 16);
  std::vector<StateSet> out;
  for (uint32_t mask = 1; mask < (1u << complex.num_vertices); ++mask) {
    StateSet s;
    for (int v = 0; v < complex.num_vertices; ++v)
      if (mask & (1u << v)) s.push_back(v);
    if (s.size() < 2 || complex.is_face(s)) continue;
    bool all_proper_subsets_faces = true;
    for (size_t i = 0; i < s.size() && all_proper_subsets_faces; ++i) {
      StateSet sub = s;
      sub.erase(sub.begin() + static_cast<long>(i));
      all_proper_subsets_faces = complex.is_face(sub);
    }
    if (all_proper_subsets_faces)
      out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("expanded mode has the closed-form variable count") {
  int checked = 0;
  for (uint64_t seed = 1; seed <= 12; ++seed) {
    Pipeline p = build(seed, 6 + static_cast<int>(seed % 4), (seed % 2) ? 2 : 1);
    auto reduced = reduce_zippers(p.zippers);
    int t = p.f.num_states();
    for (int k : {1, 2, t / 2 + 1, t}) {
      EncodeOptions opts;
      opts.mode = EncodeMode::kExhaustive;
      CnfInstance cnf = encode_k_cover(p.complex, reduced, k, opts);
      long expected = static_cast<long>(t) * k;
      for (const ZipperConstraint& z : reduced)
        expected += static_cast<long>(k) * (k + static_cast<long>(z.u_set.size()));
      CAPTURE(seed, t, k, reduced.size());
      CHECK(cnf.num_vars == expected);
      ++checked;
    }
  }
  CHECK(checked >= 40);
}

TEST_CASE("variable blocks are laid out densely and disjointly") {
  Pipeline p = build(3, 8, 2);
  auto reduced = reduce_zippers(p.zippers);
  if (reduced.empty()) reduced.push_back({{0, 1}, {2, 3}, 0});
  const int k = 4;

  EncodeOptions opts;
  opts.mode = EncodeMode::kExhaustive;
  CnfInstance cnf = encode_k_cover(p.complex, reduced, k, opts);
  std::map<int, int> seen;  // var -> count
  for (StateId v = 0; v < p.f.num_states(); ++v)
    for (int i = 1; i <= k; ++i)
      seen[cnf.r_var(v, i)]++;
  for (size_t c = 0; c < reduced.size(); ++c)
    for (int i = 1; i <= k; ++i)
      for (int l = 1; l <= k + cnf.z_m[c]; ++l)
        seen[cnf.z_var(static_cast<int>(c), i, l)]++;
  REQUIRE(static_cast<int>(seen.size()) == cnf.num_vars);
  CHECK(seen.begin()->first == 1);
  CHECK(seen.rbegin()->first == cnf.num_vars);
  for (const auto& [var, count] : seen)
    CHECK(count == 1);
}

TEST_CASE("both modes agree on satisfiability for every k") {
  for (uint64_t seed = 20; seed <= 32; ++seed) {
    Pipeline p = build(seed, 7, (seed % 2) ? 2 : 1);
    auto reduced = reduce_zippers(p.zippers);
    int t = p.f.num_states();
    for (int k = 1; k <= t; ++k) {
      EncodeOptions a, b;
      a.mode = EncodeMode::kMinimalNonface;
      b.mode = EncodeMode::kExhaustive;
      SolveResult ra = solve(encode_k_cover(p.complex, reduced, k, a));
      SolveResult rb = solve(encode_k_cover(p.complex, reduced, k, b));
      REQUIRE(ra.status != SolveStatus::kUnknown);
      REQUIRE(rb.status != SolveStatus::kUnknown);
      CAPTURE(seed, k);
      CHECK(ra.status == rb.status);
    }
  }
}

TEST_CASE("minimal non-face enumeration matches the direct scan") {
  for (uint64_t seed = 1; seed <= 25; ++seed) {
    int states = 6 + static_cast<int>(seed % 6);  // 6..11
    Filter f = deterministic_random(seed, states, (seed % 2) ? 2 : 1);
    SimplicialComplex complex = compatibility_complex(f);
    CAPTURE(seed, states);
    CHECK(enumerate_minimal_nonfaces(complex) == brute_minimal_nonfaces(complex));
  }
}

TEST_CASE("minimal non-faces can exceed size two") {
  // Pairwise-overlapping outputs with no common label: {A,B,C} is a
  // minimal non-face of size three.
  Filter f;
  f.add_state("A", {"c1", "c2"});
  f.add_state("B", {"c2", "c3"});
  f.add_state("C", {"c1", "c3"});
  f.mark_initial("A");
  f.freeze();
  SimplicialComplex complex = compatibility_complex(f);
  auto nonfaces = enumerate_minimal_nonfaces(complex);
  REQUIRE(nonfaces.size() == 1);
  CHECK(nonfaces[0] == StateSet{0, 1, 2});
}

TEST_CASE("decoded models are valid covers that satisfy the constraints") {
  for (uint64_t seed = 40; seed <= 52; ++seed) {
    Pipeline p = build(seed, 8, 2);
    auto reduced = reduce_zippers(p.zippers);
    int t = p.f.num_states();
    for (int k = 2; k <= t; k += 2) {
      CnfInstance cnf = encode_k_cover(p.complex, reduced, k);
      SolveResult r = solve(cnf);
      if (r.status != SolveStatus::kSat) continue;
      REQUIRE(model_satisfies(cnf, r.model));
      Cover cover = decode_cover(r.model, cnf);
      CAPTURE(seed, k);
      CHECK(cover.size() <= static_cast<size_t>(k));
      std::string reason;
      CHECK(is_valid_cover(p.complex, cover, &reason));
      CHECK_FALSE(cover_satisfies(cover, reduced).has_value());
      CHECK_FALSE(cover_satisfies(cover, p.zippers).has_value());
    }
  }
}

TEST_CASE("symmetry breaking never changes the answer") {
  for (uint64_t seed = 60; seed <= 70; ++seed) {
    Pipeline p = build(seed, 7, 1);
    auto reduced = reduce_zippers(p.zippers);
    for (int k = 1; k <= p.f.num_states(); ++k) {
      EncodeOptions plain, sym;
      sym.symmetry_breaking = true;
      SolveResult a = solve(encode_k_cover(p.complex, reduced, k, plain));
      SolveResult b = solve(encode_k_cover(p.complex, reduced, k, sym));
      CAPTURE(seed, k);
      CHECK(a.status == b.status);
    }
  }
}

TEST_CASE("DIMACS output is well formed and matches the instance") {
  Pipeline p = build(5, 7, 2);
  auto reduced = reduce_zippers(p.zippers);
  CnfInstance cnf = encode_k_cover(p.complex, reduced, 3);
  std::ostringstream out;
  write_dimacs(out, cnf);
  std::istringstream in(out.str());
  std::string tok;
  long declared_vars = -1, declared_clauses = -1;
  size_t clause_count = 0;
  bool in_clause = false;
  while (in >> tok) {
    if (tok == "c") { std::string rest; std::getline(in, rest); continue; }
    if (tok == "p") {
      std::string fmt;
      in >> fmt >> declared_vars >> declared_clauses;
      REQUIRE(fmt == "cnf");
      continue;
    }
    long lit = std::stol(tok);
    if (lit == 0) {
      clause_count++;
      in_clause = false;
    } else {
      in_clause = true;
      CHECK(std::abs(lit) <= declared_vars);
    }
  }
  CHECK_FALSE(in_clause);  // every clause is zero-terminated
  CHECK(declared_vars == cnf.num_vars);
  CHECK(declared_clauses == static_cast<long>(cnf.clauses.size()));
  CHECK(clause_count == cnf.clauses.size());
}

TEST_CASE("the variable map covers the R and Z blocks") {
  Pipeline p = build(6, 6, 1);
  auto reduced = reduce_zippers(p.zippers);
  const int k = 3;
  EncodeOptions opts;
  opts.mode = EncodeMode::kExhaustive;
  CnfInstance cnf = encode_k_cover(p.complex, reduced, k, opts);
  std::ostringstream out;
  write_varmap(out, cnf);
  std::istringstream in(out.str());
  size_t r_lines = 0, z_lines = 0;
  std::string kind;
  while (in >> kind) {
    std::string rest;
    std::getline(in, rest);
    if (kind == "R") ++r_lines;
    else if (kind == "Z") ++z_lines;
  }
  CHECK(r_lines == static_cast<size_t>(p.f.num_states()) * k);
  size_t expected_z = 0;
  for (const ZipperConstraint& z : reduced)
    expected_z += static_cast<size_t>(k) * (k + z.u_set.size());
  CHECK(z_lines == expected_z);
}

TEST_CASE("bad arguments are rejected") {
  Pipeline p = build(7, 6, 1);
  auto reduced = reduce_zippers(p.zippers);
  CHECK_THROWS_AS(encode_k_cover(p.complex, reduced, 0), std::invalid_argument);
  // The exhaustive mode refuses to scan 2^t subsets past its cap.
  EncodeOptions opts;
  opts.mode = EncodeMode::kExhaustive;
  opts.max_exhaustive_sets = 8;
  CHECK_THROWS_AS(encode_k_cover(p.complex, reduced, 2, opts),
                  std::runtime_error);
}
