// Tests for the core filter type: construction, tracing semantics,
// determinization, simulation checking, and serialization.

#include <algorithm>
#include <set>
#include <sstream>
#include <vector>

#include <catch2/catch_amalgamated.hpp>
#include <nlohmann/json.hpp>

#include "filtermin/filter.hh"
#include "filtermin/instances.hh"

using namespace filtermin;

namespace {

// A small two-row filter used throughout:
//   s0 -a-> s1 -b-> s3(red)
//   s0 -b-> s2 -b-> s4(blue)
Filter two_branch() {
  Filter f;
  f.add_state("s0", {"white"});
  f.add_state("s1", {"white"});
  f.add_state("s2", {"white"});
  f.add_state("s3", {"red"});
  f.add_state("s4", {"blue"});
  f.add_transition("s0", "s1", "a");
  f.add_transition("s0", "s2", "b");
  f.add_transition("s1", "s3", "b");
  f.add_transition("s2", "s4", "b");
  f.mark_initial("s0");
  f.freeze();
  return f;
}

// Naive reference tracer sharing nothing with the library's successor
// index: walks the edge list directly.
StateSet naive_reached(const Filter& f, const StateSet& from, const ObsString& s) {
  std::set<StateId> cur(from.begin(), from.end());
  for (ObsId y : s) {
    std::set<StateId> next;
    for (StateId v : cur)
      for (const auto& [to, obs] : f.edges_from(v))
        if (std::count(obs.begin(), obs.end(), y))
          next.insert(to);
    cur = std::move(next);
  }
  return StateSet(cur.begin(), cur.end());
}

// All observation strings over f's alphabet up to the given length.
std::vector<ObsString> all_strings(const Filter& f, int max_len) {
  std::vector<ObsString> out{{}};
  size_t level_begin = 0;
  for (int l = 0; l < max_len; ++l) {
    size_t level_end = out.size();
    for (size_t i = level_begin; i < level_end; ++i)
      for (ObsId y = 0; y < f.num_obs(); ++y) {
        ObsString s = out[i];
        s.push_back(y);
        out.push_back(std::move(s));
      }
    level_begin = level_end;
  }
  return out;
}

}  // namespace

TEST_CASE("set helpers canonicalize and compare") {
  CHECK(make_set({3, 1, 2, 1}) == StateSet{1, 2, 3});
  CHECK(set_contains(make_set({1, 5}), 5));
  CHECK_FALSE(set_contains(make_set({1, 5}), 2));
  CHECK(is_subset({1, 3}, {1, 2, 3}));
  CHECK_FALSE(is_subset({1, 4}, {1, 2, 3}));
  CHECK(is_subset({}, {}));
  CHECK(set_union({1, 3}, {2, 3}) == StateSet{1, 2, 3});
  CHECK(set_intersection({1, 2, 4}, {2, 3, 4}) == StateSet{2, 4});
}

TEST_CASE("freeze validates the structure") {
  SECTION("empty output set is rejected at freeze") {
    Filter f;
    f.add_state("x", {});
    f.mark_initial("x");
    CHECK_THROWS_AS(f.freeze(), std::invalid_argument);
  }
  SECTION("missing initial state is rejected") {
    Filter f;
    f.add_state("x", {"c"});
    CHECK_THROWS_AS(f.freeze(), std::invalid_argument);
  }
  SECTION("no states is rejected") {
    Filter f;
    CHECK_THROWS_AS(f.freeze(), std::invalid_argument);
  }
  SECTION("unknown names in transitions are rejected") {
    Filter f;
    f.add_state("x", {"c"});
    CHECK_THROWS_AS(f.add_transition("x", "nope", "a"), std::invalid_argument);
  }
}

TEST_CASE("tracing follows the transition relation") {
  Filter f = two_branch();
  ObsId a = *f.find_obs("a"), b = *f.find_obs("b");

  CHECK(reached(f, {}) == StateSet{*f.find_state("s0")});
  CHECK(reached(f, {a}) == StateSet{*f.find_state("s1")});
  CHECK(reached(f, {a, b}) == StateSet{*f.find_state("s3")});
  CHECK(reached(f, {b, b}) == StateSet{*f.find_state("s4")});
  // Crashing strings reach nothing and report nothing.
  CHECK(reached(f, {a, a}).empty());
  CHECK(outputs_of(f, {a, a}).empty());
  CHECK_FALSE(in_language(f, {a, a}));
  CHECK(in_language(f, {}));

  LabelSet after_ab = outputs_of(f, {a, b});
  REQUIRE(after_ab.size() == 1);
  CHECK(f.label_name(after_ab[0]) == "red");
}

TEST_CASE("tracing agrees with a naive edge-walking reference") {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    RandomFilterOptions opts;
    opts.num_states = 7;
    opts.num_obs = 3;
    opts.nondet_percent = (seed % 2) ? 40 : 0;
    opts.seed = seed;
    Filter f = random_filter(opts);
    for (const ObsString& s : all_strings(f, 4)) {
      CAPTURE(seed, f.format_string(s));
      CHECK(reached(f, s) == naive_reached(f, f.initial(), s));
    }
  }
}

TEST_CASE("determinization preserves outputs for every string") {
  for (uint64_t seed = 1; seed <= 15; ++seed) {
    RandomFilterOptions opts;
    opts.num_states = 6;
    opts.num_obs = 2;
    opts.nondet_percent = 50;
    opts.num_labels = 3;
    opts.seed = seed;
    Filter f = random_filter(opts);
    Filter d = determinize(f);
    CHECK(is_deterministic(d).deterministic);
    for (const ObsString& s : all_strings(f, 5)) {
      ObsString t;  // translate ids by name; alphabets may be ordered alike anyway
      for (ObsId y : s) t.push_back(*d.find_obs(f.obs_name(y)));
      CAPTURE(seed, f.format_string(s));
      CHECK(outputs_of(f, s).size() == outputs_of(d, t).size());
      LabelSet lhs = outputs_of(f, s);
      std::set<std::string> lhs_names, rhs_names;
      for (LabelId c : lhs) lhs_names.insert(f.label_name(c));
      for (LabelId c : outputs_of(d, t)) rhs_names.insert(d.label_name(c));
      CHECK(lhs_names == rhs_names);
    }
  }
}

TEST_CASE("nondeterminism witnesses are real") {
  Filter f;
  f.add_state("p", {"c"});
  f.add_state("q", {"c"});
  f.add_state("r", {"d"});
  f.add_transition("p", "q", "a");
  f.add_transition("p", "r", "a");
  f.mark_initial("p");
  f.freeze();
  CHECK_FALSE(is_deterministic(f).deterministic);
  auto w = nondeterminism_witness(f);
  REQUIRE(w.has_value());
  CHECK(reached(f, *w).size() >= 2);

  CHECK(is_deterministic(two_branch()).deterministic);
  CHECK_FALSE(nondeterminism_witness(two_branch()).has_value());
}

TEST_CASE("output simulation accepts itself and refuses a broken copy") {
  Filter f = two_branch();
  CHECK(output_simulates(f, f).holds);

  // A copy that answers the wrong label after "ab".
  Filter g;
  g.add_state("s0", {"white"});
  g.add_state("s1", {"white"});
  g.add_state("s2", {"white"});
  g.add_state("s3", {"blue"});  // should be red
  g.add_state("s4", {"blue"});
  g.add_transition("s0", "s1", "a");
  g.add_transition("s0", "s2", "b");
  g.add_transition("s1", "s3", "b");
  g.add_transition("s2", "s4", "b");
  g.mark_initial("s0");
  g.freeze();
  auto v = output_simulates(g, f);
  CHECK_FALSE(v.holds);
  CHECK(f.format_string(v.counterexample) == "ab");

  // A copy that crashes on a live string.
  Filter h;
  h.add_state("s0", {"white"});
  h.add_state("s1", {"white"});
  h.add_state("s3", {"red"});
  h.add_transition("s0", "s1", "a");
  h.add_transition("s1", "s3", "b");
  h.mark_initial("s0");
  h.freeze();
  auto u = output_simulates(h, f);
  CHECK_FALSE(u.holds);
  CHECK(f.format_string(u.counterexample) == "b");
}

TEST_CASE("simulation allows answering with a nonempty subset of outputs") {
  Filter ref;
  ref.add_state("m", {"c1", "c2"});
  ref.mark_initial("m");
  ref.freeze();
  Filter cand;
  cand.add_state("m", {"c2"});
  cand.mark_initial("m");
  cand.freeze();
  CHECK(output_simulates(cand, ref).holds);
  CHECK_FALSE(output_simulates(ref, cand).holds);  // superset is not allowed
}

TEST_CASE("JSON round trip is lossless") {
  for (const std::string& name : builtin_names()) {
    Filter f = builtin(name).filter;
    Filter g = Filter::from_json(f.to_json());
    CHECK(f.to_json() == g.to_json());
    CHECK(f.num_states() == g.num_states());
    CHECK(output_simulates(f, g).holds == output_simulates(g, f).holds);
  }
}

TEST_CASE("file save and load round trip") {
  Filter f = builtin("drone").filter;
  std::string path = "test_filter_roundtrip.json";
  f.save_file(path);
  Filter g = Filter::load_file(path);
  CHECK(f.to_json() == g.to_json());
  std::remove(path.c_str());
  CHECK_THROWS(Filter::load_file("does_not_exist_anywhere.json"));
}

TEST_CASE("DOT export names every state") {
  Filter f = two_branch();
  std::string dot = f.to_dot();
  CHECK(dot.find("digraph") != std::string::npos);
  for (StateId v = 0; v < f.num_states(); ++v)
    CHECK(dot.find(f.state_name(v)) != std::string::npos);
}

TEST_CASE("string formatting and parsing round trip") {
  Filter f = two_branch();
  ObsId a = *f.find_obs("a"), b = *f.find_obs("b");
  ObsString s{a, b, b};
  CHECK(f.parse_string(f.format_string(s)) == s);
  CHECK(f.format_string({}) == "<empty>");
  CHECK(f.parse_string("<empty>").empty());
  CHECK_THROWS_AS(f.parse_string("a z"), std::invalid_argument);
}

TEST_CASE("unreachable states are pruned and reported") {
  Filter f;
  f.add_state("s0", {"c"});
  f.add_state("s1", {"c"});
  f.add_state("lost", {"c"});
  f.add_transition("s0", "s1", "a");
  f.add_transition("lost", "s1", "a");
  f.mark_initial("s0");
  f.freeze();
  CHECK(reachable_states(f) ==
        make_set({*f.find_state("s0"), *f.find_state("s1")}));
  std::vector<std::string> dropped;
  Filter g = prune_unreachable(f, &dropped);
  CHECK(g.num_states() == 2);
  CHECK(dropped == std::vector<std::string>{"lost"});
  CHECK(output_simulates(g, f).holds);
}

TEST_CASE("restricting outputs pins each state to one label") {
  Filter f = builtin("split-choice").filter;
  CHECK_FALSE(is_single_outputting(f));
  std::vector<LabelId> choice(f.num_states());
  for (StateId v = 0; v < f.num_states(); ++v)
    choice[v] = f.outputs(v).front();
  Filter g = restrict_outputs(f, choice);
  CHECK(is_single_outputting(g));
  CHECK(g.num_states() == f.num_states());

  // A label the state does not carry is rejected.
  StateId wa = *f.find_state("wA");
  REQUIRE(f.outputs(wa).size() >= 2);
  std::vector<LabelId> bad = choice;
  bad[wa] = -1;
  CHECK_THROWS_AS(restrict_outputs(f, bad), std::invalid_argument);
}
