// instances.cc -- built-in example filters, parametric families, random
// generation.
//
// This file is part of filtermin, distributed under the MIT license.

#include "filtermin/instances.hh"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

#include "filtermin/minimize.hh"

namespace filtermin {

namespace {

// Eight states whose compatibility graph has the path w5 - w6 - w7 among
// its edges: w5 and w7 are each compatible with w6 but not with each
// other, so quotienting by connected classes merges all three and breaks
// determinism, while the unique minimum cover keeps {w5,w6} and {w6,w7}
// as distinct, overlapping parts.
Filter make_counterexample_nd() {
  Filter f;
  f.add_state("w0", {"cyan"});
  f.add_state("w1", {"green"});
  f.add_state("w2", {"green"});
  f.add_state("w3", {"red"});
  f.add_state("w4", {"red"});
  f.add_state("w5", {"orange"});
  f.add_state("w6", {"orange"});
  f.add_state("w7", {"orange"});
  f.add_transition("w0", "w1", "a");
  f.add_transition("w0", "w2", "b");
  f.add_transition("w0", "w3", "c");
  f.add_transition("w1", "w5", "a");
  f.add_transition("w1", "w4", "b");
  f.add_transition("w2", "w6", "a");
  f.add_transition("w3", "w6", "b");
  f.add_transition("w4", "w7", "b");
  f.add_transition("w5", "w5", "c");
  f.add_transition("w7", "w0", "c");
  f.mark_initial("w0");
  f.freeze();
  return f;
}

// A patrol drone over eight regions.  The observation after each move is
// the sign of the brightness change.  Regions L and K can be handled
// flying or driving; committing them to flying splits the driving chain
// B -> D (their joint futures then mix driving regions with L/K), so the
// best single-capability assignment needs four states while keeping both
// options open needs only three.
Filter make_drone() {
  Filter f;
  f.add_state("G", {"fly"});           // launch pad, brightness 2
  f.add_state("F", {"fly"});           // field, brightness 3
  f.add_state("Y", {"fly"});           // yard, brightness 3
  f.add_state("P", {"fly"});           // park, brightness 1
  f.add_state("B", {"drive"});         // basement, brightness 1
  f.add_state("D", {"drive"});         // depot, brightness 2
  f.add_state("L", {"fly", "drive"});  // lot, brightness 2
  f.add_state("K", {"fly", "drive"});  // dock, brightness 2
  f.add_transition("G", "F", "+");
  f.add_transition("G", "B", "-");
  f.add_transition("F", "Y", "=");
  f.add_transition("Y", "P", "-");
  f.add_transition("P", "L", "+");
  f.add_transition("B", "B", "=");
  f.add_transition("B", "D", "+");
  f.add_transition("D", "K", "=");
  f.add_transition("L", "K", "=");
  f.add_transition("K", "L", "=");
  f.mark_initial("G");
  f.freeze();
  return f;
}

}  // namespace

Filter gen_nxm(int n, int m) {
  if (n < 1 || m < 2)
    throw std::invalid_argument("gen_nxm: need n >= 1 rows and m >= 2 columns");
  Filter f;
  f.add_state("w0", {"c0"});
  std::vector<std::string> all_row_labels;
  for (int i = 1; i <= n; ++i)
    all_row_labels.push_back("c" + std::to_string(i));
  std::vector<std::vector<std::string>> row(n + 1);
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= m; ++j) {
      std::string name = "r" + std::to_string(i) + "_" + std::to_string(j);
      row[i].push_back(name);
      f.add_state(name, {"c" + std::to_string(i)});
    }
  }
  f.add_state("wA", all_row_labels);
  f.add_state("wB", all_row_labels);

  for (int i = 1; i <= n; ++i) {
    f.add_transition("w0", row[i][0], "o" + std::to_string(i));
    for (int j = 0; j + 1 < m; ++j)
      f.add_transition(row[i][j], row[i][j + 1], "y");
    f.add_transition(row[i][0], row[i][0], "z");
    f.add_transition(row[i][m - 1], i % 2 == 1 ? "wA" : "wB", "z");
  }
  f.add_transition("wA", "wB", "z");
  f.add_transition("wB", "wA", "z");
  f.mark_initial("w0");
  f.freeze();
  return f;
}

Filter gen_grid(int n, const GridOptions& opts) {
  if (n < 2)
    throw std::invalid_argument("gen_grid: need n >= 2");
  std::vector<GridExit> exits = opts.exits;
  if (exits.empty()) {
    // Two boundary exits and, space permitting, two interior ones, with
    // row 1 holding both kinds.
    exits.push_back({1, 0});
    exits.push_back({n - 2, n - 1});
    if (n == 3) {
      exits.push_back({1, 1});
    } else if (n >= 4) {
      exits.push_back({1, 2});
      exits.push_back({n - 2, 2});
    }
  }
  for (const GridExit& e : exits)
    if (e.row < 0 || e.row >= n || e.col < 0 || e.col >= n)
      throw std::invalid_argument("gen_grid: exit outside the grid");

  auto cell_status = [&exits, n](int r, int c) -> std::string {
    for (const GridExit& e : exits)
      if (e.row == r && e.col == c)
        return (r == 0 || r == n - 1 || c == 0 || c == n - 1) ? "outer"
                                                              : "inner";
    return "none";
  };

  // Belief states of tracking a walker who drifts at most one row per
  // step and announces the row it lands in: after the first announcement
  // the belief is always exactly one full row, so this filter *is* the
  // determinization of the cell-level process, with n+1 states.
  Filter f;
  f.add_state("start", {cell_status(0, 0)});
  for (int r = 0; r < n; ++r) {
    std::set<std::string> labels;
    for (int c = 0; c < n; ++c)
      labels.insert(cell_status(r, c));
    f.add_state("row" + std::to_string(r),
                std::vector<std::string>(labels.begin(), labels.end()));
  }
  for (int y = 0; y <= 1 && y < n; ++y)
    f.add_transition("start", "row" + std::to_string(y), std::to_string(y));
  for (int r = 0; r < n; ++r)
    for (int y = std::max(0, r - 1); y <= std::min(n - 1, r + 1); ++y)
      f.add_transition("row" + std::to_string(r), "row" + std::to_string(y),
                       std::to_string(y));
  f.mark_initial("start");
  f.freeze();
  return f;
}

Filter random_filter(const RandomFilterOptions& opts) {
  if (opts.num_states < 1 || opts.num_obs < 1 || opts.num_labels < 1)
    throw std::invalid_argument("random_filter: sizes must be positive");
  if (opts.max_outputs_per_state < 1 ||
      opts.max_outputs_per_state > opts.num_labels)
    throw std::invalid_argument(
        "random_filter: max_outputs_per_state out of range");
  std::mt19937_64 rng(opts.seed);
  auto pick = [&rng](int n) { return static_cast<int>(rng() % uint64_t(n)); };

  Filter f;
  for (int v = 0; v < opts.num_states; ++v) {
    const int want = 1 + pick(opts.max_outputs_per_state);
    std::set<std::string> labels;
    while (static_cast<int>(labels.size()) < want)
      labels.insert("c" + std::to_string(pick(opts.num_labels)));
    f.add_state("q" + std::to_string(v),
                std::vector<std::string>(labels.begin(), labels.end()));
  }
  std::vector<ObsId> obs;
  for (int y = 0; y < opts.num_obs; ++y)
    obs.push_back(f.intern_obs(std::string(1, static_cast<char>('a' + y % 26)) +
                               (y < 26 ? "" : std::to_string(y / 26))));

  // used[v][y] marks occupied observation slots; one target per slot
  // keeps the filter deterministic by construction.
  std::vector<std::vector<char>> used(opts.num_states,
                                      std::vector<char>(opts.num_obs, 0));
  // Reachability: every state beyond the first hangs off an earlier one.
  for (int v = 1; v < opts.num_states; ++v) {
    for (;;) {
      const int u = pick(v);
      const int y = pick(opts.num_obs);
      if (used[u][y])
        continue;
      used[u][y] = 1;
      f.add_transition(u, v, obs[y]);
      break;
    }
  }
  // Extra edges on a fraction of the free slots.
  for (int v = 0; v < opts.num_states; ++v) {
    for (int y = 0; y < opts.num_obs; ++y) {
      if (used[v][y] || rng() % 100 >= 40)
        continue;
      int to;
      if (opts.acyclic) {
        if (v + 1 >= opts.num_states)
          continue;
        to = v + 1 + pick(opts.num_states - v - 1);
      } else {
        to = pick(opts.num_states);
      }
      used[v][y] = 1;
      f.add_transition(v, to, obs[y]);
    }
  }
  if (opts.nondet_percent > 0) {
    for (int v = 0; v < opts.num_states; ++v)
      for (int y = 0; y < opts.num_obs; ++y)
        if (used[v][y] && rng() % 100 < uint64_t(opts.nondet_percent))
          f.add_transition(v, pick(opts.num_states), obs[y]);
  }
  f.mark_initial(0);
  f.freeze();
  return f;
}

std::vector<std::string> builtin_names() {
  return {"counterexample-nd", "counterexample-nd-merged", "split-choice",
          "drone"};
}

BuiltinInstance builtin(const std::string& name) {
  BuiltinInstance b;
  b.spec.name = name;
  if (name == "counterexample-nd") {
    b.filter = make_counterexample_nd();
    b.spec.description =
        "eight states whose compatibility classes cannot simply be merged: "
        "the unique minimum cover has five overlapping parts";
    b.spec.minimal_size = 5;
    b.spec.zipper_count = 2;
    b.spec.nonpartition_minimum = true;
    b.spec.class_merge_nondeterministic = true;
  } else if (name == "counterexample-nd-merged") {
    b.filter = merge_by_compatibility_classes(make_counterexample_nd());
    b.spec.description =
        "the broken classwise merge of counterexample-nd: nondeterministic, "
        "kept for inspection";
  } else if (name == "split-choice") {
    b.filter = gen_nxm(2, 3);
    b.spec.description =
        "two rows of three states sharing two multi-output terminals; "
        "committing the terminals to either row's label early costs states";
    b.spec.minimal_size = 3;
    b.spec.choice_min = 4;
    b.spec.choice_max = 7;
    b.spec.choice_claims = {
        {{{"wA", "c1"}, {"wB", "c1"}}, 4},
        {{{"wA", "c2"}, {"wB", "c2"}}, 4},
        {{{"wA", "c1"}, {"wB", "c2"}}, 7},
        {{{"wA", "c2"}, {"wB", "c1"}}, 5},
    };
  } else if (name == "drone") {
    b.filter = make_drone();
    b.spec.description =
        "patrol drone over eight regions observing brightness changes; "
        "regions L and K can be flown or driven";
    b.spec.minimal_size = 3;
    b.spec.choice_claims = {
        {{{"L", "fly"}, {"K", "fly"}}, 4},
    };
  } else {
    throw std::invalid_argument("builtin: unknown instance \"" + name +
                                "\" (try: counterexample-nd, "
                                "counterexample-nd-merged, split-choice, drone)");
  }
  return b;
}

}  // namespace filtermin
