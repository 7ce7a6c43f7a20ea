// filtermin.cc -- command line front end: minimize a filter, emit or
// inspect the CNF encoding, verify a candidate against a reference,
// list zipper constraints, run the brute-force oracle, generate
// instances, and run the benchmark sweeps.
//
// Exit codes: 0 success (property holds / result certified), 1 checked
// property fails (verify negative), 2 usage or input error, 3 result
// produced but not certified (solver gave up or timed out).
//
// This file is part of filtermin, distributed under the MIT license.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "filtermin/compat.hh"
#include "filtermin/cover.hh"
#include "filtermin/encode.hh"
#include "filtermin/filter.hh"
#include "filtermin/instances.hh"
#include "filtermin/minimize.hh"
#include "filtermin/oracle.hh"
#include "filtermin/solver.hh"
#include "filtermin/zipper.hh"

namespace {

using filtermin::Cover;
using filtermin::EncodeMode;
using filtermin::Filter;
using filtermin::KStatus;
using filtermin::MinimizeOptions;
using filtermin::MinimizeReport;
using filtermin::StateSet;

constexpr int kExitOk = 0;
constexpr int kExitFails = 1;
constexpr int kExitUsage = 2;
constexpr int kExitUncertified = 3;

// "" or "-" read the filter from stdin.
Filter load_filter(const std::string& path) {
  if (path.empty() || path == "-") {
    nlohmann::json j = nlohmann::json::parse(std::cin);
    return Filter::from_json(j);
  }
  return Filter::load_file(path);
}

// "" or "-" write to stdout.
void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out)
    throw std::runtime_error("write failed: " + path);
}

std::string normalize_backend(const std::string& b) {
  if (b.empty())
    return filtermin::default_solver_backend();
  if (b == "builtin" || b.rfind("exec:", 0) == 0)
    return b;
  // Bare path convenience: treat it as an external solver command.
  return "exec:" + b;
}

EncodeMode parse_encoding(const std::string& s) {
  if (s == "minimal-nonface")
    return EncodeMode::kMinimalNonface;
  if (s == "paper-exact")
    return EncodeMode::kExhaustive;
  throw CLI::ValidationError(
      "--encoding", "expected 'minimal-nonface' or 'paper-exact', got '" + s + "'");
}

// Shared preprocessing for the subcommands that need a deterministic
// input (minimize does this internally and reports it via warnings).
Filter prepare_deterministic(const Filter& in) {
  Filter f = in;
  if (!filtermin::is_deterministic(f).deterministic) {
    std::cerr << "note: input is nondeterministic; applying subset construction\n";
    f = filtermin::determinize(f);
  }
  std::vector<std::string> dropped;
  Filter pruned = filtermin::prune_unreachable(f, &dropped);
  if (!dropped.empty())
    std::cerr << "note: dropped " << dropped.size() << " unreachable state(s)\n";
  return pruned;
}

std::string status_name(KStatus s) {
  switch (s) {
    case KStatus::kSat:                return "sat";
    case KStatus::kUnsat:              return "unsat";
    case KStatus::kSatByConstruction:  return "sat (by construction)";
    case KStatus::kUnsatByBound:       return "unsat (below lower bound)";
    case KStatus::kUnknown:            return "unknown";
  }
  return "?";
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3fs", s);
  return buf;
}

void print_report(std::ostream& os, const Filter& input, const MinimizeReport& rep) {
  os << "states in:      " << input.num_states() << "\n";
  os << "minimal size:   " << rep.minimal_size << "\n";
  if (rep.certified)
    os << "certified:      yes (" << rep.certificate << ")\n";
  else
    os << "certified:      no (best size found; minimality unproven)\n";
  os << "lower bound:    " << rep.lower_bound << "\n";
  os << "constraints:    " << rep.zipper_count << " generated, "
     << rep.zippers_encoded << " encoded"
     << (rep.zippers_complete ? "" : " (generation truncated)") << "\n";
  os << "times:          constraints " << fmt_seconds(rep.t_zipper)
     << ", encode " << fmt_seconds(rep.t_encode)
     << ", solve " << fmt_seconds(rep.t_solve) << "\n";
  os << "search:\n";
  for (const auto& o : rep.outcomes) {
    std::ostringstream line;
    line << "  k=" << std::left << std::setw(5) << o.k
         << std::setw(28) << status_name(o.status);
    if (o.decoded_size >= 0)
      line << "-> " << o.decoded_size << " parts";
    if (o.t_encode > 0.0 || o.t_solve > 0.0)
      line << "  (encode " << fmt_seconds(o.t_encode)
           << ", solve " << fmt_seconds(o.t_solve) << ")";
    os << line.str() << "\n";
  }
  os << "verified:       deterministic and output-simulating against the input\n";
  for (const auto& w : rep.warnings)
    os << "warning:        " << w << "\n";
  os << "cover:\n";
  std::istringstream cover_lines(format_cover(input, rep.cover));
  for (std::string line; std::getline(cover_lines, line);)
    os << "  " << line << "\n";
}

// ---- subcommand drivers ----

struct MinimizeArgs {
  std::string input;
  std::string out;
  std::string dot;
  std::string mode = "auto";
  std::string encoding = "minimal-nonface";
  std::string solver;
  bool binary_search = false;
  bool symmetry_breaking = false;
  double timeout = 0.0;
};

int cmd_minimize(const MinimizeArgs& a) {
  Filter input = load_filter(a.input);
  MinimizeOptions opts;
  opts.encoding.mode = parse_encoding(a.encoding);
  opts.encoding.symmetry_breaking = a.symmetry_breaking;
  opts.binary_search = a.binary_search;
  opts.solver.backend = normalize_backend(a.solver);
  opts.solver.timeout_seconds = a.timeout;
  if (a.mode == "so") {
    opts.require_single_output = true;
  } else if (a.mode != "auto" && a.mode != "mo") {
    throw CLI::ValidationError("--mode",
                               "expected 'auto', 'so' or 'mo', got '" + a.mode + "'");
  }
  MinimizeReport rep = filtermin::minimize(input, opts);
  print_report(std::cout, input, rep);
  if (!a.out.empty())
    write_text(a.out, rep.minimal_filter.to_json().dump(2) + "\n");
  if (!a.dot.empty())
    write_text(a.dot, rep.minimal_filter.to_dot());
  return rep.certified ? kExitOk : kExitUncertified;
}

struct EncodeArgs {
  std::string input;
  std::string out;
  std::string map;
  std::string encoding = "minimal-nonface";
  int k = 0;
  bool symmetry_breaking = false;
};

int cmd_encode(const EncodeArgs& a) {
  Filter f = prepare_deterministic(load_filter(a.input));
  filtermin::GroupOracle oracle(f);
  auto complex = filtermin::compatibility_complex(f, oracle);
  auto zs = filtermin::generate_zippers(f, complex);
  if (!zs.complete)
    std::cerr << "note: constraint generation truncated; the formula is a "
                 "sound relaxation\n";
  auto reduced = filtermin::reduce_zippers(zs.constraints);
  filtermin::EncodeOptions eopts;
  eopts.mode = parse_encoding(a.encoding);
  eopts.symmetry_breaking = a.symmetry_breaking;
  auto cnf = filtermin::encode_k_cover(complex, reduced, a.k, eopts);

  std::ostringstream dimacs;
  filtermin::write_dimacs(dimacs, cnf);
  write_text(a.out, dimacs.str());

  std::string map_path = a.map;
  if (map_path.empty() && !a.out.empty() && a.out != "-")
    map_path = a.out + ".map";
  if (!map_path.empty()) {
    std::ostringstream varmap;
    filtermin::write_varmap(varmap, cnf);
    write_text(map_path, varmap.str());
  }
  std::cerr << "encoded k=" << a.k << ": " << cnf.num_vars << " variables, "
            << cnf.clauses.size() << " clauses ("
            << zs.constraints.size() << " constraints, "
            << reduced.size() << " after reduction)\n";
  return kExitOk;
}

struct VerifyArgs {
  std::string reference;
  std::string candidate;
};

int cmd_verify(const VerifyArgs& a) {
  if ((a.reference.empty() || a.reference == "-") &&
      (a.candidate.empty() || a.candidate == "-"))
    throw std::runtime_error("only one of --reference/--candidate may be stdin");
  Filter ref = load_filter(a.reference);
  Filter cand = load_filter(a.candidate);
  auto v = filtermin::verify_solution(ref, cand);
  std::cout << "candidate states:  " << cand.num_states() << "\n";
  std::cout << "deterministic:     " << (v.determinism.deterministic ? "yes" : "no");
  if (!v.determinism.deterministic)
    std::cout << " (" << v.determinism.reason << ")";
  std::cout << "\n";
  std::cout << "output-simulates:  " << (v.simulation.holds ? "yes" : "no");
  if (!v.simulation.holds)
    std::cout << " (on \"" << ref.format_string(v.simulation.counterexample)
              << "\": " << v.simulation.detail << ")";
  std::cout << "\n";
  std::cout << "verdict:           " << (v.ok() ? "PASS" : "FAIL") << "\n";
  return v.ok() ? kExitOk : kExitFails;
}

struct ZippersArgs {
  std::string input;
  std::string dot;
  bool reduced = false;
};

int cmd_zippers(const ZippersArgs& a) {
  Filter f = prepare_deterministic(load_filter(a.input));
  filtermin::GroupOracle oracle(f);
  auto complex = filtermin::compatibility_complex(f, oracle);
  auto zs = filtermin::generate_zippers(f, complex);
  const auto* shown = &zs.constraints;
  std::vector<filtermin::ZipperConstraint> reduced;
  if (a.reduced) {
    reduced = filtermin::reduce_zippers(zs.constraints);
    shown = &reduced;
  }
  std::cout << filtermin::format_zippers(f, *shown);
  std::cout << "count: " << zs.constraints.size()
            << (zs.complete ? "" : " (truncated)");
  if (a.reduced)
    std::cout << ", " << reduced.size() << " after reduction";
  std::cout << "\n";
  if (!a.dot.empty())
    write_text(a.dot, filtermin::compatibility_graph(f).to_dot(f));
  return kExitOk;
}

struct OracleArgs {
  std::string input;
  std::string out;
  int max_states = 10;
};

int cmd_oracle(const OracleArgs& a) {
  Filter f = prepare_deterministic(load_filter(a.input));
  filtermin::OracleOptions opts;
  opts.max_states = a.max_states;
  auto res = filtermin::brute_force_minimize(f, opts);
  std::cout << "minimal size:   " << res.minimal_size << "\n";
  std::cout << "explored:       " << res.explored << " partial covers\n";
  std::cout << "cover:\n";
  std::istringstream cover_lines(format_cover(f, res.witness_cover));
  for (std::string line; std::getline(cover_lines, line);)
    std::cout << "  " << line << "\n";
  if (!a.out.empty())
    write_text(a.out, res.minimal_filter.to_json().dump(2) + "\n");
  return kExitOk;
}

struct GenArgs {
  std::string family = "nxm";
  std::string out;
  std::string dot;
  int n = 2;
  int m = 3;
  int states = 6;
  int obs = 3;
  int labels = 3;
  int max_outputs = 1;
  int nondet = 0;
  bool acyclic = false;
  uint64_t seed = 1;
  bool list_builtins = false;
};

int cmd_gen(const GenArgs& a) {
  if (a.list_builtins) {
    for (const auto& name : filtermin::builtin_names())
      std::cout << name << "\n";
    return kExitOk;
  }
  Filter f;
  if (a.family == "nxm") {
    f = filtermin::gen_nxm(a.n, a.m);
  } else if (a.family == "grid") {
    f = filtermin::gen_grid(a.n);
  } else if (a.family == "random") {
    filtermin::RandomFilterOptions r;
    r.num_states = a.states;
    r.num_obs = a.obs;
    r.num_labels = a.labels;
    r.max_outputs_per_state = a.max_outputs;
    r.nondet_percent = a.nondet;
    r.acyclic = a.acyclic;
    r.seed = a.seed;
    f = filtermin::random_filter(r);
  } else if (a.family.rfind("builtin:", 0) == 0) {
    f = filtermin::builtin(a.family.substr(8)).filter;
  } else {
    throw CLI::ValidationError(
        "--family",
        "expected 'nxm', 'grid', 'random' or 'builtin:<name>', got '" + a.family + "'");
  }
  write_text(a.out, f.to_json().dump(2) + "\n");
  if (!a.dot.empty())
    write_text(a.dot, f.to_dot());
  return kExitOk;
}

struct BenchArgs {
  std::string out;
  double timeout = 110.0;
  int nxm_min = 4;
  int nxm_max = 6;
  int grid_min = 6;
  int grid_max = 16;
};

int cmd_bench(const BenchArgs& a) {
  struct Row {
    std::string name;
    Filter filter;
  };
  std::vector<Row> rows;
  for (const char* name : {"counterexample-nd", "split-choice", "drone"})
    rows.push_back({name, filtermin::builtin(name).filter});
  for (int n = a.nxm_min; n <= a.nxm_max; ++n)
    for (int m = a.nxm_min; m <= a.nxm_max; ++m)
      rows.push_back({"nxm-" + std::to_string(n) + "x" + std::to_string(m),
                      filtermin::gen_nxm(n, m)});
  for (int n = a.grid_min; n <= a.grid_max; n += 2)
    rows.push_back({"grid-" + std::to_string(n), filtermin::gen_grid(n)});

  std::ostringstream csv;
  csv << "instance,states_in,states_out,zipper_count,t_zipper,t_encode,t_solve,certified\n";
  for (const auto& row : rows) {
    std::cerr << "bench: " << row.name << " (" << row.filter.num_states()
              << " states) ..." << std::flush;
    auto t0 = std::chrono::steady_clock::now();
    MinimizeOptions opts;
    opts.solver.timeout_seconds = a.timeout;
    MinimizeReport rep = filtermin::minimize(row.filter, opts);
    double wall = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0).count();
    char line[256];
    std::snprintf(line, sizeof line, "%s,%d,%d,%zu,%.6f,%.6f,%.6f,%d\n",
                  row.name.c_str(), row.filter.num_states(), rep.minimal_size,
                  rep.zipper_count, rep.t_zipper, rep.t_encode, rep.t_solve,
                  rep.certified ? 1 : 0);
    csv << line;
    std::cerr << " size " << rep.minimal_size
              << (rep.certified ? "" : " (uncertified)")
              << ", " << fmt_seconds(wall) << "\n";
  }
  write_text(a.out, csv.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "filtermin: exact state minimization of combinatorial filters\n"
      "Filters are read and written as JSON; '-' means stdin/stdout."};
  app.require_subcommand(1);
  app.set_version_flag("--version", "filtermin 1.0.0");
  int rc = kExitOk;

  MinimizeArgs ma;
  auto* mc = app.add_subcommand(
      "minimize", "Compute a minimum-state equivalent filter (exact, SAT-based)");
  mc->add_option("--input,-i", ma.input, "Input filter JSON (default: stdin)");
  mc->add_option("--out,-o", ma.out, "Write the minimal filter JSON here");
  mc->add_option("--dot", ma.dot, "Write the minimal filter as Graphviz DOT");
  mc->add_option("--mode", ma.mode,
                 "auto|so|mo; 'so' rejects multi-outputting inputs")
      ->capture_default_str();
  mc->add_option("--encoding", ma.encoding,
                 "minimal-nonface|paper-exact (expanded form with closed-form "
                 "variable counts)")
      ->capture_default_str();
  mc->add_option("--solver", ma.solver,
                 "builtin, exec:<command>, or a bare solver path "
                 "(default: $FILTERMIN_SOLVER or builtin)");
  mc->add_option("--timeout", ma.timeout, "Per-solve timeout in seconds (0 = none)");
  mc->add_flag("--binary-search", ma.binary_search,
               "Probe k by bisection instead of linear descent");
  mc->add_flag("--symmetry-breaking", ma.symmetry_breaking,
               "Restrict state v to parts 1..v+1 in the encoding");
  mc->callback([&] { rc = cmd_minimize(ma); });

  EncodeArgs ea;
  auto* ec = app.add_subcommand(
      "encode", "Emit the size-k cover formula as DIMACS CNF plus a variable map");
  ec->add_option("--input,-i", ea.input, "Input filter JSON (default: stdin)");
  ec->add_option("--k", ea.k, "Cover size bound to encode")->required();
  ec->add_option("--out,-o", ea.out, "DIMACS output (default: stdout)");
  ec->add_option("--map", ea.map,
                 "Variable map output (default: <out>.map when --out is a file)");
  ec->add_option("--encoding", ea.encoding, "minimal-nonface|paper-exact")
      ->capture_default_str();
  ec->add_flag("--symmetry-breaking", ea.symmetry_breaking,
               "Restrict state v to parts 1..v+1");
  ec->callback([&] { rc = cmd_encode(ea); });

  VerifyArgs va;
  auto* vc = app.add_subcommand(
      "verify", "Check that a candidate filter can replace a reference filter");
  vc->add_option("--reference,-r", va.reference, "Reference filter JSON")->required();
  vc->add_option("--candidate,-c", va.candidate, "Candidate filter JSON")->required();
  vc->callback([&] { rc = cmd_verify(va); });

  ZippersArgs za;
  auto* zc = app.add_subcommand(
      "zippers", "List the merge side-conditions (zipper constraints) of a filter");
  zc->add_option("--input,-i", za.input, "Input filter JSON (default: stdin)");
  zc->add_flag("--reduced", za.reduced, "Show the reduced, logically equivalent set");
  zc->add_option("--dot", za.dot, "Write the pairwise compatibility graph as DOT");
  zc->callback([&] { rc = cmd_zippers(za); });

  OracleArgs oa;
  auto* oc = app.add_subcommand(
      "oracle", "Brute-force reference minimizer (small inputs only)");
  oc->add_option("--input,-i", oa.input, "Input filter JSON (default: stdin)");
  oc->add_option("--max-states", oa.max_states, "Refuse inputs larger than this")
      ->capture_default_str();
  oc->add_option("--out,-o", oa.out, "Write the minimal filter JSON here");
  oc->callback([&] { rc = cmd_oracle(oa); });

  GenArgs ga;
  auto* gc = app.add_subcommand("gen", "Generate an instance filter as JSON");
  gc->add_option("--family", ga.family,
                 "nxm|grid|random|builtin:<name>")->capture_default_str();
  gc->add_option("--n", ga.n, "Rows (nxm) or side length (grid)")
      ->capture_default_str();
  gc->add_option("--m", ga.m, "Row length (nxm)")->capture_default_str();
  gc->add_option("--states", ga.states, "Random family: state count")
      ->capture_default_str();
  gc->add_option("--obs", ga.obs, "Random family: observation count")
      ->capture_default_str();
  gc->add_option("--labels", ga.labels, "Random family: output label count")
      ->capture_default_str();
  gc->add_option("--max-outputs", ga.max_outputs,
                 "Random family: max output labels per state")
      ->capture_default_str();
  gc->add_option("--nondet", ga.nondet,
                 "Random family: percent of transitions doubled up")
      ->capture_default_str();
  gc->add_flag("--acyclic", ga.acyclic, "Random family: forward edges only");
  gc->add_option("--seed", ga.seed, "Random family: generator seed")
      ->capture_default_str();
  gc->add_option("--out,-o", ga.out, "Output path (default: stdout)");
  gc->add_option("--dot", ga.dot, "Also write the filter as Graphviz DOT");
  gc->add_flag("--list-builtins", ga.list_builtins, "List built-in instance names");
  gc->callback([&] { rc = cmd_gen(ga); });

  BenchArgs ba;
  auto* bc = app.add_subcommand(
      "bench", "Run the benchmark sweeps and emit CSV timings");
  bc->add_option("--out,-o", ba.out, "CSV output (default: stdout)");
  bc->add_option("--timeout", ba.timeout, "Per-solve timeout in seconds")
      ->capture_default_str();
  bc->add_option("--nxm-max", ba.nxm_max, "Largest n and m in the nxm sweep")
      ->capture_default_str();
  bc->add_option("--grid-max", ba.grid_max, "Largest side length in the grid sweep")
      ->capture_default_str();
  bc->callback([&] { rc = cmd_bench(ba); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return rc;
}
