// solver.cc -- built-in conflict-driven clause-learning SAT solver, plus
// a subprocess bridge to any DIMACS-speaking solver.
//
// This file is part of filtermin, distributed under the MIT license.

#include "filtermin/solver.hh"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace filtermin {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Binary max-heap over variables keyed by activity, with an index map so
// membership tests and key increases are O(1)/O(log n).  Ties break
// toward the smaller variable index, which keeps runs reproducible.
class VarHeap {
 public:
  explicit VarHeap(const std::vector<double>& activity)
      : activity_(activity) {}

  void grow(int nvars) { pos_.assign(nvars + 1, -1); }
  bool contains(int v) const { return pos_[v] >= 0; }
  bool empty() const { return heap_.empty(); }

  void insert(int v) {
    if (contains(v))
      return;
    pos_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    up(pos_[v]);
  }

  void increased(int v) {
    if (contains(v))
      up(pos_[v]);
  }

  int pop_max() {
    const int top = heap_[0];
    pos_[top] = -1;
    heap_[0] = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
      pos_[heap_[0]] = 0;
      down(0);
    }
    return top;
  }

 private:
  bool before(int a, int b) const {
    return activity_[a] != activity_[b] ? activity_[a] > activity_[b] : a < b;
  }
  void up(int i) {
    const int v = heap_[i];
    while (i > 0) {
      const int parent = (i - 1) / 2;
      if (!before(v, heap_[parent]))
        break;
      heap_[i] = heap_[parent];
      pos_[heap_[i]] = i;
      i = parent;
    }
    heap_[i] = v;
    pos_[v] = i;
  }
  void down(int i) {
    const int v = heap_[i];
    const int n = static_cast<int>(heap_.size());
    for (;;) {
      int child = 2 * i + 1;
      if (child >= n)
        break;
      if (child + 1 < n && before(heap_[child + 1], heap_[child]))
        ++child;
      if (!before(heap_[child], v))
        break;
      heap_[i] = heap_[child];
      pos_[heap_[i]] = i;
      i = child;
    }
    heap_[i] = v;
    pos_[v] = i;
  }

  const std::vector<double>& activity_;
  std::vector<int> heap_;
  std::vector<int> pos_;
};

// Conflict-driven clause learning with two watched literals, first-UIP
// learning with local clause minimization, VSIDS variable activities,
// phase saving, Luby restarts, and learnt-clause reduction by LBD at
// restart boundaries.  All-zero initial activities make the first
// decisions scan variables in ascending order with false first, which in
// the cover encoding behaves like first fit; learning takes over from
// there.  Deterministic: same formula, same run.
class Cdcl {
 public:
  Cdcl(const CnfInstance& cnf, const SolverOptions& opts)
      : nvars_(cnf.num_vars),
        timeout_(opts.timeout_seconds),
        start_(Clock::now()),
        order_(activity_) {
    val_.assign(nvars_ + 1, 0);
    level_.assign(nvars_ + 1, 0);
    reason_.assign(nvars_ + 1, -1);
    if (opts.phase_hint.size() == size_t(nvars_) + 1)
      phase_ = opts.phase_hint;
    else
      phase_.assign(nvars_ + 1, false);
    seen_.assign(nvars_ + 1, 0);
    activity_.assign(nvars_ + 1, 0.0);
    watches_.assign(2 * (nvars_ + 1), {});
    order_.grow(nvars_);

    for (const std::vector<int>& in : cnf.clauses) {
      std::vector<int> c = in;
      std::sort(c.begin(), c.end(), [](int a, int b) {
        return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : a > b;
      });
      c.erase(std::unique(c.begin(), c.end()), c.end());
      bool tautology = false;
      for (size_t i = 0; i + 1 < c.size(); ++i)
        if (c[i] == -c[i + 1])
          tautology = true;
      if (tautology)
        continue;
      if (c.empty()) {
        contradiction_ = true;
        return;
      }
      if (c.size() == 1) {
        units_.push_back(c[0]);
        continue;
      }
      add_clause(std::move(c), /*learnt=*/false, /*lbd=*/0);
    }
  }

  SolveResult run() {
    SolveResult result;
    if (contradiction_) {
      result.status = SolveStatus::kUnsat;
      return result;
    }
    for (int lit : units_) {
      if (value(lit) < 0) {
        result.status = SolveStatus::kUnsat;
        return result;
      }
      if (value(lit) == 0)
        enqueue(lit, -1);
    }
    if (propagate() != -1) {
      result.status = SolveStatus::kUnsat;
      return result;
    }
    for (int v = 1; v <= nvars_; ++v)
      if (val_[v] == 0)
        order_.insert(v);

    uint64_t conflicts_total = 0;
    int restarts = 0;
    size_t reduce_limit = std::max<size_t>(4000, clauses_.size() / 3);

    for (;;) {
      const uint64_t budget = 128 * luby(restarts++);
      uint64_t conflicts = 0;
      while (conflicts < budget) {
        const int confl = propagate();
        if (confl != -1) {
          ++conflicts;
          ++conflicts_total;
          if (current_level() == 0) {
            result.status = SolveStatus::kUnsat;
            return result;
          }
          std::vector<int> learnt;
          int btlevel = 0;
          int lbd = 0;
          analyze(confl, &learnt, &btlevel, &lbd);
          backtrack(btlevel);
          if (learnt.size() == 1) {
            enqueue(learnt[0], -1);
          } else {
            const int ci = add_clause(std::move(learnt), true, lbd);
            bump_clause(ci);
            enqueue(clauses_[ci].lits[0], ci);
          }
          var_inc_ /= kVarDecay;
          cla_inc_ /= kClaDecay;
          if ((conflicts_total & 0xFFF) == 0 && timed_out()) {
            result.status = SolveStatus::kUnknown;
            result.detail = "builtin solver timeout";
            return result;
          }
        } else {
          const int var = pick_branch_var();
          if (var == 0) {
            result.status = SolveStatus::kSat;
            result.model.assign(nvars_ + 1, false);
            for (int v = 1; v <= nvars_; ++v)
              result.model[v] = val_[v] > 0;
            return result;
          }
          trail_lim_.push_back(trail_.size());
          enqueue(phase_[var] ? var : -var, -1);
        }
      }
      backtrack(0);
      if (timed_out()) {
        result.status = SolveStatus::kUnknown;
        result.detail = "builtin solver timeout";
        return result;
      }
      if (num_learnts_ > reduce_limit) {
        reduce_learnts();
        reduce_limit += reduce_limit / 2;
      }
    }
  }

 private:
  struct Clause {
    std::vector<int> lits;
    double activity = 0.0;
    int lbd = 0;
    bool learnt = false;
  };
  struct Watcher {
    int ci;
    int blocker;  // a literal of the clause; if true the clause is true
  };

  static constexpr double kVarDecay = 0.95;
  static constexpr double kClaDecay = 0.999;

  static uint64_t luby(int i) {
    // The Luby restart sequence 1 1 2 1 1 2 4 1 1 2 1 1 2 4 8 ...
    for (uint64_t k = 1; k < 63; ++k) {
      if (uint64_t(i) + 2 == uint64_t(1) << k)
        return uint64_t(1) << (k - 1);
      if (uint64_t(i) + 2 < uint64_t(1) << k)
        return luby(i + 1 - (1 << (k - 1)));
    }
    return 1;
  }

  static size_t lit_index(int lit) {
    return 2 * size_t(std::abs(lit)) + (lit < 0 ? 1 : 0);
  }
  int value(int lit) const {
    const int v = val_[std::abs(lit)];
    return lit < 0 ? -v : v;
  }
  int current_level() const { return static_cast<int>(trail_lim_.size()); }

  int add_clause(std::vector<int> lits, bool learnt, int lbd) {
    const int ci = static_cast<int>(clauses_.size());
    watches_[lit_index(lits[0])].push_back({ci, lits[1]});
    watches_[lit_index(lits[1])].push_back({ci, lits[0]});
    clauses_.push_back({std::move(lits), 0.0, lbd, learnt});
    num_learnts_ += learnt;
    return ci;
  }

  void enqueue(int lit, int reason) {
    const int v = std::abs(lit);
    val_[v] = lit > 0 ? 1 : -1;
    level_[v] = current_level();
    reason_[v] = reason;
    trail_.push_back(lit);
  }

  void backtrack(int target) {
    if (current_level() <= target)
      return;
    const size_t keep = trail_lim_[target];
    for (size_t i = trail_.size(); i > keep; --i) {
      const int v = std::abs(trail_[i - 1]);
      phase_[v] = val_[v] > 0;
      val_[v] = 0;
      reason_[v] = -1;
      order_.insert(v);
    }
    trail_.resize(keep);
    trail_lim_.resize(target);
    qhead_ = keep;
  }

  int pick_branch_var() {
    while (!order_.empty()) {
      const int v = order_.pop_max();
      if (val_[v] == 0)
        return v;
    }
    return 0;
  }

  void bump_var(int v) {
    activity_[v] += var_inc_;
    if (activity_[v] > 1e100) {
      for (int u = 1; u <= nvars_; ++u)
        activity_[u] *= 1e-100;
      var_inc_ *= 1e-100;
    }
    order_.increased(v);
  }

  void bump_clause(int ci) {
    Clause& c = clauses_[ci];
    if (!c.learnt)
      return;
    c.activity += cla_inc_;
    if (c.activity > 1e20) {
      for (Clause& d : clauses_)
        if (d.learnt)
          d.activity *= 1e-20;
      cla_inc_ *= 1e-20;
    }
  }

  // Returns the index of a conflicting clause, or -1.
  int propagate() {
    while (qhead_ < trail_.size()) {
      const int p = trail_[qhead_++];
      std::vector<Watcher>& wl = watches_[lit_index(-p)];
      size_t keep = 0;
      for (size_t wi = 0; wi < wl.size(); ++wi) {
        const Watcher w = wl[wi];
        if (value(w.blocker) > 0) {
          wl[keep++] = w;
          continue;
        }
        std::vector<int>& c = clauses_[w.ci].lits;
        if (c[0] == -p)
          std::swap(c[0], c[1]);
        // c[1] == -p and is false.
        if (value(c[0]) > 0) {
          wl[keep++] = {w.ci, c[0]};
          continue;
        }
        bool moved = false;
        for (size_t i = 2; i < c.size(); ++i) {
          if (value(c[i]) >= 0) {
            std::swap(c[1], c[i]);
            watches_[lit_index(c[1])].push_back({w.ci, c[0]});
            moved = true;
            break;
          }
        }
        if (moved)
          continue;
        wl[keep++] = {w.ci, c[0]};
        if (value(c[0]) < 0) {
          for (size_t rest = wi + 1; rest < wl.size(); ++rest)
            wl[keep++] = wl[rest];
          wl.resize(keep);
          return w.ci;
        }
        enqueue(c[0], w.ci);
      }
      wl.resize(keep);
    }
    return -1;
  }

  // First-UIP conflict analysis; fills the learnt clause with the
  // asserting literal first and returns the backtrack level and LBD.
  void analyze(int confl, std::vector<int>* learnt, int* btlevel, int* lbd) {
    learnt->clear();
    learnt->push_back(0);  // asserting literal placeholder
    int counter = 0;
    int p = 0;
    size_t index = trail_.size();

    for (;;) {
      const Clause& c = clauses_[confl];
      bump_clause(confl);
      for (size_t j = (p == 0 ? 0 : 1); j < c.lits.size(); ++j) {
        const int q = c.lits[j];
        const int v = std::abs(q);
        if (!seen_[v] && level_[v] > 0) {
          seen_[v] = 1;
          bump_var(v);
          if (level_[v] >= current_level())
            ++counter;
          else
            learnt->push_back(q);
        }
      }
      while (!seen_[std::abs(trail_[index - 1])])
        --index;
      p = trail_[--index];
      seen_[std::abs(p)] = 0;
      if (--counter == 0)
        break;
      confl = reason_[std::abs(p)];
    }
    (*learnt)[0] = -p;
    const std::vector<int> marked(*learnt);  // for seen-flag cleanup

    // Local minimization: drop a literal whose whole reason clause is
    // already marked (subsumed by the rest of the learnt clause).
    size_t kept = 1;
    for (size_t i = 1; i < learnt->size(); ++i) {
      const int v = std::abs((*learnt)[i]);
      const int r = reason_[v];
      bool redundant = r != -1;
      if (redundant) {
        const Clause& rc = clauses_[r];
        for (size_t j = 1; j < rc.lits.size() && redundant; ++j) {
          const int u = std::abs(rc.lits[j]);
          redundant = seen_[u] || level_[u] == 0;
        }
      }
      if (!redundant)
        (*learnt)[kept++] = (*learnt)[i];
    }
    learnt->resize(kept);

    // Second watch: the literal with the highest level below the UIP.
    *btlevel = 0;
    if (learnt->size() > 1) {
      size_t maxi = 1;
      for (size_t i = 2; i < learnt->size(); ++i)
        if (level_[std::abs((*learnt)[i])] >
            level_[std::abs((*learnt)[maxi])])
          maxi = i;
      std::swap((*learnt)[1], (*learnt)[maxi]);
      *btlevel = level_[std::abs((*learnt)[1])];
    }

    *lbd = 0;
    for (size_t i = 0; i < learnt->size(); ++i) {
      const int lv = level_[std::abs((*learnt)[i])];
      bool new_level = true;
      for (size_t j = 0; j < i && new_level; ++j)
        new_level = level_[std::abs((*learnt)[j])] != lv;
      *lbd += new_level;
    }

    for (int lit : marked)
      seen_[std::abs(lit)] = 0;
  }

  // At decision level zero: drop the worst half of the learnt clauses
  // (by LBD, then activity), keeping glue and binary clauses, and rebuild
  // the watcher lists.
  void reduce_learnts() {
    std::vector<int> order;
    for (size_t ci = 0; ci < clauses_.size(); ++ci)
      if (clauses_[ci].learnt)
        order.push_back(static_cast<int>(ci));
    std::sort(order.begin(), order.end(), [this](int a, int b) {
      const Clause& ca = clauses_[a];
      const Clause& cb = clauses_[b];
      if (ca.lbd != cb.lbd)
        return ca.lbd < cb.lbd;
      return ca.activity > cb.activity;
    });
    std::vector<char> drop(clauses_.size(), 0);
    for (size_t i = order.size() / 2; i < order.size(); ++i) {
      const Clause& c = clauses_[order[i]];
      if (c.lbd > 2 && c.lits.size() > 2)
        drop[order[i]] = 1;
    }

    std::vector<Clause> compact;
    compact.reserve(clauses_.size());
    for (size_t ci = 0; ci < clauses_.size(); ++ci)
      if (!drop[ci])
        compact.push_back(std::move(clauses_[ci]));
    clauses_ = std::move(compact);
    num_learnts_ = 0;
    for (const Clause& c : clauses_)
      num_learnts_ += c.learnt;

    for (auto& wl : watches_)
      wl.clear();
    for (size_t ci = 0; ci < clauses_.size(); ++ci) {
      const std::vector<int>& lits = clauses_[ci].lits;
      watches_[lit_index(lits[0])].push_back(
          {static_cast<int>(ci), lits[1]});
      watches_[lit_index(lits[1])].push_back(
          {static_cast<int>(ci), lits[0]});
    }
  }

  bool timed_out() {
    return timeout_ > 0 && seconds_since(start_) > timeout_;
  }

  int nvars_;
  double timeout_;
  Clock::time_point start_;
  bool contradiction_ = false;
  std::vector<int> units_;
  std::vector<Clause> clauses_;
  size_t num_learnts_ = 0;
  std::vector<std::vector<Watcher>> watches_;
  std::vector<int8_t> val_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<bool> phase_;
  std::vector<char> seen_;
  std::vector<double> activity_;
  double var_inc_ = 1.0;
  double cla_inc_ = 1.0;
  std::vector<int> trail_;
  std::vector<size_t> trail_lim_;
  size_t qhead_ = 0;
  VarHeap order_;
};

SolveResult solve_builtin(const CnfInstance& cnf, const SolverOptions& opts) {
  if (size_t(cnf.num_vars) > opts.max_builtin_vars ||
      cnf.clauses.size() > opts.max_builtin_clauses) {
    SolveResult r;
    r.status = SolveStatus::kUnknown;
    r.detail = "instance exceeds the builtin solver's size caps (" +
               std::to_string(cnf.num_vars) + " vars, " +
               std::to_string(cnf.clauses.size()) +
               " clauses); set FILTERMIN_SOLVER=exec:<solver>";
    return r;
  }
  return Cdcl(cnf, opts).run();
}

SolveResult solve_exec(const CnfInstance& cnf, const std::string& command,
                       const SolverOptions& opts) {
  namespace fs = std::filesystem;
  SolveResult result;

  const fs::path dir = fs::temp_directory_path();
  static int counter = 0;
  const std::string stem = "filtermin-" + std::to_string(::getpid()) + "-" +
                           std::to_string(counter++);
  const fs::path cnf_path = dir / (stem + ".cnf");
  const fs::path out_path = dir / (stem + ".out");

  {
    std::ofstream out(cnf_path);
    if (!out)
      throw std::runtime_error("solve: cannot write " + cnf_path.string());
    write_dimacs(out, cnf);
  }

  std::string shell = command + " '" + cnf_path.string() + "' > '" +
                      out_path.string() + "'";
  if (opts.timeout_seconds > 0)
    shell = "timeout " + std::to_string(opts.timeout_seconds) + " " + shell;
  const int rc = std::system(shell.c_str());

  std::ifstream in(out_path);
  std::string line;
  bool saw_status = false;
  std::vector<int> lits;
  while (std::getline(in, line)) {
    if (line.rfind("s ", 0) == 0) {
      saw_status = true;
      if (line.find("UNSATISFIABLE") != std::string::npos)
        result.status = SolveStatus::kUnsat;
      else if (line.find("SATISFIABLE") != std::string::npos)
        result.status = SolveStatus::kSat;
    } else if (line.rfind("v ", 0) == 0) {
      std::istringstream values(line.substr(2));
      int lit;
      while (values >> lit)
        if (lit != 0)
          lits.push_back(lit);
    }
  }
  std::error_code ignore;
  fs::remove(cnf_path, ignore);
  fs::remove(out_path, ignore);

  if (!saw_status) {
    result.status = SolveStatus::kUnknown;
    result.detail = (rc == 124 << 8 || rc == 124)
                        ? "external solver timeout"
                        : "external solver produced no s-line (exit status " +
                              std::to_string(rc) + ")";
    return result;
  }
  if (result.status == SolveStatus::kSat) {
    result.model.assign(cnf.num_vars + 1, false);
    for (int lit : lits) {
      const int v = std::abs(lit);
      if (v >= 1 && v <= cnf.num_vars)
        result.model[v] = lit > 0;
    }
    if (!model_satisfies(cnf, result.model)) {
      result.status = SolveStatus::kUnknown;
      result.detail = "external solver returned an assignment that does not "
                      "satisfy the formula; ignoring it";
      result.model.clear();
    }
  }
  return result;
}

}  // namespace

std::string default_solver_backend() {
  const char* env = std::getenv("FILTERMIN_SOLVER");
  return env && *env ? env : "builtin";
}

bool model_satisfies(const CnfInstance& cnf, const std::vector<bool>& model) {
  if (model.size() != size_t(cnf.num_vars) + 1)
    return false;
  for (const std::vector<int>& clause : cnf.clauses) {
    bool sat = false;
    for (int lit : clause) {
      const int v = std::abs(lit);
      if (v >= 1 && v <= cnf.num_vars && model[v] == (lit > 0)) {
        sat = true;
        break;
      }
    }
    if (!sat)
      return false;
  }
  return true;
}

SolveResult solve(const CnfInstance& cnf, const SolverOptions& opts) {
  const auto start = Clock::now();
  SolveResult result;
  if (opts.backend == "builtin") {
    result = solve_builtin(cnf, opts);
  } else if (opts.backend.rfind("exec:", 0) == 0) {
    result = solve_exec(cnf, opts.backend.substr(5), opts);
  } else {
    throw std::invalid_argument("solve: unknown backend \"" + opts.backend +
                                "\" (expected \"builtin\" or \"exec:<cmd>\")");
  }
  result.seconds = seconds_since(start);
  if (result.status == SolveStatus::kSat && !model_satisfies(cnf, result.model))
    throw std::logic_error("solve: satisfying assignment failed the check");
  return result;
}

}  // namespace filtermin
