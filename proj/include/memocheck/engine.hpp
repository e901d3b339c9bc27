#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "memocheck/assertions.hpp"
#include "memocheck/automata.hpp"
#include "memocheck/cache.hpp"
#include "memocheck/checker.hpp"
#include "memocheck/parser.hpp"
#include "memocheck/program.hpp"
#include "memocheck/store.hpp"
#include "memocheck/transform.hpp"

namespace memocheck {

enum class CheckMode { Wrapper, Strict };
enum class ErrorMode { Continue, Abort };

struct EngineOptions {
  CacheConfig cache;
  bool rtchecks = true;
  // Wrapper: calls conditions are checked once per call, as the transformed
  // program does. Strict: once per clause tried.
  CheckMode mode = CheckMode::Wrapper;
  ErrorMode on_error = ErrorMode::Continue;
  bool short_circuit = false;
  // Debugging aids. All of them cost time; none changes any outcome.
  std::uint64_t audit_interval = 0;  // soundness audit every N steps, 0 = off
  bool shadow = false;               // compare each cached verdict with the oracle
  bool update_audit = false;         // check the cache-update law after every check phase
  // Off, as in most Prolog systems. Without it X = f(X) builds a cyclic term,
  // which neither the checker nor the writer terminates on.
  bool occurs_check = false;
};

struct SolveLimits {
  std::size_t max_answers = std::numeric_limits<std::size_t>::max();
  std::uint64_t max_steps = std::numeric_limits<std::uint64_t>::max();
};

struct Violation {
  const Condition* condition;
  std::uint64_t asr_id;
  std::string call;  // the call with the bindings at the time of the check
};

inline std::string describe(const Violation& v) {
  const Condition& c = *v.condition;
  return std::string(c.kind == Condition::Kind::Calls ? "calls" : "success") + " assertion " + c.label +
         " (asr-id " + std::to_string(v.asr_id) + ", line " + std::to_string(c.line) + ") violated by " + v.call;
}

struct Answer {
  std::vector<std::pair<std::string, std::string>> bindings;
  std::vector<std::string> errors;  // condition labels of the error set, sorted

  std::string text() const {
    std::string s;
    for (const auto& [k, v] : bindings) s += (s.empty() ? "" : ", ") + k + " = " + v;
    if (s.empty()) s = "true";
    if (!errors.empty()) {
      s += "  % violated:";
      for (const auto& e : errors) s += " " + e;
    }
    return s;
  }
  friend bool operator==(const Answer&, const Answer&) = default;
};

struct EngineStats {
  std::uint64_t steps = 0;
  std::uint64_t inferences = 0;   // user-predicate calls plus builtin calls
  std::uint64_t prop_checks = 0;  // reified literals evaluated
  std::uint64_t audits = 0;
  std::uint64_t audit_failures = 0;
  std::uint64_t shadow_mismatches = 0;
  std::uint64_t update_violations = 0;
};

struct SolveResult {
  std::vector<Answer> answers;
  bool aborted = false;
  bool step_limit = false;
  std::string diagnostic;
  std::vector<Violation> violations;  // every insertion into the error set, failed branches included
  EngineStats stats;
  CacheStats cache;
  std::vector<std::string> audit_reports;

  std::string text() const {
    std::string s;
    for (const auto& a : answers) s += a.text() + "\n";
    if (step_limit) s += "% step limit\n";
    if (aborted) s += "% aborted: " + diagnostic + "\n";
    return s;
  }
};

/// Interpreter for the reduction semantics with assertions and a check cache.
/// Depth-first, leftmost selection, clauses in textual order.
class Engine {
 public:
  enum class Status { Running, Answer, Done, Aborted, StepLimit };

  Engine(const Program& prog, EngineOptions opts = {})
      : prog_(&prog), opts_(opts), symbols_(prog.symbols), types_(prog), cache_(opts.cache) {
    for (const auto& p : prog.predicates)
      if (p.is_regtype) {
        auto rep = validate_regular_program(prog, p);
        if (!rep.ok())
          throw DefinitionError(prog.display(p.key) + " is not a regular type: " + rep.violations.front());
      }
    std::uint32_t next_id = 0;
    preds_.resize(prog.predicates.size());
    for (std::size_t i = 0; i < prog.predicates.size(); ++i) {
      const Predicate& p = prog.predicates[i];
      PredInfo& info = preds_[i];
      info.pred = &p;
      by_key_.emplace(pack(p.key.name, p.key.arity), static_cast<std::uint32_t>(i));
      for (const auto& c : p.clauses) {
        ClauseInfo ci{&c, true, {}};
        if (c.head.arity() > 0 && !c.head.args[0].is_var()) {
          ci.any_first = false;
          ci.first = source_key(c.head.args[0]);
        }
        info.clauses.push_back(ci);
      }
      info.conditions = std::make_unique<ConditionSet>(normalize_assertions(prog, p, types_, next_id));
      info.wrapper = wrap(*info.conditions);
    }
    init_builtins();
  }

  const Program& program() const { return *prog_; }
  SymbolTable& symbols() { return symbols_; }
  const EngineOptions& options() const { return opts_; }
  TypeTable& types() { return types_; }
  CheckCache& cache() { return cache_; }
  const EngineStats& stats() const { return stats_; }
  Store& store() { return *store_; }
  Checker& checker() { return *checker_; }

  const ConditionSet* conditions(std::string_view name, std::uint32_t arity) const {
    auto it = by_key_.find(pack(symbols_.lookup(name), arity));
    if (it == by_key_.end()) return nullptr;
    return preds_[it->second].conditions.get();
  }
  const WrapperSet* wrapper(std::string_view name, std::uint32_t arity) const {
    auto it = by_key_.find(pack(symbols_.lookup(name), arity));
    if (it == by_key_.end() || !preds_[it->second].wrapper) return nullptr;
    return &*preds_[it->second].wrapper;
  }

  /// Runs a query to completion (or to the limits).
  SolveResult solve(std::string_view goal, SolveLimits limits = {}) {
    start(goal);
    return run(limits);
  }

  /// `q` must use symbol ids from symbols().
  SolveResult solve(const SourceTerm& q, const std::vector<std::string>& names, SolveLimits limits = {}) {
    start(q, names);
    return run(limits);
  }

  SolveResult run(SolveLimits limits = {}) {
    SolveResult r;
    while (true) {
      Status s = step();
      if (s == Status::Running) {
        if (stats_.steps >= limits.max_steps) {
          r.step_limit = true;
          break;
        }
        continue;
      }
      if (s == Status::Answer) {
        r.answers.push_back(current_answer());
        if (r.answers.size() >= limits.max_answers) break;
        continue;
      }
      if (s == Status::Aborted) {
        r.aborted = true;
        r.diagnostic = diagnostic_;
      }
      break;
    }
    r.violations = violation_log_;
    r.stats = stats_;
    r.cache = cache_.stats();
    r.audit_reports = audit_reports_;
    return r;
  }

  /// Resets the machine to the initial state for `goal`: a fresh store, an
  /// empty cache and an empty error set.
  void start(std::string_view goal) {
    std::vector<std::string> names;
    SourceTerm q = parse_term(goal, symbols_, &names);
    start(q, names);
  }

  void start(const SourceTerm& q, const std::vector<std::string>& names) {
    store_ = std::make_unique<Store>(symbols_);
    store_->occurs_check = opts_.occurs_check;
    cache_ = CheckCache(opts_.cache);
    checker_ = std::make_unique<Checker>(types_, *store_, cache_);
    store_->set_undo_hook([this](const UndoEvent& ev) { cache_.invalidate(ev); });
    frames_.clear();
    cps_.clear();
    bits_.clear();
    errors_.clear();
    violation_log_.clear();
    audit_reports_.clear();
    stats_ = {};
    next_asr_id_ = 0;
    status_ = Status::Running;
    diagnostic_.clear();
    pending_backtrack_ = false;
    query_vars_.clear();
    std::vector<NodeId> varmap;
    NodeId g = store_->copy_in(q, varmap);
    for (std::size_t i = 0; i < names.size() && i < varmap.size(); ++i)
      if (!names[i].empty() && names[i][0] != '_' && varmap[i] != kNoNode) query_vars_.emplace_back(names[i], varmap[i]);
    goal_ = push_frame({FrameKind::Call, 0, g, kEnd, 0, 0, 0});
  }

  /// One transition of the machine.
  Status step() {
    if (status_ == Status::Done || status_ == Status::Aborted) return status_;
    ++stats_.steps;
    if (opts_.audit_interval && stats_.steps % opts_.audit_interval == 0) run_audit();
    try {
      if (pending_backtrack_) {
        pending_backtrack_ = false;
        return status_ = backtrack() ? Status::Running : Status::Done;
      }
      if (goal_ == kEnd) {
        pending_backtrack_ = true;
        return status_ = Status::Answer;
      }
      Frame f = frames_[goal_];
      goal_ = f.next;
      bool ok = true;
      switch (f.kind) {
        case FrameKind::Call: ok = call(f); break;
        case FrameKind::CutTo: cut_to(f.aux); break;
        case FrameKind::CheckWrapper: success_checks(f); break;
        case FrameKind::CheckStrict: strict_success_check(f); break;
      }
      if (!ok && !backtrack()) return status_ = Status::Done;
      return status_ = Status::Running;
    } catch (const AbortSignal&) {
      return status_ = Status::Aborted;
    }
  }

  /// The error set of the current derivation, as condition labels.
  std::vector<std::string> current_errors() const {
    std::vector<std::string> out;
    for (const auto& v : errors_) out.push_back(v.condition->label);
    std::sort(out.begin(), out.end());
    return out;
  }
  const std::vector<Violation>& error_set() const { return errors_; }

  Answer current_answer() const {
    Answer a;
    std::map<NodeId, std::string> fresh;
    CanonicalView view{*store_, fresh};
    TermWriter<CanonicalView> w(view);
    for (const auto& [name, node] : query_vars_) {
      NodeId d = store_->deref(node);
      if (store_->is_free(d) && fresh.count(d) == 0) {
        // An unbound query variable keeps its own name.
        fresh.emplace(d, name);
        continue;
      }
      a.bindings.emplace_back(name, w.to_string(node, 699));
    }
    a.errors = current_errors();
    return a;
  }

  /// Goals left in the current continuation, outermost last.
  std::size_t pending_goals() const {
    std::size_t n = 0;
    for (std::uint32_t g = goal_; g != kEnd; g = frames_[g].next) ++n;
    return n;
  }
  std::size_t pending_check_literals() const {
    std::size_t n = 0;
    for (std::uint32_t g = goal_; g != kEnd; g = frames_[g].next)
      n += frames_[g].kind == FrameKind::CheckWrapper || frames_[g].kind == FrameKind::CheckStrict;
    return n;
  }

 private:
  static constexpr std::uint32_t kEnd = 0xffffffffu;
  static constexpr std::uint32_t kNoClause = 0xffffffffu;

  struct AbortSignal {};

  enum class FrameKind : std::uint8_t { Call, CutTo, CheckWrapper, CheckStrict };

  struct Frame {
    FrameKind kind;
    std::uint32_t cut;   // Call: choicepoint height a `!` cuts back to
    NodeId term;         // Call: goal. Checks: the checked call.
    std::uint32_t next;  // continuation
    std::uint32_t aux;   // CutTo: height. CheckWrapper: bit offset. CheckStrict: condition index.
    std::uint32_t pred;
    std::uint64_t asr;   // first asr-id of the instances of this call
  };

  struct ChoicePoint {
    bool alternative;  // true: resume at `cont`; false: try clause `next_clause`
    Epoch epoch;
    std::uint32_t errors, frames, bits;
    std::uint32_t cont;
    NodeId call;
    std::uint32_t pred;
    std::uint32_t next_clause;
    std::uint32_t height;
  };

  struct ClauseInfo {
    const Clause* clause;
    bool any_first;
    FunctorKey first;
  };

  struct PredInfo {
    const Predicate* pred = nullptr;
    std::vector<ClauseInfo> clauses;
    std::unique_ptr<ConditionSet> conditions;
    std::optional<WrapperSet> wrapper;
  };

  enum class Builtin {
    None, Conj, True, Fail, Cut, Disj, IfThen, Not, Call, Unify, NotUnify, Identical, NotIdentical, Is,
    Lt, Gt, Le, Ge, ArithEq, ArithNe, PropInt, PropFlt, PropNum, PropAtm, PropVar, PropNonvar, PropGround,
    PropTerm
  };

  // Free variables print as _A, _B, ... in order of appearance.
  struct CanonicalView : StoreView {
    std::map<NodeId, std::string>& names;
    CanonicalView(const Store& s, std::map<NodeId, std::string>& n) : StoreView{s}, names(n) {}
    std::string var_name(NodeId h) const {
      NodeId d = store.deref(h);
      auto it = names.find(d);
      if (it != names.end()) return it->second;
      std::size_t k = 0;
      for (const auto& [id, s] : names) k += s.rfind("_", 0) == 0;
      std::string s = "_";
      do {
        s.insert(s.begin() + 1, static_cast<char>('A' + k % 26));
        k /= 26;
      } while (k);
      names.emplace(d, s);
      return s;
    }
  };

  static std::uint64_t pack(SymbolId s, std::uint32_t arity) { return (std::uint64_t(s) << 32) | arity; }

  static FunctorKey source_key(const SourceTerm& t) {
    switch (t.kind) {
      case TermKind::Atom: return {TermKind::Atom, t.functor, 0, 0};
      case TermKind::Int: return {TermKind::Int, 0, 0, t.ival};
      case TermKind::Struct: return {TermKind::Struct, t.functor, static_cast<std::uint32_t>(t.arity()), 0};
      default: return {t.kind, 0, 0, 0};
    }
  }

  void init_builtins() {
    auto add = [&](const char* n, std::uint32_t ar, Builtin b) {
      builtins_.emplace(pack(symbols_.intern(n), ar), b);
    };
    add(",", 2, Builtin::Conj);
    add("true", 0, Builtin::True);
    add("fail", 0, Builtin::Fail);
    add("false", 0, Builtin::Fail);
    add("!", 0, Builtin::Cut);
    add(";", 2, Builtin::Disj);
    add("->", 2, Builtin::IfThen);
    add("\\+", 1, Builtin::Not);
    for (std::uint32_t n = 1; n <= 8; ++n) add("call", n, Builtin::Call);
    add("=", 2, Builtin::Unify);
    add("\\=", 2, Builtin::NotUnify);
    add("==", 2, Builtin::Identical);
    add("\\==", 2, Builtin::NotIdentical);
    add("is", 2, Builtin::Is);
    add("<", 2, Builtin::Lt);
    add(">", 2, Builtin::Gt);
    add("=<", 2, Builtin::Le);
    add(">=", 2, Builtin::Ge);
    add("=:=", 2, Builtin::ArithEq);
    add("=\\=", 2, Builtin::ArithNe);
    add("int", 1, Builtin::PropInt);
    add("integer", 1, Builtin::PropInt);
    add("flt", 1, Builtin::PropFlt);
    add("num", 1, Builtin::PropNum);
    add("number", 1, Builtin::PropNum);
    add("atm", 1, Builtin::PropAtm);
    add("atom", 1, Builtin::PropAtm);
    add("var", 1, Builtin::PropVar);
    add("nonvar", 1, Builtin::PropNonvar);
    add("ground", 1, Builtin::PropGround);
    add("term", 1, Builtin::PropTerm);
    sym_arrow_ = symbols_.intern("->");
    sym_fail_ = store_atom_fail_ = symbols_.intern("fail");
  }

  std::uint32_t push_frame(const Frame& f) {
    frames_.push_back(f);
    return static_cast<std::uint32_t>(frames_.size() - 1);
  }

  std::uint32_t push_call(NodeId t, std::uint32_t cut, std::uint32_t next) {
    return push_frame({FrameKind::Call, cut, t, next, 0, 0, 0});
  }

  void push_choice(bool alternative, std::uint32_t cont, NodeId call = 0, std::uint32_t pred = 0,
                   std::uint32_t next_clause = 0, std::uint32_t height = 0) {
    cps_.push_back({alternative, store_->mark(), static_cast<std::uint32_t>(errors_.size()),
                    static_cast<std::uint32_t>(frames_.size()), static_cast<std::uint32_t>(bits_.size()), cont,
                    call, pred, next_clause, height});
  }

  void cut_to(std::uint32_t height) {
    if (cps_.size() <= height) return;
    store_->release(cps_[height].epoch);
    cps_.resize(height);
  }

  bool backtrack() {
    while (!cps_.empty()) {
      ChoicePoint cp = cps_.back();
      store_->undo_to(cp.epoch);
      errors_.resize(cp.errors);
      frames_.resize(cp.frames);
      bits_.resize(cp.bits);
      if (cp.alternative) {
        store_->release(cp.epoch);
        cps_.pop_back();
        goal_ = cp.cont;
        return true;
      }
      if (try_clauses(cp.call, cp.pred, cp.next_clause, cp.cont, cp.height, true)) return true;
    }
    return false;
  }

  bool matches(const ClauseInfo& ci, bool any, const FunctorKey& k) const {
    return any || ci.any_first || ci.first == k;
  }

  std::uint32_t next_match(const PredInfo& p, std::uint32_t from, bool any, const FunctorKey& k) const {
    for (std::uint32_t i = from; i < p.clauses.size(); ++i)
      if (matches(p.clauses[i], any, k)) return i;
    return kNoClause;
  }

  // Resolution step: selects clause `from` or the next one that can match,
  // leaving a choicepoint if another candidate remains.
  bool try_clauses(NodeId call, std::uint32_t pi, std::uint32_t from, std::uint32_t cont, std::uint32_t height,
                   bool have_cp) {
    const PredInfo& p = preds_[pi];
    std::uint32_t arity = store_->arity(call);
    bool any = true;
    FunctorKey key{};
    if (arity > 0) {
      NodeId a0 = store_->deref(store_->arg(call, 0));
      if (!store_->is_free(a0)) {
        any = false;
        key = FunctorKey::of(*store_, a0);
        if (key.kind == TermKind::Flt) any = true;
      }
    }
    std::uint32_t i = next_match(p, from, any, key);
    if (i == kNoClause) {
      if (have_cp) {
        store_->release(cps_.back().epoch);
        cps_.pop_back();
      }
      return false;
    }
    std::uint32_t j = next_match(p, i + 1, any, key);
    if (j != kNoClause) {
      if (have_cp) cps_.back().next_clause = j;
      else push_choice(false, cont, call, pi, j, height);
    } else if (have_cp) {
      store_->release(cps_.back().epoch);
      cps_.pop_back();
    }

    if (opts_.rtchecks && opts_.mode == CheckMode::Strict && !p.conditions->empty())
      cont = strict_calls_checks(call, pi, cont);

    const Clause& c = *p.clauses[i].clause;
    varmap_.assign(c.num_vars, kNoNode);
    for (std::uint32_t k = 0; k < arity; ++k)
      if (!store_->unify_source(c.head.args[k], store_->arg(call, k), varmap_)) return false;
    for (std::size_t k = c.body.size(); k-- > 0;) cont = push_call(store_->copy_in(c.body[k], varmap_), height, cont);
    goal_ = cont;
    return true;
  }

  bool call(const Frame& f) {
    NodeId t = store_->deref(f.term);
    TermKind k = store_->kind(t);
    if (k == TermKind::Var) throw ExecutionError("instantiation error: unbound goal");
    if (k != TermKind::Atom && k != TermKind::Struct)
      throw ExecutionError("type error: goal " + to_string(*store_, t) + " is not callable");
    ++stats_.inferences;
    SymbolId fn = store_->functor(t);
    std::uint32_t ar = store_->arity(t);
    std::uint64_t key = pack(fn, ar);
    if (auto it = by_key_.find(key); it != by_key_.end()) return call_user(t, it->second, f);
    auto bt = builtins_.find(key);
    if (bt == builtins_.end())
      throw ExecutionError("unknown procedure " + symbols_.name(fn) + "/" + std::to_string(ar));
    auto A = [&](std::uint32_t i) { return store_->arg(t, i); };
    switch (bt->second) {
      case Builtin::Conj:
        goal_ = push_call(A(0), f.cut, push_call(A(1), f.cut, goal_));
        return true;
      case Builtin::True: return true;
      case Builtin::Fail: return false;
      case Builtin::Cut: cut_to(f.cut); return true;
      case Builtin::Disj: {
        NodeId lhs = store_->deref(A(0));
        if (store_->kind(lhs) == TermKind::Struct && store_->functor(lhs) == sym_arrow_ && store_->arity(lhs) == 2)
          return if_then_else(store_->arg(lhs, 0), store_->arg(lhs, 1), A(1), f.cut);
        push_choice(true, push_call(A(1), f.cut, goal_));
        goal_ = push_call(A(0), f.cut, goal_);
        return true;
      }
      case Builtin::IfThen: return if_then_else(A(0), A(1), kNoNode, f.cut);
      case Builtin::Not: {
        auto h = static_cast<std::uint32_t>(cps_.size());
        push_choice(true, goal_);
        std::uint32_t fail = push_call(store_->new_atom(sym_fail_), 0, kEnd);
        std::uint32_t cut = push_frame({FrameKind::CutTo, 0, 0, fail, h, 0, 0});
        goal_ = push_call(A(0), h + 1, cut);
        return true;
      }
      case Builtin::Call: {
        NodeId g = store_->deref(A(0));
        if (ar > 1) {
          if (store_->kind(g) != TermKind::Atom && store_->kind(g) != TermKind::Struct)
            throw ExecutionError("type error: call/" + std::to_string(ar) + " needs a callable term");
          std::vector<NodeId> args;
          for (std::uint32_t i = 0; i < store_->arity(g); ++i) args.push_back(store_->arg(g, i));
          for (std::uint32_t i = 1; i < ar; ++i) args.push_back(A(i));
          g = store_->new_struct(store_->functor(g), args);
        }
        goal_ = push_call(g, static_cast<std::uint32_t>(cps_.size()), goal_);
        return true;
      }
      case Builtin::Unify: return store_->unify(A(0), A(1));
      case Builtin::NotUnify: {
        // Try the unification and undo it through a throwaway epoch.
        Epoch e = store_->mark();
        bool u = store_->unify(A(0), A(1));
        store_->undo_to(e);
        store_->release(e);
        return !u;
      }
      case Builtin::Identical: return store_->identical(A(0), A(1));
      case Builtin::NotIdentical: return !store_->identical(A(0), A(1));
      case Builtin::Is: {
        Number v = eval(A(1));
        NodeId r = v.is_int ? store_->new_int(v.i) : store_->new_float(v.f);
        return store_->unify(A(0), r);
      }
      case Builtin::Lt: return compare(A(0), A(1)) < 0;
      case Builtin::Gt: return compare(A(0), A(1)) > 0;
      case Builtin::Le: return compare(A(0), A(1)) <= 0;
      case Builtin::Ge: return compare(A(0), A(1)) >= 0;
      case Builtin::ArithEq: return compare(A(0), A(1)) == 0;
      case Builtin::ArithNe: return compare(A(0), A(1)) != 0;
      case Builtin::PropInt: return succeeds_trivially({PropKind::Int}, types_, *store_, A(0));
      case Builtin::PropFlt: return succeeds_trivially({PropKind::Flt}, types_, *store_, A(0));
      case Builtin::PropNum: return succeeds_trivially({PropKind::Num}, types_, *store_, A(0));
      case Builtin::PropAtm: return succeeds_trivially({PropKind::Atm}, types_, *store_, A(0));
      case Builtin::PropVar: return succeeds_trivially({PropKind::Var}, types_, *store_, A(0));
      case Builtin::PropNonvar: return !succeeds_trivially({PropKind::Var}, types_, *store_, A(0));
      case Builtin::PropGround: return succeeds_trivially({PropKind::Ground}, types_, *store_, A(0));
      case Builtin::PropTerm: return true;
      case Builtin::None: break;
    }
    return false;
  }

  bool if_then_else(NodeId cond, NodeId then, NodeId els, std::uint32_t cut) {
    auto h = static_cast<std::uint32_t>(cps_.size());
    NodeId e = els == kNoNode ? store_->new_atom(sym_fail_) : els;
    push_choice(true, push_call(e, cut, goal_));
    std::uint32_t t = push_call(then, cut, goal_);
    std::uint32_t c = push_frame({FrameKind::CutTo, 0, 0, t, h, 0, 0});
    goal_ = push_call(cond, h + 1, c);
    return true;
  }

  bool call_user(NodeId t, std::uint32_t pi, const Frame&) {
    PredInfo& p = preds_[pi];
    std::uint32_t cont = goal_;
    if (opts_.rtchecks && opts_.mode == CheckMode::Wrapper && p.wrapper) {
      const WrapperSet& w = *p.wrapper;
      std::uint64_t asr = next_asr_id_;
      next_asr_id_ += p.conditions->conditions.size();
      auto off = static_cast<std::uint32_t>(bits_.size());
      bits_.resize(bits_.size() + w.size(), 0);
      if (w.has_pc()) {
        run_phase(w, w.c_code, off, t, false);
        if (w.calls_bit && !bits_[off + *w.calls_bit]) add_error(&p.conditions->calls(), asr, t);
      }
      if (w.has_ps()) cont = push_frame({FrameKind::CheckWrapper, 0, t, cont, off, pi, asr});
    }
    return try_clauses(t, pi, 0, cont, static_cast<std::uint32_t>(cps_.size()), false);
  }

  void run_phase(const WrapperSet& w, std::span<const std::uint32_t> code, std::uint32_t off, NodeId call,
                 bool short_circuit) {
    std::vector<CheckCache::Entry> before;
    std::vector<std::pair<Prop, NodeId>> evaluated;
    if (opts_.update_audit) before = cache_.entries();
    run_checks(
        w, code, bits_.data() + off,
        [&](const Literal& l) {
          NodeId x = store_->arg(call, l.prop.arg);
          if (opts_.update_audit) evaluated.emplace_back(l.prop, x);
          return reify(l.prop, x);
        },
        short_circuit);
    if (opts_.update_audit) update_audit(evaluated, before);
  }

  bool reify(const Prop& p, NodeId x) {
    ++stats_.prop_checks;
    bool v = checker_->evaluate(p, x);
    if (opts_.shadow && v != succeeds_trivially(p, types_, *store_, x)) ++stats_.shadow_mismatches;
    return v;
  }

  void update_audit(const std::vector<std::pair<Prop, NodeId>>& evaluated,
                    const std::vector<CheckCache::Entry>& before) {
    if (auto bad = cache_update_semantics_check(*checker_, evaluated, before, cache_.entries())) {
      ++stats_.update_violations;
      if (audit_reports_.size() < 16) audit_reports_.push_back(*bad);
    }
  }

  void success_checks(const Frame& f) {
    const PredInfo& p = preds_[f.pred];
    const WrapperSet& w = *p.wrapper;
    run_phase(w, w.s_code, f.aux, f.term, opts_.short_circuit);
    if (bits_[f.aux + *w.success_bit]) return;
    for (const auto& [idx, bit] : w.success_bits)
      if (!bits_[f.aux + bit]) add_error(&p.conditions->conditions[idx], f.asr + idx, f.term);
  }

  // Per-clause checking: the calls condition and every Pre_i are evaluated
  // at each clause resolution; a check literal is queued after the clause
  // body for each success condition whose precondition held.
  std::uint32_t strict_calls_checks(NodeId call, std::uint32_t pi, std::uint32_t cont) {
    const ConditionSet& set = *preds_[pi].conditions;
    std::uint64_t asr = next_asr_id_;
    next_asr_id_ += set.conditions.size();
    std::vector<CheckCache::Entry> before;
    std::vector<std::pair<Prop, NodeId>> evaluated;
    if (opts_.update_audit) before = cache_.entries();
    auto eval = [&](const Prop& pr) {
      NodeId x = store_->arg(call, pr.arg);
      if (opts_.update_audit) evaluated.emplace_back(pr, x);
      return reify(pr, x);
    };
    if (!set.calls_trivial() && !evaluate_dnf(set.calls().pre, eval)) add_error(&set.calls(), asr, call);
    for (std::size_t i = set.conditions.size(); i-- > 1;) {
      const Condition& c = set.conditions[i];
      if (detail::trivially_true(c.post)) continue;
      if (evaluate_dnf(c.pre, eval))
        cont = push_frame({FrameKind::CheckStrict, 0, call, cont, static_cast<std::uint32_t>(i), pi, asr});
    }
    if (opts_.update_audit) update_audit(evaluated, before);
    return cont;
  }

  void strict_success_check(const Frame& f) {
    const Condition& c = preds_[f.pred].conditions->conditions[f.aux];
    std::vector<CheckCache::Entry> before;
    std::vector<std::pair<Prop, NodeId>> evaluated;
    if (opts_.update_audit) before = cache_.entries();
    bool ok = evaluate_dnf(c.post, [&](const Prop& pr) {
      NodeId x = store_->arg(f.term, pr.arg);
      if (opts_.update_audit) evaluated.emplace_back(pr, x);
      return reify(pr, x);
    });
    if (opts_.update_audit) update_audit(evaluated, before);
    if (!ok) add_error(&c, f.asr + f.aux, f.term);
  }

  void add_error(const Condition* c, std::uint64_t asr, NodeId call) {
    Violation v{c, asr, to_string(*store_, call)};
    errors_.push_back(v);
    violation_log_.push_back(v);
    if (opts_.on_error == ErrorMode::Abort) {
      diagnostic_ = describe(v);
      throw AbortSignal{};
    }
  }

  void run_audit() {
    if (!checker_) return;
    ++stats_.audits;
    if (auto bad = checker_->audit()) {
      ++stats_.audit_failures;
      if (audit_reports_.size() < 16)
        audit_reports_.push_back("stale entry (" + std::to_string(bad->node) + "," +
                                 (bad->type == kGroundType ? std::string("ground") : types_.name(bad->type)) + ")");
    }
  }

  // -- arithmetic --------------------------------------------------------

  struct Number {
    bool is_int = true;
    std::int64_t i = 0;
    double f = 0;
    double as_double() const { return is_int ? static_cast<double>(i) : f; }
  };

  Number eval(NodeId n) {
    n = store_->deref(n);
    switch (store_->kind(n)) {
      case TermKind::Int: return {true, store_->int_value(n), 0};
      case TermKind::Flt: return {false, 0, store_->float_value(n)};
      case TermKind::Var: throw ExecutionError("instantiation error in arithmetic");
      default: break;
    }
    const std::string& op = symbols_.name(store_->functor(n));
    std::uint32_t ar = store_->arity(n);
    if (ar == 1 && op == "-") {
      Number a = integer(eval(store_->arg(n, 0)), op);
      if (a.i == std::numeric_limits<std::int64_t>::min()) throw ExecutionError("integer overflow");
      return {true, -a.i, 0};
    }
    if (ar == 1 && op == "+") return eval(store_->arg(n, 0));
    if (ar == 1 && op == "\\") return {true, ~integer(eval(store_->arg(n, 0)), op).i, 0};
    if (ar != 2) throw ExecutionError("type error: " + to_string(*store_, n) + " is not an arithmetic expression");
    std::int64_t a = integer(eval(store_->arg(n, 0)), op).i;
    std::int64_t b = integer(eval(store_->arg(n, 1)), op).i;
    std::int64_t r = 0;
    if (op == "+") {
      if (__builtin_add_overflow(a, b, &r)) throw ExecutionError("integer overflow");
    } else if (op == "-") {
      if (__builtin_sub_overflow(a, b, &r)) throw ExecutionError("integer overflow");
    } else if (op == "*") {
      if (__builtin_mul_overflow(a, b, &r)) throw ExecutionError("integer overflow");
    } else if (op == "//") {
      if (b == 0) throw ExecutionError("evaluation error: zero divisor");
      if (a == std::numeric_limits<std::int64_t>::min() && b == -1) throw ExecutionError("integer overflow");
      r = a / b;
    } else if (op == "mod") {
      if (b == 0) throw ExecutionError("evaluation error: zero divisor");
      if (b == -1) return {true, 0, 0};
      r = a % b;
      if (r != 0 && ((r < 0) != (b < 0))) r += b;
    } else if (op == "#") {
      r = a ^ b;
    } else if (op == "/\\") {
      r = a & b;
    } else if (op == "\\/") {
      r = a | b;
    } else {
      throw ExecutionError("unknown arithmetic operator " + op + "/2");
    }
    return {true, r, 0};
  }

  static Number integer(Number v, const std::string& op) {
    if (!v.is_int) throw ExecutionError("type error: " + op + " needs integer operands");
    return v;
  }

  int compare(NodeId x, NodeId y) {
    Number a = eval(x), b = eval(y);
    if (a.is_int && b.is_int) return a.i < b.i ? -1 : a.i > b.i;
    double da = a.as_double(), db = b.as_double();
    return da < db ? -1 : da > db;
  }

  const Program* prog_;
  EngineOptions opts_;
  SymbolTable symbols_;
  TypeTable types_;
  CheckCache cache_;
  std::vector<PredInfo> preds_;
  std::unordered_map<std::uint64_t, std::uint32_t> by_key_;
  std::unordered_map<std::uint64_t, Builtin> builtins_;
  SymbolId sym_arrow_ = 0, sym_fail_ = 0, store_atom_fail_ = 0;

  std::unique_ptr<Store> store_;
  std::unique_ptr<Checker> checker_;
  std::vector<Frame> frames_;
  std::vector<ChoicePoint> cps_;
  std::vector<std::uint8_t> bits_;
  std::vector<Violation> errors_;
  std::vector<Violation> violation_log_;
  std::vector<std::string> audit_reports_;
  std::vector<NodeId> varmap_;
  std::vector<std::pair<std::string, NodeId>> query_vars_;
  std::uint32_t goal_ = kEnd;
  std::uint64_t next_asr_id_ = 0;
  EngineStats stats_;
  Status status_ = Status::Done;
  std::string diagnostic_;
  bool pending_backtrack_ = false;
};

/// The definitional transformation as source text: every asserted predicate
/// p gets a wrapper (with p_c and p_s where needed) and its clauses move to
/// p'. Unasserted predicates and regtypes are printed unchanged.
inline std::string transformed_program(const Engine& engine) {
  Program out = engine.program();
  TransformPrinter printer(engine.program());
  std::string wrappers;
  for (auto& p : out.predicates) {
    const std::string name = out.symbols.name(p.key.name);
    const WrapperSet* w = engine.wrapper(name, p.key.arity);
    if (!w) {
      if (!p.assertions.empty()) wrappers += "% " + out.display(p.key) + ": assertions are trivial, no wrapper\n\n";
      p.assertions.clear();
      continue;
    }
    wrappers += printer.print(*w) + "\n";
    SymbolId inner = out.symbols.intern(name + "'");
    for (auto& c : p.clauses) c.head.functor = inner;
    p.assertions.clear();
  }
  return wrappers + print_program(out);
}

}  // namespace memocheck
