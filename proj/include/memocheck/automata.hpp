#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "memocheck/errors.hpp"
#include "memocheck/program.hpp"
#include "memocheck/source_term.hpp"
#include "memocheck/store.hpp"

namespace memocheck {

using StateId = std::uint32_t;

enum class Primitive : std::uint8_t { None, Any, Int, Flt, Num, Atm };

/// Functor of a constructor or of a term: atoms and integer constants are
/// 0-ary functors.
struct FunctorKey {
  TermKind kind = TermKind::Atom;
  SymbolId symbol = 0;
  std::uint32_t arity = 0;
  std::int64_t value = 0;

  friend bool operator==(const FunctorKey&, const FunctorKey&) = default;

  static FunctorKey of(const Store& s, NodeId n) {
    const auto& c = s.cell(n);
    switch (c.kind) {
      case TermKind::Atom: return {TermKind::Atom, c.a, 0, 0};
      case TermKind::Int: return {TermKind::Int, 0, 0, c.i};
      case TermKind::Struct: return {TermKind::Struct, c.a, c.b, 0};
      default: return {c.kind, 0, 0, 0};
    }
  }
};

struct FunctorKeyHash {
  std::size_t operator()(const FunctorKey& k) const {
    std::size_t h = static_cast<std::size_t>(k.kind);
    h = h * 1000003u ^ k.symbol;
    h = h * 1000003u ^ k.arity;
    h = h * 1000003u ^ static_cast<std::size_t>(k.value);
    return h;
  }
};

struct Transition {
  FunctorKey functor;
  std::vector<StateId> args;
};

struct TypeState {
  std::string name;
  Primitive primitive = Primitive::None;
  std::vector<Transition> transitions;
  // Populated once a state has more than kLinearScanLimit constructors.
  std::unordered_map<FunctorKey, std::uint32_t, FunctorKeyHash> index;
};

inline constexpr std::size_t kLinearScanLimit = 8;
inline constexpr int kMaxInstantiationDepth = 64;

struct InstantiationDepthExceeded : DefinitionError {
  using DefinitionError::DefinitionError;
};

struct RegularityReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

namespace detail {

inline std::optional<Primitive> primitive_named(std::string_view name) {
  if (name == "term" || name == "any") return Primitive::Any;
  if (name == "int") return Primitive::Int;
  if (name == "flt") return Primitive::Flt;
  if (name == "num") return Primitive::Num;
  if (name == "atm") return Primitive::Atm;
  return std::nullopt;
}

// Most general unifier existence for two source terms whose variables are
// disjoint (offset_b shifts b's variables).
class SourceUnifier {
 public:
  bool unify(const SourceTerm& a, std::uint32_t oa, const SourceTerm& b, std::uint32_t ob) {
    Ref x = walk({&a, oa});
    Ref y = walk({&b, ob});
    if (x.t->is_var() && y.t->is_var() && x.t->var + x.off == y.t->var + y.off) return true;
    if (x.t->is_var()) {
      bind_[x.t->var + x.off] = y;
      return true;
    }
    if (y.t->is_var()) {
      bind_[y.t->var + y.off] = x;
      return true;
    }
    if (x.t->kind != y.t->kind) return false;
    switch (x.t->kind) {
      case TermKind::Atom: return x.t->functor == y.t->functor;
      case TermKind::Int: return x.t->ival == y.t->ival;
      case TermKind::Flt: return x.t->fval == y.t->fval;
      case TermKind::Struct:
        if (x.t->functor != y.t->functor || x.t->arity() != y.t->arity()) return false;
        for (std::size_t i = 0; i < x.t->arity(); ++i)
          if (!unify(x.t->args[i], x.off, y.t->args[i], y.off)) return false;
        return true;
      default: return false;
    }
  }

 private:
  struct Ref {
    const SourceTerm* t;
    std::uint32_t off;
  };
  Ref walk(Ref r) {
    while (r.t->is_var()) {
      auto it = bind_.find(r.t->var + r.off);
      if (it == bind_.end()) break;
      r = it->second;
    }
    return r;
  }
  std::unordered_map<std::uint32_t, Ref> bind_;
};

inline std::string functor_text(const FunctorKey& f, const SymbolTable& sy) {
  if (f.kind == TermKind::Int) return std::to_string(f.value) + "/0";
  return quote_atom(sy.name(f.symbol)) + "/" + std::to_string(f.arity);
}

}  // namespace detail

/// Checks that a `:- regtype` predicate is a regular program: linear,
/// non-variable heads; pairwise non-unifiable heads with distinct principal
/// functors; parametric arguments that are distinct variables; bodies made of
/// type literals on head variables, at most one per variable.
inline RegularityReport validate_regular_program(const Program& prog, const Predicate& pred) {
  RegularityReport rep;
  const SymbolTable& sy = prog.symbols;
  auto where = [&](const Clause& c) { return "clause at line " + std::to_string(c.line) + ": "; };
  auto is_type_name = [&](SymbolId name, std::uint32_t arity) {
    if (arity == 1 && detail::primitive_named(sy.name(name))) return true;
    const Predicate* p = prog.find({name, arity});
    return p && p->is_regtype;
  };
  for (const Clause& c : pred.clauses) {
    if (c.head.arity() == 0) {
      rep.violations.push_back(where(c) + "regular type needs a subject argument");
      continue;
    }
    const SourceTerm& x = c.head.args[0];
    if (x.is_var()) rep.violations.push_back(where(c) + "head term must not be a variable");
    if (x.kind == TermKind::Flt) rep.violations.push_back(where(c) + "float constants cannot be constructors");
    std::vector<std::uint32_t> seen;
    std::vector<std::uint32_t> term_vars;
    bool linear = true;
    std::function<void(const SourceTerm&)> walk = [&](const SourceTerm& t) {
      if (t.is_var()) {
        for (auto v : term_vars)
          if (v == t.var) linear = false;
        term_vars.push_back(t.var);
      }
      if (t.kind == TermKind::Flt && &t != &x)
        rep.violations.push_back(where(c) + "float constants cannot be constructors");
      for (const auto& a : t.args) walk(a);
    };
    walk(x);
    if (!linear) rep.violations.push_back(where(c) + "non-linear head term (repeated variable)");
    std::vector<std::uint32_t> params;
    for (std::size_t i = 1; i < c.head.arity(); ++i) {
      const SourceTerm& v = c.head.args[i];
      bool ok = v.is_var();
      for (auto p : params)
        if (ok && p == v.var) ok = false;
      for (auto tv : term_vars)
        if (ok && tv == v.var) ok = false;
      if (!ok) {
        rep.violations.push_back(where(c) + "parametric arguments must be distinct fresh variables");
        break;
      }
      params.push_back(v.var);
    }
    auto is_param = [&](std::uint32_t v) {
      for (auto p : params)
        if (p == v) return true;
      return false;
    };
    auto is_term_var = [&](const SourceTerm& t) {
      if (!t.is_var()) return false;
      for (auto tv : term_vars)
        if (tv == t.var) return true;
      return false;
    };
    std::function<bool(const SourceTerm&)> type_expr = [&](const SourceTerm& e) -> bool {
      if (e.is_var()) return is_param(e.var);
      if (e.kind == TermKind::Atom) return is_type_name(e.functor, 1);
      if (e.kind == TermKind::Struct) {
        if (!is_type_name(e.functor, static_cast<std::uint32_t>(e.arity() + 1))) return false;
        for (const auto& a : e.args)
          if (!type_expr(a)) return false;
        return true;
      }
      return false;
    };
    for (const SourceTerm& lit : c.body) {
      const SourceTerm* subject = nullptr;
      bool ok = false;
      if (lit.kind == TermKind::Struct && sy.name(lit.functor) == "call" && lit.arity() == 2) {
        subject = &lit.args[1];
        ok = type_expr(lit.args[0]);
      } else if (lit.kind == TermKind::Struct &&
                 is_type_name(lit.functor, static_cast<std::uint32_t>(lit.arity()))) {
        subject = &lit.args[0];
        ok = true;
        for (std::size_t i = 1; i < lit.arity(); ++i)
          if (!type_expr(lit.args[i])) ok = false;
      }
      if (!ok || !subject || !is_term_var(*subject)) {
        rep.violations.push_back(where(c) + "body literal " + to_string(lit, sy, &c.var_names) +
                                 " is not a type literal on a head variable");
        continue;
      }
      for (auto s : seen)
        if (s == subject->var) {
          rep.violations.push_back(where(c) + "variable " + c.var_names[s] + " has more than one type");
          ok = false;
        }
      if (ok) seen.push_back(subject->var);
    }
  }
  for (std::size_t i = 0; i < pred.clauses.size(); ++i) {
    for (std::size_t j = i + 1; j < pred.clauses.size(); ++j) {
      const Clause& a = pred.clauses[i];
      const Clause& b = pred.clauses[j];
      if (a.head.arity() == 0 || b.head.arity() == 0) continue;
      const SourceTerm& xa = a.head.args[0];
      const SourceTerm& xb = b.head.args[0];
      detail::SourceUnifier u;
      if (u.unify(xa, 0, xb, a.num_vars + 1)) {
        rep.violations.push_back("clauses at lines " + std::to_string(a.line) + " and " +
                                 std::to_string(b.line) + ": heads unify");
      } else if (!xa.is_var() && !xb.is_var() && xa.kind == xb.kind &&
                 xa.kind == TermKind::Struct && xa.functor == xb.functor &&
                 xa.arity() == xb.arity()) {
        rep.violations.push_back("clauses at lines " + std::to_string(a.line) + " and " +
                                 std::to_string(b.line) +
                                 ": same principal functor, not top-down deterministic");
      }
    }
  }
  return rep;
}

/// All compiled regular-type instances of one program, sharing one state
/// space. Each instance is identified by its single final state.
class TypeTable {
 public:
  static constexpr StateId kAny = 0, kInt = 1, kFlt = 2, kNum = 3, kAtm = 4;

  explicit TypeTable(const Program& prog) : prog_(&prog) {
    add_primitive("term", Primitive::Any);
    add_primitive("int", Primitive::Int);
    add_primitive("flt", Primitive::Flt);
    add_primitive("num", Primitive::Num);
    add_primitive("atm", Primitive::Atm);
  }

  std::size_t size() const { return states_.size(); }
  const TypeState& state(StateId q) const {
    if (q >= states_.size()) throw InternalError("unknown automaton state " + std::to_string(q));
    return states_[q];
  }
  const std::string& name(StateId q) const { return state(q).name; }

  /// Constructors(t): every transition whose target is t.
  std::span<const Transition> constructors(StateId q) const { return state(q).transitions; }

  /// Transition of state q for functor f, or null.
  const Transition* find(StateId q, const FunctorKey& f) const {
    const TypeState& s = states_[q];
    if (s.transitions.size() <= kLinearScanLimit) {
      for (const auto& t : s.transitions)
        if (t.functor == f) return &t;
      return nullptr;
    }
    auto it = s.index.find(f);
    return it == s.index.end() ? nullptr : &s.transitions[it->second];
  }

  /// Resolves a type name applied to parameter states. Instances are memoized
  /// so repeated instantiation yields the same state.
  StateId instantiate(PredKey type, std::span<const StateId> params, int depth = 0) {
    if (type.arity == 1 && params.empty())
      if (auto p = detail::primitive_named(prog_->symbols.name(type.name)))
        return primitive_state(*p);
    Key key{type, std::vector<StateId>(params.begin(), params.end())};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (depth > kMaxInstantiationDepth)
      throw InstantiationDepthExceeded("instantiation of " + prog_->display(type) +
                                       " exceeds depth " + std::to_string(kMaxInstantiationDepth));
    const Predicate* pred = prog_->find(type);
    if (!pred || !pred->is_regtype)
      throw DefinitionError("unknown regular type " + prog_->display(type));
    if (params.size() + 1 != type.arity)
      throw InternalError("parameter count mismatch for " + prog_->display(type));
    if (validated_.insert(type).second) {
      auto rep = validate_regular_program(*prog_, *pred);
      if (!rep.ok())
        throw DefinitionError(prog_->display(type) + " is not a regular type: " + rep.violations.front());
    }
    StateId q = new_state(instance_name(type, params));
    memo_.emplace(std::move(key), q);
    for (const Clause& c : pred->clauses) {
      std::vector<std::optional<StateId>> env(c.num_vars);
      for (std::size_t i = 1; i < c.head.arity(); ++i) env[c.head.args[i].var] = params[i - 1];
      std::vector<std::optional<StateId>> var_type(c.num_vars);
      for (const SourceTerm& lit : c.body) {
        std::uint32_t subject;
        StateId t;
        if (prog_->symbols.name(lit.functor) == "call" && lit.arity() == 2) {
          subject = lit.args[1].var;
          t = resolve_expr(lit.args[0], env, depth);
        } else {
          subject = lit.args[0].var;
          std::vector<StateId> ps;
          for (std::size_t i = 1; i < lit.arity(); ++i) ps.push_back(resolve_expr(lit.args[i], env, depth));
          t = instantiate({lit.functor, static_cast<std::uint32_t>(lit.arity())}, ps, depth + 1);
        }
        var_type[subject] = t;
      }
      add_transition(q, compile_head(c.head.args[0], var_type, q));
    }
    return q;
  }

  /// Resolves a type expression such as `int`, `list(int)` or `bintree(list(atm))`.
  StateId resolve(const SourceTerm& expr) {
    std::vector<std::optional<StateId>> env;
    return resolve_expr(expr, env, 0);
  }

  StateId primitive_state(Primitive p) const {
    switch (p) {
      case Primitive::Any: return kAny;
      case Primitive::Int: return kInt;
      case Primitive::Flt: return kFlt;
      case Primitive::Num: return kNum;
      case Primitive::Atm: return kAtm;
      default: break;
    }
    throw InternalError("not a primitive");
  }

  /// One transition per line, `f/n(q_1,...) -> q`, for every state reachable
  /// from `root` (breadth-first, clause order).
  std::string dump(StateId root) const {
    std::string out;
    std::vector<bool> seen(states_.size(), false);
    std::deque<StateId> queue{root};
    seen[root] = true;
    while (!queue.empty()) {
      StateId q = queue.front();
      queue.pop_front();
      for (const auto& t : states_[q].transitions) {
        out += detail::functor_text(t.functor, prog_->symbols);
        if (!t.args.empty()) {
          out += '(';
          for (std::size_t i = 0; i < t.args.size(); ++i) {
            if (i) out += ',';
            out += states_[t.args[i]].name;
            if (!seen[t.args[i]]) {
              seen[t.args[i]] = true;
              queue.push_back(t.args[i]);
            }
          }
          out += ')';
        }
        out += " -> " + states_[q].name + "\n";
      }
    }
    return out;
  }

  /// Top-down determinism: at most one transition per (functor, state).
  bool is_deterministic() const {
    for (const auto& s : states_)
      for (std::size_t i = 0; i < s.transitions.size(); ++i)
        for (std::size_t j = i + 1; j < s.transitions.size(); ++j)
          if (s.transitions[i].functor == s.transitions[j].functor) return false;
    return true;
  }

 private:
  struct Key {
    PredKey type;
    std::vector<StateId> params;
    auto operator<=>(const Key&) const = default;
  };

  void add_primitive(const char* name, Primitive p) {
    StateId q = new_state(name);
    states_[q].primitive = p;
  }

  StateId new_state(std::string name) {
    states_.push_back(TypeState{std::move(name), Primitive::None, {}, {}});
    return static_cast<StateId>(states_.size() - 1);
  }

  std::string instance_name(PredKey type, std::span<const StateId> params) const {
    std::string n = quote_atom(prog_->symbols.name(type.name));
    if (!params.empty()) {
      n += '(';
      for (std::size_t i = 0; i < params.size(); ++i) {
        if (i) n += ',';
        n += states_[params[i]].name;
      }
      n += ')';
    }
    return n;
  }

  StateId resolve_expr(const SourceTerm& e, const std::vector<std::optional<StateId>>& env, int depth) {
    if (e.is_var()) {
      if (e.var < env.size() && env[e.var]) return *env[e.var];
      throw DefinitionError("unbound type parameter in type expression");
    }
    if (e.kind == TermKind::Atom) return instantiate({e.functor, 1}, {}, depth + 1);
    if (e.kind == TermKind::Struct) {
      std::vector<StateId> ps;
      for (const auto& a : e.args) ps.push_back(resolve_expr(a, env, depth));
      return instantiate({e.functor, static_cast<std::uint32_t>(e.arity() + 1)}, ps, depth + 1);
    }
    throw DefinitionError("malformed type expression " + to_string(e, prog_->symbols));
  }

  Transition compile_head(const SourceTerm& x, const std::vector<std::optional<StateId>>& var_type,
                          StateId owner) {
    Transition t;
    switch (x.kind) {
      case TermKind::Atom: t.functor = {TermKind::Atom, x.functor, 0, 0}; break;
      case TermKind::Int: t.functor = {TermKind::Int, 0, 0, x.ival}; break;
      case TermKind::Struct:
        t.functor = {TermKind::Struct, x.functor, static_cast<std::uint32_t>(x.arity()), 0};
        for (const auto& a : x.args) {
          if (a.is_var()) {
            t.args.push_back(var_type[a.var] ? *var_type[a.var] : kAny);
          } else {
            // Nested constructor in a head: an anonymous single-rule state.
            StateId sub = new_state(states_[owner].name + "." + std::to_string(states_.size()));
            add_transition(sub, compile_head(a, var_type, sub));
            t.args.push_back(sub);
          }
        }
        break;
      default: throw DefinitionError("invalid constructor in regular type head");
    }
    return t;
  }

  void add_transition(StateId q, Transition t) {
    TypeState& s = states_[q];
    for (const auto& existing : s.transitions)
      if (existing.functor == t.functor)
        throw DefinitionError("non-deterministic automaton for " + s.name);
    s.transitions.push_back(std::move(t));
    if (s.transitions.size() > kLinearScanLimit) {
      s.index.clear();
      for (std::uint32_t i = 0; i < s.transitions.size(); ++i) s.index.emplace(s.transitions[i].functor, i);
    }
  }

  const Program* prog_;
  std::vector<TypeState> states_;
  std::map<Key, StateId> memo_;
  std::set<PredKey> validated_;
};

/// Membership by a plain run of the automaton: no cache, no counters. A free
/// variable is accepted only by the `term` state.
inline bool brute_force_recognize(const TypeTable& types, const Store& store, NodeId x, StateId q) {
  x = store.deref(x);
  const TypeState& s = types.state(q);
  TermKind k = store.kind(x);
  switch (s.primitive) {
    case Primitive::Any: return true;
    case Primitive::Int: return k == TermKind::Int;
    case Primitive::Flt: return k == TermKind::Flt;
    case Primitive::Num: return k == TermKind::Int || k == TermKind::Flt;
    case Primitive::Atm: return k == TermKind::Atom;
    case Primitive::None: break;
  }
  if (k == TermKind::Var || k == TermKind::Flt) return false;
  FunctorKey f = FunctorKey::of(store, x);
  for (const Transition& t : s.transitions) {
    if (!(t.functor == f)) continue;
    for (std::size_t i = 0; i < t.args.size(); ++i)
      if (!brute_force_recognize(types, store, store.arg(x, i), t.args[i])) return false;
    return true;
  }
  return false;
}

}  // namespace memocheck
