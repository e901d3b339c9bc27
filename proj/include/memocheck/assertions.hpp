#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "memocheck/automata.hpp"
#include "memocheck/checker.hpp"
#include "memocheck/errors.hpp"
#include "memocheck/program.hpp"

namespace memocheck {

/// A prop literal as resolved against the type table, with its source form
/// kept for printing.
struct Literal {
  Prop prop;
  SourceTerm source;
};

using Conjunction = std::vector<Literal>;
using LiteralDnf = std::vector<Conjunction>;

struct Condition {
  enum class Kind { Calls, Success };
  Kind kind = Kind::Calls;
  PredKey pred{};
  LiteralDnf pre;   // calls: the disjunction of all preconditions
  LiteralDnf post;  // success only
  std::uint32_t index = 0;  // 0 for calls, i for the i-th success condition
  std::uint32_t id = 0;     // program-wide
  int line = 0;
  std::string label;        // e.g. "p/2:C2"
};

/// All conditions of one predicate. `conditions[0]` is the calls condition.
struct ConditionSet {
  PredKey pred{};
  std::uint32_t arity = 0;
  std::vector<std::string> var_names;
  std::vector<Condition> conditions;

  bool empty() const { return conditions.empty(); }
  const Condition& calls() const { return conditions.front(); }
  /// A calls condition with an empty disjunct is `true`.
  bool calls_trivial() const {
    if (conditions.empty()) return true;
    for (const auto& c : calls().pre)
      if (c.empty()) return true;
    return false;
  }
  std::size_t success_count() const { return conditions.empty() ? 0 : conditions.size() - 1; }
};

/// A labeled instance of a condition for one call-site atom.
struct ConditionInstance {
  const Condition* condition;
  std::uint64_t asr_id;
};

namespace detail {

inline SourceTerm apply_type_expr(const SourceTerm& type, const SourceTerm& subject) {
  std::vector<SourceTerm> args{subject};
  for (const auto& a : type.args) args.push_back(a);
  return SourceTerm::compound(type.functor, std::move(args));
}

}  // namespace detail

/// Resolves `int(X)`, `ground(X)`, `list(X,int)` or `call(list(int),X)` with
/// X a head variable (variable i is argument i).
inline Literal resolve_prop(const SourceTerm& lit, const Program& prog, TypeTable& types) {
  const SymbolTable& sy = prog.symbols;
  if (lit.kind == TermKind::Struct && sy.name(lit.functor) == "call" && lit.arity() == 2 &&
      lit.args[0].is_callable())
    return resolve_prop(detail::apply_type_expr(lit.args[0], lit.args[1]), prog, types);
  if (lit.kind != TermKind::Struct)
    throw DefinitionError("property " + to_string(lit, sy) + " must be applied to an argument");
  const std::string& name = sy.name(lit.functor);
  if (!lit.args[0].is_var())
    throw DefinitionError("property " + to_string(lit, sy) + " must be applied to a head variable");
  Literal out{{}, lit};
  out.prop.arg = lit.args[0].var;
  if (lit.arity() == 1) {
    if (auto k = builtin_prop(name)) {
      out.prop.kind = *k;
      return out;
    }
  }
  PredKey key{lit.functor, static_cast<std::uint32_t>(lit.arity())};
  const Predicate* p = prog.find(key);
  if (!p || !p->is_regtype) throw DefinitionError("undeclared property " + prog.display(key));
  std::vector<StateId> params;
  for (std::size_t i = 1; i < lit.arity(); ++i) {
    if (lit.args[i].is_var())
      throw DefinitionError("type argument of " + to_string(lit, sy) + " must be a type expression");
    params.push_back(types.resolve(lit.args[i]));
  }
  out.prop.kind = PropKind::Regtype;
  out.prop.state = types.instantiate(key, params);
  return out;
}

/// Builds {C0, C1..Cn}: C0 = calls(Head, OR of all Pre), Ci = success(Head,
/// Pre_i, Post_i) for every assertion with a postcondition. An absent Pre is
/// `true`. `next_id` numbers conditions program-wide.
inline ConditionSet normalize_assertions(const Program& prog, const Predicate& pred, TypeTable& types,
                                         std::uint32_t& next_id) {
  ConditionSet out;
  out.pred = pred.key;
  out.arity = pred.key.arity;
  if (pred.assertions.empty()) return out;

  auto resolve_dnf = [&](const Dnf& d) {
    LiteralDnf r;
    for (const auto& conj : d) {
      Conjunction c;
      for (const auto& l : conj) c.push_back(resolve_prop(l, prog, types));
      r.push_back(std::move(c));
    }
    return r;
  };
  std::string base = prog.display(pred.key) + ":C";

  Condition calls;
  calls.kind = Condition::Kind::Calls;
  calls.pred = pred.key;
  calls.line = pred.assertions.front().line;
  for (const auto& a : pred.assertions) {
    if (a.arity != pred.key.arity || a.name != pred.key.name)
      throw DefinitionError("assertion on line " + std::to_string(a.line) + " does not match " +
                            prog.display(pred.key));
    if (out.var_names.empty()) out.var_names = a.var_names;
    LiteralDnf pre = a.pre ? resolve_dnf(*a.pre) : LiteralDnf{Conjunction{}};
    for (auto& c : pre) calls.pre.push_back(c);
  }
  calls.id = next_id++;
  calls.label = base + "0";
  out.conditions.push_back(std::move(calls));

  for (const auto& a : pred.assertions) {
    if (!a.post) continue;
    Condition s;
    s.kind = Condition::Kind::Success;
    s.pred = pred.key;
    s.line = a.line;
    s.pre = a.pre ? resolve_dnf(*a.pre) : LiteralDnf{Conjunction{}};
    s.post = resolve_dnf(*a.post);
    s.index = static_cast<std::uint32_t>(out.conditions.size());
    s.id = next_id++;
    s.label = base + std::to_string(s.index);
    out.conditions.push_back(std::move(s));
  }
  return out;
}

/// Fresh labels for the conditions of one call-site atom. The renaming of the
/// head onto the atom is implicit: literals address arguments by position.
inline std::vector<ConditionInstance> label_instances(const ConditionSet& set, std::uint64_t& next_asr_id) {
  std::vector<ConditionInstance> out;
  for (const auto& c : set.conditions) out.push_back({&c, next_asr_id++});
  return out;
}

/// Direct evaluation of a DNF over the call arguments (no transformation).
template <class Eval>
bool evaluate_dnf(const LiteralDnf& d, Eval&& eval) {
  bool any = false;
  for (const auto& conj : d) {
    bool all = true;
    for (const auto& l : conj) all = eval(l.prop) && all;
    any = all || any;
  }
  return any;
}

inline std::string literal_text(const Literal& l, const Program& prog, const std::vector<std::string>& names) {
  return to_string(l.source, prog.symbols, &names, 999);
}

}  // namespace memocheck
