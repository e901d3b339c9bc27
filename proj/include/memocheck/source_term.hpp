#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "memocheck/symbols.hpp"
#include "memocheck/writer.hpp"

namespace memocheck {

/// A term as written in program text. Variables are clause-local indices;
/// the engine copies these into its heap with fresh variables on every use.
struct SourceTerm {
  TermKind kind = TermKind::Atom;
  SymbolId functor = 0;
  std::int64_t ival = 0;
  double fval = 0.0;
  std::uint32_t var = 0;
  std::vector<SourceTerm> args;

  static SourceTerm variable(std::uint32_t index) {
    SourceTerm t;
    t.kind = TermKind::Var;
    t.var = index;
    return t;
  }
  static SourceTerm atom(SymbolId s) {
    SourceTerm t;
    t.kind = TermKind::Atom;
    t.functor = s;
    return t;
  }
  static SourceTerm integer(std::int64_t v) {
    SourceTerm t;
    t.kind = TermKind::Int;
    t.ival = v;
    return t;
  }
  static SourceTerm floating(double v) {
    SourceTerm t;
    t.kind = TermKind::Flt;
    t.fval = v;
    return t;
  }
  static SourceTerm compound(SymbolId f, std::vector<SourceTerm> args) {
    if (args.empty()) return atom(f);
    SourceTerm t;
    t.kind = TermKind::Struct;
    t.functor = f;
    t.args = std::move(args);
    return t;
  }

  bool is_var() const { return kind == TermKind::Var; }
  bool is_callable() const { return kind == TermKind::Atom || kind == TermKind::Struct; }
  std::size_t arity() const { return args.size(); }

  friend bool operator==(const SourceTerm& a, const SourceTerm& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
      case TermKind::Var: return a.var == b.var;
      case TermKind::Int: return a.ival == b.ival;
      case TermKind::Flt: return a.fval == b.fval;
      case TermKind::Atom: return a.functor == b.functor;
      case TermKind::Struct: return a.functor == b.functor && a.args == b.args;
    }
    return false;
  }

  void collect_vars(std::vector<std::uint32_t>& out) const {
    if (kind == TermKind::Var) {
      for (auto v : out)
        if (v == var) return;
      out.push_back(var);
    }
    for (const auto& a : args) a.collect_vars(out);
  }

  std::uint32_t max_var_plus_one() const {
    std::uint32_t m = kind == TermKind::Var ? var + 1 : 0;
    for (const auto& a : args) m = std::max(m, a.max_var_plus_one());
    return m;
  }
};

/// Writer adapter; variables print via the supplied name table.
struct SourceView {
  using Handle = const SourceTerm*;
  const SymbolTable& symbols;
  const std::vector<std::string>* var_names = nullptr;

  TermKind kind(Handle h) const { return h->kind; }
  const std::string& name(Handle h) const { return symbols.name(h->functor); }
  std::size_t arity(Handle h) const { return h->args.size(); }
  Handle arg(Handle h, std::size_t i) const { return &h->args[i]; }
  std::int64_t int_value(Handle h) const { return h->ival; }
  double float_value(Handle h) const { return h->fval; }
  std::string var_name(Handle h) const {
    if (var_names && h->var < var_names->size() && !(*var_names)[h->var].empty())
      return (*var_names)[h->var];
    return "_V" + std::to_string(h->var);
  }
};

inline std::string to_string(const SourceTerm& t, const SymbolTable& symbols,
                             const std::vector<std::string>* var_names = nullptr,
                             int max_priority = 1200) {
  SourceView view{symbols, var_names};
  return TermWriter<SourceView>(view).to_string(&t, max_priority);
}

}  // namespace memocheck
