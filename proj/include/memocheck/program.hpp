#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "memocheck/errors.hpp"
#include "memocheck/source_term.hpp"
#include "memocheck/symbols.hpp"

namespace memocheck {

/// Disjunction of conjunctions of prop literals.
using Dnf = std::vector<std::vector<SourceTerm>>;

struct Clause {
  SourceTerm head;
  std::vector<SourceTerm> body;  // top-level conjunction, flattened
  std::vector<std::string> var_names;
  std::uint32_t num_vars = 0;
  int line = 0;
};

/// `:- pred Head : Pre => Post.` with the head normalized to p(V0,...,Vn-1):
/// variable i of every literal refers to argument position i.
struct PredAssertion {
  SymbolId name = 0;
  std::uint32_t arity = 0;
  std::optional<Dnf> pre;
  std::optional<Dnf> post;
  std::vector<std::string> var_names;  // indexed by argument position
  int line = 0;
};

struct PredKey {
  SymbolId name;
  std::uint32_t arity;
  auto operator<=>(const PredKey&) const = default;
};

struct Predicate {
  PredKey key;
  std::vector<Clause> clauses;
  std::vector<PredAssertion> assertions;
  bool is_regtype = false;
  int line = 0;
};

struct Program {
  SymbolTable symbols;
  std::vector<Predicate> predicates;
  std::map<PredKey, std::size_t> index;

  const Predicate* find(PredKey k) const {
    auto it = index.find(k);
    return it == index.end() ? nullptr : &predicates[it->second];
  }
  const Predicate* find(std::string_view name, std::uint32_t arity) const {
    for (const auto& p : predicates)
      if (p.key.arity == arity && symbols.name(p.key.name) == name) return &p;
    return nullptr;
  }
  Predicate& get_or_add(PredKey k, int line) {
    auto it = index.find(k);
    if (it != index.end()) return predicates[it->second];
    index.emplace(k, predicates.size());
    predicates.push_back(Predicate{k, {}, {}, false, line});
    return predicates.back();
  }
  std::string display(PredKey k) const {
    return symbols.name(k.name) + "/" + std::to_string(k.arity);
  }
};

/// Head in normalized form p(X0..Xn-1) with the original arguments moved into
/// leading equations `Xi = ti` of the body.
inline Clause normalize_clause(const Clause& c, SymbolTable& symbols) {
  Clause out;
  out.line = c.line;
  std::uint32_t n = static_cast<std::uint32_t>(c.head.arity());
  std::uint32_t base = c.num_vars;
  std::vector<SourceTerm> head_args;
  SymbolId eq = symbols.intern("=");
  for (std::uint32_t i = 0; i < n; ++i) {
    head_args.push_back(SourceTerm::variable(base + i));
    out.body.push_back(SourceTerm::compound(eq, {SourceTerm::variable(base + i), c.head.args[i]}));
  }
  out.head = SourceTerm::compound(c.head.functor, std::move(head_args));
  out.body.insert(out.body.end(), c.body.begin(), c.body.end());
  out.var_names = c.var_names;
  out.var_names.resize(base + n);
  for (std::uint32_t i = 0; i < n; ++i) out.var_names[base + i] = "H" + std::to_string(i);
  out.num_vars = base + n;
  return out;
}

}  // namespace memocheck
