#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "memocheck/automata.hpp"
#include "memocheck/cache.hpp"
#include "memocheck/store.hpp"

namespace memocheck {

enum class PropKind { Int, Flt, Num, Atm, Var, Term, Ground, Regtype };
enum class PropClass { Never, Cheap, Cacheable };

/// A resolved prop literal over a predicate's arguments: `kind` applied to
/// argument position `arg`, with `state` the automaton for regtypes.
struct Prop {
  PropKind kind = PropKind::Term;
  StateId state = 0;
  std::uint32_t arg = 0;
  friend bool operator==(const Prop&, const Prop&) = default;
  friend auto operator<=>(const Prop&, const Prop&) = default;
};

inline PropClass classify_prop(const Prop& p) {
  switch (p.kind) {
    case PropKind::Var: return PropClass::Never;
    case PropKind::Ground:
    case PropKind::Regtype: return PropClass::Cacheable;
    default: return PropClass::Cheap;
  }
}

inline std::optional<PropKind> builtin_prop(std::string_view name) {
  if (name == "int") return PropKind::Int;
  if (name == "flt") return PropKind::Flt;
  if (name == "num") return PropKind::Num;
  if (name == "atm") return PropKind::Atm;
  if (name == "var") return PropKind::Var;
  if (name == "term") return PropKind::Term;
  if (name == "ground") return PropKind::Ground;
  return std::nullopt;
}

/// Uncached succeeds-trivially for a prop on one subject term. None of the
/// props can bind anything, so evaluating them never touches the store.
inline bool succeeds_trivially(const Prop& p, const TypeTable& types, const Store& store, NodeId x) {
  x = store.deref(x);
  TermKind k = store.kind(x);
  switch (p.kind) {
    case PropKind::Int: return k == TermKind::Int;
    case PropKind::Flt: return k == TermKind::Flt;
    case PropKind::Num: return k == TermKind::Int || k == TermKind::Flt;
    case PropKind::Atm: return k == TermKind::Atom;
    case PropKind::Var: return k == TermKind::Var;
    case PropKind::Term: return true;
    case PropKind::Ground: return store.is_ground(x);
    case PropKind::Regtype: return brute_force_recognize(types, store, x, p.state);
  }
  return false;
}

/// Cached regular-type checker. `reg_check` follows the classic top-down run:
/// match a constructor, accept atomic values without caching, consult the
/// cache, recurse into the arguments and record the verified fact if it was
/// found above the depth limit.
class Checker {
 public:
  Checker(const TypeTable& types, const Store& store, CheckCache& cache)
      : types_(&types), store_(&store), cache_(&cache) {}

  CheckCache& cache() { return *cache_; }
  const Store& store() const { return *store_; }
  const TypeTable& types() const { return *types_; }

  /// Top-level check of x against state t.
  bool check_type(NodeId x, StateId t) {
    std::uint32_t wm = 0, depth = 0;
    bool ok = reg_check(x, t, 0, wm, depth);
    cache_->stats().record_check_depth(depth);
    return ok;
  }

  bool check_ground(NodeId x) {
    std::uint32_t wm = 0, depth = 0;
    bool ok = ground_check(x, 0, wm, depth);
    cache_->stats().record_check_depth(depth);
    return ok;
  }

  /// succeeds-trivially with the cache: cacheable props go through the
  /// cached traversals, the rest are evaluated directly.
  bool evaluate(const Prop& p, NodeId x) {
    switch (p.kind) {
      case PropKind::Regtype: return check_type(x, p.state);
      case PropKind::Ground: return check_ground(x);
      default: return succeeds_trivially(p, *types_, *store_, x);
    }
  }

  /// `wm` accumulates the trail watermark of the bindings this check read;
  /// `max_depth` the deepest recursion level reached.
  bool reg_check(NodeId x, StateId t, std::uint32_t d, std::uint32_t& wm, std::uint32_t& max_depth) {
    ++cache_->stats().node_visits;
    max_depth = std::max(max_depth, d);
    x = deref(x, wm);
    const TypeState& s = types_->state(t);
    TermKind k = store_->kind(x);
    switch (s.primitive) {
      case Primitive::Any: return true;
      case Primitive::Int: return k == TermKind::Int;
      case Primitive::Flt: return k == TermKind::Flt;
      case Primitive::Num: return k == TermKind::Int || k == TermKind::Flt;
      case Primitive::Atm: return k == TermKind::Atom;
      case Primitive::None: break;
    }
    if (k == TermKind::Var || k == TermKind::Flt) return false;
    const Transition* c = types_->find(t, FunctorKey::of(*store_, x));
    if (!c) return false;
    if (c->args.empty()) return true;  // atomic value, not cached
    if (auto hit = cache_->lookup(x, t)) {
      wm = std::max(wm, *hit);
      return true;
    }
    std::uint32_t local = 0;
    for (std::size_t i = 0; i < c->args.size(); ++i)
      if (!reg_check(store_->arg(x, i), c->args[i], d + 1, local, max_depth)) return false;
    cache_->insert(x, t, d, local);
    wm = std::max(wm, local);
    return true;
  }

  bool ground_check(NodeId x, std::uint32_t d, std::uint32_t& wm, std::uint32_t& max_depth) {
    ++cache_->stats().node_visits;
    max_depth = std::max(max_depth, d);
    x = deref(x, wm);
    TermKind k = store_->kind(x);
    if (k == TermKind::Var) return false;
    if (k != TermKind::Struct) return true;
    if (auto hit = cache_->lookup(x, kGroundType)) {
      wm = std::max(wm, *hit);
      return true;
    }
    std::uint32_t local = 0;
    for (std::uint32_t i = 0; i < store_->arity(x); ++i)
      if (!ground_check(store_->arg(x, i), d + 1, local, max_depth)) return false;
    cache_->insert(x, kGroundType, d, local);
    wm = std::max(wm, local);
    return true;
  }

  /// Debug audit: every resident fact must hold in the current store.
  /// Returns the first offending entry.
  std::optional<CacheKey> audit() const {
    std::map<CacheKey, bool> memo;
    for (const auto& e : cache_->entries())
      if (!oracle(e.key.node, e.key.type, memo)) return e.key;
    return std::nullopt;
  }

  bool oracle(NodeId x, TypeId t) const {
    std::map<CacheKey, bool> memo;
    return oracle(x, t, memo);
  }

 private:
  NodeId deref(NodeId n, std::uint32_t& wm) const {
    while (true) {
      const auto& c = store_->cell(n);
      if (c.kind != TermKind::Var || c.a == n) return n;
      wm = std::max(wm, c.b + 1);
      n = c.a;
    }
  }

  // Brute-force recognizer with a memo local to one audit pass, so auditing
  // many overlapping entries stays linear in the size of the terms.
  bool oracle(NodeId x, TypeId t, std::map<CacheKey, bool>& memo) const {
    x = store_->deref(x);
    if (store_->kind(x) != TermKind::Struct)
      return t == kGroundType ? store_->kind(x) != TermKind::Var : brute_force_recognize(*types_, *store_, x, t);
    auto it = memo.find({x, t});
    if (it != memo.end()) return it->second;
    bool ok = true;
    if (t == kGroundType) {
      for (std::uint32_t i = 0; ok && i < store_->arity(x); ++i) ok = oracle(store_->arg(x, i), kGroundType, memo);
    } else {
      const TypeState& s = types_->state(t);
      if (s.primitive != Primitive::None) {
        ok = s.primitive == Primitive::Any;
      } else {
        const Transition* c = types_->find(t, FunctorKey::of(*store_, x));
        ok = c != nullptr;
        for (std::size_t i = 0; ok && i < c->args.size(); ++i) ok = oracle(store_->arg(x, i), c->args[i], memo);
      }
    }
    memo.emplace(CacheKey{x, t}, ok);
    return ok;
  }

  const TypeTable* types_;
  const Store* store_;
  CheckCache* cache_;
};

/// Checks the cache-update law for one batch of prop evaluations: every entry
/// that appeared must be a true fact about a subterm of some evaluated
/// cacheable literal's subject. Entries may disappear freely.
inline std::optional<std::string> cache_update_semantics_check(
    const Checker& checker, const std::vector<std::pair<Prop, NodeId>>& evaluated,
    const std::vector<CheckCache::Entry>& before, const std::vector<CheckCache::Entry>& after) {
  std::vector<CacheKey> old;
  for (const auto& e : before) old.push_back(e.key);
  std::sort(old.begin(), old.end());
  const Store& store = checker.store();
  std::vector<char> reachable(store.size(), 0);
  std::vector<NodeId> stack;
  for (const auto& [p, x] : evaluated)
    if (classify_prop(p) == PropClass::Cacheable) stack.push_back(x);
  while (!stack.empty()) {
    NodeId n = store.deref(stack.back());
    stack.pop_back();
    if (reachable[n]) continue;
    reachable[n] = 1;
    for (std::uint32_t i = 0; i < store.arity(n); ++i) stack.push_back(store.arg(n, i));
  }
  for (const auto& e : after) {
    if (std::binary_search(old.begin(), old.end(), e.key)) continue;
    std::string what = "(" + std::to_string(e.key.node) + "," +
                       (e.key.type == kGroundType ? std::string("ground") : checker.types().name(e.key.type)) + ")";
    if (e.key.node >= reachable.size() || !reachable[e.key.node])
      return "entry " + what + " is not a subterm of any evaluated literal";
    if (!checker.oracle(e.key.node, e.key.type)) return "entry " + what + " does not hold";
  }
  return std::nullopt;
}

}  // namespace memocheck
