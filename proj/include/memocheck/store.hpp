#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "memocheck/errors.hpp"
#include "memocheck/source_term.hpp"
#include "memocheck/symbols.hpp"
#include "memocheck/writer.hpp"

namespace memocheck {

/// Index of a heap cell. Assigned monotonically and never reused, so a node id
/// names the same structure for the whole lifetime of a store.
using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = 0xffffffffu;

/// A trail checkpoint. Only epochs issued by `mark()` and not yet released
/// may be passed to `undo_to()`.
struct Epoch {
  std::uint32_t serial = 0;
  std::uint32_t trail_pos = 0;
  friend bool operator==(const Epoch&, const Epoch&) = default;
};

/// Fired by `undo_to()` after bindings have been removed.
struct UndoEvent {
  std::uint32_t trail_pos;            // bindings at trail positions >= this were undone
  std::span<const NodeId> unbound;    // the variables that became free again
};

/// Heap of term cells plus the Herbrand binding store (the constraint store)
/// with a trail for chronological undo.
class Store {
 public:
  struct Cell {
    TermKind kind;
    std::uint32_t a = 0;  // Var: binding (self when free). Atom/Struct: functor.
    std::uint32_t b = 0;  // Var: trail position of the binding. Struct: arity.
    std::uint32_t c = 0;  // Struct: offset of the first argument in args_.
    union {
      std::int64_t i;
      double f;
    };
    Cell() : kind(TermKind::Var), i(0) {}
  };

  explicit Store(SymbolTable& symbols) : symbols_(&symbols) {}

  SymbolTable& symbols() const { return *symbols_; }

  bool occurs_check = false;

  // -- construction --------------------------------------------------------

  NodeId new_var() {
    NodeId id = next_id();
    Cell cell;
    cell.kind = TermKind::Var;
    cell.a = id;
    cells_.push_back(cell);
    return id;
  }
  NodeId new_atom(SymbolId s) {
    Cell cell;
    cell.kind = TermKind::Atom;
    cell.a = s;
    return push(cell);
  }
  NodeId new_atom(std::string_view name) { return new_atom(symbols_->intern(name)); }
  NodeId new_int(std::int64_t v) {
    Cell cell;
    cell.kind = TermKind::Int;
    cell.i = v;
    return push(cell);
  }
  NodeId new_float(double v) {
    Cell cell;
    cell.kind = TermKind::Flt;
    cell.f = v;
    return push(cell);
  }
  NodeId new_struct(SymbolId f, std::span<const NodeId> args) {
    if (args.empty()) return new_atom(f);
    Cell cell;
    cell.kind = TermKind::Struct;
    cell.a = f;
    cell.b = static_cast<std::uint32_t>(args.size());
    cell.c = static_cast<std::uint32_t>(args_.size());
    args_.insert(args_.end(), args.begin(), args.end());
    return push(cell);
  }
  NodeId new_struct(std::string_view f, std::initializer_list<NodeId> args) {
    return new_struct(symbols_->intern(f), std::span<const NodeId>(args.begin(), args.size()));
  }
  NodeId new_list(std::span<const NodeId> items, NodeId tail = kNoNode) {
    NodeId t = tail == kNoNode ? new_atom(nil_symbol()) : tail;
    SymbolId dot = symbols_->intern(".");
    for (auto it = items.rbegin(); it != items.rend(); ++it) {
      NodeId pair[2] = {*it, t};
      t = new_struct(dot, pair);
    }
    return t;
  }

  /// Copies a source term into the heap. `varmap` maps clause variables to
  /// heap variables; unset entries (kNoNode) get fresh variables.
  NodeId copy_in(const SourceTerm& t, std::vector<NodeId>& varmap) {
    switch (t.kind) {
      case TermKind::Var: {
        if (t.var >= varmap.size()) varmap.resize(t.var + 1, kNoNode);
        if (varmap[t.var] == kNoNode) varmap[t.var] = new_var();
        return varmap[t.var];
      }
      case TermKind::Atom: return new_atom(t.functor);
      case TermKind::Int: return new_int(t.ival);
      case TermKind::Flt: return new_float(t.fval);
      case TermKind::Struct: {
        NodeId local[8];
        std::vector<NodeId> big;
        NodeId* out = local;
        if (t.args.size() > 8) {
          big.resize(t.args.size());
          out = big.data();
        }
        for (std::size_t i = 0; i < t.args.size(); ++i) out[i] = copy_in(t.args[i], varmap);
        return new_struct(t.functor, std::span<const NodeId>(out, t.args.size()));
      }
    }
    throw InternalError("copy_in: bad term kind");
  }

  // -- inspection ----------------------------------------------------------

  NodeId deref(NodeId n) const {
    while (true) {
      const Cell& c = cells_[n];
      if (c.kind != TermKind::Var || c.a == n) return n;
      n = c.a;
    }
  }
  const Cell& cell(NodeId n) const { return cells_[n]; }
  TermKind kind(NodeId n) const { return cells_[n].kind; }
  bool is_free(NodeId n) const { return cells_[n].kind == TermKind::Var && cells_[n].a == n; }
  SymbolId functor(NodeId n) const { return cells_[n].a; }
  std::uint32_t arity(NodeId n) const {
    return cells_[n].kind == TermKind::Struct ? cells_[n].b : 0;
  }
  NodeId arg(NodeId n, std::size_t i) const { return args_[cells_[n].c + i]; }
  std::int64_t int_value(NodeId n) const { return cells_[n].i; }
  double float_value(NodeId n) const { return cells_[n].f; }
  std::size_t size() const { return cells_.size(); }
  /// Trail position at which a bound variable was bound.
  std::uint32_t binding_position(NodeId var) const { return cells_[var].b; }

  SymbolId nil_symbol() const { return symbols_->intern("[]"); }

  // -- bindings ------------------------------------------------------------

  std::uint32_t trail_size() const { return static_cast<std::uint32_t>(trail_.size()); }
  std::span<const NodeId> trail() const { return trail_; }

  void bind(NodeId var, NodeId value) {
    Cell& c = cells_[var];
    c.a = value;
    c.b = trail_size();
    trail_.push_back(var);
  }

  /// Unifies two terms. On failure the store is left exactly as before.
  bool unify(NodeId x, NodeId y) {
    std::uint32_t start = trail_size();
    if (unify_impl(x, y)) return true;
    reset_trail(start);
    return false;
  }

  /// Unifies a source term against a heap term, copying only what has to be
  /// bound to a free variable. Used for clause-head matching.
  bool unify_source(const SourceTerm& s, NodeId n, std::vector<NodeId>& varmap) {
    std::uint32_t start = trail_size();
    if (unify_source_impl(s, n, varmap)) return true;
    reset_trail(start);
    return false;
  }

  Epoch mark() {
    Epoch e{next_serial_++, trail_size()};
    live_.push_back(e);
    return e;
  }

  /// Removes every binding made after `e`. `e` stays live; epochs issued
  /// after it are released.
  void undo_to(const Epoch& e) {
    std::size_t idx = find_live(e);
    live_.resize(idx + 1);
    if (e.trail_pos > trail_.size()) throw InternalError("epoch beyond trail");
    unbound_scratch_.clear();
    for (std::size_t i = trail_.size(); i-- > e.trail_pos;) {
      NodeId v = trail_[i];
      cells_[v].a = v;
      unbound_scratch_.push_back(v);
    }
    trail_.resize(e.trail_pos);
    if (undo_hook_) undo_hook_(UndoEvent{e.trail_pos, unbound_scratch_});
  }

  /// Forgets `e` and every later epoch without undoing bindings (a cut).
  void release(const Epoch& e) { live_.resize(find_live(e)); }

  bool is_live(const Epoch& e) const {
    for (const auto& l : live_)
      if (l == e) return true;
    return false;
  }

  void set_undo_hook(std::function<void(const UndoEvent&)> hook) { undo_hook_ = std::move(hook); }

  /// Snapshot of the binding map, for tests comparing stores.
  std::vector<NodeId> binding_snapshot() const {
    std::vector<NodeId> out(cells_.size(), kNoNode);
    for (NodeId i = 0; i < cells_.size(); ++i)
      if (cells_[i].kind == TermKind::Var) out[i] = cells_[i].a;
    return out;
  }

  bool identical(NodeId x, NodeId y) const {
    x = deref(x);
    y = deref(y);
    if (x == y) return true;
    const Cell& a = cells_[x];
    const Cell& b = cells_[y];
    if (a.kind != b.kind) return false;
    switch (a.kind) {
      case TermKind::Var: return false;
      case TermKind::Atom: return a.a == b.a;
      case TermKind::Int: return a.i == b.i;
      case TermKind::Flt: return a.f == b.f;
      case TermKind::Struct:
        if (a.a != b.a || a.b != b.b) return false;
        for (std::uint32_t i = 0; i < a.b; ++i)
          if (!identical(arg(x, i), arg(y, i))) return false;
        return true;
    }
    return false;
  }

  bool is_ground(NodeId n) const {
    n = deref(n);
    const Cell& c = cells_[n];
    if (c.kind == TermKind::Var) return false;
    if (c.kind != TermKind::Struct) return true;
    for (std::uint32_t i = 0; i < c.b; ++i)
      if (!is_ground(arg(n, i))) return false;
    return true;
  }

 private:
  NodeId next_id() const {
    if (cells_.size() >= kNoNode) throw ExecutionError("heap exhausted");
    return static_cast<NodeId>(cells_.size());
  }
  NodeId push(const Cell& c) {
    NodeId id = next_id();
    cells_.push_back(c);
    return id;
  }

  std::size_t find_live(const Epoch& e) const {
    for (std::size_t i = live_.size(); i-- > 0;)
      if (live_[i] == e) return i;
    throw InternalError("unknown trail epoch " + std::to_string(e.serial));
  }

  void reset_trail(std::uint32_t pos) {
    for (std::size_t i = trail_.size(); i-- > pos;) cells_[trail_[i]].a = trail_[i];
    trail_.resize(pos);
  }

  bool occurs(NodeId var, NodeId t) const {
    t = deref(t);
    if (t == var) return true;
    if (cells_[t].kind != TermKind::Struct) return false;
    for (std::uint32_t i = 0; i < cells_[t].b; ++i)
      if (occurs(var, arg(t, i))) return true;
    return false;
  }

  bool bind_var(NodeId var, NodeId value) {
    if (occurs_check && cells_[value].kind == TermKind::Struct && occurs(var, value))
      return false;
    bind(var, value);
    return true;
  }

  bool unify_impl(NodeId x0, NodeId y0) {
    std::vector<std::pair<NodeId, NodeId>>& stack = unify_stack_;
    stack.clear();
    stack.emplace_back(x0, y0);
    while (!stack.empty()) {
      auto [x, y] = stack.back();
      stack.pop_back();
      x = deref(x);
      y = deref(y);
      if (x == y) continue;
      const Cell& a = cells_[x];
      const Cell& b = cells_[y];
      if (a.kind == TermKind::Var && b.kind == TermKind::Var) {
        // Younger variable points at the older one.
        if (x < y) bind(y, x);
        else bind(x, y);
        continue;
      }
      if (a.kind == TermKind::Var) {
        if (!bind_var(x, y)) return false;
        continue;
      }
      if (b.kind == TermKind::Var) {
        if (!bind_var(y, x)) return false;
        continue;
      }
      if (a.kind != b.kind) return false;
      switch (a.kind) {
        case TermKind::Atom:
          if (a.a != b.a) return false;
          break;
        case TermKind::Int:
          if (a.i != b.i) return false;
          break;
        case TermKind::Flt:
          if (a.f != b.f) return false;
          break;
        case TermKind::Struct:
          if (a.a != b.a || a.b != b.b) return false;
          for (std::uint32_t i = a.b; i-- > 0;) stack.emplace_back(arg(x, i), arg(y, i));
          break;
        case TermKind::Var:
          break;
      }
    }
    return true;
  }

  bool unify_source_impl(const SourceTerm& s, NodeId n, std::vector<NodeId>& varmap) {
    if (s.kind == TermKind::Var) {
      if (s.var >= varmap.size()) varmap.resize(s.var + 1, kNoNode);
      if (varmap[s.var] == kNoNode) {
        varmap[s.var] = n;
        return true;
      }
      return unify_impl(varmap[s.var], n);
    }
    n = deref(n);
    const Cell& c = cells_[n];
    if (c.kind == TermKind::Var) return bind_var(n, copy_in(s, varmap));
    if (c.kind != s.kind) return false;
    switch (s.kind) {
      case TermKind::Atom: return c.a == s.functor;
      case TermKind::Int: return c.i == s.ival;
      case TermKind::Flt: return c.f == s.fval;
      case TermKind::Struct: {
        if (c.a != s.functor || c.b != s.args.size()) return false;
        for (std::size_t i = 0; i < s.args.size(); ++i)
          if (!unify_source_impl(s.args[i], arg(n, i), varmap)) return false;
        return true;
      }
      case TermKind::Var: break;
    }
    return false;
  }

  SymbolTable* symbols_;
  std::vector<Cell> cells_;
  std::vector<NodeId> args_;
  std::vector<NodeId> trail_;
  std::vector<Epoch> live_;
  std::uint32_t next_serial_ = 0;
  std::function<void(const UndoEvent&)> undo_hook_;
  std::vector<NodeId> unbound_scratch_;
  std::vector<std::pair<NodeId, NodeId>> unify_stack_;
};

/// Writer adapter over heap terms; free variables print as _G<id>.
struct StoreView {
  using Handle = NodeId;
  const Store& store;

  TermKind kind(Handle h) const { return store.kind(store.deref(h)); }
  const std::string& name(Handle h) const {
    return store.symbols().name(store.functor(store.deref(h)));
  }
  std::size_t arity(Handle h) const { return store.arity(store.deref(h)); }
  Handle arg(Handle h, std::size_t i) const { return store.arg(store.deref(h), i); }
  std::int64_t int_value(Handle h) const { return store.int_value(store.deref(h)); }
  double float_value(Handle h) const { return store.float_value(store.deref(h)); }
  std::string var_name(Handle h) const { return "_G" + std::to_string(store.deref(h)); }
};

inline std::string to_string(const Store& store, NodeId n) {
  StoreView view{store};
  return TermWriter<StoreView>(view).to_string(n);
}

}  // namespace memocheck
