#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "memocheck/assertions.hpp"
#include "memocheck/program.hpp"

namespace memocheck {

struct BitInstr {
  enum class Op : std::uint8_t { Reify, And, Or, Implies };
  Op op = Op::Reify;
  std::uint32_t a = 0;  // operands (bit indices); Implies is (a # 1) \/ b
  std::uint32_t b = 0;
  std::uint32_t literal = 0;  // Reify: index into WrapperSet::literals
};

inline constexpr std::uint32_t kAlwaysGuard = 0xffffffffu;

/// The compiled checks of one predicate: p(X) :- p_c(X,R), p'(X), p_s(X,R).
/// Bits form one straight-line program shared by p_c and p_s; p_s only reads
/// the status bits `status` computed by p_c.
struct WrapperSet {
  PredKey pred{};
  const ConditionSet* conditions = nullptr;
  std::vector<Literal> literals;
  std::vector<BitInstr> bits;
  std::vector<std::uint32_t> c_code;  // bits computed by p_c, in order
  std::vector<std::uint32_t> s_code;  // bits computed by p_s, in order
  std::vector<std::uint32_t> status;  // shared Pre status bits
  std::optional<std::uint32_t> calls_bit;
  std::optional<std::uint32_t> success_bit;
  // One (condition index, implication bit) per nontrivial success condition.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> success_bits;
  // Short-circuit mode: a p_s reify step runs only if one of its guards is 1.
  std::vector<std::vector<std::uint32_t>> guards;

  bool has_pc() const { return !c_code.empty(); }
  bool has_ps() const { return success_bit.has_value(); }
  std::size_t size() const { return bits.size(); }

  std::size_t reify_steps(std::span<const std::uint32_t> code) const {
    std::size_t n = 0;
    for (auto b : code) n += bits[b].op == BitInstr::Op::Reify;
    return n;
  }
};

namespace detail {

class BitBuilder {
 public:
  explicit BitBuilder(WrapperSet& w) : w_(w) {}

  std::uint32_t reify(int phase, const Literal& l, std::vector<std::uint32_t>& code) {
    auto key = std::make_tuple(phase, l.prop);
    if (auto it = reified_.find(key); it != reified_.end()) return it->second;
    w_.literals.push_back(l);
    std::uint32_t bit = emit({BitInstr::Op::Reify, 0, 0, static_cast<std::uint32_t>(w_.literals.size() - 1)}, code);
    reified_.emplace(key, bit);
    return bit;
  }

  std::uint32_t op(BitInstr::Op o, std::uint32_t a, std::uint32_t b, std::vector<std::uint32_t>& code) {
    auto key = std::make_tuple(o, a, b);
    if (auto it = ops_.find(key); it != ops_.end()) return it->second;
    std::uint32_t bit = emit({o, a, b, 0}, code);
    ops_.emplace(key, bit);
    return bit;
  }

  std::uint32_t fold(BitInstr::Op o, const std::vector<std::uint32_t>& xs, std::vector<std::uint32_t>& code) {
    std::uint32_t acc = xs.front();
    for (std::size_t i = 1; i < xs.size(); ++i) acc = op(o, acc, xs[i], code);
    return acc;
  }

 private:
  std::uint32_t emit(BitInstr in, std::vector<std::uint32_t>& code) {
    w_.bits.push_back(in);
    auto bit = static_cast<std::uint32_t>(w_.bits.size() - 1);
    code.push_back(bit);
    return bit;
  }

  WrapperSet& w_;
  std::map<std::tuple<int, Prop>, std::uint32_t> reified_;
  std::map<std::tuple<BitInstr::Op, std::uint32_t, std::uint32_t>, std::uint32_t> ops_;
};

inline bool trivially_true(const LiteralDnf& d) {
  for (const auto& c : d)
    if (c.empty()) return true;
  return false;
}

}  // namespace detail

/// Builds the wrapper for one predicate, or nothing when no condition needs
/// checking. Identical literals are reified once per phase and identical Pre
/// conjunctions share one status bit.
inline std::optional<WrapperSet> wrap(const ConditionSet& set) {
  if (set.empty()) return std::nullopt;
  using Op = BitInstr::Op;
  WrapperSet w;
  w.pred = set.pred;
  w.conditions = &set;
  detail::BitBuilder bb(w);

  std::vector<const Condition*> live;  // success conditions that can fail
  for (std::size_t i = 1; i < set.conditions.size(); ++i)
    if (!detail::trivially_true(set.conditions[i].post)) live.push_back(&set.conditions[i]);
  bool check_calls = !set.calls_trivial();
  if (!check_calls && live.empty()) return std::nullopt;

  // p_c: reify every distinct literal of the preconditions that matter.
  std::vector<const LiteralDnf*> pres;
  if (check_calls) pres.push_back(&set.calls().pre);
  for (auto* c : live)
    if (!detail::trivially_true(c->pre)) pres.push_back(&c->pre);
  for (auto* d : pres)
    for (const auto& conj : *d)
      for (const auto& l : conj) bb.reify(0, l, w.c_code);

  auto conj_bit = [&](int phase, const Conjunction& conj, std::vector<std::uint32_t>& code) {
    std::vector<std::uint32_t> xs;
    for (const auto& l : conj) {
      std::uint32_t b = bb.reify(phase, l, code);
      if (std::find(xs.begin(), xs.end(), b) == xs.end()) xs.push_back(b);
    }
    return bb.fold(Op::And, xs, code);
  };
  auto dnf_bit = [&](int phase, const LiteralDnf& d, std::vector<std::uint32_t>& code) {
    std::vector<std::uint32_t> xs;
    for (const auto& conj : d) {
      std::uint32_t b = conj_bit(phase, conj, code);
      if (std::find(xs.begin(), xs.end(), b) == xs.end()) xs.push_back(b);
    }
    return bb.fold(Op::Or, xs, code);
  };

  std::vector<std::optional<std::uint32_t>> pre_bit(live.size());
  for (std::size_t i = 0; i < live.size(); ++i) {
    if (detail::trivially_true(live[i]->pre)) continue;
    pre_bit[i] = dnf_bit(0, live[i]->pre, w.c_code);
    if (std::find(w.status.begin(), w.status.end(), *pre_bit[i]) == w.status.end()) w.status.push_back(*pre_bit[i]);
  }
  if (check_calls) {
    // Conjunction bits first so that shared ones become named status bits.
    for (const auto& conj : set.calls().pre) conj_bit(0, conj, w.c_code);
    w.calls_bit = dnf_bit(0, set.calls().pre, w.c_code);
  }

  if (!live.empty()) {
    std::vector<std::uint32_t> impl;
    for (auto* c : live)
      for (const auto& conj : c->post)
        for (const auto& l : conj) bb.reify(1, l, w.s_code);
    for (std::size_t i = 0; i < live.size(); ++i) {
      std::uint32_t post = dnf_bit(1, live[i]->post, w.s_code);
      std::uint32_t bit = pre_bit[i] ? bb.op(Op::Implies, *pre_bit[i], post, w.s_code) : post;
      w.success_bits.emplace_back(live[i]->index, bit);
      impl.push_back(bit);
    }
    w.success_bit = bb.fold(Op::And, impl, w.s_code);
  }

  w.guards.resize(w.bits.size());
  for (std::size_t i = 0; i < live.size(); ++i)
    for (const auto& conj : live[i]->post)
      for (const auto& l : conj)
        for (std::uint32_t b : w.s_code)
          if (w.bits[b].op == Op::Reify && w.literals[w.bits[b].literal].prop == l.prop)
            w.guards[b].push_back(pre_bit[i] ? *pre_bit[i] : kAlwaysGuard);
  return w;
}

inline std::uint8_t evaluate_bit(const BitInstr& in, const std::uint8_t* bits) {
  switch (in.op) {
    case BitInstr::Op::And: return bits[in.a] & bits[in.b];
    case BitInstr::Op::Or: return bits[in.a] | bits[in.b];
    case BitInstr::Op::Implies: return (bits[in.a] ^ 1) | bits[in.b];
    case BitInstr::Op::Reify: break;
  }
  return bits[in.a];
}

/// Runs one phase. `reify(literal)` returns the literal's truth value.
template <class Reify>
void run_checks(const WrapperSet& w, std::span<const std::uint32_t> code, std::uint8_t* bits, Reify&& reify,
                bool short_circuit = false) {
  for (std::uint32_t b : code) {
    const BitInstr& in = w.bits[b];
    if (in.op != BitInstr::Op::Reify) {
      bits[b] = evaluate_bit(in, bits);
      continue;
    }
    if (short_circuit && !w.guards[b].empty()) {
      bool needed = false;
      for (auto g : w.guards[b]) needed = needed || g == kAlwaysGuard || bits[g];
      if (!needed) {
        bits[b] = 0;
        continue;
      }
    }
    bits[b] = reify(w.literals[in.literal]) ? 1 : 0;
  }
}

/// Prints the transformed program in source syntax.
class TransformPrinter {
 public:
  explicit TransformPrinter(const Program& prog) : prog_(prog) {}

  std::string print(const WrapperSet& w) {
    const ConditionSet& set = *w.conditions;
    names_.assign(w.bits.size(), "");
    int n = 0;
    for (std::uint32_t b : w.c_code)
      if (w.bits[b].op == BitInstr::Op::Reify || is_status(w, b)) names_[b] = "R" + std::to_string(n++);
    for (std::uint32_t b : w.s_code)
      if (w.bits[b].op == BitInstr::Op::Reify) names_[b] = "R" + std::to_string(n++);
    if (w.calls_bit && names_[*w.calls_bit].empty()) names_[*w.calls_bit] = "Rc";

    std::string base = prog_.symbols.name(w.pred.name);
    std::string args = head_args(set);
    std::string status;
    for (auto b : w.status) status += "," + names_[b];
    std::string pc = quote(base + "_c"), ps = quote(base + "_s"), inner = quote(base + "'");

    std::string out = quote(base) + (args.empty() ? "" : "(" + args + ")") + " :-\n";
    std::vector<std::string> body;
    if (w.has_pc()) body.push_back(pc + "(" + join_args(args, status) + ")");
    body.push_back(inner + (args.empty() ? "" : "(" + args + ")"));
    if (w.has_ps()) body.push_back(ps + "(" + join_args(args, status) + ")");
    out += lines(body);

    if (w.has_pc()) {
      body.clear();
      out += "\n" + pc + "(" + join_args(args, status) + ") :-\n";
      for (auto b : w.c_code) {
        if (w.bits[b].op == BitInstr::Op::Reify)
          body.push_back("reify_check(" + literal_text(w.literals[w.bits[b].literal], prog_, set.var_names) + "," +
                         names_[b] + ")");
        else if (!names_[b].empty() && names_[b] != "Rc")
          body.push_back(names_[b] + " is " + expr(w, b, true));
      }
      if (w.calls_bit) {
        if (names_[*w.calls_bit] == "Rc") body.push_back("Rc is " + expr(w, *w.calls_bit, true));
        body.push_back("error_if_false(" + names_[*w.calls_bit] + ")");
      }
      out += lines(body);
    }
    if (w.has_ps()) {
      body.clear();
      out += "\n" + ps + "(" + join_args(args, status) + ") :-\n";
      for (auto b : w.s_code)
        if (w.bits[b].op == BitInstr::Op::Reify)
          body.push_back("reify_check(" + literal_text(w.literals[w.bits[b].literal], prog_, set.var_names) + "," +
                         names_[b] + ")");
      body.push_back("Rs is " + expr(w, *w.success_bit, true));
      body.push_back("error_if_false(Rs)");
      out += lines(body);
    }
    return out;
  }

  const std::vector<std::string>& bit_names() const { return names_; }

 private:
  static bool is_status(const WrapperSet& w, std::uint32_t b) {
    return std::find(w.status.begin(), w.status.end(), b) != w.status.end();
  }

  std::string quote(const std::string& s) const { return quote_atom(s); }

  std::string head_args(const ConditionSet& set) const {
    std::string s;
    for (std::uint32_t i = 0; i < set.arity; ++i) {
      if (i) s += ",";
      s += i < set.var_names.size() && !set.var_names[i].empty() ? set.var_names[i] : "A" + std::to_string(i + 1);
    }
    return s;
  }

  static std::string join_args(const std::string& args, const std::string& status) {
    if (args.empty()) return status.empty() ? "" : status.substr(1);
    return args + status;
  }

  static std::string lines(const std::vector<std::string>& body) {
    std::string s;
    for (std::size_t i = 0; i < body.size(); ++i) s += "        " + body[i] + (i + 1 < body.size() ? ",\n" : ".\n");
    return s;
  }

  // All three operators are 500 yfx. Compound operands are parenthesized
  // except the left spine of a chain of one operator.
  std::string expr(const WrapperSet& w, std::uint32_t b, bool top, BitInstr::Op parent = BitInstr::Op::Reify,
                   bool left = false) const {
    const BitInstr& in = w.bits[b];
    if (in.op == BitInstr::Op::Reify || (!top && !names_[b].empty())) return names_[b];
    std::string s;
    switch (in.op) {
      case BitInstr::Op::And: s = expr(w, in.a, false, in.op, true) + "/\\" + expr(w, in.b, false, in.op); break;
      case BitInstr::Op::Or: s = expr(w, in.a, false, in.op, true) + "\\/" + expr(w, in.b, false, in.op); break;
      case BitInstr::Op::Implies: s = expr(w, in.a, false, in.op, true) + "#1\\/" + expr(w, in.b, false, in.op); break;
      case BitInstr::Op::Reify: break;
    }
    if (top || (left && parent == in.op && in.op != BitInstr::Op::Implies)) return s;
    return "(" + s + ")";
  }

  const Program& prog_;
  std::vector<std::string> names_;
};

}  // namespace memocheck
