#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "memocheck/operators.hpp"

namespace memocheck {

enum class TermKind : std::uint8_t { Var, Atom, Int, Flt, Struct };

inline bool is_symbol_char(char c) {
  return std::string_view("+-*/\\^<>=~:.?@#&$").find(c) != std::string_view::npos;
}

/// Atom text as it must appear in source to read back as the same atom.
inline std::string quote_atom(std::string_view name) {
  if (name == "[]" || name == "!" || name == ";" || name == "{}") return std::string(name);
  bool plain = !name.empty() && std::islower(static_cast<unsigned char>(name[0]));
  for (char c : name)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') plain = false;
  if (plain) return std::string(name);
  bool symbolic = !name.empty();
  for (char c : name)
    if (!is_symbol_char(c)) symbolic = false;
  if (symbolic && name != ".") return std::string(name);
  std::string out = "'";
  for (char c : name) {
    if (c == '\'' || c == '\\') out += '\\';
    out += c;
  }
  out += '\'';
  return out;
}

inline std::string format_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

/// Writes terms in operator syntax. `View` adapts a concrete representation:
///   kind(h), name(h), arity(h), arg(h,i), int_value(h), float_value(h), var_name(h)
/// and is expected to dereference bound variables itself.
template <typename View>
class TermWriter {
 public:
  using Handle = typename View::Handle;

  explicit TermWriter(const View& view) : view_(view) {}

  void write(std::ostream& os, Handle h, int max_priority = 1200) const {
    switch (view_.kind(h)) {
      case TermKind::Var:
        os << view_.var_name(h);
        return;
      case TermKind::Int: {
        auto v = view_.int_value(h);
        if (v < 0 && max_priority < 200) os << '(' << v << ')';
        else os << v;
        return;
      }
      case TermKind::Flt:
        os << format_float(view_.float_value(h));
        return;
      case TermKind::Atom: {
        const std::string& n = view_.name(h);
        bool is_op = infix_op(n) || prefix_op(n);
        if (is_op && max_priority < 1200) os << '(' << quote_atom(n) << ')';
        else os << quote_atom(n);
        return;
      }
      case TermKind::Struct:
        write_struct(os, h, max_priority);
        return;
    }
  }

  std::string to_string(Handle h, int max_priority = 1200) const {
    std::ostringstream os;
    write(os, h, max_priority);
    return os.str();
  }

 private:
  bool starts_symbolic(Handle h) const {
    switch (view_.kind(h)) {
      case TermKind::Int: return view_.int_value(h) < 0;
      case TermKind::Flt: return view_.float_value(h) < 0;
      case TermKind::Atom: return is_symbol_char(view_.name(h)[0]);
      case TermKind::Struct:
        return view_.arity(h) == 1 && prefix_op(view_.name(h)).has_value();
      default: return false;
    }
  }

  void write_struct(std::ostream& os, Handle h, int max_priority) const {
    const std::string& n = view_.name(h);
    std::size_t arity = view_.arity(h);
    if (n == "." && arity == 2) {
      write_list(os, h);
      return;
    }
    if (arity == 2) {
      if (auto op = infix_op(n)) {
        bool paren = op->priority > max_priority;
        if (paren) os << '(';
        write(os, view_.arg(h, 0), op->left_max());
        bool alpha = std::isalpha(static_cast<unsigned char>(n[0]));
        if (alpha || n == "->" || n == ":-") os << ' ' << n << ' ';
        else if (n == ",") os << ", ";
        else if (n == ";") os << " ; ";
        else os << n;
        Handle rhs = view_.arg(h, 1);
        if (!alpha && n != "," && n != ";" && starts_symbolic(rhs)) os << ' ';
        write(os, rhs, op->right_max());
        if (paren) os << ')';
        return;
      }
    }
    if (arity == 1) {
      if (auto op = prefix_op(n)) {
        bool paren = op->priority > max_priority;
        if (paren) os << '(';
        os << n;
        Handle a = view_.arg(h, 0);
        auto k = view_.kind(a);
        bool sep = n == "\\+" || k == TermKind::Int || k == TermKind::Flt ||
                   (k == TermKind::Atom && is_symbol_char(view_.name(a)[0]));
        if (sep) os << ' ';
        write(os, a, op->right_max());
        if (paren) os << ')';
        return;
      }
    }
    os << quote_atom(n) << '(';
    for (std::size_t i = 0; i < arity; ++i) {
      if (i) os << ',';
      write(os, view_.arg(h, i), 999);
    }
    os << ')';
  }

  void write_list(std::ostream& os, Handle h) const {
    os << '[';
    write(os, view_.arg(h, 0), 999);
    Handle tail = view_.arg(h, 1);
    while (true) {
      if (view_.kind(tail) == TermKind::Struct && view_.name(tail) == "." &&
          view_.arity(tail) == 2) {
        os << ',';
        write(os, view_.arg(tail, 0), 999);
        tail = view_.arg(tail, 1);
        continue;
      }
      if (view_.kind(tail) == TermKind::Atom && view_.name(tail) == "[]") break;
      os << '|';
      write(os, tail, 999);
      break;
    }
    os << ']';
  }

  const View& view_;
};

}  // namespace memocheck
