#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "memocheck/errors.hpp"
#include "memocheck/operators.hpp"
#include "memocheck/program.hpp"
#include "memocheck/source_term.hpp"

namespace memocheck {

namespace detail {

enum class Tok { Atom, Var, Int, Flt, Punct, End, Eof };

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  std::int64_t ival = 0;
  double fval = 0.0;
  int line = 1;
  bool functional = false;  // immediately followed by '('
  bool layout_before = false;
  bool quoted = false;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    Token t;
    t.layout_before = skip_layout();
    t.line = line_;
    if (pos_ >= src_.size()) {
      t.kind = Tok::Eof;
      return t;
    }
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      lex_number(t);
    } else if (c == '_' || std::isupper(static_cast<unsigned char>(c))) {
      t.kind = Tok::Var;
      t.text = take_alnum();
    } else if (std::islower(static_cast<unsigned char>(c))) {
      t.kind = Tok::Atom;
      t.text = take_alnum();
    } else if (c == '\'') {
      t.kind = Tok::Atom;
      t.quoted = true;
      t.text = take_quoted();
    } else if (c == '(' || c == ')' || c == '[' || c == ']' || c == '{' || c == '}' ||
               c == ',' || c == '|') {
      t.kind = Tok::Punct;
      t.text = std::string(1, c);
      ++pos_;
    } else if (c == '!' || c == ';') {
      t.kind = Tok::Atom;
      t.text = std::string(1, c);
      ++pos_;
    } else if (c == '.' && end_follows(pos_ + 1)) {
      t.kind = Tok::End;
      ++pos_;
    } else if (is_symbol_char(c)) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && is_symbol_char(src_[pos_])) ++pos_;
      t.kind = Tok::Atom;
      t.text = std::string(src_.substr(start, pos_ - start));
    } else {
      throw ParseError(line_, std::string("unexpected character '") + c + "'");
    }
    t.functional = pos_ < src_.size() && src_[pos_] == '(' &&
                   (t.kind == Tok::Atom || t.kind == Tok::Var);
    return t;
  }

 private:
  bool end_follows(std::size_t p) const {
    return p >= src_.size() || std::isspace(static_cast<unsigned char>(src_[p])) ||
           src_[p] == '%';
  }

  bool skip_layout() {
    bool skipped = false;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
        pos_ += 2;
        while (pos_ + 1 < src_.size() && !(src_[pos_] == '*' && src_[pos_ + 1] == '/')) {
          if (src_[pos_] == '\n') ++line_;
          ++pos_;
        }
        if (pos_ + 1 >= src_.size()) throw ParseError(line_, "unterminated block comment");
        pos_ += 2;
      } else {
        break;
      }
      skipped = true;
    }
    return skipped;
  }

  std::string take_alnum() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    return std::string(src_.substr(start, pos_ - start));
  }

  std::string take_quoted() {
    ++pos_;
    std::string out;
    while (true) {
      if (pos_ >= src_.size()) throw ParseError(line_, "unterminated quoted atom");
      char c = src_[pos_++];
      if (c == '\'') {
        if (pos_ < src_.size() && src_[pos_] == '\'') {
          out += '\'';
          ++pos_;
          continue;
        }
        return out;
      }
      if (c == '\\' && pos_ < src_.size()) {
        char e = src_[pos_++];
        out += e == 'n' ? '\n' : e == 't' ? '\t' : e;
        continue;
      }
      if (c == '\n') ++line_;
      out += c;
    }
  }

  void lex_number(Token& t) {
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    bool is_float = false;
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
        std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
      is_float = true;
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        std::size_t save = pos_++;
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
        if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
        } else {
          pos_ = save;
        }
      }
    }
    std::string text(src_.substr(start, pos_ - start));
    if (is_float) {
      t.kind = Tok::Flt;
      t.fval = std::stod(text);
    } else {
      t.kind = Tok::Int;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), t.ival);
      if (ec != std::errc()) throw ParseError(line_, "integer literal out of range: " + text);
    }
    t.text = std::move(text);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

/// Operator-precedence reader for one clause or directive at a time.
class Reader {
 public:
  Reader(std::string_view src, SymbolTable& symbols) : lexer_(src), symbols_(symbols) {
    advance();
  }

  bool at_eof() const { return tok_.kind == Tok::Eof; }
  const Token& peek() const { return tok_; }
  int line() const { return tok_.line; }

  void start_clause() {
    var_index_.clear();
    var_names_.clear();
  }
  const std::vector<std::string>& var_names() const { return var_names_; }
  std::uint32_t num_vars() const { return static_cast<std::uint32_t>(var_names_.size()); }

  void advance() { tok_ = lexer_.next(); }

  bool is_atom(std::string_view text) const {
    return tok_.kind == Tok::Atom && !tok_.quoted && tok_.text == text;
  }

  void expect_end() {
    if (tok_.kind != Tok::End) fail("expected '.' at end of clause");
    advance();
  }

  [[noreturn]] void fail(const std::string& what) const {
    std::string got = tok_.kind == Tok::Eof   ? "end of input"
                      : tok_.kind == Tok::End ? "'.'"
                                              : "'" + tok_.text + "'";
    throw ParseError(tok_.line, what + ", found " + got);
  }

  SourceTerm parse(int max_priority) {
    int left_priority = 0;
    SourceTerm left = parse_primary(max_priority, left_priority);
    return parse_infix(std::move(left), left_priority, max_priority);
  }

 private:
  SourceTerm parse_infix(SourceTerm left, int left_priority, int max_priority) {
    while (true) {
      std::string name;
      if (tok_.kind == Tok::Atom && !tok_.quoted) name = tok_.text;
      else if (tok_.kind == Tok::Punct && tok_.text == ",") name = ",";
      else if (tok_.kind == Tok::Punct && tok_.text == "|") name = ";";
      else break;
      auto op = infix_op(name);
      if (!op || op->priority > max_priority || left_priority > op->left_max()) break;
      advance();
      SourceTerm right = parse(op->right_max());
      left = SourceTerm::compound(symbols_.intern(name), {std::move(left), std::move(right)});
      left_priority = op->priority;
    }
    return left;
  }

  bool starts_term() const {
    switch (tok_.kind) {
      case Tok::Atom: return !infix_op(tok_.text) || prefix_op(tok_.text) || tok_.functional;
      case Tok::Var:
      case Tok::Int:
      case Tok::Flt: return true;
      case Tok::Punct: return tok_.text == "(" || tok_.text == "[" || tok_.text == "{";
      default: return false;
    }
  }

  SourceTerm parse_primary(int max_priority, int& priority) {
    priority = 0;
    Token t = tok_;
    switch (t.kind) {
      case Tok::Int:
        advance();
        return SourceTerm::integer(t.ival);
      case Tok::Flt:
        advance();
        return SourceTerm::floating(t.fval);
      case Tok::Var: {
        advance();
        SourceTerm v = variable(t.text);
        if (!t.functional) return v;
        // T(X) is read as call(T, X).
        std::vector<SourceTerm> args{std::move(v)};
        parse_arglist(args);
        return SourceTerm::compound(symbols_.intern("call"), std::move(args));
      }
      case Tok::Punct:
        if (t.text == "(") {
          advance();
          SourceTerm inner = parse(1200);
          if (!(tok_.kind == Tok::Punct && tok_.text == ")")) fail("expected ')'");
          advance();
          return inner;
        }
        if (t.text == "[") return parse_list();
        fail("unexpected token");
      case Tok::Atom: {
        advance();
        SymbolId f = symbols_.intern(t.text);
        if (t.functional) {
          std::vector<SourceTerm> args;
          parse_arglist(args);
          return SourceTerm::compound(f, std::move(args));
        }
        if (!t.quoted) {
          if (t.text == "-" && !tok_.layout_before &&
              (tok_.kind == Tok::Int || tok_.kind == Tok::Flt)) {
            Token n = tok_;
            advance();
            return n.kind == Tok::Int ? SourceTerm::integer(-n.ival)
                                      : SourceTerm::floating(-n.fval);
          }
          if (auto op = prefix_op(t.text); op && starts_term()) {
            int p = op->priority;
            int arg_max = op->right_max();
            if (p > max_priority) {
              p = 999;
              arg_max = 999;
            }
            SourceTerm arg = parse(arg_max);
            priority = p;
            return SourceTerm::compound(f, {std::move(arg)});
          }
          if (infix_op(t.text) || prefix_op(t.text)) priority = 0;
        }
        return SourceTerm::atom(f);
      }
      case Tok::End:
      case Tok::Eof:
        fail("unexpected end of clause");
    }
    fail("unexpected token");
  }

  void parse_arglist(std::vector<SourceTerm>& args) {
    advance();  // '('
    while (true) {
      args.push_back(parse(999));
      if (tok_.kind == Tok::Punct && tok_.text == ",") {
        advance();
        continue;
      }
      if (tok_.kind == Tok::Punct && tok_.text == ")") {
        advance();
        return;
      }
      fail("expected ',' or ')' in argument list");
    }
  }

  SourceTerm parse_list() {
    advance();  // '['
    SymbolId nil = symbols_.intern("[]");
    if (tok_.kind == Tok::Punct && tok_.text == "]") {
      advance();
      return SourceTerm::atom(nil);
    }
    std::vector<SourceTerm> items;
    SourceTerm tail = SourceTerm::atom(nil);
    while (true) {
      items.push_back(parse(999));
      if (tok_.kind == Tok::Punct && tok_.text == ",") {
        advance();
        continue;
      }
      if (tok_.kind == Tok::Punct && tok_.text == "|") {
        advance();
        tail = parse(999);
      }
      if (tok_.kind == Tok::Punct && tok_.text == "]") {
        advance();
        break;
      }
      fail("expected ',', '|' or ']' in list");
    }
    SymbolId dot = symbols_.intern(".");
    for (auto it = items.rbegin(); it != items.rend(); ++it)
      tail = SourceTerm::compound(dot, {std::move(*it), std::move(tail)});
    return tail;
  }

  SourceTerm variable(const std::string& name) {
    if (name == "_") {
      var_names_.emplace_back();
      return SourceTerm::variable(static_cast<std::uint32_t>(var_names_.size() - 1));
    }
    auto it = var_index_.find(name);
    if (it != var_index_.end()) return SourceTerm::variable(it->second);
    auto idx = static_cast<std::uint32_t>(var_names_.size());
    var_index_.emplace(name, idx);
    var_names_.push_back(name);
    return SourceTerm::variable(idx);
  }

  Lexer lexer_;
  SymbolTable& symbols_;
  Token tok_;
  std::unordered_map<std::string, std::uint32_t> var_index_;
  std::vector<std::string> var_names_;
};

inline void flatten_conjunction(const SourceTerm& t, SymbolId comma, std::vector<SourceTerm>& out) {
  if (t.kind == TermKind::Struct && t.functor == comma && t.arity() == 2) {
    flatten_conjunction(t.args[0], comma, out);
    flatten_conjunction(t.args[1], comma, out);
  } else {
    out.push_back(t);
  }
}

/// Distributes `,` over `;`. `true` is the empty conjunction.
inline Dnf to_dnf(const SourceTerm& t, const SymbolTable& symbols) {
  if (t.kind == TermKind::Struct && t.arity() == 2) {
    const std::string& f = symbols.name(t.functor);
    if (f == ";") {
      Dnf a = to_dnf(t.args[0], symbols);
      Dnf b = to_dnf(t.args[1], symbols);
      a.insert(a.end(), b.begin(), b.end());
      return a;
    }
    if (f == ",") {
      Dnf a = to_dnf(t.args[0], symbols);
      Dnf b = to_dnf(t.args[1], symbols);
      Dnf out;
      for (const auto& x : a)
        for (const auto& y : b) {
          auto conj = x;
          conj.insert(conj.end(), y.begin(), y.end());
          out.push_back(std::move(conj));
        }
      return out;
    }
  }
  if (t.kind == TermKind::Atom && symbols.name(t.functor) == "true") return Dnf{{}};
  return Dnf{{t}};
}

inline void remap_vars(SourceTerm& t, const std::vector<std::uint32_t>& map) {
  if (t.kind == TermKind::Var) t.var = map[t.var];
  for (auto& a : t.args) remap_vars(a, map);
}

}  // namespace detail

/// Parses program text. Heads stay as written; `normalize_clause` gives the
/// normalized p(X1..Xn) form. Structural validation of assertions and
/// regular types happens when the program is compiled.
inline Program parse_program(std::string_view text) {
  Program prog;
  detail::Reader r(text, prog.symbols);
  SymbolId comma = prog.symbols.intern(",");
  SymbolId neck = prog.symbols.intern(":-");
  while (!r.at_eof()) {
    r.start_clause();
    int line = r.line();
    if (r.is_atom(":-")) {
      r.advance();
      if (r.is_atom("pred")) {
        r.advance();
        SourceTerm head = r.parse(999);
        if (!head.is_callable()) throw ParseError(line, "pred directive needs a predicate head");
        std::optional<SourceTerm> pre, post;
        if (r.is_atom(":")) {
          r.advance();
          pre = r.parse(1200);
        }
        if (r.is_atom("=>")) {
          r.advance();
          post = r.parse(1200);
        }
        r.expect_end();
        // Head arguments must be distinct variables; renumber so that
        // variable i is argument position i.
        std::uint32_t n = static_cast<std::uint32_t>(head.arity());
        std::vector<std::uint32_t> map(r.num_vars(), 0xffffffffu);
        PredAssertion a;
        a.name = head.functor;
        a.arity = n;
        a.line = line;
        for (std::uint32_t i = 0; i < n; ++i) {
          const SourceTerm& arg = head.args[i];
          if (!arg.is_var() || map[arg.var] != 0xffffffffu)
            throw DefinitionError("line " + std::to_string(line) +
                                  ": assertion head arguments must be distinct variables");
          map[arg.var] = i;
          a.var_names.push_back(r.var_names()[arg.var]);
        }
        auto convert = [&](const SourceTerm& f) {
          std::vector<std::uint32_t> used;
          f.collect_vars(used);
          for (auto v : used)
            if (map[v] == 0xffffffffu)
              throw DefinitionError("line " + std::to_string(line) + ": variable " +
                                    r.var_names()[v] + " of assertion does not occur in its head");
          SourceTerm copy = f;
          detail::remap_vars(copy, map);
          return detail::to_dnf(copy, prog.symbols);
        };
        if (pre) a.pre = convert(*pre);
        if (post) a.post = convert(*post);
        prog.get_or_add({a.name, a.arity}, line).assertions.push_back(std::move(a));
        continue;
      }
      if (r.is_atom("regtype")) {
        r.advance();
        SourceTerm spec = r.parse(1200);
        r.expect_end();
        PredKey key{};
        if (spec.kind == TermKind::Struct && prog.symbols.name(spec.functor) == "/" &&
            spec.arity() == 2 && spec.args[0].kind == TermKind::Atom &&
            spec.args[1].kind == TermKind::Int && spec.args[1].ival > 0) {
          key = {spec.args[0].functor, static_cast<std::uint32_t>(spec.args[1].ival)};
        } else if (spec.kind == TermKind::Struct) {
          key = {spec.functor, static_cast<std::uint32_t>(spec.arity())};
        } else {
          throw ParseError(line, "regtype directive expects name/arity");
        }
        prog.get_or_add(key, line).is_regtype = true;
        continue;
      }
      r.fail("expected 'pred' or 'regtype' directive");
    }
    SourceTerm t = r.parse(1200);
    r.expect_end();
    Clause c;
    c.line = line;
    if (t.kind == TermKind::Struct && t.functor == neck && t.arity() == 2) {
      c.head = std::move(t.args[0]);
      detail::flatten_conjunction(t.args[1], comma, c.body);
    } else {
      c.head = std::move(t);
    }
    if (!c.head.is_callable()) throw ParseError(line, "clause head must be an atom or compound term");
    c.var_names = r.var_names();
    c.num_vars = r.num_vars();
    PredKey key{c.head.functor, static_cast<std::uint32_t>(c.head.arity())};
    prog.get_or_add(key, line).clauses.push_back(std::move(c));
  }
  return prog;
}

/// Reads a single term (a query goal). Variable names are returned in
/// first-occurrence order, indexed by variable number.
inline SourceTerm parse_term(std::string_view text, SymbolTable& symbols,
                             std::vector<std::string>* var_names = nullptr) {
  std::string buf(text);
  buf += " .";
  detail::Reader r(buf, symbols);
  r.start_clause();
  SourceTerm t = r.parse(1200);
  r.expect_end();
  if (!r.at_eof()) r.fail("expected a single term");
  if (var_names) *var_names = r.var_names();
  return t;
}

/// Prints clauses and directives in source syntax (round-trips through
/// `parse_program`).
inline std::string print_program(const Program& prog) {
  std::string out;
  const SymbolTable& sy = prog.symbols;
  auto dnf_text = [&](const Dnf& d, const std::vector<std::string>& names) {
    std::string s;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (i) s += " ; ";
      if (d[i].empty()) s += "true";
      for (std::size_t j = 0; j < d[i].size(); ++j) {
        if (j) s += ", ";
        s += to_string(d[i][j], sy, &names);
      }
    }
    return "(" + s + ")";
  };
  for (const auto& p : prog.predicates) {
    if (p.is_regtype)
      out += ":- regtype " + quote_atom(sy.name(p.key.name)) + "/" + std::to_string(p.key.arity) + ".\n";
    for (const auto& a : p.assertions) {
      std::vector<SourceTerm> args;
      for (std::uint32_t i = 0; i < a.arity; ++i) args.push_back(SourceTerm::variable(i));
      out += ":- pred " + to_string(SourceTerm::compound(a.name, args), sy, &a.var_names);
      if (a.pre) out += " : " + dnf_text(*a.pre, a.var_names);
      if (a.post) out += " => " + dnf_text(*a.post, a.var_names);
      out += ".\n";
    }
    for (const auto& c : p.clauses) {
      std::vector<std::string> names = c.var_names;
      for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i].empty()) names[i] = "_A" + std::to_string(i);
      out += to_string(c.head, sy, &names);
      for (std::size_t i = 0; i < c.body.size(); ++i) {
        out += i == 0 ? " :-\n    " : ",\n    ";
        out += to_string(c.body[i], sy, &names, 999);
      }
      out += ".\n";
    }
  }
  return out;
}

}  // namespace memocheck
