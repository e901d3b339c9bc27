#pragma once

#include <optional>
#include <string_view>

namespace memocheck {

enum class OpType { xfx, xfy, yfx, fy, fx };

struct OpDef {
  int priority;
  OpType type;

  int left_max() const { return type == OpType::yfx ? priority : priority - 1; }
  int right_max() const {
    return (type == OpType::xfy || type == OpType::fy) ? priority : priority - 1;
  }
};

// `:` and `=>` are deliberately absent; they only appear inside `pred`
// directives, which the parser reads with a dedicated rule.
inline std::optional<OpDef> infix_op(std::string_view name) {
  struct Entry { std::string_view name; OpDef def; };
  static constexpr Entry table[] = {
      {":-", {1200, OpType::xfx}}, {";", {1100, OpType::xfy}},
      {"->", {1050, OpType::xfy}}, {",", {1000, OpType::xfy}},
      {"=", {700, OpType::xfx}},   {"\\=", {700, OpType::xfx}},
      {"==", {700, OpType::xfx}},  {"\\==", {700, OpType::xfx}},
      {"is", {700, OpType::xfx}},  {"<", {700, OpType::xfx}},
      {">", {700, OpType::xfx}},   {"=<", {700, OpType::xfx}},
      {">=", {700, OpType::xfx}},  {"=:=", {700, OpType::xfx}},
      {"=\\=", {700, OpType::xfx}}, {"+", {500, OpType::yfx}},
      {"-", {500, OpType::yfx}},   {"/\\", {500, OpType::yfx}},
      {"\\/", {500, OpType::yfx}}, {"#", {500, OpType::yfx}},
      {"*", {400, OpType::yfx}},   {"/", {400, OpType::yfx}},
      {"//", {400, OpType::yfx}},  {"mod", {400, OpType::yfx}},
  };
  for (const auto& e : table)
    if (e.name == name) return e.def;
  return std::nullopt;
}

inline std::optional<OpDef> prefix_op(std::string_view name) {
  if (name == "-" || name == "\\") return OpDef{200, OpType::fy};
  if (name == "\\+") return OpDef{900, OpType::fy};
  return std::nullopt;
}

}  // namespace memocheck
