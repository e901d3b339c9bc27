#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"

using namespace memocheck;
using testutil::term;

TEST(Store, BindsFreshVariable) {
  SymbolTable sy;
  Store s(sy);
  NodeId x = s.new_var();
  NodeId fa = term(s, "f(a)");
  ASSERT_TRUE(s.unify(x, fa));
  EXPECT_EQ(to_string(s, x), "f(a)");
}

TEST(Store, FunctorClashLeavesBindingsUnchanged) {
  SymbolTable sy;
  Store s(sy);
  std::vector<NodeId> vars;
  NodeId a = term(s, "f(X,a)", &vars);
  NodeId b = term(s, "f(b,b)");
  auto before = s.binding_snapshot();
  EXPECT_FALSE(s.unify(a, b));
  EXPECT_EQ(s.binding_snapshot(), before);
  EXPECT_EQ(s.trail_size(), 0u);
}

TEST(Store, TextbookUnifier) {
  SymbolTable sy;
  Store s(sy);
  std::vector<NodeId> vars;
  std::vector<std::string> names;
  NodeId l = term(s, "f(X,b)", &vars, &names);
  NodeId r = term(s, "f(a,Y)", &vars, &names);
  ASSERT_TRUE(s.unify(l, r));
  EXPECT_EQ(to_string(s, vars[0]), "a");
  EXPECT_EQ(to_string(s, vars[1]), "b");
}

TEST(Store, UndoToEpochUnbindsAndReports) {
  SymbolTable sy;
  Store s(sy);
  NodeId x = s.new_var(), y = s.new_var();
  std::vector<NodeId> reported;
  s.set_undo_hook([&](const UndoEvent& ev) { reported.assign(ev.unbound.begin(), ev.unbound.end()); });
  Epoch e = s.mark();
  ASSERT_TRUE(s.unify(x, s.new_int(1)));
  ASSERT_TRUE(s.unify(y, s.new_atom("a")));
  s.undo_to(e);
  EXPECT_TRUE(s.is_free(x));
  EXPECT_TRUE(s.is_free(y));
  std::sort(reported.begin(), reported.end());
  EXPECT_EQ(reported, (std::vector<NodeId>{x, y}));
}

TEST(Store, UndoToCurrentEpochIsIdentity) {
  SymbolTable sy;
  Store s(sy);
  NodeId x = s.new_var();
  ASSERT_TRUE(s.unify(x, s.new_int(3)));
  Epoch e = s.mark();
  auto before = s.binding_snapshot();
  s.undo_to(e);
  EXPECT_EQ(s.binding_snapshot(), before);
  EXPECT_TRUE(s.is_live(e));
}

TEST(Store, NestedEpochsAreReleasedByOuterUndo) {
  SymbolTable sy;
  Store s(sy);
  Epoch outer = s.mark();
  Epoch inner = s.mark();
  s.undo_to(outer);
  EXPECT_TRUE(s.is_live(outer));
  EXPECT_FALSE(s.is_live(inner));
  EXPECT_THROW(s.undo_to(inner), InternalError);
}

TEST(Store, OccursCheckIsOptional) {
  SymbolTable sy;
  Store s(sy);
  s.occurs_check = true;
  std::vector<NodeId> vars;
  std::vector<std::string> names;
  NodeId x = term(s, "X", &vars, &names);
  NodeId fx = term(s, "f(X)", &vars, &names);
  EXPECT_FALSE(s.unify(x, fx));
}

// Random terms over a small signature for the property tests below.
struct TermGen {
  std::mt19937_64 rng;
  std::vector<NodeId> pool;

  NodeId make(Store& s, int depth) {
    int pick = std::uniform_int_distribution<int>(0, depth > 0 ? 5 : 3)(rng);
    switch (pick) {
      case 0: {
        if (pool.empty() || rng() % 3 == 0) pool.push_back(s.new_var());
        return pool[rng() % pool.size()];
      }
      case 1: return s.new_atom(rng() % 2 ? "a" : "b");
      case 2: return s.new_int(static_cast<std::int64_t>(rng() % 3));
      case 3: return s.new_atom("[]");
      case 4: return s.new_struct("f", {make(s, depth - 1)});
      default: return s.new_struct("g", {make(s, depth - 1), make(s, depth - 1)});
    }
  }
};

TEST(Store, UnificationIsSymmetricAndProducesACommonInstance) {
  TermGen gen{std::mt19937_64(7), {}};
  int unified = 0;
  for (int round = 0; round < 2000; ++round) {
    SymbolTable sy;
    Store s(sy);
    s.occurs_check = true;
    gen.pool.clear();
    NodeId a = gen.make(s, 3), b = gen.make(s, 3);
    Epoch e = s.mark();
    bool ab = s.unify(a, b);
    bool identical = ab && s.identical(a, b);
    std::string ta = to_string(s, a);
    s.undo_to(e);
    bool ba = s.unify(b, a);
    std::string tb = ba ? to_string(s, b) : "";
    s.undo_to(e);
    ASSERT_EQ(ab, ba) << round;
    if (ab) {
      ++unified;
      EXPECT_TRUE(identical);
      // Both orders give the same instance up to variable naming.
      auto strip = [](std::string t) {
        std::string out;
        for (std::size_t i = 0; i < t.size(); ++i) {
          if (t[i] == '_' && i + 1 < t.size() && t[i + 1] == 'G') {
            out += 'V';
            i += 2;
            while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
            --i;
          } else {
            out += t[i];
          }
        }
        return out;
      };
      EXPECT_EQ(strip(ta), strip(tb));
    }
  }
  EXPECT_GT(unified, 100);
}

TEST(Store, BindUndoRestoresSnapshot) {
  TermGen gen{std::mt19937_64(11), {}};
  SymbolTable sy;
  Store s(sy);
  for (int round = 0; round < 500; ++round) {
    auto snapshot = s.binding_snapshot();
    Epoch e = s.mark();
    NodeId a = gen.make(s, 3), b = gen.make(s, 3);
    s.unify(a, b);
    s.undo_to(e);
    auto after = s.binding_snapshot();
    after.resize(snapshot.size());
    ASSERT_EQ(after, snapshot);
    s.release(e);
  }
}

TEST(Store, NodeIdsAreNeverReused) {
  SymbolTable sy;
  Store s(sy);
  Epoch e = s.mark();
  NodeId first = s.new_var();
  s.undo_to(e);
  NodeId second = s.new_var();
  EXPECT_NE(first, second);
}
