#include <gtest/gtest.h>

#include <map>

#include "helpers.hpp"

using namespace memocheck;

namespace {

const char* kGolden = R"(p(X,Y) :-
        p_c(X,Y,R3,R4),
        'p\''(X,Y),
        p_s(X,Y,R3,R4).

p_c(X,Y,R3,R4) :-
        reify_check(int(X),R0),
        reify_check(var(Y),R1),
        reify_check(atm(X),R2),
        R3 is R0/\R1,
        R4 is R2/\R1,
        Rc is R3\/R4,
        error_if_false(Rc).

p_s(X,Y,R3,R4) :-
        reify_check(int(X),R5),
        reify_check(int(Y),R6),
        reify_check(atm(Y),R7),
        reify_check(atm(X),R8),
        Rs is (R3#1\/(R5/\R6))/\(R3#1\/(R5/\R7))/\(R4#1\/(R8/\R7)),
        error_if_false(Rs).
)";

struct Example1 {
  Program prog = parse_program(testutil::read_sample("example1.pl"));
  Engine engine{prog};
  const WrapperSet& w = *engine.wrapper("p", 2);
};

}  // namespace

TEST(Transform, ExampleOneConditions) {
  Example1 ex;
  const ConditionSet* set = ex.engine.conditions("p", 2);
  ASSERT_NE(set, nullptr);
  ASSERT_EQ(set->conditions.size(), 4u);
  EXPECT_EQ(set->calls().pre.size(), 3u);  // one disjunct per assertion; two coincide
  EXPECT_EQ(set->success_count(), 3u);
  EXPECT_EQ(set->conditions[2].label, "p/2:C2");
}

TEST(Transform, ExampleOneGoldenText) {
  Example1 ex;
  TransformPrinter printer(ex.prog);
  EXPECT_EQ(printer.print(ex.w), kGolden);
}

TEST(Transform, ExampleOneStructure) {
  Example1 ex;
  const WrapperSet& w = ex.w;
  EXPECT_EQ(w.reify_steps(w.c_code), 3u);
  EXPECT_EQ(w.reify_steps(w.s_code), 4u);
  ASSERT_EQ(w.status.size(), 2u);
  // The implication bits of the three success conditions read the status bits.
  ASSERT_EQ(w.success_bits.size(), 3u);
  std::vector<std::uint32_t> pres;
  for (auto [cond, bit] : w.success_bits) {
    ASSERT_EQ(w.bits[bit].op, BitInstr::Op::Implies);
    pres.push_back(w.bits[bit].a);
  }
  EXPECT_EQ(pres[0], pres[1]);
  EXPECT_NE(pres[0], pres[2]);
  for (auto p : pres) EXPECT_NE(std::find(w.status.begin(), w.status.end(), p), w.status.end());
  // Rc is the disjunction of the two status bits.
  ASSERT_TRUE(w.calls_bit);
  const BitInstr& rc = w.bits[*w.calls_bit];
  EXPECT_EQ(rc.op, BitInstr::Op::Or);
  EXPECT_EQ((std::set<std::uint32_t>{rc.a, rc.b}), (std::set<std::uint32_t>(w.status.begin(), w.status.end())));
}

// Every assignment of the seven reify bits (which covers every combination of
// the two status bits with the four post bits) gives Rs equal to the direct
// conjunction of Pre_i -> Post_i over the normalized conditions.
TEST(Transform, SuccessExpressionTruthTable) {
  Example1 ex;
  const WrapperSet& w = ex.w;
  const ConditionSet& set = *ex.engine.conditions("p", 2);
  std::vector<std::uint32_t> reify_bits;
  for (auto b : w.c_code)
    if (w.bits[b].op == BitInstr::Op::Reify) reify_bits.push_back(b);
  std::size_t n_pre = reify_bits.size();
  for (auto b : w.s_code)
    if (w.bits[b].op == BitInstr::Op::Reify) reify_bits.push_back(b);
  ASSERT_EQ(reify_bits.size(), 7u);

  std::set<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> seen_combos;
  for (std::uint32_t mask = 0; mask < (1u << reify_bits.size()); ++mask) {
    std::map<Prop, bool> pre_truth, post_truth;
    for (std::size_t i = 0; i < reify_bits.size(); ++i) {
      const Prop& p = w.literals[w.bits[reify_bits[i]].literal].prop;
      (i < n_pre ? pre_truth : post_truth)[p] = (mask >> i) & 1;
    }
    std::vector<std::uint8_t> bits(w.size(), 0);
    std::size_t next = 0;
    auto assign = [&](const Literal&) { return static_cast<bool>((mask >> next++) & 1); };
    run_checks(w, w.c_code, bits.data(), assign);
    run_checks(w, w.s_code, bits.data(), assign);

    bool expected = true;
    for (std::size_t i = 1; i < set.conditions.size(); ++i) {
      const Condition& c = set.conditions[i];
      bool pre = evaluate_dnf(c.pre, [&](const Prop& p) { return pre_truth.at(p); });
      bool post = evaluate_dnf(c.post, [&](const Prop& p) { return post_truth.at(p); });
      expected = expected && (!pre || post);
    }
    ASSERT_EQ(bits[*w.success_bit] != 0, expected) << "mask " << mask;
    bool calls = evaluate_dnf(set.calls().pre, [&](const Prop& p) { return pre_truth.at(p); });
    ASSERT_EQ(bits[*w.calls_bit] != 0, calls) << "mask " << mask;
    seen_combos.emplace(bits[w.status[0]], bits[w.status[1]], mask >> n_pre);
  }
  EXPECT_EQ(seen_combos.size(), 64u);
}

TEST(Transform, NoAssertionsNoWrapper) {
  Program prog = parse_program("q(1).\nq(2).\n");
  Engine e(prog);
  EXPECT_EQ(e.wrapper("q", 1), nullptr);
}

TEST(Transform, CallsOnlyAssertionHasNoSuccessPart) {
  Program prog = parse_program(":- pred q(X) : int(X).\nq(1).\n");
  Engine e(prog);
  const ConditionSet* set = e.conditions("q", 1);
  ASSERT_NE(set, nullptr);
  EXPECT_EQ(set->conditions.size(), 1u);
  const WrapperSet* w = e.wrapper("q", 1);
  ASSERT_NE(w, nullptr);
  EXPECT_TRUE(w->has_pc());
  EXPECT_FALSE(w->has_ps());
  EXPECT_EQ(w->reify_steps(w->c_code), 1u);
  EXPECT_EQ(*w->calls_bit, w->c_code.front());  // single literal: the result is its own bit
}

TEST(Transform, BitOperators) {
  std::uint8_t bits[2] = {1, 0};
  EXPECT_EQ(evaluate_bit({BitInstr::Op::Or, 0, 1, 0}, bits), 1);
  EXPECT_EQ(evaluate_bit({BitInstr::Op::And, 0, 1, 0}, bits), 0);
  EXPECT_EQ(evaluate_bit({BitInstr::Op::Implies, 0, 1, 0}, bits), 0);
  EXPECT_EQ(evaluate_bit({BitInstr::Op::Implies, 1, 0, 0}, bits), 1);
}

TEST(Transform, TransformedProgramRenamesClauses) {
  Example1 ex;
  std::string text = transformed_program(ex.engine);
  EXPECT_NE(text.find(kGolden), std::string::npos);
  EXPECT_NE(text.find("'p\\''(1,42)."), std::string::npos) << text;
  EXPECT_EQ(text.find(":- pred"), std::string::npos);
}
