#include "vshape/machine.hpp"

#include <gtest/gtest.h>

#include <string>

#include "vshape/error.hpp"

namespace vshape {
namespace {

Config mode(Mode m) {
  Config c;
  c.mode = m;
  return c;
}

std::string run(const std::string& text, Mode m = Mode::Auto, EvalStats* stats = nullptr) {
  Runtime rt(mode(m));
  return print_value(eval(rt, lang::load(text), {kTestStepLimit}, stats));
}

void expect_runtime_error(const std::string& text, const std::string& fragment) {
  Runtime rt;
  try {
    eval(rt, lang::load(text), {kTestStepLimit});
    ADD_FAILURE() << "no error for " << text;
  } catch (const RuntimeError& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

constexpr const char* kBuild = R"(
(define (build i acc)
  (match i
    (0 acc)
    (_ (build (- i 1) (Cons i acc)))))
)";

TEST(EvalTest, Basics) {
  EXPECT_EQ(run("42"), "42");
  EXPECT_EQ(run("(match (Cons 1 (Nil)) ((Cons h t) h))"), "1");
  EXPECT_EQ(run("(+ 2 (* 3 4))"), "14");
  EXPECT_EQ(run("(- 2 5)"), "-3");
  EXPECT_EQ(run("(= 2 2)"), "True[]");
  EXPECT_EQ(run("(< 3 2)"), "False[]");
  EXPECT_EQ(run("(if (< 1 2) 10 20)"), "10");
  EXPECT_EQ(run("(if (= 1 2) 10 20)"), "20");
  EXPECT_EQ(run("(if 0 10 20)"), "10");
  EXPECT_EQ(run("(if (Nil) 10 20)"), "10");
  EXPECT_EQ(run("(match 5 (4 0) (x (+ x 1)))"), "6");
  EXPECT_EQ(run("(match (P 1 (Q 2)) ((P _ (Q y)) y))"), "2");
}

TEST(EvalTest, ClosuresCaptureTheirEnvironment) {
  EXPECT_EQ(run("(define (adder n) (lambda (x) (+ x n))) ((adder 5) 10)"), "15");
  EXPECT_EQ(run("((lambda (x) ((lambda (x) x) 2)) 1)"), "2");
  EXPECT_EQ(run("(define (compose f g) (lambda (x) (f (g x))))"
                "((compose (lambda (x) (* x 2)) (lambda (x) (+ x 1))) 4)"),
            "10");
  EXPECT_EQ(run("(define k 7) (define (f) k) (f)"), "7");
}

TEST(EvalTest, ReverseAgreesAcrossModes) {
  std::string prog = std::string(kBuild) + R"(
(define (reverse xs acc)
  (match xs
    ((Nil) acc)
    ((Cons h t) (reverse t (Cons h acc)))))
(reverse (build 100 (Nil)) (Nil)))";
  Runtime none(mode(Mode::None));
  Runtime aut(mode(Mode::Auto));
  Runtime man(mode(Mode::Manual));
  man.seed_linear_rules(man.intern_class("Cons", 2), 1, 7);
  lang::Program p = lang::load(prog);
  Value vn = eval(none, p, {kTestStepLimit});
  Value va = eval(aut, p, {kTestStepLimit});
  Value vm = eval(man, p, {kTestStepLimit});

  Runtime oracle(mode(Mode::None));
  Value expected = eval(oracle, lang::load(std::string(kBuild) + "(build 100 (Nil))"), {});
  EXPECT_TRUE(structural_eq(vn, va));
  EXPECT_TRUE(structural_eq(vn, vm));
  EXPECT_FALSE(structural_eq(vn, expected));
  EXPECT_EQ(print_value(vn).rfind("Cons[100, Cons[99, ", 0), 0u);
  EXPECT_EQ(checksum(vn), checksum(va));
  EXPECT_GT(aut.rules().size(), 0u);
}

TEST(EvalTest, RuntimeErrors) {
  expect_runtime_error("(match (Cons 1 (Nil)) ((Nil) 0))", "no clause matched Cons[1, Nil[]]");
  expect_runtime_error("(1 2)", "application of non-function 1");
  expect_runtime_error("((lambda (x) x) 1 2)", "expects 1");
  expect_runtime_error("(+ 1 (Nil))", "expects integers");
  expect_runtime_error("(* 4611686018427387904 4)", "overflow");
  expect_runtime_error("(Box (lambda (x) x))", "functions cannot be stored");
  expect_runtime_error("(lambda (x) x)", "function");
  expect_runtime_error("(define a b) (define b 1) a", "before its definition");
}

TEST(EvalTest, StepLimit) {
  Runtime rt;
  lang::Program loop = lang::load("(define (f x) (f x)) (f 1)");
  EXPECT_THROW(eval(rt, loop, {10'000}), RuntimeError);
  EvalStats stats;
  try {
    eval(rt, loop, {5'000}, &stats);
  } catch (const RuntimeError& e) {
    EXPECT_NE(std::string(e.what()).find("step limit"), std::string::npos);
  }
  EXPECT_GE(stats.steps, 5'000u);
}

TEST(EvalTest, CountdownRunsInConstantContinuation) {
  EvalStats stats;
  std::string out = run(
      "(define (count n) (match n (0 0) (_ (count (- n 1))))) (count 1000000)", Mode::Auto, &stats);
  EXPECT_EQ(out, "0");
  EXPECT_LE(stats.peak_continuation_depth, 4u);
  EXPECT_LT(stats.steps, kTestStepLimit);

  EvalStats with_if;
  run("(define (count n) (if (= n 0) 0 (count (- n 1)))) (count 100000)", Mode::Auto, &with_if);
  EXPECT_LE(with_if.peak_continuation_depth, 4u);
}

TEST(EvalTest, NonTailRecursionGrowsContinuation) {
  EvalStats stats;
  EXPECT_EQ(run("(define (sum n) (match n (0 0) (_ (+ n (sum (- n 1)))))) (sum 1000)", Mode::None,
                &stats),
            "500500");
  EXPECT_GT(stats.peak_continuation_depth, 1000u);
}

TEST(EvalTest, EveryFieldReadGoesThroughGetField) {
  Runtime rt(mode(Mode::None));
  eval(rt, lang::load("(match (P 1 (Q 2 3)) ((P a (Q b _)) (+ a b)))"), {});
  // a, the Q object and b; the wildcard is not read.
  EXPECT_EQ(rt.counters().field_reads, 3u);
}

TEST(EvalTest, BooleansAreNotCountedAllocations) {
  Runtime rt;
  eval(rt, lang::load("(define (f n) (if (< n 1) 0 (f (- n 1)))) (f 100)"), {});
  EXPECT_EQ(rt.counters().objects_allocated, 0u);
}

TEST(MatchPatternTest, Cases) {
  Runtime rt(mode(Mode::Manual));
  rt.seed_linear_rules(rt.intern_class("Cons", 2), 1, 7);
  Value chunk = eval(rt, lang::load(std::string(kBuild) + "(build 6 (Nil))"), {});
  lang::Program p = lang::load("(match 0 (_ 0) ((Cons h t) 1) ((Nil) 2))");
  ASSERT_EQ(chunk.object().shape().width(), 7u);
  const auto& clauses = std::get<lang::Match>(p.body->node).clauses;

  std::vector<Value> b;
  EXPECT_TRUE(match_pattern(rt, p, clauses[0].pattern, Value::integer(3), b));
  EXPECT_TRUE(b.empty());

  std::uint64_t reified = rt.counters().reifications;
  ASSERT_TRUE(match_pattern(rt, p, clauses[1].pattern, chunk, b));
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0].as_int(), 1);
  EXPECT_EQ(print_value(b[1]), "Cons[2, Cons[3, Cons[4, Cons[5, Cons[6, Nil[]]]]]]");
  EXPECT_EQ(b[1].object().shape().width(), 6u);
  EXPECT_EQ(rt.counters().reifications, reified + 1);

  Value nil = construct(rt, rt.intern_class("Nil", 0), {});
  std::vector<Value> none;
  EXPECT_FALSE(match_pattern(rt, p, clauses[1].pattern, nil, none));
  EXPECT_TRUE(match_pattern(rt, p, clauses[2].pattern, nil, none));
  EXPECT_FALSE(match_pattern(rt, p, clauses[2].pattern, Value::integer(0), none));
}

TEST(EvalTest, DeterministicAcrossRuns) {
  std::string prog = std::string(kBuild) + "(build 300 (Nil))";
  Runtime a, b;
  EvalStats sa, sb;
  Value va = eval(a, lang::load(prog), {}, &sa);
  Value vb = eval(b, lang::load(prog), {}, &sb);
  EXPECT_EQ(print_value(va), print_value(vb));
  EXPECT_EQ(sa.steps, sb.steps);
  EXPECT_EQ(a.counters().objects_allocated, b.counters().objects_allocated);
  EXPECT_EQ(a.rules().size(), b.rules().size());
}

}  // namespace
}  // namespace vshape
