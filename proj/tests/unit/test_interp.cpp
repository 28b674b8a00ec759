#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "corpus_paths.hpp"
#include "mvp/frontend/parser.hpp"
#include "mvp/interp/interpreter.hpp"

using namespace mvp;
using interp::Status;
using interp::Value;

namespace {

interp::Outcome run(const std::string& src, const std::string& entry, std::vector<Value> args,
                    std::int64_t limit = interp::kDefaultStepLimit) {
  return interp::evaluate(frontend::parse_source(src), entry, args, limit);
}

}  // namespace

TEST(Interp, Add) {
  const auto o = run("def add(a, b):\n    return a + b\n", "add", {2, 3});
  EXPECT_EQ(o.status, Status::Ok);
  EXPECT_TRUE(interp::strictly_equal(o.return_value, Value(5)));
}

TEST(Interp, StepLimit) {
  const auto o = run("def f(n):\n    s = 0\n    for i in range(n):\n        s += i\n    return s\n", "f", {5}, 1);
  EXPECT_EQ(o.status, Status::StepLimit);
}

TEST(Interp, InfiniteLoopStops) {
  const auto o = run("def f():\n    while True:\n        pass\n", "f", {});
  EXPECT_EQ(o.status, Status::StepLimit);
  EXPECT_LE(o.steps_used, interp::kDefaultStepLimit + 1);
}

TEST(Interp, Factorial) {
  const auto o = run("def fact(n):\n    r = 1\n    while n > 1:\n        r = r * n\n        n = n - 1\n    return r\n",
                     "fact", {10});
  ASSERT_EQ(o.status, Status::Ok);
  EXPECT_EQ(interp::to_repr(o.return_value), "3628800");
}

TEST(Interp, RecursiveFactorial) {
  const auto o = run("def fact(n):\n    if n <= 1:\n        return 1\n    return n * fact(n - 1)\n", "fact", {10});
  EXPECT_EQ(interp::to_repr(o.return_value), "3628800");
}

TEST(Interp, RuntimeErrors) {
  EXPECT_EQ(run("def f(a):\n    return a / 0\n", "f", {1}).status, Status::RuntimeError);
  EXPECT_EQ(run("def f(a):\n    return a + \"s\"\n", "f", {1}).status, Status::RuntimeError);
  EXPECT_EQ(run("def f():\n    return nope\n", "f", {}).status, Status::RuntimeError);
  EXPECT_EQ(run("def f(a):\n    return a\n", "f", {}).status, Status::RuntimeError);
  EXPECT_EQ(run("x = 1\n", "missing", {}).status, Status::RuntimeError);
}

TEST(Interp, Deterministic) {
  const std::string src = "def f(xs):\n    out = []\n    for x in xs:\n        out.append(x * 2)\n        print(x)\n    return out\n";
  const auto a = run(src, "f", {Value::list({1, 2, 3})});
  const auto b = run(src, "f", {Value::list({1, 2, 3})});
  EXPECT_TRUE(interp::same_behaviour(a, b));
  EXPECT_EQ(a.steps_used, b.steps_used);
  EXPECT_EQ(a.output, "1\n2\n3\n");
  EXPECT_EQ(interp::to_repr(a.return_value), "[2, 4, 6]");
}

// Ten hand-written programs with hand-computed results.
struct HandCase {
  const char* src;
  const char* entry;
  std::vector<Value> args;
  const char* repr;
  const char* output;
};

TEST(Interp, HandOracles) {
  const std::vector<HandCase> cases = {
      {"def f(a, b):\n    return a // b, a % b\n", "f", {-7, 2}, "(-4, 1)", ""},
      {"def f(x):\n    return x / 4\n", "f", {3}, "0.75", ""},
      {"def f(x):\n    return 2 ** x\n", "f", {10}, "1024", ""},
      {"def f(s):\n    print(s + \"!\")\n    return len(s)\n", "f", {"hey"}, "3", "hey!\n"},
      {"def f(n):\n    t = 0\n    for i in range(1, n, 2):\n        t += i\n    return t\n", "f", {10}, "25", ""},
      {"def f(xs):\n    return max(xs) - min(xs)\n", "f", {Value::list({4, -2, 9})}, "11", ""},
      {"def f(a):\n    return abs(a) + float(1)\n", "f", {-3}, "4.0", ""},
      {"def f(a, b):\n    return a < b and not a == b or b is None\n", "f", {1, 2}, "True", ""},
      {"def f(n):\n    d = {}\n    i = 0\n    while i < n:\n        d[i] = str(i * i)\n        i += 1\n    return d\n",
       "f", {3}, "{0: '0', 1: '1', 2: '4'}", ""},
      {"def f(x):\n    if x > 0:\n        print(\"pos\", x)\n    elif x < 0:\n        print(\"neg\")\n    else:\n        return None\n    return bool(x)\n",
       "f", {5}, "True", "pos 5\n"},
  };
  for (const auto& c : cases) {
    const auto o = run(c.src, c.entry, c.args);
    ASSERT_EQ(o.status, Status::Ok) << c.src << o.message;
    EXPECT_EQ(interp::to_repr(o.return_value), c.repr) << c.src;
    EXPECT_EQ(o.output, c.output) << c.src;
  }
}

// Reference results were produced by CPython.
TEST(Interp, MatchesReferenceCorpus) {
  for (const auto& p : mvp::testing::oracle_corpus()) {
    const auto tree = frontend::parse_source(p.code);
    for (const auto& c : p.cases) {
      const auto o = interp::evaluate(tree, p.entry, c.args);
      ASSERT_EQ(o.status, Status::Ok) << p.name << ": " << o.message;
      EXPECT_EQ(interp::to_repr(o.return_value), c.expected_return) << p.name;
      EXPECT_EQ(o.output, c.expected_output) << p.name;
    }
  }
}

TEST(Interp, SameBehaviourIgnoresSteps) {
  interp::Outcome a;
  interp::Outcome b;
  a.return_value = Value(1);
  b.return_value = Value(1);
  a.steps_used = 3;
  b.steps_used = 9;
  EXPECT_TRUE(interp::same_behaviour(a, b));
  b.return_value = Value(1.0);
  EXPECT_FALSE(interp::same_behaviour(a, b));
}
