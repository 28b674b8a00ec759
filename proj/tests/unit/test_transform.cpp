#include <gtest/gtest.h>

#include <set>
#include <string>
#include <vector>

#include "corpus_paths.hpp"
#include "mvp/frontend/parser.hpp"
#include "mvp/frontend/scope.hpp"
#include "mvp/interp/interpreter.hpp"
#include "mvp/transform/transform.hpp"
#include "mvp/views/ast_view.hpp"

using namespace mvp;
using transform::Heuristic;

namespace {

std::vector<std::string> node_kinds(const frontend::SyntaxTree& t) {
  const auto seq = views::linearize_ast(t);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) out.push_back(seq.leaf_ordinals[i] < 0 ? seq.tokens[i] : "<leaf>");
  return out;
}

std::string canon(const std::string& src) { return frontend::unparse(frontend::parse_source(src)); }

}  // namespace

TEST(Rename, AddExample) {
  const auto r = transform::rename_identifiers(frontend::parse_source("def add(a, b):\n    return a + b\n"), 0);
  EXPECT_EQ(frontend::unparse(r.tree), "def FUNC_0(VAR_0, VAR_1):\n    return VAR_0 + VAR_1\n");
  EXPECT_EQ(r.report.heuristic, Heuristic::Rename);
  EXPECT_EQ(r.report.sites, 5u);
}

TEST(Rename, NothingToRename) {
  const auto tree = frontend::parse_source("pass");
  const auto r = transform::rename_identifiers(tree, 4);
  EXPECT_EQ(r.report.sites, 0u);
  EXPECT_TRUE(frontend::same_structure(r.tree, tree));
  EXPECT_EQ(r.report.seed, 4u);
}

TEST(Rename, BuiltinsAndAttributesKept) {
  const auto r = transform::rename_identifiers(
      frontend::parse_source("def f(xs):\n    out = []\n    for x in range(len(xs)):\n        out.append(x)\n    print(out)\n    return out\n"),
      0);
  const std::string text = frontend::unparse(r.tree);
  for (const char* kept : {"range", "len", "append", "print"}) EXPECT_NE(text.find(kept), std::string::npos) << kept;
  for (const char* gone : {"xs", "out", " x "}) EXPECT_EQ(text.find(gone), std::string::npos) << gone;
}

TEST(Rename, FreshNamesAvoidExistingOnes) {
  const auto tree = frontend::parse_source("def f(a):\n    VAR_0 = a\n    return VAR_0 + 1\n");
  const auto map = transform::plan_renaming(tree);
  const auto existing = frontend::all_identifiers(tree.root);
  std::set<std::string> fresh;
  for (const auto& e : map.entries) {
    EXPECT_FALSE(existing.contains(e.fresh)) << e.fresh;
    EXPECT_TRUE(fresh.insert(e.scope + "/" + e.fresh).second) << "not injective: " << e.fresh;
  }
}

TEST(Rename, ConsistentAcrossOccurrences) {
  const auto tree = frontend::parse_source("def g(n):\n    return n * 2\n\ndef f(n):\n    k = g(n)\n    return k + g(k)\n");
  const auto r = transform::rename_identifiers(tree, 0);
  const auto text = frontend::unparse(r.tree);
  const auto map = transform::plan_renaming(tree);
  const auto g = transform::renamed(map, "", "g");
  const auto k = transform::renamed(map, "f", "k");
  EXPECT_NE(g, "g");
  EXPECT_NE(text.find(k + " = " + g + "("), std::string::npos) << text;
  EXPECT_NE(text.find("return " + k + " + " + g + "(" + k + ")"), std::string::npos) << text;
}

TEST(Rename, AstShapeUnchangedOnCorpus) {
  for (const auto& p : mvp::testing::oracle_corpus()) {
    const auto tree = frontend::parse_source(p.code);
    EXPECT_EQ(node_kinds(transform::rename_identifiers(tree, 1).tree), node_kinds(tree)) << p.name;
  }
}

TEST(LoopExchange, ForToWhileExample) {
  const auto r = transform::exchange_loops(frontend::parse_source("for i in range(3):\n    s = s + i\n"));
  EXPECT_EQ(frontend::unparse(r.tree), canon("i = 0\nwhile i < 3:\n    s = s + i\n    i = i + 1\n"));
  EXPECT_EQ(r.report.sites, 1u);

  const std::string fn = "def g(s):\n    for i in range(3):\n        s = s + i\n    return s\n";
  const auto original = frontend::parse_source(fn);
  const auto changed = transform::exchange_loops(original).tree;
  for (int s : {0, 5, -1}) {
    const std::vector<interp::Value> args{s};
    EXPECT_TRUE(interp::same_behaviour(interp::evaluate(original, "g", args), interp::evaluate(changed, "g", args)));
  }
}

TEST(LoopExchange, NoLoops) {
  const auto tree = frontend::parse_source("x = 1\ny = x + 2\n");
  const auto r = transform::exchange_loops(tree);
  EXPECT_EQ(r.report.sites, 0u);
  EXPECT_TRUE(frontend::same_structure(r.tree, tree));
}

TEST(LoopExchange, TwiceRestoresRangeLoop) {
  const std::string fn = "def g(n):\n    t = 0\n    for i in range(2, n, 3):\n        t = t + i\n    return t\n";
  const auto original = frontend::parse_source(fn);
  const auto once = transform::exchange_loops(original).tree;
  const auto twice = transform::exchange_loops(once).tree;
  EXPECT_EQ(frontend::unparse(twice), frontend::unparse(original));
  for (int n : {0, 2, 3, 10, 11}) {
    const std::vector<interp::Value> args{n};
    const auto a = interp::evaluate(original, "g", args);
    const auto b = interp::evaluate(twice, "g", args);
    EXPECT_TRUE(interp::same_behaviour(a, b));
    EXPECT_EQ(a.steps_used, b.steps_used);
  }
}

TEST(LoopExchange, UnsafeLoopsSkipped) {
  // The loop variable is read after the loop, and the range bound is reassigned in the body.
  const auto a = transform::exchange_loops(frontend::parse_source(
      "def f(n):\n    for i in range(n):\n        pass\n    return i\n"));
  EXPECT_EQ(a.report.sites, 0u);
  EXPECT_EQ(a.report.skipped, 1u);
  const auto b = transform::exchange_loops(frontend::parse_source(
      "def f(n):\n    t = 0\n    for i in range(n):\n        n = n - 1\n        t += i\n    return t\n"));
  EXPECT_EQ(b.report.sites, 0u);
  const auto c = transform::exchange_loops(frontend::parse_source(
      "def f(xs):\n    for x in xs:\n        print(x)\n"));
  EXPECT_EQ(c.report.sites, 0u);
}

TEST(DeadCode, OneExtraStatementInOrder) {
  const auto tree = frontend::parse_source("a = 1\nb = a + 1\nc = b * 2\n");
  const auto r = transform::insert_dead_code(tree, 0);
  EXPECT_EQ(r.report.sites, 1u);
  const auto& before = tree.root.children;
  const auto& after = r.tree.root.children;
  ASSERT_EQ(after.size(), before.size() + 1);
  std::size_t j = 0;
  for (const auto& s : after) {
    if (j < before.size() && frontend::same_structure(s, before[j])) ++j;
  }
  EXPECT_EQ(j, before.size());
}

TEST(DeadCode, EmptyProgramGetsSnippet) {
  const auto r = transform::insert_dead_code(frontend::parse_source(""), 3);
  EXPECT_EQ(r.tree.root.children.size(), 1u);
}

TEST(DeadCode, FreshNamesNeverCollide) {
  for (const auto& p : mvp::testing::oracle_corpus()) {
    const auto tree = frontend::parse_source(p.code);
    const auto before = frontend::all_identifiers(tree.root);
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const auto after = frontend::all_identifiers(transform::insert_dead_code(tree, seed).tree.root);
      for (const auto& name : after) {
        // The third snippet calls the len builtin.
        if (!before.contains(name) && name != "len") {
          EXPECT_EQ(name.rfind("_dead_", 0), 0u) << p.name << " " << name;
        }
      }
    }
  }
  const auto clash = frontend::parse_source("_dead_0 = 5\n");
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    EXPECT_EQ(frontend::unparse(transform::insert_dead_code(clash, seed).tree).find("_dead_0 = 0"),
              std::string::npos);
  }
}

TEST(DeadCode, SeedsReachEverySnippet) {
  const auto tree = frontend::parse_source("a = 1\nb = 2\n");
  std::set<std::string> seen;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    const auto text = frontend::unparse(transform::insert_dead_code(tree, seed).tree);
    if (text.find("if False:") != std::string::npos) seen.insert("if");
    else if (text.find("len(\"\")") != std::string::npos) seen.insert("len");
    else seen.insert("zero");
  }
  EXPECT_EQ(seen.size(), transform::kDeadCodePoolSize);
}

TEST(Variants, Deterministic) {
  const auto tree = frontend::parse_source("def add(a, b):\n    return a + b\n");
  const auto a = transform::generate_variants(tree, 9, 1);
  const auto b = transform::generate_variants(tree, 9, 1);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(frontend::unparse(a[0].tree), frontend::unparse(b[0].tree));
  EXPECT_FALSE(a[0].applied.empty());
}

TEST(Variants, ThreeDistinctForAdd) {
  const auto tree = frontend::parse_source("def add(a, b):\n    return a + b\n");
  const auto vs = transform::generate_variants(tree, 0, 3);
  ASSERT_EQ(vs.size(), 3u);
  std::set<std::string> texts;
  for (const auto& v : vs) texts.insert(frontend::unparse(v.tree));
  EXPECT_EQ(texts.size(), 3u);
}

TEST(Variants, AppliedInFixedOrder) {
  for (const auto& p : mvp::testing::oracle_corpus()) {
    for (const auto& v : transform::generate_variants(frontend::parse_source(p.code), 5, 4)) {
      for (std::size_t i = 1; i < v.applied.size(); ++i) EXPECT_LT(v.applied[i - 1], v.applied[i]);
    }
  }
}
