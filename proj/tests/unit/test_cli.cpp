#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(MVP_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mvp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }

  fs::path dir_;
};

const std::string kRecords =
    "{\"id\": \"a\", \"code\": \"def add(a, b):\\n    return a + b\\n\", \"nl\": \"add two numbers\"}\n"
    "{\"id\": \"b\", \"code\": \"x = 1\\ny = x + 2\\n\"}\n";

}  // namespace

TEST_F(CliTest, NoSubcommandIsUsageError) { EXPECT_EQ(run("").code, 1); }

TEST_F(CliTest, IngestWritesManifest) {
  const auto in = write("in.jsonl", kRecords);
  const auto r = run("ingest " + in.string() + " --out " + (dir_ / "corpus").string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto m = nlohmann::json::parse(r.out);
  EXPECT_EQ(m.at("paired"), 1);
  EXPECT_EQ(m.at("unpaired"), 1);
  EXPECT_TRUE(fs::exists(dir_ / "corpus" / "views.jsonl"));
  std::ifstream file(dir_ / "corpus" / "manifest.json");
  EXPECT_EQ(nlohmann::json::parse(file), m);
}

TEST_F(CliTest, MissingInputIsIoError) {
  EXPECT_EQ(run("ingest " + (dir_ / "nope.jsonl").string() + " --out " + dir_.string()).code, 2);
}

TEST_F(CliTest, BadConfigIsValidationError) {
  const auto cfg = write("bad.cfg", "this is not a setting\n");
  const auto in = write("in.jsonl", kRecords);
  EXPECT_EQ(run("--config " + cfg.string() + " ingest " + in.string() + " --out " + dir_.string()).code, 1);
}

TEST_F(CliTest, ViewsPrintsEveryView) {
  const auto src = write("p.py", "def f(x):\n    if x:\n        return 1\n    return 2\n");
  const auto r = run("views " + src.string() + " --nl 'pick one' --id s0");
  ASSERT_EQ(r.code, 0);
  std::set<std::string> kinds;
  std::istringstream lines(r.out);
  for (std::string line; std::getline(lines, line);) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j.at("id"), "s0");
    kinds.insert(j.at("view").get<std::string>());
  }
  EXPECT_EQ(kinds, (std::set<std::string>{"NL", "PL", "AST", "CFG", "PT"}));
  EXPECT_EQ(run("views " + write("bad.py", "class A:\n    pass\n").string()).code, 1);
}

TEST_F(CliTest, TransformCheckOnCorpus) {
  const auto r = run("transform-check " + (fs::path(MVP_DATA_DIR) / "programs.jsonl").string() + " --variants 2");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  EXPECT_NE(r.out.find("programs equivalent"), std::string::npos);
}

TEST_F(CliTest, BpeTrainFromViews) {
  const auto in = write("in.jsonl", kRecords);
  ASSERT_EQ(run("ingest " + in.string() + " --out " + (dir_ / "c").string()).code, 0);
  EXPECT_EQ(run("bpe-train " + (dir_ / "c" / "views.jsonl").string() + " --merges 20 --out " +
                (dir_ / "bpe.txt").string())
                .code,
            0);
  EXPECT_GT(fs::file_size(dir_ / "bpe.txt"), 0u);
}

TEST_F(CliTest, PretrainThenEval) {
  ASSERT_EQ(run("synth --count 24 --out " + (dir_ / "s.jsonl").string()).code, 0);
  ASSERT_EQ(run("ingest " + (dir_ / "s.jsonl").string() + " --out " + (dir_ / "c").string()).code, 0);
  const auto cfg = write("run.cfg",
                         "model.d = 8\nmodel.layers = 1\nmodel.heads = 2\nmodel.ff = 16\ntrain.steps = 4\n"
                         "train.batch_n = 4\nbpe.merges = 50\n");
  const auto r = run("--config " + cfg.string() + " pretrain " + (dir_ / "c").string() + " --out " +
                     (dir_ / "m").string());
  ASSERT_EQ(r.code, 0) << r.out;
  for (const char* f : {"bpe.txt", "model.ckpt", "loss.csv"}) EXPECT_TRUE(fs::exists(dir_ / "m" / f)) << f;
  std::ifstream csv(dir_ / "m" / "loss.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "step,mvcl,fgti,mmlm,l2,total");

  const auto ev = run("eval " + (dir_ / "m").string() + " " + (dir_ / "s.jsonl").string());
  ASSERT_EQ(ev.code, 0) << ev.out;
  const auto j = nlohmann::json::parse(ev.out);
  EXPECT_EQ(j.at("nl_to_code").at("queries"), 24);
  EXPECT_EQ(run("eval " + (dir_ / "missing").string() + " " + (dir_ / "s.jsonl").string()).code, 2);
}

TEST_F(CliTest, GradCheckPasses) {
  const auto r = run("grad-check --count 40");
  EXPECT_EQ(r.code, 0) << r.out;
}
