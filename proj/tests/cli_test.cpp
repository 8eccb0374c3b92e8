#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "relact/dataset.hpp"

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int status = -1;
  std::string output;
};

// Runs the CLI with stdout and stderr merged.
RunResult run(const std::string& args) {
  const std::string cmd = std::string(RELACT_CLI) + " " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) r.output += buf;
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("relact_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string p(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, GenRefWritesValidDemo) {
  const RunResult r = run("gen-ref --seed 3 --points 120 --out " + p("ref.jsonl"));
  ASSERT_EQ(r.status, 0) << r.output;
  const relact::DemonstrationRecord rec = relact::load_demo(p("ref.jsonl"));
  EXPECT_EQ(rec.steps.size(), 120u);
  EXPECT_EQ(rec.metadata.at("seed"), 3);
  EXPECT_EQ(run("validate --in " + p("ref.jsonl")).status, 0);
}

TEST_F(CliTest, GenRefIsDeterministic) {
  ASSERT_EQ(run("gen-ref --seed 5 --points 100 --out " + p("a.jsonl")).status, 0);
  ASSERT_EQ(run("gen-ref --seed 5 --points 100 --out " + p("b.jsonl")).status, 0);
  EXPECT_EQ(slurp(p("a.jsonl")), slurp(p("b.jsonl")));
}

TEST_F(CliTest, SeedIsRequired) {
  const RunResult r = run("gen-ref --out " + p("x.jsonl"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("--seed"), std::string::npos);
}

TEST_F(CliTest, ReplayWritesReportAndTable) {
  ASSERT_EQ(run("gen-ref --seed 1 --points 150 --out " + p("ref.jsonl")).status, 0);
  const RunResult r = run("replay --seed 1 --ref " + p("ref.jsonl") + " --chunk-size 50 --out " + p("rep"));
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("Tool-centric"), std::string::npos);
  EXPECT_NE(r.output.find("EvalConfig1"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "rep" / "report.json"));
  EXPECT_TRUE(fs::exists(dir_ / "rep" / "rmse_table.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "rep" / "paths" / "hybrid_EvalConfig2.csv"));
}

TEST_F(CliTest, ReplaySingleKindWithChainFile) {
  const RunResult r = run("replay --seed 2 --points 100 --kind tool --chain " +
                          std::string(RELACT_DATA_DIR) + "/default_chain.json --out " + p("rep"));
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_EQ(r.output.find("Camera-centric"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "rep" / "paths" / "camera_RefConfig.csv"));
}

TEST_F(CliTest, ConvertVerifyAndStats) {
  ASSERT_EQ(run("gen-ref --seed 4 --points 130 --out " + p("ref.jsonl")).status, 0);
  const RunResult r = run("convert --in " + p("ref.jsonl") + " --kind hybrid --chunk-size 100 --verify --out " +
                          p("chunks.jsonl") + " --stats " + p("s1.json"));
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("31 chunks"), std::string::npos);
  ASSERT_EQ(run("stats --in " + p("chunks.jsonl") + " --out " + p("s2.json")).status, 0);
  EXPECT_EQ(slurp(p("s1.json")), slurp(p("s2.json")));
}

TEST_F(CliTest, ConvertTooShortIsAnError) {
  ASSERT_EQ(run("gen-ref --seed 4 --points 50 --out " + p("ref.jsonl")).status, 0);
  const RunResult r = run("convert --in " + p("ref.jsonl") + " --out " + p("c.jsonl"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("RecordTooShort"), std::string::npos);
}

TEST_F(CliTest, ValidateReportsFindings) {
  ASSERT_EQ(run("gen-ref --seed 6 --points 20 --out " + p("ref.jsonl")).status, 0);
  relact::DemonstrationRecord rec = relact::load_demo(p("ref.jsonl"));
  rec.steps[4].command.left.jaw = 3.0;
  relact::save_demo(rec, p("bad.jsonl"));
  const RunResult r = run("validate --in " + p("bad.jsonl"));
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.output.find("step 4 [jaw]"), std::string::npos);
}

TEST_F(CliTest, CorruptFileNamesErrorAndStep) {
  {
    std::ofstream out(p("broken.jsonl"));
    out << R"({"schema":"relact-demo/1","task":"x","dt":0.01,"num_steps":2})" << '\n' << "{not json\n";
  }
  const RunResult r = run("validate --in " + p("broken.jsonl"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("MalformedRecord at step 0"), std::string::npos) << r.output;
}

}  // namespace
