#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;

const fs::path kDir = fs::temp_directory_path() / "synthqa_cli_test";
const std::string kTouchdownQ = "\"How many touchdowns did Edward throw in the 1st quarter?\"";
const std::string kTouchdownD = "\"return touchdowns by Edward ;return #1 from the 1st quarter ;return number of #2\"";

struct Run {
  int rc;
  std::string out;
};

Run cli(const std::string& args) {
  fs::create_directories(kDir);
  auto out = kDir / "stdout.txt";
  std::string cmd = std::string(SYNTHQA_CLI) + " " + args + " > " + out.string() + " 2> " + (kDir / "stderr.txt").string();
  int status = std::system(cmd.c_str());
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string path(const char* name) { return (kDir / name).string(); }

std::vector<std::string> lines(const std::string& file) {
  std::ifstream in(file);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

TEST(Cli, ParseAndTypecheck) {
  auto p = cli("parse --question " + kTouchdownQ + " --qdmr " + kTouchdownD);
  EXPECT_EQ(p.rc, 0);
  EXPECT_EQ(p.out, "select(\"touchdowns by Edward\") ; filter(#1, \"from the 1st quarter\") ; count(#2)\n");
  auto t = cli("typecheck --question " + kTouchdownQ + " --qdmr " + kTouchdownD);
  EXPECT_EQ(t.rc, 0);
  EXPECT_NE(t.out.find("1\tselect\tnamed_entity/list\n2\tfilter\tnamed_entity/list\n3\tcount\tnumber/scalar\n"),
            std::string::npos);
}

TEST(Cli, GenerateVerifyExecute) {
  auto out = path("touchdown.jsonl");
  auto g = cli("--seed 4 gen-instance --question " + kTouchdownQ + " --qdmr " + kTouchdownD + " --out " + out + " --keep-facts");
  ASSERT_EQ(g.rc, 0);
  auto recs = lines(out);
  ASSERT_EQ(recs.size(), 1u);
  auto v = cli("verify --in " + out + " --facts " + path("touchdown.facts.jsonl"));
  EXPECT_EQ(v.rc, 0);
  EXPECT_NE(v.out.find("P1 1/1"), std::string::npos);
  EXPECT_NE(v.out.find("P3 1/1"), std::string::npos);

  auto inst = nlohmann::json::parse(recs[0]);
  auto program = inst["program"].get<std::string>();
  std::ofstream(path("program.txt")) << program;
  auto e = cli("execute --program \"$(cat " + path("program.txt") + ")\" --facts " + path("touchdown.facts.jsonl"));
  ASSERT_EQ(e.rc, 0);
  auto trace = e.out;
  EXPECT_TRUE(trace.starts_with("1\tselect\t[")) << trace;
  auto answer = inst["answers"][0].get<std::string>();
  EXPECT_NE(trace.find("3\tcount\t" + answer + "\n"), std::string::npos) << trace;
}

TEST(Cli, DatasetIsIndependentOfWorkers) {
  std::string corpus = std::string(SYNTHQA_DATA_DIR) + "/seed_corpus.csv";
  ASSERT_EQ(cli("--seed 7 --workers 1 gen-dataset --corpus " + corpus + " --size 120 --out " + path("w1.jsonl")).rc, 0);
  ASSERT_EQ(cli("--seed 7 --workers 3 gen-dataset --corpus " + corpus + " --size 120 --out " + path("w3.jsonl")).rc, 0);
  EXPECT_EQ(lines(path("w1.jsonl")), lines(path("w3.jsonl")));
  EXPECT_TRUE(fs::exists(path("w1.jsonl") + ".stats.json"));
  auto s = cli("stats --json --in " + path("w1.jsonl"));
  ASSERT_EQ(s.rc, 0);
  auto j = nlohmann::json::parse(s.out);
  EXPECT_EQ(j["records"].get<int>() + 0, static_cast<int>(lines(path("w1.jsonl")).size()));
}

TEST(Cli, Primitives) {
  auto dir = path("prims");
  ASSERT_EQ(cli("gen-primitives --train 4 --dev 2 --primitive count --primitive argmax --out " + dir).rc, 0);
  EXPECT_EQ(lines(dir + "/count.train.jsonl").size(), 4u);
  EXPECT_EQ(lines(dir + "/argmax.dev.jsonl").size(), 2u);
  EXPECT_EQ(cli("gen-primitives --train 1 --dev 0 --primitive no_such --out " + dir).rc, 1);
}

TEST(Cli, ConfigRoundTrip) {
  auto cfg = path("run.ini");
  ASSERT_EQ(cli("--seed 11 --max-facts 20 --emit-config " + cfg + " parse --question q --qdmr \"return x ;return number of #1\"").rc, 0);
  auto a = cli("--config " + cfg + " gen-instance --question " + kTouchdownQ + " --qdmr " + kTouchdownD);
  auto b = cli("--seed 11 --max-facts 20 gen-instance --question " + kTouchdownQ + " --qdmr " + kTouchdownD);
  EXPECT_EQ(a.rc, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli("verify --in /nonexistent/x.jsonl --facts /nonexistent/y.jsonl").rc, 2);
  EXPECT_EQ(cli("--no-such-flag parse").rc, 2);
  EXPECT_EQ(cli("parse --question q --qdmr \"return x ;return #5 of it\"").rc, 1);
  EXPECT_EQ(cli("--max-retries 0 gen-instance --question " + kTouchdownQ + " --qdmr " + kTouchdownD).rc, 1);
  EXPECT_EQ(cli("--max-retries 1 --cardinalities 4 gen-instance --question " + kTouchdownQ + " --qdmr " + kTouchdownD).rc, 1);
}

}  // namespace
