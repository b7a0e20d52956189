#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "fixtures.hpp"

namespace fs = std::filesystem;
using typicality::cli::dispatch;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

/// Runs the installed executable through the shell and returns its exit status.
int run_tool(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + TYPICALITY_TOOL_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> synth_args(const fs::path& dir, const std::string& seed = "7") {
  return {"synth", "--out", dir.string(), "--seed", seed, "--categories", "3", "--train", "40", "--test-typical", "10",
          "--test-abnormal", "12"};
}

std::size_t count_lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

}  // namespace

TEST(Cli, SynthIsByteIdenticalForOneSeed) {
  fixtures::TempDir tmp;
  ASSERT_EQ(run(synth_args(tmp / "a")).code, 0);
  ASSERT_EQ(run(synth_args(tmp / "b")).code, 0);
  ASSERT_EQ(run(synth_args(tmp / "c", "8")).code, 0);
  for (const char* f : {"train.csv", "test.csv", "groups.csv", "ratings.csv"}) {
    EXPECT_EQ(fixtures::read_file(tmp / "a" / f), fixtures::read_file(tmp / "b" / f)) << f;
  }
  EXPECT_NE(fixtures::read_file(tmp / "a" / "train.csv"), fixtures::read_file(tmp / "c" / "train.csv"));
}

TEST(Cli, EndToEndTableHasOneAucPerModelAndCategory) {
  fixtures::TempDir tmp;
  const auto d = tmp / "data";
  ASSERT_EQ(run(synth_args(d)).code, 0);
  const auto train = run({"train", "--data", (d / "train.csv").string(), "--groups", (d / "groups.csv").string(),
                          "--out", (tmp / "models.json").string(), "--stage1", "--model", "all"});
  ASSERT_EQ(train.code, 0) << train.err;
  const auto eval = run({"eval", "--data", (d / "test.csv").string(), "--groups", (d / "groups.csv").string(),
                         "--models", (tmp / "models.json").string(), "--ratings", (d / "ratings.csv").string(),
                         "--text", (tmp / "table.txt").string()});
  ASSERT_EQ(eval.code, 0) << eval.err;
  std::istringstream in(eval.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "section,row,airplane,boat,car,average");
  int auc_rows = 0, kl_rows = 0;
  while (std::getline(in, line)) {
    if (line.rfind("auc,", 0) == 0) {
      ++auc_rows;
      // Every (model, category) cell is filled: no empty fields before the average.
      EXPECT_EQ(line.find(",,"), std::string::npos) << line;
    }
    if (line.rfind("kl,", 0) == 0) ++kl_rows;
  }
  EXPECT_EQ(auc_rows, 8);
  EXPECT_EQ(kl_rows, 3);
  EXPECT_NE(fixtures::read_file(tmp / "table.txt").find("AUC"), std::string::npos);
}

TEST(Cli, ScoreRelevanceAndReportOutputs) {
  fixtures::TempDir tmp;
  const auto d = tmp / "data";
  ASSERT_EQ(run(synth_args(d)).code, 0);
  const std::string groups = (d / "groups.csv").string();
  const std::string models = (tmp / "m.json").string();
  ASSERT_EQ(run({"train", "--data", (d / "train.csv").string(), "--groups", groups, "--out", models, "--stage1",
                 "--model", "nb,mdist-global"})
                .code,
            0);
  const auto score = run({"score", "--data", (d / "test.csv").string(), "--groups", groups, "--models", models});
  ASSERT_EQ(score.code, 0) << score.err;
  EXPECT_EQ(score.out.substr(0, score.out.find('\n')), "id,label,category,confidence,nb,mdist-global");
  EXPECT_EQ(count_lines(score.out), 1u + 66u);

  const auto rel = run({"relevance", "--data", (d / "train.csv").string(), "--groups", groups});
  ASSERT_EQ(rel.code, 0) << rel.err;
  EXPECT_EQ(count_lines(rel.out), 4u);
  EXPECT_EQ(rel.out.rfind("category,shape_0,", 0), 0u);

  for (const char* method : {"ic", "baseline2", "baseline4"}) {
    const auto rep = run({"report", "--data", (d / "test.csv").string(), "--groups", groups, "--models", models,
                          "--method", method});
    ASSERT_EQ(rep.code, 0) << method << ": " << rep.err;
    EXPECT_EQ(rep.out.rfind("id,category,shape,texture,color,pose,top_1", 0), 0u) << rep.out.substr(0, 80);
  }
}

TEST(Cli, OutputsAreDeterministicAndInputsUntouched) {
  fixtures::TempDir tmp;
  const auto d = tmp / "data";
  ASSERT_EQ(run(synth_args(d)).code, 0);
  const auto before = fixtures::read_file(d / "train.csv");
  const std::string groups = (d / "groups.csv").string();
  std::string first_eval;
  for (int round = 0; round < 2; ++round) {
    const auto models = tmp / ("m" + std::to_string(round) + ".json");
    ASSERT_EQ(run({"train", "--data", (d / "train.csv").string(), "--groups", groups, "--out", models.string(),
                   "--stage1", "--model", "all"})
                  .code,
              0);
    const auto ev = run({"eval", "--data", (d / "test.csv").string(), "--groups", groups, "--models",
                         models.string(), "--ratings", (d / "ratings.csv").string(), "--jobs", round == 0 ? "1" : "3"});
    ASSERT_EQ(ev.code, 0) << ev.err;
    if (round == 0) first_eval = ev.out;
    else EXPECT_EQ(ev.out, first_eval);
  }
  EXPECT_EQ(fixtures::read_file(tmp / "m0.json"), fixtures::read_file(tmp / "m1.json"));
  EXPECT_EQ(fixtures::read_file(d / "train.csv"), before);
}

TEST(Cli, TrainingFailureNamesTheCategory) {
  fixtures::TempDir tmp;
  fixtures::write_file(tmp / "tiny.csv", "id,label,a,b\ns0,dog,1,2\ns1,dog,2,3\ns2,dog,0,1\ns3,cat,5,5\n");
  const auto r = run({"train", "--data", (tmp / "tiny.csv").string(), "--out", (tmp / "m.json").string(), "--model",
                      "nb"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("cat"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(tmp / "m.json"));
}

TEST(Cli, UsageErrorsNameTheProblem) {
  fixtures::TempDir tmp;
  auto r = run({"synth"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--out"), std::string::npos) << r.err;

  r = run({"synth", "--out", (tmp / "x").string(), "--bogus"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--bogus"), std::string::npos) << r.err;

  r = run({"train", "--data", "whatever.csv", "--out", "m.json"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--stage1"), std::string::npos) << r.err;

  r = run({"train", "--data", "whatever.csv", "--out", "m.json", "--model", "forest"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("forest"), std::string::npos) << r.err;

  r = run({"eval", "--data", "d.csv", "--models", "m.json", "--mode", "sideways"});
  EXPECT_EQ(r.code, 1);

  r = run({"frobnicate"});
  EXPECT_EQ(r.code, 1);
}

TEST(Cli, MissingFilesAreDataErrors) {
  fixtures::TempDir tmp;
  const auto r = run({"eval", "--data", (tmp / "nope.csv").string(), "--models", (tmp / "nope.json").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, HelpExitsCleanly) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("synth"), std::string::npos);
  EXPECT_EQ(run({"eval", "--help"}).code, 0);
}

TEST(Cli, ExecutableExitCodes) {
  fixtures::TempDir tmp;
  EXPECT_EQ(run_tool("--help", tmp / "help.log"), 0);
  EXPECT_EQ(run_tool("synth", tmp / "usage.log"), 1);
  EXPECT_NE(fixtures::read_file(tmp / "usage.log").find("--out"), std::string::npos);
  EXPECT_EQ(run_tool("eval --data \"" + (tmp / "none.csv").string() + "\" --models \"" + (tmp / "none.json").string() +
                         "\"",
                     tmp / "data.log"),
            2);
  EXPECT_EQ(run_tool("synth --out \"" + (tmp / "d").string() + "\" --train 20 --test-typical 4 --test-abnormal 4",
                     tmp / "ok.log"),
            0);
  EXPECT_TRUE(fs::exists(tmp / "d" / "train.csv"));
}
