// Copyright 2026 The ProbeKit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include "json.hpp"
#include <sstream>
#include <string>

#include "probekit/file_util.h"
#include "probekit/repr_io.h"
#include "test_util.h"

namespace probekit {
namespace {

using testing::TempDir;
using testing::WriteText;

namespace fs = std::filesystem;

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult RunCli(const std::string& args, const fs::path& work,
                 const std::string& env = "") {
  const fs::path out = work / "stdout.txt";
  const fs::path err = work / "stderr.txt";
  const std::string cmd = env + " '" + std::string(PROBEKIT_CLI) + "' " + args + " > '" +
                          out.string() + "' 2> '" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = ReadFile(out);
  r.err = ReadFile(err);
  return r;
}

std::string SnliLine(int i, const std::string& premise, const std::string& hypothesis,
                     const std::string& label) {
  return "{\"sentence1\": \"" + premise + "\", \"sentence2\": \"" + hypothesis +
         "\", \"gold_label\": \"" + label + "\", \"pairID\": \"p" + std::to_string(i) +
         "\"}\n";
}

ReprMatrix SmallRepr(std::uint64_t n, std::uint32_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g;
  ReprMatrix m;
  m.n = n;
  m.d = d;
  m.k = 2;
  for (std::uint64_t i = 0; i < n; ++i) {
    m.ids.push_back(i);
    m.labels.push_back(static_cast<std::uint32_t>(i % 2));
    for (std::uint32_t j = 0; j < d; ++j) {
      m.data.push_back(g(rng) + (j == 0 ? 2.0f * (i % 2) : 0.0f));
    }
  }
  return m;
}

TEST(CliTest, MissingFileIsIoError) {
  TempDir dir;
  const auto r = RunCli("export-info '" + (dir.path() / "nope.rprb").string() + "'",
                        dir.path());
  EXPECT_EQ(r.code, 2) << r.err;
}

TEST(CliTest, BuildDatasetWritesSplitsAndCounts) {
  TempDir dir;
  std::string body;
  for (int i = 0; i < 12; ++i) {
    body += i % 3 == 0 ? SnliLine(i, "The man is tall.", "A man is not tall.", "contradiction")
                       : SnliLine(i, "The man is tall.", "A person.", "entailment");
  }
  WriteText(dir.path() / "train.jsonl", body);
  WriteText(dir.path() / "neg.txt", "not\nno\nnever\n");
  const auto r = RunCli("build-dataset --task negwords --schema snli --neg-words '" +
                            (dir.path() / "neg.txt").string() + "' --train '" +
                            (dir.path() / "train.jsonl").string() + "' --out-dir '" +
                            (dir.path() / "out").string() + "'",
                        dir.path());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir.path() / "out" / "snli_negwords_train.jsonl"));
  EXPECT_TRUE(fs::exists(dir.path() / "out" / "snli_negwords_train.manifest.json"));
  EXPECT_TRUE(fs::exists(dir.path() / "out" / "snli_negwords.run.json"));
  EXPECT_NE(r.out.find("negwords"), std::string::npos);
  const auto manifest = nlohmann::json::parse(
      ReadFile(dir.path() / "out" / "snli_negwords_train.manifest.json"));
  EXPECT_EQ(manifest["counts"]["positive"], 4);
  EXPECT_EQ(manifest["counts"]["negative"], 4);
}

TEST(CliTest, DegenerateOverlapExitsWithDataError) {
  TempDir dir;
  std::string body;
  for (int i = 0; i < 6; ++i) body += SnliLine(i, "a b c", "d e", "neutral");
  WriteText(dir.path() / "train.jsonl", body);
  const auto r = RunCli("build-dataset --task overlap --schema snli --train '" +
                            (dir.path() / "train.jsonl").string() + "' --out-dir '" +
                            (dir.path() / "out").string() + "'",
                        dir.path());
  EXPECT_EQ(r.code, 3) << r.err;
  EXPECT_NE(r.err.find("overlap"), std::string::npos) << r.err;
}

TEST(CliTest, JoinMismatchListsIds) {
  TempDir dir;
  WriteRepr(SmallRepr(4, 3, 1), dir.path() / "r.rprb");
  WriteText(dir.path() / "p.jsonl",
            "{\"source_id\":0,\"prop_label\":0}\n{\"source_id\":7,\"prop_label\":1}\n");
  const auto r = RunCli("probe --reprs '" + (dir.path() / "r.rprb").string() +
                            "' --probing '" + (dir.path() / "p.jsonl").string() + "'",
                        dir.path());
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find('7'), std::string::npos) << r.err;
}

TEST(CliTest, UniformDiagnosticGivesUnitCompression) {
  TempDir dir;
  WriteRepr(SmallRepr(300, 4, 2), dir.path() / "r.rprb");
  const fs::path report = dir.path() / "report.json";
  const auto r = RunCli("probe --diagnostic-uniform --reprs '" +
                            (dir.path() / "r.rprb").string() + "' --out '" +
                            report.string() + "'",
                        dir.path());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(ReadFile(report));
  EXPECT_NEAR(j["compression"].get<double>(), 1.0, 1e-12);
  EXPECT_TRUE(j.contains("config"));
  EXPECT_TRUE(j.contains("inputs"));
}

TEST(CliTest, ProbeSeparableDataCompresses) {
  TempDir dir;
  WriteRepr(SmallRepr(400, 4, 3), dir.path() / "r.rprb");
  const fs::path report = dir.path() / "report.json";
  const auto r = RunCli("probe --reprs '" + (dir.path() / "r.rprb").string() +
                            "' --out '" + report.string() + "'",
                        dir.path());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_GT(nlohmann::json::parse(ReadFile(report))["compression"].get<double>(), 1.0);
}

TEST(CliTest, ExportInfoPrintsHeader) {
  TempDir dir;
  WriteRepr(SmallRepr(5, 7, 4), dir.path() / "r.rprb");
  auto r = RunCli("export-info '" + (dir.path() / "r.rprb").string() + "'", dir.path());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["n"], 5);
  EXPECT_EQ(j["d"], 7);
  EXPECT_EQ(j["k"], 2);
  EXPECT_EQ(j["version"], 1);

  std::string bytes = ReadFile(dir.path() / "r.rprb");
  bytes.resize(bytes.size() - 3);
  WriteText(dir.path() / "short.rprb", bytes);
  r = RunCli("export-info '" + (dir.path() / "short.rprb").string() + "'", dir.path());
  EXPECT_EQ(r.code, 4);
}

TEST(CliTest, ConfRegEndToEndIsConfigError) {
  TempDir dir;
  const auto r = RunCli("toy --objective confreg --end-to-end --no-probe --epochs 1 --out-dir '" +
                            (dir.path() / "toy").string() + "'",
                        dir.path());
  EXPECT_EQ(r.code, 5);
  EXPECT_NE(r.err.find("pipeline"), std::string::npos) << r.err;
}

const char* kHeader =
    "model_name,bias,dataset,objective,gamma,seed,ood_acc,baseline_ood_acc,compression,"
    "probe_acc\n";

TEST(CliTest, RecordsMissingColumnIsSchemaError) {
  TempDir dir;
  WriteText(dir.path() / "r.csv",
            "model_name,bias,dataset,objective,gamma,seed,ood_acc,baseline_ood_acc\n"
            "m,b,d,ce,,0,0.5,0.5\n");
  const auto r = RunCli("correlate --records '" + (dir.path() / "r.csv").string() +
                            "' --out-dir '" + (dir.path() / "o").string() + "'",
                        dir.path());
  EXPECT_EQ(r.code, 6);
  EXPECT_NE(r.err.find("compression"), std::string::npos) << r.err;
}

TEST(CliTest, TwoRecordGroupBecomesWarningRow) {
  TempDir dir;
  WriteText(dir.path() / "r.csv", std::string(kHeader) +
                                      "a,negwords,snli,dfl,2,0,0.6,0.5,1.5,\n"
                                      "b,negwords,snli,poe,,0,0.7,0.5,2.5,\n");
  const auto r = RunCli("correlate --records '" + (dir.path() / "r.csv").string() +
                            "' --out-dir '" + (dir.path() / "o").string() + "'",
                        dir.path());
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = ReadFile(dir.path() / "o" / "correlation.csv");
  EXPECT_NE(csv.find("skipped"), std::string::npos) << csv;
  EXPECT_TRUE(fs::exists(dir.path() / "o" / "models.csv"));
  EXPECT_TRUE(fs::exists(dir.path() / "o" / "correlation.json"));
}

TEST(CliTest, ToyDflWritesOneReprAndManifestPerSeed) {
  TempDir dir;
  const fs::path out = dir.path() / "toy";
  const auto r = RunCli("toy --objective dfl --gamma 2 --seeds 5 --no-probe --epochs 2 --out-dir '" +
                            out.string() + "'",
                        dir.path());
  ASSERT_EQ(r.code, 0) << r.err;
  int reprs = 0, manifests = 0;
  for (const auto& e : fs::directory_iterator(out)) {
    const std::string name = e.path().filename().string();
    if (name.ends_with(".rprb")) ++reprs;
    if (name.ends_with(".manifest.json")) ++manifests;
  }
  EXPECT_EQ(reprs, 5);
  EXPECT_EQ(manifests, 5);
  const auto m = nlohmann::json::parse(ReadFile(out / "dfl-g2_s0.manifest.json"));
  EXPECT_EQ(m["gamma"], 2.0);
  EXPECT_TRUE(m["seeds"].contains("data"));
  EXPECT_TRUE(m.contains("hyperparameters"));
  const ReprHeader h = ReadReprHeader(out / "dfl-g2_s4.rprb");
  EXPECT_EQ(h.d, 64u);
  EXPECT_EQ(h.k, 2u);
}

TEST(CliTest, SeedFromEnvironment) {
  TempDir dir;
  const fs::path out = dir.path() / "toy";
  auto r = RunCli("toy --objective ce --no-probe --epochs 1 --out-dir '" + out.string() + "'",
                  dir.path(), "PROBEKIT_SEED=42");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(out / "ce_s42.rprb"));
  r = RunCli("toy --objective ce --no-probe --epochs 1 --out-dir '" + out.string() + "'",
             dir.path(), "PROBEKIT_SEED=abc");
  EXPECT_EQ(r.code, 5);
}

TEST(CliTest, UnknownSubcommandOptionFails) {
  TempDir dir;
  const auto r = RunCli("probe --bogus", dir.path());
  EXPECT_NE(r.code, 0);
}

}  // namespace
}  // namespace probekit
