// Copyright 2026 The rdqc Authors
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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rdqc/cli.hpp"

namespace rdqc {
namespace {

namespace fs = std::filesystem;

const std::string kData = RDQC_DATA_DIR;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "rdqc");
  std::vector<const char *> argv;
  for (const auto &a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    unsetenv("RDL_SEED");
    dir_ = fs::temp_directory_path() / ("rdqc_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override {
    unsetenv("RDL_SEED");
    fs::remove_all(dir_);
  }
  std::string path(const std::string &name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(CliTest, EstimateBellWithinTarget) {
  const CliResult r = run({"estimate", "--circuit", kData + "/bell.qc", "--k", "1", "--f", "10", "--h", "5", "--seed", "7", "--out",
                     path("bell.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("l1 distance to exact"), std::string::npos);
  const TranscriptFile tf = load_transcript(path("bell.jsonl"));
  EXPECT_EQ(tf.command, "estimate");
  EXPECT_EQ(tf.seed, 7U);
  EXPECT_LE(tf.summary.at("l1_to_exact").get<double>(), 0.1);
  ASSERT_EQ(tf.events.size(), 2U);
  EXPECT_EQ(tf.events[0].party, "server");
  EXPECT_EQ(tf.events[1].party, "client");
  EXPECT_EQ(tf.settlement.at("rewards").size(), 2U);
}

TEST_F(CliTest, DecideInstances) {
  CliResult r = run({"decide", "--circuit", kData + "/qcyes.qc", "--f", "10", "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("decision YES"), std::string::npos);
  r = run({"decide", "--circuit", kData + "/qcno.qc", "--f", "10", "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("decision NO"), std::string::npos);
}

TEST_F(CliTest, SparseBell) {
  const CliResult r = run({"sparse", "--circuit", kData + "/bell5.qc", "--t", "2", "--eps", "0.1666666666666666", "--strategy",
                     "exact_rational", "--out", path("sparse.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  const TranscriptFile tf = load_transcript(path("sparse.jsonl"));
  EXPECT_EQ(tf.events[0].payload.at("list").size(), 24U);
  EXPECT_LE(tf.summary.at("l1_to_exact").get<double>(), 1e-12);
}

TEST_F(CliTest, RewardCurveAndCsv) {
  const CliResult r = run({"reward-curve", "--q", "0.37", "--D", "30", "--step", "0.001", "--csv", path("curve.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("argmax y*=0.185"), std::string::npos);
  EXPECT_EQ(slurp(path("curve.csv")).rfind("y,expected,scaled_excess\n", 0), 0U);
}

TEST_F(CliTest, MetaSingleRunTranscript) {
  const CliResult r = run({"meta", "--protocol", "2", "--c", "0.9", "--s", "0.2", "--provers", "2", "--truth", "yes", "--trials", "0", "--out",
                     path("meta.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  const TranscriptFile tf = load_transcript(path("meta.jsonl"));
  EXPECT_EQ(tf.events[0].payload.at("b").get<int>(), 1);
  EXPECT_EQ(tf.settlement.at("rewards").size(), 2U);
  EXPECT_EQ(tf.summary.at("conclusion").get<std::string>(), "YES");
}

TEST_F(CliTest, GapAndAmplify) {
  CliResult r = run({"gap", "--kind", "protocol3", "--c", "0.9", "--s", "0.2", "--truth", "no", "--trials", "500", "--out", path("gap.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json g = Json::parse(slurp(path("gap.json")));
  EXPECT_NEAR(g.at("gap").get<double>(), 0.7, g.at("confidence").get<double>() + 0.05);
  r = run({"meta", "--protocol", "amplify", "--c", "0.6", "--s", "0.4", "--reps", "31", "--trials", "500"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("majority of 31"), std::string::npos);
}

TEST_F(CliTest, SelftestSubset) {
  const CliResult r = run({"selftest", "--only", "3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("PASS  C3", 0), 0U);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"estimate"}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"estimate", "--circuit", kData + "/bell.qc", "--bogus", "1"}).code, 1);
  EXPECT_EQ(run({"estimate", "--circuit", path("missing.qc")}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"estimate", "--circuit", kData + "/bell.qc", "--k", "5"}).code, 2);
  EXPECT_EQ(run({"sparse", "--circuit", kData + "/bell5.qc", "--eps", "0.5"}).code, 2);
  EXPECT_EQ(run({"decide", "--circuit", kData + "/qcyes.qc", "--f", "5"}).code, 2);
  EXPECT_EQ(run({"estimate", "--circuit", kData + "/bell.qc", "--strategy", "nonsense"}).code, 1);
  EXPECT_EQ(run({"estimate", "--circuit", kData + "/bell.qc", "--out", path("no/such/dir/x.jsonl")}).code, 1);
  std::ofstream(path("bad.qc")) << "qubits 1\ngate Q 0\n";
  const CliResult bad = run({"estimate", "--circuit", path("bad.qc")});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("line 2"), std::string::npos);
}

TEST_F(CliTest, SameSeedByteIdenticalTranscripts) {
  const std::vector<std::string> base = {"estimate", "--circuit", kData + "/mix3.qc", "--k", "2", "--f", "4", "--h", "2"};
  auto with = [&](const std::string &seed, const std::string &out) {
    auto a = base;
    a.insert(a.end(), {"--seed", seed, "--out", path(out)});
    return run(a).code;
  };
  ASSERT_EQ(with("11", "a.jsonl"), 0);
  ASSERT_EQ(with("11", "b.jsonl"), 0);
  ASSERT_EQ(with("12", "c.jsonl"), 0);
  EXPECT_EQ(slurp(path("a.jsonl")), slurp(path("b.jsonl")));
  EXPECT_NE(slurp(path("a.jsonl")), slurp(path("c.jsonl")));
}

TEST_F(CliTest, EnvironmentSeedOverridesFlag) {
  const std::string c = kData + "/bell.qc";
  ASSERT_EQ(run({"estimate", "--circuit", c, "--samples", "100", "--seed", "9", "--out", path("flag.jsonl")}).code, 0);
  setenv("RDL_SEED", "9", 1);
  ASSERT_EQ(run({"estimate", "--circuit", c, "--samples", "100", "--seed", "1", "--out", path("env.jsonl")}).code, 0);
  EXPECT_EQ(slurp(path("flag.jsonl")), slurp(path("env.jsonl")));
  setenv("RDL_SEED", "nine", 1);
  EXPECT_EQ(run({"estimate", "--circuit", c}).code, 1);
}

TEST_F(CliTest, ConfigFileMatchesFlags) {
  const std::string c = kData + "/bell.qc";
  ASSERT_EQ(run({"estimate", "--circuit", c, "--samples", "100", "--seed", "5", "--out", path("flags.jsonl")}).code, 0);
  std::ofstream(path("run.toml")) << "seed = 5\n\n[estimate]\ncircuit = \"" << c << "\"\nsamples = 100\n";
  const CliResult r = run({"--config", path("run.toml"), "estimate", "--out", path("config.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(path("flags.jsonl")), slurp(path("config.jsonl")));
}

TranscriptFile sample_transcript() {
  TranscriptFile tf;
  tf.command = "estimate";
  tf.seed = 42;
  tf.config = {{"k", 1}, {"circuit", "bell.qc"}};
  tf.events.push_back({1, "server", {{"reports", {0.25, 0.25}}}});
  tf.events.push_back({2, "client", {{"rounds", Json::array()}}});
  tf.settlement = {{"total", 1.5}};
  tf.summary = {{"p", {0.5, 0.5}}};
  return tf;
}

TEST_F(CliTest, TranscriptRoundTrip) {
  const TranscriptFile tf = sample_transcript();
  save_transcript(path("t.jsonl"), tf);
  EXPECT_EQ(load_transcript(path("t.jsonl")), tf);
  EXPECT_EQ(serialize_transcript(parse_transcript(serialize_transcript(tf))), serialize_transcript(tf));
  EXPECT_THROW(load_transcript(path("absent.jsonl")), std::runtime_error);
}

TEST_F(CliTest, TranscriptVersionError) {
  TranscriptFile tf = sample_transcript();
  tf.version = 0;
  try {
    parse_transcript(serialize_transcript(tf));
    FAIL() << "old version accepted";
  } catch (const TranscriptError &e) {
    EXPECT_NE(std::string(e.what()).find("version 0"), std::string::npos);
  }
}

TEST_F(CliTest, TruncatedTranscriptReportsByteOffset) {
  const std::string text = serialize_transcript(sample_transcript());
  const std::size_t second_line = text.find('\n') + 1;
  const std::string cut = text.substr(0, second_line + 10);
  try {
    parse_transcript(cut);
    FAIL() << "truncated transcript accepted";
  } catch (const TranscriptError &e) {
    EXPECT_NE(std::string(e.what()).find("byte offset"), std::string::npos) << e.what();
  }
  // Dropping whole trailing lines is also caught.
  const std::string head_only = text.substr(0, second_line);
  try {
    parse_transcript(head_only);
    FAIL() << "transcript without settlement accepted";
  } catch (const TranscriptError &e) {
    EXPECT_NE(std::string(e.what()).find("byte offset " + std::to_string(second_line)), std::string::npos) << e.what();
  }
}

TEST_F(CliTest, TranscriptEventOrder) {
  TranscriptFile tf = sample_transcript();
  tf.events[0].party = "client";
  EXPECT_THROW(serialize_transcript(tf), TranscriptError);
  tf = sample_transcript();
  std::swap(tf.events[0], tf.events[1]);
  EXPECT_THROW(serialize_transcript(tf), TranscriptError);
}

}  // namespace
}  // namespace rdqc
