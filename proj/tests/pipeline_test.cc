/* Copyright 2026 The candrank Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "candrank/pipeline.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "candrank/error.h"
#include "fixtures.h"

namespace candrank {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() /
            (std::string("candrank_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }

  std::string write(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p.string();
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "candrank");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<json> lines_of(const std::string& text) {
  std::vector<json> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(json::parse(line));
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

ErrorCode ingest_error(const std::string& text, std::string* message = nullptr) {
  std::istringstream in(text);
  try {
    ingest(in);
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  ADD_FAILURE() << "no error for: " << text;
  return ErrorCode::kInvalidArgument;
}

TEST(Ingest, EmptyAndBlankInput) {
  std::istringstream empty("");
  EXPECT_TRUE(ingest(empty).empty());
  std::istringstream blank("\n  \n");
  EXPECT_TRUE(ingest(blank).empty());
}

TEST(Ingest, ValidRecord) {
  std::istringstream in("\n" + fixtures::hand_pool_jsonl_line(true) + "\n");
  const auto pools = ingest(in);
  ASSERT_EQ(pools.size(), 1u);
  EXPECT_EQ(pools[0].line, 2u);
  EXPECT_EQ(pools[0].pool.size(), 3u);
  EXPECT_EQ(pools[0].pool.reference->text(), fixtures::kReference);
  EXPECT_EQ(pools[0].pool.candidates[1].token_logprobs->size(), 10u);
  EXPECT_FALSE(pools[0].reference_logprobs);
}

TEST(Ingest, LogprobMismatchNamesCandidate) {
  std::string msg;
  EXPECT_EQ(ingest_error(R"({"source": "s", "candidates": [{"text": "a b"},)"
                         R"( {"text": "a b c", "token_logprobs": [-1, -1]}]})",
                         &msg),
            ErrorCode::kParse);
  EXPECT_NE(msg.find("line 1, candidate 1"), std::string::npos) << msg;
  EXPECT_NE(msg.find("2 token_logprobs for 3 tokens"), std::string::npos) << msg;
}

TEST(Ingest, MalformedLineIsNamed) {
  std::string msg;
  EXPECT_EQ(ingest_error(fixtures::hand_pool_jsonl_line(false) + "\n{oops\n", &msg),
            ErrorCode::kParse);
  EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
}

TEST(Ingest, SchemaViolations) {
  EXPECT_EQ(ingest_error(R"({"source": "s", "candidates": [], "extra": 1})"),
            ErrorCode::kParse);
  EXPECT_EQ(ingest_error(R"({"candidates": []})"), ErrorCode::kParse);
  EXPECT_EQ(ingest_error(R"({"source": "s", "candidates": [{"text": 3}]})"),
            ErrorCode::kParse);
  EXPECT_EQ(ingest_error(R"({"source": "s", "candidates": [{"text": "a", "token_logprobs": [0.5]}]})"),
            ErrorCode::kParse);
  EXPECT_EQ(ingest_error(R"({"source": "s", "reference_token_logprobs": [-1], "candidates": []})"),
            ErrorCode::kParse);
  EXPECT_EQ(ingest_error("[1, 2]"), ErrorCode::kParse);
}

TEST(Ingest, MissingFileIsIoError) {
  try {
    ingest(std::string("/nonexistent/pools.jsonl"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(Config, DefaultsRoundTrip) {
  const RunConfig d;
  const auto j = to_json(d);
  EXPECT_EQ(j["version"], 1);
  EXPECT_EQ(j["alpha"], 31.0);
  EXPECT_EQ(j["variant"], "harmonic_r1_r2");
  EXPECT_EQ(j["margin"], "difference");
  EXPECT_EQ(to_json(config_from_json(j)), j);
  EXPECT_EQ(d.beam.group_width(), 8);
}

TEST(Config, OverridesAndInfinity) {
  const auto cfg = config_from_json(
      {{"version", 1}, {"alpha", "inf"}, {"beta", 0.5}, {"num_groups", 32}, {"seed", 7}});
  EXPECT_TRUE(cfg.alpha.is_infinite());
  EXPECT_EQ(cfg.loss.beta, 0.5);
  EXPECT_EQ(cfg.beam.beta, 0.5);
  EXPECT_EQ(cfg.beam.group_width(), 1);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(to_json(cfg)["alpha"], "inf");
}

TEST(Config, Rejections) {
  EXPECT_THROW(config_from_json({{"alpha", 1.0}}), Error);
  EXPECT_THROW(config_from_json({{"version", 2}}), Error);
  EXPECT_THROW(config_from_json({{"version", 1}, {"alhpa", 1.0}}), Error);
  EXPECT_THROW(config_from_json({{"version", 1}, {"alpha", -1.0}}), Error);
  EXPECT_THROW(config_from_json({{"version", 1}, {"num_groups", 5}}), Error);
  EXPECT_THROW(config_from_json({{"version", 1}, {"seed", -1}}), Error);
  EXPECT_THROW(config_from_json({{"version", 1}, {"variant", "r4"}}), Error);
}

TEST(ModelFile, RoundTripIsBitwise) {
  TempDir dir;
  const auto p = init_model(make_vocabulary({"a", "b"}), 3, 42);
  save_model(p, dir.file("m.json"));
  EXPECT_EQ(load_model(dir.file("m.json")), p);
  auto j = model_to_json(p);
  j["logits"].erase(0);
  EXPECT_THROW(model_from_json(j), Error);
}

TEST(PoolJson, RoundTrip) {
  const auto pool = fixtures::hand_pool(true);
  std::istringstream in(dump_line(pool_to_json(pool)));
  const auto back = ingest(in);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].pool.source, pool.source);
  EXPECT_EQ(back[0].pool.reference, pool.reference);
  EXPECT_EQ(back[0].pool.candidates[2].seq, pool.candidates[2].seq);
}

TEST(Cli, ScoreHandExample) {
  TempDir dir;
  const auto in = dir.write("pools.jsonl", fixtures::hand_pool_jsonl_line(false) + "\n");
  const auto r = run({"rank", "--input", in, "--variant", "r1", "--alpha", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rec = lines_of(r.out).at(0);
  const auto scores = rec["scores"].get<std::vector<double>>();
  EXPECT_NEAR(scores[0], 0.4, 1e-12);
  EXPECT_NEAR(scores[1], 0.6, 1e-12);
  EXPECT_NEAR(scores[2], 0.5, 1e-12);
  EXPECT_EQ(rec["order"], json::array({1, 2, 0}));
  EXPECT_EQ(rec["index"], 0);
}

TEST(Cli, BrioScore) {
  TempDir dir;
  const auto in = dir.write("pools.jsonl", fixtures::hand_pool_jsonl_line(false));
  const auto r = run({"score", "--brio", "--input", in, "--variant", "r1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto scores = lines_of(r.out).at(0)["scores"].get<std::vector<double>>();
  EXPECT_NEAR(scores[0], 0.2, 1e-12);
  EXPECT_NEAR(scores[2], 0.6, 1e-12);
}

TEST(Cli, SingleCandidatePoolIsRecordError) {
  TempDir dir;
  const auto in = dir.write(
      "pools.jsonl", fixtures::hand_pool_jsonl_line(false) +
                         "\n{\"source\": \"s\", \"candidates\": [{\"text\": \"a\"}]}\n");
  const auto r = run({"score", "--input", in});
  EXPECT_EQ(r.code, kExitRecordFailure);
  const auto recs = lines_of(r.out);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_TRUE(recs[0].contains("scores"));
  EXPECT_EQ(recs[1]["error"]["code"], "insufficient_candidates");
  EXPECT_EQ(recs[1]["line"], 2);
}

TEST(Cli, LossHandExample) {
  TempDir dir;
  // R1 consensus scores at alpha 0 are (1/2, 1/3, 1/6), so input order is
  // rank order; f = (-1.0, -0.9, -1.2).
  const std::string line =
      R"({"source": "s", "reference": "a b", "reference_token_logprobs": [-1, -3],)"
      R"( "candidates": [{"text": "a b c", "token_logprobs": [-1, -1, -1]},)"
      R"( {"text": "a b e", "token_logprobs": [-0.9, -0.9, -0.9]},)"
      R"( {"text": "c f g", "token_logprobs": [-1.2, -1.2, -1.2]}]})";
  const auto in = dir.write("pools.jsonl", line + "\n");
  const auto r = run({"loss", "--input", in, "--variant", "r1", "--alpha", "0",
                      "--lambda", "0.1", "--gamma", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rec = lines_of(r.out).at(0);
  const auto scores = rec["scores"].get<std::vector<double>>();
  EXPECT_GT(scores[0], scores[1]);
  EXPECT_GT(scores[1], scores[2]);
  const auto f = rec["f"].get<std::vector<double>>();
  EXPECT_NEAR(f[0], -1.0, 1e-15);
  EXPECT_NEAR(f[1], -0.9, 1e-15);
  EXPECT_NEAR(f[2], -1.2, 1e-15);
  EXPECT_EQ(rec["grad_f"], json::array({-1.0, 1.0, 0.0}));
  EXPECT_EQ(rec["xent"], 2.0);
  EXPECT_TRUE(rec["xent_available"].get<bool>());
  const double ctr = rec["ctr"].get<double>();
  const double expected =
      0.1 + 0.1 * (scores[0] - scores[1]) + std::max(0.0, -0.2 + 0.1 * (scores[0] - scores[2]));
  EXPECT_NEAR(ctr, expected, 1e-12);
  EXPECT_NEAR(rec["total"].get<double>(), 2.0 + 50.0 * ctr, 1e-12);
}

TEST(Cli, LossWithoutLogprobsIsRecordError) {
  TempDir dir;
  const auto in = dir.write("pools.jsonl", fixtures::hand_pool_jsonl_line(false));
  const auto r = run({"loss", "--input", in});
  EXPECT_EQ(r.code, kExitRecordFailure);
  EXPECT_EQ(lines_of(r.out).at(0)["error"]["code"], "missing_logprobs");
}

TEST(Cli, GradCheck) {
  TempDir dir;
  const auto in = dir.write("pools.jsonl", fixtures::hand_pool_jsonl_line(true));
  // Equal f-values put every hinge at its margin, away from the kink.
  const auto r = run({"gradcheck", "--input", in, "--margin", "fixed", "--lambda", "0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rec = lines_of(r.out).at(0);
  EXPECT_TRUE(rec["pass"].get<bool>());
  EXPECT_LT(rec["max_rel_error"].get<double>(), 1e-5);
}

TEST(Cli, BeamAndTrainAndReport) {
  TempDir dir;
  const auto corpus = dir.write(
      "corpus.jsonl",
      "{\"source\": \"the cat sat\", \"reference\": \"cat sat\"}\n"
      "{\"source\": \"a dog ran\", \"reference\": \"dog ran\"}\n");
  const auto model = dir.file("model.json");
  const auto trace = dir.file("trace.jsonl");
  auto r = run({"train", "--corpus", corpus, "--epochs", "3", "--num-candidates", "4",
                "--num-groups", "2", "--max-length", "4", "--model-out", model,
                "--output", trace});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto t = lines_of(read_file(trace));
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[2]["epoch"], 2);
  EXPECT_EQ(load_model(model).vocabulary(), make_vocabulary({"cat", "dog", "ran", "sat"}));

  r = run({"beam", "--model", model, "--source", "the cat sat", "--num-candidates", "4",
           "--num-groups", "4", "--max-length", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto pool = lines_of(r.out).at(0);
  EXPECT_EQ(pool["source"], "the cat sat");
  ASSERT_EQ(pool["candidates"].size(), 4u);
  for (const auto& c : pool["candidates"]) {
    EXPECT_EQ(c["token_logprobs"].size(), TokenSequence::from_text(c["text"]).size());
  }

  const auto beam_out = dir.write("beam.jsonl", r.out);
  r = run({"report", "--input", trace});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rep = lines_of(r.out).at(0);
  EXPECT_EQ(rep["records"], 3);
  EXPECT_EQ(rep["fields"]["xent"]["count"], 3);
  r = run({"report", "--input", beam_out});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST(Cli, Simulate) {
  const auto r = run({"simulate", "--alpha", "0", "--sim-trials", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rec = lines_of(r.out).at(0);
  EXPECT_EQ(rec["trials"], 50);
  EXPECT_GT(rec["score_gap"].get<double>(), 0.0);
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
  TempDir dir;
  const auto in = dir.write("pools.jsonl", fixtures::hand_pool_jsonl_line(false));
  const auto cfg = dir.write("cfg.json", R"({"version": 1, "variant": "r1", "alpha": 1})");
  auto r = run({"score", "--config", cfg, "--input", in});
  ASSERT_EQ(r.code, 0) << r.err;
  auto scores = lines_of(r.out).at(0)["scores"].get<std::vector<double>>();
  EXPECT_NEAR(scores[0], 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(scores[1], 8.0 / 15.0, 1e-12);
  r = run({"score", "--config", cfg, "--input", in, "--alpha", "0"});
  scores = lines_of(r.out).at(0)["scores"].get<std::vector<double>>();
  EXPECT_NEAR(scores[0], 0.4, 1e-12);
}

TEST(Cli, InputErrors) {
  TempDir dir;
  EXPECT_EQ(run({}).code, kExitInputError);
  EXPECT_EQ(run({"score"}).code, kExitInputError);
  EXPECT_EQ(run({"score", "--input", "/nonexistent"}).code, kExitInputError);
  EXPECT_EQ(run({"score", "--alpha", "-1", "--input", "x"}).code, kExitInputError);
  EXPECT_EQ(run({"score", "--num-groups", "abc"}).code, kExitInputError);
  const auto bad = dir.write("cfg.json", R"({"version": 1, "bogus": 1})");
  EXPECT_EQ(run({"simulate", "--config", bad}).code, kExitInputError);
  const auto malformed = dir.write("pools.jsonl", "{oops\n");
  const auto r = run({"score", "--input", malformed});
  EXPECT_EQ(r.code, kExitInputError);
  EXPECT_NE(r.err.find("line 1"), std::string::npos);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
}

TEST(Cli, RerunsAreByteIdentical) {
  TempDir dir;
  const auto in = dir.write("pools.jsonl", fixtures::hand_pool_jsonl_line(true));
  const auto corpus =
      dir.write("corpus.jsonl", "{\"source\": \"the cat sat\", \"reference\": \"cat sat\"}\n");
  const std::vector<std::vector<std::string>> commands{
      {"score", "--input", in},
      {"loss", "--input", in},
      {"gradcheck", "--input", in, "--margin", "fixed"},
      {"beam", "--source", "the cat sat", "--num-candidates", "8", "--num-groups", "4"},
      {"train", "--corpus", corpus, "--num-candidates", "4", "--num-groups", "2"},
      {"simulate", "--sim-trials", "100"},
  };
  for (const auto& cmd : commands) {
    auto a = cmd, b = cmd;
    a.insert(a.end(), {"--output", dir.file("a.out")});
    b.insert(b.end(), {"--output", dir.file("b.out")});
    ASSERT_EQ(run(a).code, 0) << cmd[0];
    ASSERT_EQ(run(b).code, 0) << cmd[0];
    EXPECT_EQ(read_file(dir.file("a.out")), read_file(dir.file("b.out"))) << cmd[0];
    EXPECT_FALSE(read_file(dir.file("a.out")).empty()) << cmd[0];
  }
}

}  // namespace
}  // namespace candrank
