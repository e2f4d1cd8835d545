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

#ifndef CANDRANK_PIPELINE_H_
#define CANDRANK_PIPELINE_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "candrank/consensus.h"
#include "candrank/contrastive_loss.h"
#include "candrank/diverse_beam.h"
#include "candrank/minority_sim.h"
#include "candrank/toy_lm.h"

namespace candrank {

inline constexpr int kConfigVersion = 1;
inline constexpr int kModelFormatVersion = 1;

// Process exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitRecordFailure = 3;

// Every tunable of the toolkit. Defaults are the best XSum setting:
// N = 32 in N / 8 groups, gamma = 50, lambda = 0.01 with difference
// margins, eta = 0.3, alpha = 31, harmonic R1/R2 ranking metric.
struct RunConfig {
  RougeVariant variant = RougeVariant::kHarmonicR1R2;
  Alpha alpha = Alpha(31.0);
  MarginSpec margin{MarginScheme::kDifference, 0.01};
  LossConfig loss{50.0, 1.0};
  BeamConfig beam{0.3, 4, 32, 12, 1, 1.0};

  std::uint64_t seed = 0;
  double learning_rate = 0.001;
  int epochs = 1;
  int num_buckets = 4;

  // Finite-difference step and pass threshold for gradcheck.
  double epsilon = 1e-6;
  double gradcheck_tolerance = 1e-5;

  int sim_num_slots = 4;
  int sim_vocab_per_slot = 10;
  double sim_halluc_prob = 0.2;
  int sim_pool_size = 16;
  int sim_trials = 1000;

  std::string input;
  std::string output;
  std::string corpus;
  std::string model;
  std::string model_out;
  std::string source;

  ScoringConfig scoring() const { return {alpha, variant}; }
  TrainConfig train_config() const;
  SimConfig sim_config() const;
};

void validate(const RunConfig& cfg);

nlohmann::json to_json(const RunConfig& cfg);
// Unknown keys and out-of-range values are rejected; missing keys keep
// their defaults. `version` must equal kConfigVersion.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

struct IngestedPool {
  std::size_t line = 0;
  CandidatePool pool;
  // Optional per-token log-probabilities of the reference; gives the loss
  // command a cross-entropy term.
  std::optional<std::vector<double>> reference_logprobs;
};

// One PoolRecord per non-blank line:
//   {"source": str, "reference": str?, "reference_token_logprobs": [num]?,
//    "candidates": [{"text": str, "token_logprobs": [num]?}, ...]}
// Throws kParse naming the line for malformed JSON or schema violations and
// naming the candidate index for logprob length mismatches.
std::vector<IngestedPool> ingest(std::istream& in);
std::vector<IngestedPool> ingest(const std::string& path);

nlohmann::json pool_to_json(const CandidatePool& pool);

nlohmann::json to_json(const LossBreakdown& loss);
nlohmann::json to_json(const SimReport& report);

nlohmann::json model_to_json(const ToyModelParams& params);
ToyModelParams model_from_json(const nlohmann::json& j);
void save_model(const ToyModelParams& params, const std::string& path);
ToyModelParams load_model(const std::string& path);

// Compact single-line dump with round-trip precision for doubles.
std::string dump_line(const nlohmann::json& j);

// Entry point of the command-line tool. Returns the exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace candrank

#endif  // CANDRANK_PIPELINE_H_
