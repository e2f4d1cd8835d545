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

#ifndef CANDRANK_TOY_LM_H_
#define CANDRANK_TOY_LM_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "candrank/consensus.h"
#include "candrank/contrastive_loss.h"
#include "candrank/diverse_beam.h"

namespace candrank {

inline constexpr const char* kBos = "<s>";
inline constexpr const char* kEos = "</s>";
inline constexpr std::size_t kBosId = 0;
inline constexpr std::size_t kEosId = 1;

// Prepends the BOS and EOS markers to a list of content words.
std::vector<std::string> make_vocabulary(std::vector<std::string> content);

// Conditional bigram model: logits[bucket][prev][next]. `prev` ranges over
// the whole vocabulary; `next` over everything but BOS, which is never
// emitted. Column k therefore corresponds to vocabulary id k + 1 and the
// softmax is taken over V - 1 entries.
class ToyModelParams {
 public:
  ToyModelParams() = default;
  // Zero logits, i.e. uniform next-token distributions.
  ToyModelParams(std::vector<std::string> vocabulary, std::size_t num_buckets);

  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  std::size_t vocab_size() const { return vocabulary_.size(); }
  std::size_t output_size() const { return vocabulary_.size() - 1; }
  std::size_t num_buckets() const { return num_buckets_; }

  std::span<double> row(std::size_t bucket, std::size_t prev);
  std::span<const double> row(std::size_t bucket, std::size_t prev) const;
  std::vector<double>& logits() { return logits_; }
  const std::vector<double>& logits() const { return logits_; }

  std::optional<std::size_t> id_of(const std::string& token) const;
  std::size_t bucket_of(const TokenSequence& source) const;

  friend bool operator==(const ToyModelParams&, const ToyModelParams&) = default;

 private:
  std::vector<std::string> vocabulary_;
  std::size_t num_buckets_ = 0;
  std::vector<double> logits_;
};

// Uniform logits in [-0.1, 0.1] from the seeded generator.
ToyModelParams init_model(std::vector<std::string> vocabulary,
                          std::size_t num_buckets, std::uint64_t seed);

// Per-token log-probabilities of `tokens` (content words and/or "</s>"),
// the first step conditioned on BOS.
std::vector<double> sequence_logprob(const ToyModelParams& params,
                                     const TokenSequence& source,
                                     std::span<const std::string> tokens);

// Adapter exposing the toy model to beam search. Output id k is vocabulary
// id k + 1; id 0 is end-of-sequence.
class ToyModel : public NextTokenModel {
 public:
  explicit ToyModel(const ToyModelParams& params) : params_(&params) {}

  std::size_t vocab_size() const override { return params_->output_size(); }
  TokenId eos() const override { return 0; }
  const std::string& token_text(TokenId id) const override {
    return params_->vocabulary()[id + 1];
  }
  std::vector<double> next_logprobs(
      const TokenSequence& source,
      std::span<const TokenId> prefix) const override;

 private:
  const ToyModelParams* params_;
};

struct TrainConfig {
  double learning_rate = 0.01;
  int epochs = 1;
  LossConfig loss;
  MarginSpec margin;
  ScoringConfig scoring;
  BeamConfig beam;
  std::uint64_t seed = 0;
};

void validate(const TrainConfig& cfg);

// A fixed set of generated candidates (vocabulary ids, no EOS) with their
// consensus scores; the loss is differentiated with these held constant.
struct ScoredCandidates {
  std::vector<std::vector<std::size_t>> sequences;
  std::vector<double> scores;
};

// L = xent + gamma * ctr where xent is the mean NLL of the reference
// followed by EOS and ctr uses f-values recomputed from `params`. When
// `grad` is non-null it receives dL/dlogits, shaped like params.logits().
LossBreakdown objective(const ToyModelParams& params, const TokenSequence& source,
                        const TokenSequence& reference,
                        const ScoredCandidates& candidates,
                        const TrainConfig& cfg, std::vector<double>* grad);

// Generates candidates with the current params and scores them by consensus.
ScoredCandidates generate_scored(const ToyModelParams& params,
                                 const TokenSequence& source,
                                 const TokenSequence& reference,
                                 const TrainConfig& cfg);

// One gradient-descent step on the multi-task objective. Returns the loss
// measured before the update.
LossBreakdown train_step(ToyModelParams& params, const TokenSequence& source,
                         const TokenSequence& reference, const TrainConfig& cfg);

struct EpochLoss {
  double xent = 0.0;
  double ctr = 0.0;
  double total = 0.0;
};

struct TrainResult {
  ToyModelParams params;
  std::vector<EpochLoss> trace;
};

using Corpus = std::vector<std::pair<TokenSequence, TokenSequence>>;

TrainResult train(ToyModelParams params, const Corpus& corpus,
                  const TrainConfig& cfg);

// Kendall tau-b; 0 when either side is constant.
double kendall_tau(std::span<const double> x, std::span<const double> y);

// Mean Kendall tau between the f-values `params` assigns to each pool's
// candidates and the pool's consensus scores.
double rank_agreement(const ToyModelParams& params,
                      std::span<const TokenSequence> sources,
                      std::span<const ScoredCandidates> pools, double beta);

}  // namespace candrank

#endif  // CANDRANK_TOY_LM_H_
