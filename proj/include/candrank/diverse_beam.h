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

#ifndef CANDRANK_DIVERSE_BEAM_H_
#define CANDRANK_DIVERSE_BEAM_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "candrank/consensus.h"

namespace candrank {

using TokenId = std::size_t;

// Conditional next-token distribution. Ids run over [0, vocab_size()), one
// of which is the end-of-sequence marker. next_logprobs must return
// vocab_size() log-probabilities whose exponentials sum to 1.
class NextTokenModel {
 public:
  virtual ~NextTokenModel() = default;

  virtual std::size_t vocab_size() const = 0;
  virtual TokenId eos() const = 0;
  virtual const std::string& token_text(TokenId id) const = 0;
  virtual std::vector<double> next_logprobs(
      const TokenSequence& source, std::span<const TokenId> prefix) const = 0;
};

struct BeamConfig {
  // Hamming diversity penalty between groups.
  double eta = 0.3;
  int num_groups = 4;
  int num_candidates = 32;
  // Decoding steps, end-of-sequence included.
  int max_length = 32;
  // End-of-sequence is not selectable before this many content tokens.
  int min_length = 1;
  // Length penalty for the final ordering.
  double beta = 1.0;

  int group_width() const { return num_candidates / num_groups; }
};

void validate(const BeamConfig& cfg);

struct GeneratedCandidate {
  Candidate candidate;
  // Content token ids; end-of-sequence is not included.
  std::vector<TokenId> ids;
  bool finished = false;
  std::size_t group = 0;
  std::size_t beam = 0;
  // Sum of true log-probabilities, end-of-sequence step included.
  double logprob = 0.0;
  // logprob minus accumulated diversity penalties.
  double search_score = 0.0;
  double f = 0.0;
};

// Groups are expanded in order at each step; within a group a beam of width
// N / N_g keeps the best hypotheses by penalised cumulative log-probability.
// Token w proposed by group g at step t is penalised by eta times the number
// of times groups 0..g-1 chose w at step t. Finished hypotheses stay in their
// group and compete on their frozen score. The result is ordered by
// descending f-value, ties by group then beam position.
std::vector<GeneratedCandidate> diverse_beam_search_detailed(
    const NextTokenModel& model, const TokenSequence& source,
    const BeamConfig& cfg);

std::vector<Candidate> diverse_beam_search(const NextTokenModel& model,
                                           const TokenSequence& source,
                                           const BeamConfig& cfg);

}  // namespace candrank

#endif  // CANDRANK_DIVERSE_BEAM_H_
