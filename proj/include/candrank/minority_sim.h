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

#ifndef CANDRANK_MINORITY_SIM_H_
#define CANDRANK_MINORITY_SIM_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "candrank/consensus.h"

namespace candrank {

// Monte-Carlo model of fact hallucination in a candidate pool. Every
// candidate is a shared template with `num_slots` fact positions; each slot
// is independently replaced by one of `vocab_per_slot - 1` distractors with
// probability `halluc_prob`.
struct SimConfig {
  int num_slots = 4;
  int vocab_per_slot = 10;
  double halluc_prob = 0.2;
  int pool_size = 16;
  int trials = 1000;
  Alpha alpha;
  RougeVariant variant = RougeVariant::kHarmonicR1R2;
  std::uint64_t seed = 0;
  // Puts distractor 1 in every reference slot. Used to probe that
  // reference-free scoring (alpha = 0) ignores the reference.
  bool corrupt_reference = false;
};

void validate(const SimConfig& cfg);

struct SimPool {
  CandidatePool pool;
  std::vector<bool> faithful;
  // Per candidate, which slots were corrupted.
  std::vector<std::vector<bool>> corrupted;
};

struct SimReport {
  // Over trials with at least one faithful candidate.
  double top1_faithful_rate = 0.0;
  double mean_score_faithful = 0.0;
  double mean_score_hallucinated = 0.0;
  // mean_score_faithful - mean_score_hallucinated, 0 when undefined.
  double score_gap = 0.0;
  // Point-biserial correlation between the faithful label and the score,
  // pooled over every candidate of every trial. 0 when undefined.
  double rank_correlation = 0.0;
  bool gap_defined = false;
  int trials = 0;
  int trials_without_faithful = 0;
  long long faithful_count = 0;
  long long hallucinated_count = 0;
};

// Template token for a slot value; value 0 is the correct fact.
std::string slot_token(int slot, int value);

// Pool for one trial, drawn from its own (seed, trial_index) stream. The
// reference holds the correct value in every slot.
SimPool generate_pool(const SimConfig& cfg, std::uint64_t trial_index);

SimReport evaluate_conjecture(const SimConfig& cfg);

}  // namespace candrank

#endif  // CANDRANK_MINORITY_SIM_H_
