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

#include "candrank/minority_sim.h"

#include <cmath>

#include "candrank/error.h"
#include "candrank/rng.h"

namespace candrank {
namespace {

std::string filler_token(int slot) { return "w" + std::to_string(slot); }

TokenSequence render(const std::vector<int>& values) {
  std::vector<std::string> tokens;
  tokens.reserve(values.size() * 2);
  for (int s = 0; s < static_cast<int>(values.size()); ++s) {
    tokens.push_back(filler_token(s));
    tokens.push_back(slot_token(s, values[static_cast<std::size_t>(s)]));
  }
  return TokenSequence::from_tokens(std::move(tokens));
}

}  // namespace

void validate(const SimConfig& cfg) {
  if (cfg.num_slots < 1) fail(ErrorCode::kInvalidArgument, "num_slots must be >= 1");
  if (cfg.vocab_per_slot < 2) {
    fail(ErrorCode::kInvalidArgument, "vocab_per_slot must be >= 2");
  }
  if (!(cfg.halluc_prob >= 0.0 && cfg.halluc_prob < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "halluc_prob must lie in [0, 1)");
  }
  if (cfg.pool_size < 2) {
    fail(ErrorCode::kInsufficientCandidates, "pool_size must be >= 2");
  }
  if (cfg.trials < 1) fail(ErrorCode::kInvalidArgument, "trials must be >= 1");
}

std::string slot_token(int slot, int value) {
  return "s" + std::to_string(slot) + "v" + std::to_string(value);
}

SimPool generate_pool(const SimConfig& cfg, std::uint64_t trial_index) {
  validate(cfg);
  Rng rng(cfg.seed, trial_index);
  const auto slots = static_cast<std::size_t>(cfg.num_slots);

  SimPool out;
  out.pool.reference =
      render(std::vector<int>(slots, cfg.corrupt_reference ? 1 : 0));
  out.pool.source = *out.pool.reference;
  for (int c = 0; c < cfg.pool_size; ++c) {
    std::vector<int> values(slots, 0);
    std::vector<bool> corrupted(slots, false);
    bool faithful = true;
    for (std::size_t s = 0; s < slots; ++s) {
      if (rng.uniform() < cfg.halluc_prob) {
        values[s] = 1 + static_cast<int>(rng.below(
                            static_cast<std::uint64_t>(cfg.vocab_per_slot - 1)));
        corrupted[s] = true;
        faithful = false;
      }
    }
    out.pool.candidates.push_back({render(values), std::nullopt});
    out.faithful.push_back(faithful);
    out.corrupted.push_back(std::move(corrupted));
  }
  return out;
}

SimReport evaluate_conjecture(const SimConfig& cfg) {
  validate(cfg);
  const ScoringConfig scoring{cfg.alpha, cfg.variant};

  SimReport report;
  report.trials = cfg.trials;
  std::vector<double> labels, scores;
  double sum_faithful = 0.0, sum_halluc = 0.0;
  int rated_trials = 0, top1_faithful = 0;

  for (int t = 0; t < cfg.trials; ++t) {
    const auto sp = generate_pool(cfg, static_cast<std::uint64_t>(t));
    const auto s = consensus_score(sp.pool, scoring);
    bool any_faithful = false;
    for (std::size_t k = 0; k < s.size(); ++k) {
      labels.push_back(sp.faithful[k] ? 1.0 : 0.0);
      scores.push_back(s[k]);
      if (sp.faithful[k]) {
        any_faithful = true;
        sum_faithful += s[k];
        ++report.faithful_count;
      } else {
        sum_halluc += s[k];
        ++report.hallucinated_count;
      }
    }
    if (!any_faithful) {
      ++report.trials_without_faithful;
      continue;
    }
    ++rated_trials;
    if (sp.faithful[rank(s).order.front()]) ++top1_faithful;
  }

  if (rated_trials > 0) {
    report.top1_faithful_rate =
        static_cast<double>(top1_faithful) / static_cast<double>(rated_trials);
  }
  if (report.faithful_count > 0) {
    report.mean_score_faithful =
        sum_faithful / static_cast<double>(report.faithful_count);
  }
  if (report.hallucinated_count > 0) {
    report.mean_score_hallucinated =
        sum_halluc / static_cast<double>(report.hallucinated_count);
  }
  report.gap_defined = report.faithful_count > 0 && report.hallucinated_count > 0;
  if (report.gap_defined) {
    report.score_gap = report.mean_score_faithful - report.mean_score_hallucinated;
  }

  // Pearson correlation of a binary label with the score.
  const double n = static_cast<double>(labels.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    mean_x += labels[k];
    mean_y += scores[k];
  }
  mean_x /= n;
  mean_y /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const double dx = labels[k] - mean_x;
    const double dy = scores[k] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx > 0.0 && syy > 0.0) report.rank_correlation = sxy / std::sqrt(sxx * syy);
  return report;
}

}  // namespace candrank
