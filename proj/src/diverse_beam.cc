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

#include "candrank/diverse_beam.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "candrank/contrastive_loss.h"
#include "candrank/error.h"

namespace candrank {
namespace {

struct Hypothesis {
  std::vector<TokenId> ids;
  std::vector<double> logprobs;
  double logprob = 0.0;
  double search_score = 0.0;
  bool finished = false;
};

struct Expansion {
  std::size_t parent;
  // kCarry for a carried-over finished hypothesis.
  TokenId token;
  double token_logprob;
  double score;
};

constexpr TokenId kCarry = static_cast<TokenId>(-1);

std::vector<double> checked_logprobs(const NextTokenModel& model,
                                     const TokenSequence& source,
                                     std::span<const TokenId> prefix) {
  auto lp = model.next_logprobs(source, prefix);
  if (lp.size() != model.vocab_size()) {
    fail(ErrorCode::kDegenerateModel,
         "model returned " + std::to_string(lp.size()) +
             " log-probabilities for a vocabulary of " +
             std::to_string(model.vocab_size()));
  }
  for (double v : lp) {
    if (std::isnan(v) || v > 0.0) {
      fail(ErrorCode::kDegenerateModel, "model returned an invalid log-probability");
    }
  }
  return lp;
}

// One group's update at step t. `usage` counts tokens already chosen at this
// step by earlier groups and is advanced with this group's choices.
void expand_group(const NextTokenModel& model, const TokenSequence& source,
                  const BeamConfig& cfg, std::size_t step,
                  std::vector<Hypothesis>& beams, std::vector<int>& usage) {
  const std::size_t width = static_cast<std::size_t>(cfg.group_width());
  const TokenId eos = model.eos();
  const bool eos_allowed = step >= static_cast<std::size_t>(cfg.min_length);

  std::vector<Expansion> pool;
  bool any_alive = false;
  for (std::size_t b = 0; b < beams.size(); ++b) {
    const auto& h = beams[b];
    if (h.finished) {
      pool.push_back({b, kCarry, 0.0, h.search_score});
      continue;
    }
    any_alive = true;
    const auto lp = checked_logprobs(model, source, h.ids);
    bool any_token = false;
    for (TokenId w = 0; w < lp.size(); ++w) {
      if (w == eos && !eos_allowed) continue;
      if (std::isinf(lp[w])) continue;
      any_token = true;
      pool.push_back({b, w, lp[w],
                      h.search_score + lp[w] - cfg.eta * usage[w]});
    }
    if (!any_token) {
      fail(ErrorCode::kDegenerateModel,
           "model assigns zero probability to every selectable token");
    }
  }
  if (!any_alive) return;

  std::vector<std::size_t> idx(pool.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const std::size_t keep = std::min(width, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + keep, idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (pool[a].score != pool[b].score) {
                        return pool[a].score > pool[b].score;
                      }
                      return a < b;
                    });

  std::vector<Hypothesis> next;
  next.reserve(keep);
  for (std::size_t k = 0; k < keep; ++k) {
    const auto& e = pool[idx[k]];
    Hypothesis h = beams[e.parent];
    if (e.token != kCarry) {
      h.logprob += e.token_logprob;
      h.search_score = e.score;
      if (e.token == eos) {
        h.finished = true;
      } else {
        h.ids.push_back(e.token);
        h.logprobs.push_back(e.token_logprob);
      }
      ++usage[e.token];
    }
    next.push_back(std::move(h));
  }
  beams = std::move(next);
}

}  // namespace

void validate(const BeamConfig& cfg) {
  if (!(cfg.eta >= 0.0) || !std::isfinite(cfg.eta)) {
    fail(ErrorCode::kInvalidArgument, "eta must be >= 0");
  }
  if (cfg.num_groups < 1 || cfg.num_candidates < 1) {
    fail(ErrorCode::kInvalidArgument,
         "num_groups and num_candidates must be positive");
  }
  if (cfg.num_candidates % cfg.num_groups != 0) {
    fail(ErrorCode::kInvalidArgument,
         "num_candidates must be a multiple of num_groups");
  }
  if (cfg.max_length < 1) {
    fail(ErrorCode::kInvalidArgument, "max_length must be positive");
  }
  if (cfg.min_length < 1) {
    fail(ErrorCode::kInvalidArgument, "min_length must be at least 1");
  }
  if (!(cfg.beta >= 0.0) || !std::isfinite(cfg.beta)) {
    fail(ErrorCode::kInvalidArgument, "beta must be >= 0");
  }
}

std::vector<GeneratedCandidate> diverse_beam_search_detailed(
    const NextTokenModel& model, const TokenSequence& source,
    const BeamConfig& cfg) {
  validate(cfg);
  if (model.vocab_size() == 0) {
    fail(ErrorCode::kInvalidArgument, "model vocabulary is empty");
  }
  const std::size_t groups = static_cast<std::size_t>(cfg.num_groups);
  const std::size_t width = static_cast<std::size_t>(cfg.group_width());

  std::vector<std::vector<Hypothesis>> beams(groups,
                                             std::vector<Hypothesis>(1));
  std::vector<int> usage(model.vocab_size());
  for (std::size_t step = 0; step < static_cast<std::size_t>(cfg.max_length);
       ++step) {
    std::fill(usage.begin(), usage.end(), 0);
    for (auto& group : beams) {
      expand_group(model, source, cfg, step, group, usage);
    }
    const bool done = std::all_of(beams.begin(), beams.end(), [](const auto& g) {
      return std::all_of(g.begin(), g.end(),
                         [](const Hypothesis& h) { return h.finished; });
    });
    if (done) break;
  }

  std::vector<GeneratedCandidate> out;
  out.reserve(groups * width);
  for (std::size_t g = 0; g < groups; ++g) {
    if (beams[g].size() != width) {
      fail(ErrorCode::kDegenerateModel,
           "group " + std::to_string(g) + " holds only " +
               std::to_string(beams[g].size()) + " of " +
               std::to_string(width) + " hypotheses");
    }
    for (std::size_t b = 0; b < width; ++b) {
      auto& h = beams[g][b];
      std::vector<std::string> words;
      words.reserve(h.ids.size());
      for (TokenId id : h.ids) words.push_back(model.token_text(id));
      GeneratedCandidate gc;
      gc.candidate.seq = TokenSequence::from_tokens(std::move(words));
      gc.candidate.token_logprobs = std::move(h.logprobs);
      gc.ids = std::move(h.ids);
      gc.finished = h.finished;
      gc.group = g;
      gc.beam = b;
      gc.logprob = h.logprob;
      gc.search_score = h.search_score;
      gc.f = f_value(gc.candidate, cfg.beta);
      out.push_back(std::move(gc));
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const GeneratedCandidate& a, const GeneratedCandidate& b) {
                     return a.f > b.f;
                   });
  return out;
}

std::vector<Candidate> diverse_beam_search(const NextTokenModel& model,
                                           const TokenSequence& source,
                                           const BeamConfig& cfg) {
  auto detailed = diverse_beam_search_detailed(model, source, cfg);
  std::vector<Candidate> out;
  out.reserve(detailed.size());
  for (auto& gc : detailed) out.push_back(std::move(gc.candidate));
  return out;
}

}  // namespace candrank
