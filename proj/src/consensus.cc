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

#include "candrank/consensus.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "candrank/error.h"

namespace candrank {
namespace {

void require_peers(const CandidatePool& pool) {
  if (pool.size() < 2) {
    fail(ErrorCode::kInsufficientCandidates,
         "consensus scoring needs at least 2 candidates, got " +
             std::to_string(pool.size()));
  }
}

const TokenSequence& require_reference(const CandidatePool& pool) {
  if (!pool.reference) {
    fail(ErrorCode::kMissingReference,
         "scoring with alpha > 0 requires a reference");
  }
  return *pool.reference;
}

std::vector<double> reference_rouge(const CandidatePool& pool, RougeVariant v) {
  const auto& ref = require_reference(pool);
  std::vector<double> out;
  out.reserve(pool.size());
  for (const auto& c : pool.candidates) {
    out.push_back(composite_rouge(c.seq, ref, v));
  }
  return out;
}

}  // namespace

void validate_pool(const CandidatePool& pool) {
  for (std::size_t k = 0; k < pool.size(); ++k) {
    const auto& c = pool.candidates[k];
    if (!c.token_logprobs) continue;
    if (c.token_logprobs->size() != c.seq.size()) {
      fail(ErrorCode::kInvalidArgument,
           "candidate " + std::to_string(k) + ": " +
               std::to_string(c.token_logprobs->size()) +
               " logprobs for " + std::to_string(c.seq.size()) + " tokens");
    }
    for (double lp : *c.token_logprobs) {
      if (!(lp <= 0.0)) {
        fail(ErrorCode::kInvalidArgument,
             "candidate " + std::to_string(k) + ": logprob must be <= 0");
      }
    }
  }
}

Alpha::Alpha(double value) : value_(value) {
  if (!std::isfinite(value) || value < 0.0) {
    fail(ErrorCode::kInvalidArgument,
         "alpha must be a finite non-negative number (or infinity)");
  }
}

std::string Alpha::to_string() const {
  if (infinite_) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << value_;
  return os.str();
}

Alpha Alpha::parse(const std::string& text) {
  std::string lower;
  for (char c : text) lower.push_back(static_cast<char>(std::tolower(c)));
  if (lower == "inf" || lower == "infinity") return infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    fail(ErrorCode::kInvalidArgument, "cannot parse alpha '" + text + "'");
  }
  if (used != text.size()) {
    fail(ErrorCode::kInvalidArgument, "cannot parse alpha '" + text + "'");
  }
  if (std::isinf(v) && v > 0) return infinity();
  return Alpha(v);
}

SquareMatrix pairwise_rouge_matrix(const CandidatePool& pool, RougeVariant v) {
  require_peers(pool);
  const std::size_t n = pool.size();
  SquareMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r =
          composite_rouge(pool.candidates[i].seq, pool.candidates[j].seq, v);
      m(i, j) = r;
      m(j, i) = r;
    }
  }
  return m;
}

std::vector<double> consensus_from_matrix(const SquareMatrix& pairwise,
                                          std::span<const double> reference_rouge,
                                          const Alpha& alpha) {
  const std::size_t n = pairwise.size();
  if (n < 2) {
    fail(ErrorCode::kInsufficientCandidates,
         "consensus scoring needs at least 2 candidates");
  }
  if (alpha.uses_reference() && reference_rouge.size() != n) {
    fail(ErrorCode::kMissingReference,
         "reference ROUGE values required for alpha > 0");
  }
  if (alpha.is_infinite()) {
    return {reference_rouge.begin(), reference_rouge.end()};
  }
  const double a = alpha.value();
  const double denom = static_cast<double>(n - 1) + a;
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) sum += pairwise(i, j);
    }
    if (a > 0.0) sum += a * reference_rouge[i];
    scores[i] = sum / denom;
  }
  return scores;
}

std::vector<double> consensus_score(const CandidatePool& pool,
                                    const ScoringConfig& cfg) {
  require_peers(pool);
  if (cfg.alpha.is_infinite()) return reference_rouge(pool, cfg.variant);
  std::vector<double> ref;
  if (cfg.alpha.uses_reference()) ref = reference_rouge(pool, cfg.variant);
  return consensus_from_matrix(pairwise_rouge_matrix(pool, cfg.variant), ref,
                               cfg.alpha);
}

std::vector<double> brio_score(const CandidatePool& pool, RougeVariant v) {
  return reference_rouge(pool, v);
}

Ranking rank(std::span<const double> scores) {
  if (scores.empty()) fail(ErrorCode::kInvalidArgument, "rank of empty scores");
  Ranking r;
  r.scores.assign(scores.begin(), scores.end());
  r.order.resize(scores.size());
  std::iota(r.order.begin(), r.order.end(), std::size_t{0});
  std::stable_sort(r.order.begin(), r.order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return scores[a] > scores[b];
                   });
  return r;
}

}  // namespace candrank
