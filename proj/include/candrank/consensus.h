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

#ifndef CANDRANK_CONSENSUS_H_
#define CANDRANK_CONSENSUS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "candrank/text_metrics.h"

namespace candrank {

struct Candidate {
  TokenSequence seq;
  // One entry per token of `seq`, each <= 0.
  std::optional<std::vector<double>> token_logprobs;
};

struct CandidatePool {
  TokenSequence source;
  std::optional<TokenSequence> reference;
  std::vector<Candidate> candidates;

  std::size_t size() const { return candidates.size(); }
};

// Throws kInvalidArgument if a candidate's logprob count does not match its
// token count or any logprob is positive or NaN.
void validate_pool(const CandidatePool& pool);

// Weight of the reference in the consensus score. Infinity is a distinct
// state, not a large double: it selects reference-only scoring exactly.
class Alpha {
 public:
  constexpr Alpha() = default;
  // Throws kInvalidArgument for negative or non-finite values.
  explicit Alpha(double value);

  static constexpr Alpha infinity() {
    Alpha a;
    a.infinite_ = true;
    return a;
  }

  bool is_infinite() const { return infinite_; }
  // Only meaningful when finite.
  double value() const { return value_; }
  bool uses_reference() const { return infinite_ || value_ > 0.0; }

  std::string to_string() const;
  // Accepts a non-negative decimal or "inf"/"infinity".
  static Alpha parse(const std::string& text);

  friend bool operator==(const Alpha&, const Alpha&) = default;

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

struct ScoringConfig {
  Alpha alpha;
  RougeVariant variant = RougeVariant::kHarmonicR1R2;
};

// Dense row-major square matrix.
class SquareMatrix {
 public:
  explicit SquareMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * n_ + j];
  }

 private:
  std::size_t n_;
  std::vector<double> data_;
};

struct Ranking {
  // Candidate indices (0-based), best first.
  std::vector<std::size_t> order;
  // Scores aligned to the original candidate indices.
  std::vector<double> scores;
};

// Entry (i, j) is composite_rouge(candidate i, candidate j). Diagonal is 1.
SquareMatrix pairwise_rouge_matrix(const CandidatePool& pool, RougeVariant v);

// score_i = (sum_{j != i} M(i,j) + alpha * ref_i) / (N - 1 + alpha), or
// ref_i exactly when alpha is infinite. `reference_rouge` may be empty when
// alpha is zero.
std::vector<double> consensus_from_matrix(const SquareMatrix& pairwise,
                                          std::span<const double> reference_rouge,
                                          const Alpha& alpha);

std::vector<double> consensus_score(const CandidatePool& pool,
                                    const ScoringConfig& cfg);

// Reference-only score R(S, S*).
std::vector<double> brio_score(const CandidatePool& pool, RougeVariant v);

// Descending by score; equal scores keep ascending index order.
Ranking rank(std::span<const double> scores);

}  // namespace candrank

#endif  // CANDRANK_CONSENSUS_H_
