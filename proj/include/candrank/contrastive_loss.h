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

#ifndef CANDRANK_CONTRASTIVE_LOSS_H_
#define CANDRANK_CONTRASTIVE_LOSS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "candrank/consensus.h"

namespace candrank {

enum class MarginScheme {
  // lambda_ij = (j - i) * lambda, i and j being ranks.
  kFixed,
  // lambda_ij = (score_i - score_j) * lambda.
  kDifference,
};

const char* margin_scheme_name(MarginScheme s);
std::optional<MarginScheme> parse_margin_scheme(std::string_view name);

struct MarginSpec {
  MarginScheme scheme = MarginScheme::kDifference;
  double lambda = 0.01;
};

struct LossConfig {
  double gamma = 50.0;
  // Length penalty exponent in f = sum(logprob) / |S|^beta.
  double beta = 1.0;
};

struct LossBreakdown {
  double xent = 0.0;
  double ctr = 0.0;
  double total = 0.0;
};

void validate(const MarginSpec& m);
void validate(const LossConfig& cfg);

// Length-normalised log probability of a candidate.
double f_value(const Candidate& c, double beta);
// d f / d logprob_t, identical for every token: 1 / |S|^beta.
double f_value_token_grad(const Candidate& c, double beta);

// Target margin between ranks i < j (0-based). `scores_ranked` is descending.
double margin(std::size_t i, std::size_t j, std::span<const double> scores_ranked,
              const MarginSpec& m);

// sum_{i<j} max(0, f_j - f_i + lambda_ij) over rank-ordered inputs. Under the
// fixed scheme, pairs with exactly equal scores are skipped.
double ctr_loss(std::span<const double> f, std::span<const double> scores_ranked,
                const MarginSpec& m);

// Subgradient of ctr_loss with respect to each f (rank order). A hinge whose
// argument is exactly zero contributes nothing.
std::vector<double> ctr_loss_grad(std::span<const double> f,
                                  std::span<const double> scores_ranked,
                                  const MarginSpec& m);

LossBreakdown combined_loss(double xent, double ctr, const LossConfig& cfg);

// Central finite differences of ctr_loss against ctr_loss_grad. Returns the
// largest |numeric - analytic| / max(1, |analytic|). Throws kKinkProximity
// when some active pair's hinge argument lies within 10 * epsilon of zero.
double grad_check(std::span<const double> point,
                  std::span<const double> scores_ranked, const MarginSpec& m,
                  double epsilon);

// True when every contributing pair's hinge argument is at least `distance`
// away from zero.
bool clear_of_kinks(std::span<const double> f,
                    std::span<const double> scores_ranked, const MarginSpec& m,
                    double distance);

// Contrastive loss for candidates in their original order: ranks by `scores`,
// evaluates the loss on the ranked f-values and maps the gradient back to
// the original indices.
struct PoolLoss {
  double ctr = 0.0;
  std::vector<double> grad_f;  // original candidate order
  Ranking ranking;
};
PoolLoss pool_ctr_loss(std::span<const double> f, std::span<const double> scores,
                       const MarginSpec& m);

}  // namespace candrank

#endif  // CANDRANK_CONTRASTIVE_LOSS_H_
