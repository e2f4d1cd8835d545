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

#include "candrank/contrastive_loss.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "candrank/error.h"

namespace candrank {
namespace {

void check_ranked_inputs(std::span<const double> f,
                         std::span<const double> scores_ranked) {
  if (f.size() < 2) {
    fail(ErrorCode::kInsufficientCandidates,
         "contrastive loss needs at least 2 candidates");
  }
  if (f.size() != scores_ranked.size()) {
    fail(ErrorCode::kInvalidArgument, "f-values and scores differ in length");
  }
  for (std::size_t k = 0; k + 1 < scores_ranked.size(); ++k) {
    if (!(scores_ranked[k] >= scores_ranked[k + 1])) {
      fail(ErrorCode::kInvalidArgument,
           "scores must be in descending rank order");
    }
  }
}

bool skip_pair(std::size_t i, std::size_t j,
               std::span<const double> scores_ranked, const MarginSpec& m) {
  return m.scheme == MarginScheme::kFixed &&
         scores_ranked[i] == scores_ranked[j];
}

// Calls fn(i, j, hinge_argument) for every pair that takes part in the loss.
template <typename Fn>
void for_each_pair(std::span<const double> f,
                   std::span<const double> scores_ranked, const MarginSpec& m,
                   Fn&& fn) {
  const std::size_t n = f.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (skip_pair(i, j, scores_ranked, m)) continue;
      fn(i, j, f[j] - f[i] + margin(i, j, scores_ranked, m));
    }
  }
}

}  // namespace

const char* margin_scheme_name(MarginScheme s) {
  return s == MarginScheme::kFixed ? "fixed" : "difference";
}

std::optional<MarginScheme> parse_margin_scheme(std::string_view name) {
  if (name == "fixed") return MarginScheme::kFixed;
  if (name == "difference") return MarginScheme::kDifference;
  return std::nullopt;
}

void validate(const MarginSpec& m) {
  if (!(m.lambda > 0.0) || !std::isfinite(m.lambda)) {
    fail(ErrorCode::kInvalidArgument, "margin lambda must be > 0");
  }
}

void validate(const LossConfig& cfg) {
  if (!(cfg.gamma >= 0.0) || !std::isfinite(cfg.gamma)) {
    fail(ErrorCode::kInvalidArgument, "gamma must be >= 0");
  }
  if (!(cfg.beta >= 0.0) || !std::isfinite(cfg.beta)) {
    fail(ErrorCode::kInvalidArgument, "beta must be >= 0");
  }
}

double f_value(const Candidate& c, double beta) {
  if (!c.token_logprobs || c.token_logprobs->empty()) {
    fail(ErrorCode::kMissingLogprobs,
         "f-value requires non-empty token logprobs");
  }
  double sum = 0.0;
  for (double lp : *c.token_logprobs) sum += lp;
  return sum * f_value_token_grad(c, beta);
}

double f_value_token_grad(const Candidate& c, double beta) {
  if (!c.token_logprobs || c.token_logprobs->empty()) {
    fail(ErrorCode::kMissingLogprobs,
         "f-value requires non-empty token logprobs");
  }
  return 1.0 / std::pow(static_cast<double>(c.token_logprobs->size()), beta);
}

double margin(std::size_t i, std::size_t j, std::span<const double> scores_ranked,
              const MarginSpec& m) {
  if (i >= j) {
    fail(ErrorCode::kInvalidArgument, "margin requires rank i < rank j");
  }
  if (j >= scores_ranked.size()) {
    fail(ErrorCode::kInvalidArgument, "rank out of range");
  }
  if (m.scheme == MarginScheme::kFixed) {
    return static_cast<double>(j - i) * m.lambda;
  }
  return (scores_ranked[i] - scores_ranked[j]) * m.lambda;
}

double ctr_loss(std::span<const double> f, std::span<const double> scores_ranked,
                const MarginSpec& m) {
  check_ranked_inputs(f, scores_ranked);
  double loss = 0.0;
  for_each_pair(f, scores_ranked, m, [&](std::size_t, std::size_t, double arg) {
    if (arg > 0.0) loss += arg;
  });
  return loss;
}

std::vector<double> ctr_loss_grad(std::span<const double> f,
                                  std::span<const double> scores_ranked,
                                  const MarginSpec& m) {
  check_ranked_inputs(f, scores_ranked);
  std::vector<double> grad(f.size(), 0.0);
  for_each_pair(f, scores_ranked, m, [&](std::size_t i, std::size_t j, double arg) {
    if (arg > 0.0) {
      grad[i] -= 1.0;
      grad[j] += 1.0;
    }
  });
  return grad;
}

LossBreakdown combined_loss(double xent, double ctr, const LossConfig& cfg) {
  if (!(ctr >= 0.0)) {
    fail(ErrorCode::kInvalidArgument, "contrastive loss must be >= 0");
  }
  return {xent, ctr, xent + cfg.gamma * ctr};
}

bool clear_of_kinks(std::span<const double> f,
                    std::span<const double> scores_ranked, const MarginSpec& m,
                    double distance) {
  check_ranked_inputs(f, scores_ranked);
  bool clear = true;
  for_each_pair(f, scores_ranked, m, [&](std::size_t, std::size_t, double arg) {
    if (std::abs(arg) < distance) clear = false;
  });
  return clear;
}

double grad_check(std::span<const double> point,
                  std::span<const double> scores_ranked, const MarginSpec& m,
                  double epsilon) {
  if (!(epsilon > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "epsilon must be > 0");
  }
  if (!clear_of_kinks(point, scores_ranked, m, 10.0 * epsilon)) {
    fail(ErrorCode::kKinkProximity,
         "point lies within 10*epsilon of a hinge kink; resample the point");
  }
  const auto analytic = ctr_loss_grad(point, scores_ranked, m);
  std::vector<double> probe(point.begin(), point.end());
  double worst = 0.0;
  for (std::size_t k = 0; k < probe.size(); ++k) {
    const double saved = probe[k];
    probe[k] = saved + epsilon;
    const double up = ctr_loss(probe, scores_ranked, m);
    probe[k] = saved - epsilon;
    const double down = ctr_loss(probe, scores_ranked, m);
    probe[k] = saved;
    const double numeric = (up - down) / (2.0 * epsilon);
    const double err =
        std::abs(numeric - analytic[k]) / std::max(1.0, std::abs(analytic[k]));
    worst = std::max(worst, err);
  }
  return worst;
}

PoolLoss pool_ctr_loss(std::span<const double> f, std::span<const double> scores,
                       const MarginSpec& m) {
  if (f.size() != scores.size()) {
    fail(ErrorCode::kInvalidArgument, "f-values and scores differ in length");
  }
  PoolLoss out;
  out.ranking = rank(scores);
  const auto& order = out.ranking.order;
  std::vector<double> f_ranked, s_ranked;
  f_ranked.reserve(order.size());
  s_ranked.reserve(order.size());
  for (std::size_t k : order) {
    f_ranked.push_back(f[k]);
    s_ranked.push_back(scores[k]);
  }
  out.ctr = ctr_loss(f_ranked, s_ranked, m);
  const auto g = ctr_loss_grad(f_ranked, s_ranked, m);
  out.grad_f.assign(f.size(), 0.0);
  for (std::size_t r = 0; r < order.size(); ++r) out.grad_f[order[r]] = g[r];
  return out;
}

}  // namespace candrank
