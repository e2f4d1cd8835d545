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

#include "candrank/toy_lm.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "candrank/error.h"
#include "candrank/rng.h"

namespace candrank {
namespace {

std::vector<double> log_softmax(std::span<const double> logits) {
  const double hi = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double v : logits) z += std::exp(v - hi);
  const double log_z = hi + std::log(z);
  std::vector<double> out(logits.size());
  for (std::size_t k = 0; k < logits.size(); ++k) out[k] = logits[k] - log_z;
  return out;
}

std::size_t require_id(const ToyModelParams& params, const std::string& token) {
  auto id = params.id_of(token);
  if (!id || *id == kBosId) {
    fail(ErrorCode::kOutOfVocabulary,
         "token '" + token + "' is not in the model vocabulary");
  }
  return *id;
}

std::vector<std::size_t> reference_ids(const ToyModelParams& params,
                                       const TokenSequence& reference) {
  std::vector<std::size_t> ids;
  ids.reserve(reference.size() + 1);
  for (const auto& t : reference.tokens()) ids.push_back(require_id(params, t));
  ids.push_back(kEosId);
  return ids;
}

// Adds coeff * d logprob(ids[t] | prefix) / d logits for every step of the
// sequence into `grad`, where d log p_next / d z = onehot(next) - softmax.
void accumulate_sequence_grad(const ToyModelParams& params, std::size_t bucket,
                              std::span<const std::size_t> ids, double coeff,
                              std::vector<double>& grad) {
  const std::size_t out = params.output_size();
  std::size_t prev = kBosId;
  for (std::size_t next : ids) {
    const auto row = params.row(bucket, prev);
    const auto lp = log_softmax(row);
    double* g = grad.data() + (bucket * params.vocab_size() + prev) * out;
    for (std::size_t k = 0; k < out; ++k) g[k] -= coeff * std::exp(lp[k]);
    g[next - 1] += coeff;
    prev = next;
  }
}

std::vector<double> ids_logprob(const ToyModelParams& params, std::size_t bucket,
                                std::span<const std::size_t> ids) {
  std::vector<double> out;
  out.reserve(ids.size());
  std::size_t prev = kBosId;
  for (std::size_t next : ids) {
    out.push_back(log_softmax(params.row(bucket, prev))[next - 1]);
    prev = next;
  }
  return out;
}

double f_of(std::span<const double> logprobs, double beta) {
  double sum = 0.0;
  for (double v : logprobs) sum += v;
  return sum / std::pow(static_cast<double>(logprobs.size()), beta);
}

}  // namespace

std::vector<std::string> make_vocabulary(std::vector<std::string> content) {
  content.insert(content.begin(), {kBos, kEos});
  return content;
}

ToyModelParams::ToyModelParams(std::vector<std::string> vocabulary,
                               std::size_t num_buckets)
    : vocabulary_(std::move(vocabulary)), num_buckets_(num_buckets) {
  if (vocabulary_.size() < 3) {
    fail(ErrorCode::kInvalidArgument,
         "vocabulary needs BOS, EOS and at least one content token");
  }
  if (vocabulary_[kBosId] != kBos || vocabulary_[kEosId] != kEos) {
    fail(ErrorCode::kInvalidArgument,
         "vocabulary must start with the BOS and EOS markers");
  }
  std::set<std::string> seen;
  for (std::size_t k = 2; k < vocabulary_.size(); ++k) {
    const auto& t = vocabulary_[k];
    const auto tok = tokenize(t);
    if (tok.size() != 1 || tok.front() != t) {
      fail(ErrorCode::kInvalidArgument,
           "vocabulary entry '" + t + "' is not a single normalized token");
    }
    if (!seen.insert(t).second) {
      fail(ErrorCode::kInvalidArgument, "duplicate vocabulary entry '" + t + "'");
    }
  }
  if (num_buckets_ < 1) {
    fail(ErrorCode::kInvalidArgument, "num_buckets must be positive");
  }
  logits_.assign(num_buckets_ * vocab_size() * output_size(), 0.0);
}

std::span<double> ToyModelParams::row(std::size_t bucket, std::size_t prev) {
  return {logits_.data() + (bucket * vocab_size() + prev) * output_size(),
          output_size()};
}

std::span<const double> ToyModelParams::row(std::size_t bucket,
                                            std::size_t prev) const {
  return {logits_.data() + (bucket * vocab_size() + prev) * output_size(),
          output_size()};
}

std::optional<std::size_t> ToyModelParams::id_of(const std::string& token) const {
  auto it = std::find(vocabulary_.begin(), vocabulary_.end(), token);
  if (it == vocabulary_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - vocabulary_.begin());
}

std::size_t ToyModelParams::bucket_of(const TokenSequence& source) const {
  // FNV-1a over the tokens with a 0xff separator byte.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& t : source.tokens()) {
    for (unsigned char c : t) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  }
  return static_cast<std::size_t>(h % num_buckets_);
}

ToyModelParams init_model(std::vector<std::string> vocabulary,
                          std::size_t num_buckets, std::uint64_t seed) {
  ToyModelParams params(std::move(vocabulary), num_buckets);
  Rng rng(seed);
  for (double& v : params.logits()) v = rng.uniform(-0.1, 0.1);
  return params;
}

std::vector<double> sequence_logprob(const ToyModelParams& params,
                                     const TokenSequence& source,
                                     std::span<const std::string> tokens) {
  std::vector<std::size_t> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(require_id(params, t));
  return ids_logprob(params, params.bucket_of(source), ids);
}

std::vector<double> ToyModel::next_logprobs(
    const TokenSequence& source, std::span<const TokenId> prefix) const {
  const std::size_t prev = prefix.empty() ? kBosId : prefix.back() + 1;
  return log_softmax(params_->row(params_->bucket_of(source), prev));
}

void validate(const TrainConfig& cfg) {
  if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate)) {
    fail(ErrorCode::kInvalidArgument, "learning_rate must be >= 0");
  }
  if (cfg.epochs < 0) fail(ErrorCode::kInvalidArgument, "epochs must be >= 0");
  validate(cfg.loss);
  validate(cfg.margin);
  validate(cfg.beam);
  if (cfg.beam.num_candidates < 2) {
    fail(ErrorCode::kInsufficientCandidates,
         "training needs at least 2 candidates per pool");
  }
}

LossBreakdown objective(const ToyModelParams& params, const TokenSequence& source,
                        const TokenSequence& reference,
                        const ScoredCandidates& candidates,
                        const TrainConfig& cfg, std::vector<double>* grad) {
  const std::size_t bucket = params.bucket_of(source);
  if (grad) grad->assign(params.logits().size(), 0.0);

  const auto ref = reference_ids(params, reference);
  const auto ref_lp = ids_logprob(params, bucket, ref);
  double nll = 0.0;
  for (double v : ref_lp) nll -= v;
  const double steps = static_cast<double>(ref.size());
  const double xent = nll / steps;
  if (grad) accumulate_sequence_grad(params, bucket, ref, -1.0 / steps, *grad);

  const std::size_t n = candidates.sequences.size();
  std::vector<double> f(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& seq = candidates.sequences[k];
    if (seq.empty()) {
      fail(ErrorCode::kMissingLogprobs, "generated candidate has no tokens");
    }
    f[k] = f_of(ids_logprob(params, bucket, seq), cfg.loss.beta);
  }
  const auto pl = pool_ctr_loss(f, candidates.scores, cfg.margin);
  if (grad && cfg.loss.gamma != 0.0) {
    for (std::size_t k = 0; k < n; ++k) {
      if (pl.grad_f[k] == 0.0) continue;
      const auto& seq = candidates.sequences[k];
      const double df_dlp =
          1.0 / std::pow(static_cast<double>(seq.size()), cfg.loss.beta);
      accumulate_sequence_grad(params, bucket, seq,
                               cfg.loss.gamma * pl.grad_f[k] * df_dlp, *grad);
    }
  }
  return combined_loss(xent, pl.ctr, cfg.loss);
}

ScoredCandidates generate_scored(const ToyModelParams& params,
                                 const TokenSequence& source,
                                 const TokenSequence& reference,
                                 const TrainConfig& cfg) {
  const ToyModel model(params);
  auto generated = diverse_beam_search_detailed(model, source, cfg.beam);
  CandidatePool pool;
  pool.source = source;
  pool.reference = reference;
  ScoredCandidates out;
  for (auto& gc : generated) {
    std::vector<std::size_t> ids;
    ids.reserve(gc.ids.size());
    for (TokenId id : gc.ids) ids.push_back(id + 1);
    out.sequences.push_back(std::move(ids));
    pool.candidates.push_back(std::move(gc.candidate));
  }
  out.scores = consensus_score(pool, cfg.scoring);
  return out;
}

LossBreakdown train_step(ToyModelParams& params, const TokenSequence& source,
                         const TokenSequence& reference, const TrainConfig& cfg) {
  validate(cfg);
  const auto scored = generate_scored(params, source, reference, cfg);
  std::vector<double> grad;
  const auto loss = objective(params, source, reference, scored, cfg, &grad);
  auto& logits = params.logits();
  for (std::size_t k = 0; k < logits.size(); ++k) {
    logits[k] -= cfg.learning_rate * grad[k];
  }
  return loss;
}

TrainResult train(ToyModelParams params, const Corpus& corpus,
                  const TrainConfig& cfg) {
  validate(cfg);
  if (corpus.empty()) fail(ErrorCode::kInvalidArgument, "training corpus is empty");
  TrainResult result;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    EpochLoss sum;
    for (const auto& [source, reference] : corpus) {
      const auto loss = train_step(params, source, reference, cfg);
      sum.xent += loss.xent;
      sum.ctr += loss.ctr;
      sum.total += loss.total;
    }
    const double n = static_cast<double>(corpus.size());
    result.trace.push_back({sum.xent / n, sum.ctr / n, sum.total / n});
  }
  result.params = std::move(params);
  return result;
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    fail(ErrorCode::kInvalidArgument, "kendall_tau inputs differ in length");
  }
  long long concordant = 0, discordant = 0, tie_x = 0, tie_y = 0, pairs = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      ++pairs;
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0) ++tie_x;
      if (dy == 0.0) ++tie_y;
      if (dx == 0.0 || dy == 0.0) continue;
      if ((dx > 0.0) == (dy > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double denom = std::sqrt(static_cast<double>(pairs - tie_x) *
                                 static_cast<double>(pairs - tie_y));
  if (denom == 0.0) return 0.0;
  return static_cast<double>(concordant - discordant) / denom;
}

double rank_agreement(const ToyModelParams& params,
                      std::span<const TokenSequence> sources,
                      std::span<const ScoredCandidates> pools, double beta) {
  if (sources.size() != pools.size() || pools.empty()) {
    fail(ErrorCode::kInvalidArgument,
         "rank_agreement needs one source per non-empty pool list");
  }
  double sum = 0.0;
  for (std::size_t p = 0; p < pools.size(); ++p) {
    const std::size_t bucket = params.bucket_of(sources[p]);
    std::vector<double> f;
    for (const auto& seq : pools[p].sequences) {
      f.push_back(f_of(ids_logprob(params, bucket, seq), beta));
    }
    sum += kendall_tau(f, pools[p].scores);
  }
  return sum / static_cast<double>(pools.size());
}

}  // namespace candrank
