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

#include "candrank/text_metrics.h"

#include <algorithm>
#include <cstddef>
#include <unordered_map>

#include "candrank/error.h"

namespace candrank {
namespace {

bool is_token_char(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

char ascii_lower(unsigned char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a')
                                : static_cast<char>(c);
}

using NgramCounts = std::unordered_map<std::string, int>;

// N-grams are keyed by their tokens joined with NUL, which the tokenizer
// never emits.
NgramCounts count_ngrams(const std::vector<std::string>& tokens,
                         std::size_t n, std::size_t* total) {
  NgramCounts counts;
  *total = 0;
  if (tokens.size() < n) return counts;
  std::string key;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    key.clear();
    for (std::size_t k = 0; k < n; ++k) {
      if (k) key.push_back('\0');
      key += tokens[i + k];
    }
    ++counts[key];
    ++*total;
  }
  return counts;
}

// f1 is formed from counts directly: 2*hit/(na+nb) equals 2pr/(p+r) and is
// exactly symmetric under swapping the operands.
RougeScore from_counts(std::size_t hit, std::size_t na, std::size_t nb) {
  RougeScore s;
  if (na == 0 || nb == 0) return s;
  s.precision = static_cast<double>(hit) / static_cast<double>(na);
  s.recall = static_cast<double>(hit) / static_cast<double>(nb);
  s.f1 = 2.0 * static_cast<double>(hit) / static_cast<double>(na + nb);
  return s;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (is_token_char(c)) {
      current.push_back(ascii_lower(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

TokenSequence TokenSequence::from_text(std::string text) {
  auto tokens = tokenize(text);
  return TokenSequence(std::move(text), std::move(tokens));
}

TokenSequence TokenSequence::from_tokens(std::vector<std::string> tokens) {
  std::string text;
  for (const auto& t : tokens) {
    if (t.empty()) fail(ErrorCode::kInvalidArgument, "empty token");
    if (!text.empty()) text.push_back(' ');
    text += t;
  }
  return TokenSequence(std::move(text), std::move(tokens));
}

const char* variant_name(RougeVariant v) {
  switch (v) {
    case RougeVariant::kR1: return "r1";
    case RougeVariant::kR2: return "r2";
    case RougeVariant::kRL: return "rl";
    case RougeVariant::kHarmonicR1R2: return "harmonic_r1_r2";
    case RougeVariant::kMeanR1R2RL: return "mean_r1_r2_rl";
  }
  return "?";
}

std::optional<RougeVariant> parse_variant(std::string_view name) {
  for (auto v : {RougeVariant::kR1, RougeVariant::kR2, RougeVariant::kRL,
                 RougeVariant::kHarmonicR1R2, RougeVariant::kMeanR1R2RL}) {
    if (name == variant_name(v)) return v;
  }
  return std::nullopt;
}

RougeScore rouge_n(const TokenSequence& a, const TokenSequence& b, int n) {
  if (n < 1) fail(ErrorCode::kInvalidArgument, "rouge_n requires n >= 1");
  std::size_t na = 0, nb = 0;
  const auto ca = count_ngrams(a.tokens(), static_cast<std::size_t>(n), &na);
  const auto cb = count_ngrams(b.tokens(), static_cast<std::size_t>(n), &nb);
  if (na == 0 || nb == 0) return {};
  const auto& small = ca.size() <= cb.size() ? ca : cb;
  const auto& large = ca.size() <= cb.size() ? cb : ca;
  std::size_t hit = 0;
  for (const auto& [gram, count] : small) {
    auto it = large.find(gram);
    if (it != large.end()) hit += static_cast<std::size_t>(std::min(count, it->second));
  }
  return from_counts(hit, na, nb);
}

RougeScore rouge_l(const TokenSequence& a, const TokenSequence& b) {
  const auto& x = a.tokens();
  const auto& y = b.tokens();
  if (x.empty() || y.empty()) return {};
  std::vector<std::size_t> prev(y.size() + 1, 0), cur(y.size() + 1, 0);
  for (std::size_t i = 1; i <= x.size(); ++i) {
    for (std::size_t j = 1; j <= y.size(); ++j) {
      cur[j] = x[i - 1] == y[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return from_counts(prev[y.size()], x.size(), y.size());
}

double combine_rouge(double r1, double r2, double rl, RougeVariant v) {
  switch (v) {
    case RougeVariant::kR1: return r1;
    case RougeVariant::kR2: return r2;
    case RougeVariant::kRL: return rl;
    case RougeVariant::kHarmonicR1R2:
      return (r1 + r2) > 0.0 ? 2.0 * r1 * r2 / (r1 + r2) : 0.0;
    case RougeVariant::kMeanR1R2RL: return (r1 + r2 + rl) / 3.0;
  }
  return 0.0;
}

double composite_rouge(const TokenSequence& a, const TokenSequence& b,
                       RougeVariant v) {
  switch (v) {
    case RougeVariant::kR1: return rouge_n(a, b, 1).f1;
    case RougeVariant::kR2: return rouge_n(a, b, 2).f1;
    case RougeVariant::kRL: return rouge_l(a, b).f1;
    case RougeVariant::kHarmonicR1R2:
      return combine_rouge(rouge_n(a, b, 1).f1, rouge_n(a, b, 2).f1, 0.0, v);
    case RougeVariant::kMeanR1R2RL:
      return combine_rouge(rouge_n(a, b, 1).f1, rouge_n(a, b, 2).f1,
                           rouge_l(a, b).f1, v);
  }
  return 0.0;
}

}  // namespace candrank
