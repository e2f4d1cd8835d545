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

#ifndef CANDRANK_TEXT_METRICS_H_
#define CANDRANK_TEXT_METRICS_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace candrank {

// Lowercases ASCII letters and splits on runs of characters that are not
// ASCII alphanumerics. Bytes >= 0x80 are kept inside tokens, so UTF-8
// words survive intact without any locale lookup.
std::vector<std::string> tokenize(std::string_view text);

class TokenSequence {
 public:
  TokenSequence() = default;

  static TokenSequence from_text(std::string text);
  // Text becomes the tokens joined by single spaces.
  static TokenSequence from_tokens(std::vector<std::string> tokens);

  const std::string& text() const { return text_; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;

 private:
  TokenSequence(std::string text, std::vector<std::string> tokens)
      : text_(std::move(text)), tokens_(std::move(tokens)) {}

  std::string text_;
  std::vector<std::string> tokens_;
};

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

enum class RougeVariant { kR1, kR2, kRL, kHarmonicR1R2, kMeanR1R2RL };

const char* variant_name(RougeVariant v);
std::optional<RougeVariant> parse_variant(std::string_view name);

// Clipped n-gram overlap. Precision is relative to `a`, recall to `b`.
// Returns all zeros when either side has no n-grams.
RougeScore rouge_n(const TokenSequence& a, const TokenSequence& b, int n);

// LCS based. Zero when either side is empty.
RougeScore rouge_l(const TokenSequence& a, const TokenSequence& b);

// F1 of the requested variant. The composites combine the F1 fields:
//   kHarmonicR1R2: 2 * R1 * R2 / (R1 + R2), 0 when both are 0
//   kMeanR1R2RL:   (R1 + R2 + RL) / 3
double composite_rouge(const TokenSequence& a, const TokenSequence& b,
                       RougeVariant v);

// Composite from precomputed F1 values; exposed so callers can combine
// scores obtained elsewhere.
double combine_rouge(double r1, double r2, double rl, RougeVariant v);

}  // namespace candrank

#endif  // CANDRANK_TEXT_METRICS_H_
