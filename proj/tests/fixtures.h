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

#ifndef CANDRANK_TESTS_FIXTURES_H_
#define CANDRANK_TESTS_FIXTURES_H_

#include <string>

#include "candrank/consensus.h"

namespace candrank::fixtures {

// Three 10-token candidates whose pairwise ROUGE-1 F1 values are
// R(1,2) = 5/10, R(1,3) = 3/10, R(2,3) = 7/10 and whose ROUGE-1 F1 against
// the reference is 2/10, 4/10, 6/10. Overlaps counted by hand:
//   shared by all three: x1 x2 x3; only 1&2: p1 p2; only 2&3: q1..q4
//   reference: x1 q1 q2 q3 u1 u2 a1 r1 r2 r3
inline const char* kCandidate1 = "x1 x2 x3 p1 p2 a1 a2 a3 a4 a5";
inline const char* kCandidate2 = "x1 x2 x3 p1 p2 q1 q2 q3 q4 b1";
inline const char* kCandidate3 = "x1 x2 x3 q1 q2 q3 q4 u1 u2 u3";
inline const char* kReference = "x1 q1 q2 q3 u1 u2 a1 r1 r2 r3";

inline CandidatePool hand_pool(bool with_reference = true) {
  CandidatePool pool;
  pool.source = TokenSequence::from_text("source text");
  if (with_reference) pool.reference = TokenSequence::from_text(kReference);
  for (const char* text : {kCandidate1, kCandidate2, kCandidate3}) {
    pool.candidates.push_back({TokenSequence::from_text(text), std::nullopt});
  }
  return pool;
}

inline std::string hand_pool_jsonl_line(bool with_logprobs) {
  std::string lp = with_logprobs ? R"(, "token_logprobs": [-1,-1,-1,-1,-1,-1,-1,-1,-1,-1])" : "";
  return std::string(R"({"source": "source text", "reference": ")") + kReference +
         R"(", "candidates": [{"text": ")" + kCandidate1 + "\"" + lp +
         R"(}, {"text": ")" + kCandidate2 + "\"" + lp + R"(}, {"text": ")" +
         kCandidate3 + "\"" + lp + "}]}";
}

}  // namespace candrank::fixtures

#endif  // CANDRANK_TESTS_FIXTURES_H_
