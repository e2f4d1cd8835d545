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

#ifndef CANDRANK_ERROR_H_
#define CANDRANK_ERROR_H_

#include <stdexcept>
#include <string>

namespace candrank {

enum class ErrorCode {
  kInvalidArgument,
  kInsufficientCandidates,
  kMissingReference,
  kMissingLogprobs,
  kKinkProximity,
  kOutOfVocabulary,
  kDegenerateModel,
  kParse,
  kIo,
};

const char* error_code_name(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (the CLI in particular) can map them onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace candrank

#endif  // CANDRANK_ERROR_H_
