/* Copyright 2026 The ctcg Authors. All Rights Reserved.

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

#ifndef CTCG_ERROR_H_
#define CTCG_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace ctcg {

enum class ErrorCode {
  kUnknownSymbol,
  kInvalidAlphabet,
  kInvalidConfig,
  kDimensionMismatch,
  kTraceMismatch,
  kShapeMismatch,
  kInfeasible,
  kInvalidGrid,
  kEmptyReferenceSet,
  kAlphabetMismatch,
  kBadWeights,
  kOutOfRange,
  kEmptyDataset,
  kNonFiniteGradient,
  kNonFiniteLoss,
  kMissingCache,
  kInvalidSpec,
  kParseError,
  kIoError,
  kEmptySpikeSet,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported as ctcg::Error; what() carries the
// code name followed by a one-line diagnostic.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ctcg

#endif  // CTCG_ERROR_H_
