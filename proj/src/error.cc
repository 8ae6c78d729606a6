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

#include "ctcg/error.h"

#include <cmath>
#include <string>

#include "ctcg/types.h"

namespace ctcg {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownSymbol: return "UnknownSymbol";
    case ErrorCode::kInvalidAlphabet: return "InvalidAlphabet";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kTraceMismatch: return "TraceMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kInvalidGrid: return "InvalidGrid";
    case ErrorCode::kEmptyReferenceSet: return "EmptyReferenceSet";
    case ErrorCode::kAlphabetMismatch: return "AlphabetMismatch";
    case ErrorCode::kBadWeights: return "BadWeights";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kNonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kMissingCache: return "MissingCache";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kEmptySpikeSet: return "EmptySpikeSet";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

PosteriorGrid::PosteriorGrid(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw Error(ErrorCode::kInvalidGrid, "grid must have at least one row and "
                                         "one column");
  }
  for (Eigen::Index t = 0; t < values_.rows(); ++t) {
    double sum = 0.0;
    for (Eigen::Index s = 0; s < values_.cols(); ++s) {
      const double p = values_(t, s);
      if (!std::isfinite(p) || p < 0.0 || p > 1.0 + kRowSumTolerance) {
        throw Error(ErrorCode::kInvalidGrid,
                    "entry (" + std::to_string(t) + ", " + std::to_string(s) +
                        ") outside [0, 1]");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw Error(ErrorCode::kInvalidGrid,
                  "row " + std::to_string(t) + " sums to " +
                      std::to_string(sum));
    }
  }
}

}  // namespace ctcg
