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

#ifndef CTCG_TYPES_H_
#define CTCG_TYPES_H_

#include <vector>

#include <Eigen/Dense>

namespace ctcg {

// Row-major so that one row is one frame.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Label indices into an alphabet, blank excluded.
using TargetSequence = std::vector<int>;

// Frame-level label indices, blank allowed.
using Alignment = std::vector<int>;

// Per-frame probability distributions over V+1 symbols (blank last).
// Construction checks that every row is a distribution within 1e-6.
class PosteriorGrid {
 public:
  static constexpr double kRowSumTolerance = 1e-6;

  PosteriorGrid() = default;
  explicit PosteriorGrid(Matrix values);

  int frames() const { return static_cast<int>(values_.rows()); }
  int num_symbols() const { return static_cast<int>(values_.cols()); }
  int blank() const { return num_symbols() - 1; }

  double operator()(int t, int s) const { return values_(t, s); }
  const Matrix& values() const { return values_; }

  bool operator==(const PosteriorGrid& other) const {
    return values_.rows() == other.values_.rows() &&
           values_.cols() == other.values_.cols() && values_ == other.values_;
  }

 private:
  Matrix values_;
};

// Loss value paired with its gradient w.r.t. the grid probabilities.
struct LossAndGrad {
  double loss = 0.0;
  Matrix grad;
};

}  // namespace ctcg

#endif  // CTCG_TYPES_H_
