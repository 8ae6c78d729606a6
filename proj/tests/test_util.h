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

#ifndef CTCG_TESTS_TEST_UTIL_H_
#define CTCG_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ctcg/ctc.h"
#include "ctcg/error.h"
#include "ctcg/types.h"

namespace ctcg::testing {

// The code of the ctcg::Error thrown by `f`, or nullopt if none was thrown.
template <typename F>
std::optional<ErrorCode> ThrownCode(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

// A fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path ScratchDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("ctcg_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline Matrix Softmax(const Matrix& logits) {
  Matrix out = logits;
  for (Eigen::Index t = 0; t < out.rows(); ++t) {
    auto row = out.row(t);
    row.array() -= row.maxCoeff();
    row = row.array().exp().matrix();
    row /= row.sum();
  }
  return out;
}

// dL/dlogits from dL/dprobs.
inline Matrix SoftmaxBackward(const Matrix& probs, const Matrix& grad) {
  Matrix out = probs.cwiseProduct(grad);
  const Eigen::VectorXd inner = out.rowwise().sum();
  out -= probs.cwiseProduct(inner.replicate(1, probs.cols()));
  return out;
}

inline Matrix RandomLogits(std::mt19937_64& rng, int frames, int symbols,
                           double scale = 2.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix logits(frames, symbols);
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    logits.data()[i] = normal(rng);
  }
  return logits;
}

inline PosteriorGrid RandomGrid(std::mt19937_64& rng, int frames, int symbols,
                                double scale = 2.0) {
  return PosteriorGrid(Softmax(RandomLogits(rng, frames, symbols, scale)));
}

// Random target over `labels` non-blank symbols that fits in `frames`.
inline TargetSequence RandomTarget(std::mt19937_64& rng, int labels,
                                   int max_length, int frames) {
  std::uniform_int_distribution<int> length_dist(0, max_length);
  std::uniform_int_distribution<int> label_dist(0, labels - 1);
  for (;;) {
    TargetSequence target(length_dist(rng));
    for (int& label : target) label = label_dist(rng);
    if (MinimumFrames(target) <= frames) return target;
  }
}

struct GradientCheck {
  int checked = 0;
  int failed = 0;
  double max_relative_error = 0.0;
  double pass_fraction() const {
    return checked == 0 ? 1.0 : 1.0 - static_cast<double>(failed) / checked;
  }
};

// Every coordinate is compared by |a - n| / max(|a|, |n|, floor); the floor
// keeps finite-difference roundoff on near-zero entries from dominating.
inline GradientCheck CompareGradients(const std::vector<double>& analytic,
                                      const std::vector<double>& numeric,
                                      double tolerance, double floor = 1e-6) {
  GradientCheck check;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double a = analytic[i];
    const double n = numeric[i];
    const double rel =
        std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor});
    ++check.checked;
    check.max_relative_error = std::max(check.max_relative_error, rel);
    if (rel >= tolerance) ++check.failed;
  }
  return check;
}

// Central differences of `f` around `x` with step h, one coordinate at a
// time.
inline std::vector<double> NumericGradient(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x, double h = 1e-5) {
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double plus = f(x);
    x[i] = saved - h;
    const double minus = f(x);
    x[i] = saved;
    grad[i] = (plus - minus) / (2.0 * h);
  }
  return grad;
}

inline std::vector<double> Flatten(const Matrix& m) {
  return std::vector<double>(m.data(), m.data() + m.size());
}

inline Matrix Unflatten(const std::vector<double>& v, Eigen::Index rows,
                        Eigen::Index cols) {
  Matrix m(rows, cols);
  std::copy(v.begin(), v.end(), m.data());
  return m;
}

// Checks dL/dgrid of a grid-level loss by finite differences on softmax
// logits, composing the analytic gradient with the softmax Jacobian.
inline GradientCheck CheckGridLossViaLogits(
    const Matrix& logits,
    const std::function<LossAndGrad(const PosteriorGrid&)>& loss,
    double tolerance = 1e-4) {
  const Matrix probs = Softmax(logits);
  const LossAndGrad at = loss(PosteriorGrid(probs));
  const std::vector<double> analytic =
      Flatten(SoftmaxBackward(probs, at.grad));
  const auto f = [&](const std::vector<double>& x) {
    return loss(PosteriorGrid(
                    Softmax(Unflatten(x, logits.rows(), logits.cols()))))
        .loss;
  };
  return CompareGradients(analytic, NumericGradient(f, Flatten(logits)),
                          tolerance);
}

}  // namespace ctcg::testing

#endif  // CTCG_TESTS_TEST_UTIL_H_
