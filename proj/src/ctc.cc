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

#include "ctcg/ctc.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ctcg/error.h"

namespace ctcg {

namespace {

constexpr double kLogZero = -std::numeric_limits<double>::infinity();

double LogSumExp(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  return a > b ? a + std::log1p(std::exp(b - a))
               : b + std::log1p(std::exp(a - b));
}

void CheckTarget(const TargetSequence& target, int blank) {
  for (int label : target) {
    if (label < 0 || label >= blank) {
      throw Error(ErrorCode::kShapeMismatch,
                  "target label " + std::to_string(label) +
                      " outside the non-blank range [0, " +
                      std::to_string(blank) + ")");
    }
  }
}

void CheckFeasible(const TargetSequence& target, int frames) {
  const int needed = MinimumFrames(target);
  if (frames < needed) {
    throw Error(ErrorCode::kInfeasible,
                "target needs at least " + std::to_string(needed) +
                    " frames, got " + std::to_string(frames));
  }
}

// Blank-augmented labels: b y1 b y2 ... yL b.
std::vector<int> Augment(const TargetSequence& target, int blank) {
  std::vector<int> labels(2 * target.size() + 1, blank);
  for (std::size_t i = 0; i < target.size(); ++i) labels[2 * i + 1] = target[i];
  return labels;
}

void EnumerateFrom(const std::vector<int>& labels, int blank, int frames,
                   int t, int u, Alignment* prefix,
                   std::vector<Alignment>* out) {
  const int last = static_cast<int>(labels.size()) - 1;
  if (t == frames) {
    if (u == last || u == last - 1) out->push_back(*prefix);
    return;
  }
  // Remaining frames must be able to reach the final states.
  if (last - 1 - u > 2 * (frames - t)) return;
  auto visit = [&](int next) {
    prefix->push_back(labels[next]);
    EnumerateFrom(labels, blank, frames, t + 1, next, prefix, out);
    prefix->pop_back();
  };
  if (t == 0) {
    visit(0);
    if (last >= 1) visit(1);
    return;
  }
  visit(u);
  if (u + 1 <= last) visit(u + 1);
  if (u + 2 <= last && labels[u + 2] != blank &&
      labels[u + 2] != labels[u]) {
    visit(u + 2);
  }
}

}  // namespace

TargetSequence Collapse(const Alignment& frames, int blank) {
  TargetSequence out;
  int previous = -1;
  for (int symbol : frames) {
    if (symbol != previous && symbol != blank) out.push_back(symbol);
    previous = symbol;
  }
  return out;
}

int MinimumFrames(const TargetSequence& target) {
  int frames = static_cast<int>(target.size());
  for (std::size_t i = 1; i < target.size(); ++i) {
    if (target[i] == target[i - 1]) ++frames;
  }
  return frames;
}

std::vector<Alignment> ExpandAlignments(const TargetSequence& target,
                                        int frames, int blank) {
  CheckTarget(target, blank);
  CheckFeasible(target, frames);
  std::vector<Alignment> out;
  if (frames == 0) return out;
  const std::vector<int> labels = Augment(target, blank);
  Alignment prefix;
  prefix.reserve(frames);
  EnumerateFrom(labels, blank, frames, 0, 0, &prefix, &out);
  std::sort(out.begin(), out.end());
  return out;
}

double CtcLossBruteforce(const PosteriorGrid& grid,
                         const TargetSequence& target) {
  double total = 0.0;
  for (const Alignment& path :
       ExpandAlignments(target, grid.frames(), grid.blank())) {
    double p = 1.0;
    for (int t = 0; t < grid.frames(); ++t) p *= grid(t, path[t]);
    total += p;
  }
  return -std::log(total);
}

LossAndGrad CtcLoss(const PosteriorGrid& grid, const TargetSequence& target) {
  const int blank = grid.blank();
  const int frames = grid.frames();
  CheckTarget(target, blank);
  CheckFeasible(target, frames);

  const std::vector<int> labels = Augment(target, blank);
  const int states = static_cast<int>(labels.size());
  auto can_skip = [&](int u) {
    return u >= 2 && labels[u] != blank && labels[u] != labels[u - 2];
  };

  Matrix log_prob(frames, grid.num_symbols());
  for (int t = 0; t < frames; ++t) {
    for (int s = 0; s < grid.num_symbols(); ++s) {
      log_prob(t, s) = std::log(grid(t, s));
    }
  }

  // in_alpha(t, u): mass of prefixes arriving at state u at frame t, before
  // emitting frame t. out_beta(t, u): mass of suffixes leaving state u after
  // frame t. Their product summed over the states of symbol s is dZ/dp(t, s).
  Matrix in_alpha = Matrix::Constant(frames, states, kLogZero);
  Matrix out_beta = Matrix::Constant(frames, states, kLogZero);

  in_alpha(0, 0) = 0.0;
  if (states > 1) in_alpha(0, 1) = 0.0;
  for (int t = 1; t < frames; ++t) {
    for (int u = 0; u < states; ++u) {
      auto alpha = [&](int v) {
        return in_alpha(t - 1, v) + log_prob(t - 1, labels[v]);
      };
      double sum = alpha(u);
      if (u >= 1) sum = LogSumExp(sum, alpha(u - 1));
      if (can_skip(u)) sum = LogSumExp(sum, alpha(u - 2));
      in_alpha(t, u) = sum;
    }
  }

  out_beta(frames - 1, states - 1) = 0.0;
  if (states > 1) out_beta(frames - 1, states - 2) = 0.0;
  for (int t = frames - 2; t >= 0; --t) {
    for (int u = 0; u < states; ++u) {
      auto beta = [&](int v) {
        return out_beta(t + 1, v) + log_prob(t + 1, labels[v]);
      };
      double sum = beta(u);
      if (u + 1 < states) sum = LogSumExp(sum, beta(u + 1));
      if (u + 2 < states && can_skip(u + 2)) sum = LogSumExp(sum, beta(u + 2));
      out_beta(t, u) = sum;
    }
  }

  double log_likelihood = kLogZero;
  for (int u = std::max(0, states - 2); u < states; ++u) {
    log_likelihood = LogSumExp(
        log_likelihood,
        in_alpha(frames - 1, u) + log_prob(frames - 1, labels[u]));
  }
  if (log_likelihood == kLogZero) {
    throw Error(ErrorCode::kInfeasible,
                "target has zero probability under the grid");
  }

  LossAndGrad result;
  result.loss = -log_likelihood;
  result.grad = Matrix::Zero(frames, grid.num_symbols());
  for (int t = 0; t < frames; ++t) {
    Eigen::VectorXd occupancy =
        Eigen::VectorXd::Constant(grid.num_symbols(), kLogZero);
    for (int u = 0; u < states; ++u) {
      occupancy(labels[u]) =
          LogSumExp(occupancy(labels[u]), in_alpha(t, u) + out_beta(t, u));
    }
    for (int s = 0; s < grid.num_symbols(); ++s) {
      if (occupancy(s) != kLogZero) {
        result.grad(t, s) = -std::exp(occupancy(s) - log_likelihood);
      }
    }
  }
  // Rounding can push a near-certain path a hair below zero.
  result.loss = std::max(result.loss, 0.0);
  return result;
}

TargetSequence GreedyDecode(const PosteriorGrid& grid) {
  Alignment path(grid.frames());
  for (int t = 0; t < grid.frames(); ++t) {
    int best = 0;
    for (int s = 1; s < grid.num_symbols(); ++s) {
      if (grid(t, s) > grid(t, best)) best = s;
    }
    path[t] = best;
  }
  return Collapse(path, grid.blank());
}

int EditDistance(const TargetSequence& hypothesis,
                 const TargetSequence& reference) {
  const std::size_t n = hypothesis.size();
  const std::size_t m = reference.size();
  std::vector<int> row(m + 1);
  for (std::size_t j = 0; j <= m; ++j) row[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    int diagonal = row[0];
    row[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const int substitution =
          diagonal + (hypothesis[i - 1] == reference[j - 1] ? 0 : 1);
      diagonal = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, substitution});
    }
  }
  return row[m];
}

double SequenceErrorRate(const std::vector<TargetSequence>& hypotheses,
                         const std::vector<TargetSequence>& references) {
  if (hypotheses.size() != references.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                std::to_string(hypotheses.size()) + " hypotheses for " +
                    std::to_string(references.size()) + " references");
  }
  long long errors = 0;
  long long length = 0;
  for (std::size_t i = 0; i < references.size(); ++i) {
    errors += EditDistance(hypotheses[i], references[i]);
    length += static_cast<long long>(references[i].size());
  }
  if (length == 0) {
    throw Error(ErrorCode::kEmptyReferenceSet, "total reference length is 0");
  }
  return 100.0 * static_cast<double>(errors) / static_cast<double>(length);
}

}  // namespace ctcg
