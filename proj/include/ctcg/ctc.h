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

#ifndef CTCG_CTC_H_
#define CTCG_CTC_H_

#include <vector>

#include "ctcg/types.h"

namespace ctcg {

// Merges consecutive repeats, then drops blanks.
TargetSequence Collapse(const Alignment& frames, int blank);

// Shortest T admitting an alignment of `target`: L plus one separating blank
// per pair of equal adjacent labels.
int MinimumFrames(const TargetSequence& target);

// Every length-T alignment collapsing to `target`, in lexicographic order.
// Exponential in T; meant for oracles and tests.
std::vector<Alignment> ExpandAlignments(const TargetSequence& target,
                                        int frames, int blank);

// -log sum over ExpandAlignments of the path probability, by enumeration.
double CtcLossBruteforce(const PosteriorGrid& grid,
                         const TargetSequence& target);

// Negative log-likelihood of `target` by the log-space forward-backward
// recursion over the blank-augmented label sequence (length 2L+1). The
// gradient is taken w.r.t. the grid probabilities.
LossAndGrad CtcLoss(const PosteriorGrid& grid, const TargetSequence& target);

// Per-frame argmax (ties to the lowest index), collapsed.
TargetSequence GreedyDecode(const PosteriorGrid& grid);

// Levenshtein distance with unit costs.
int EditDistance(const TargetSequence& hypothesis,
                 const TargetSequence& reference);

// 100 * total edit distance / total reference length.
double SequenceErrorRate(const std::vector<TargetSequence>& hypotheses,
                         const std::vector<TargetSequence>& references);

}  // namespace ctcg

#endif  // CTCG_CTC_H_
