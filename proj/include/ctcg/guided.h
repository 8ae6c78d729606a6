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

#ifndef CTCG_GUIDED_H_
#define CTCG_GUIDED_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ctcg/types.h"

namespace ctcg {

class Dataset;
class SequenceModel;

// Binary T x (V+1) mask with at most one set entry per frame and an
// all-zero blank column. Stored sparsely: symbol_at(t) is the selected
// symbol or kNone.
class SpikeMask {
 public:
  static constexpr int kNone = -1;

  SpikeMask() = default;
  SpikeMask(int frames, int num_symbols);

  int frames() const { return static_cast<int>(selected_.size()); }
  int num_symbols() const { return num_symbols_; }
  int symbol_at(int t) const { return selected_[t]; }
  bool at(int t, int s) const { return selected_[t] == s; }
  int count() const;

  // Throws on the blank column or an out-of-range symbol.
  void Set(int t, int symbol);
  void Clear(int t) { selected_[t] = kNone; }

  Matrix Dense() const;

  bool operator==(const SpikeMask&) const = default;

 private:
  int num_symbols_ = 0;
  std::vector<int> selected_;
};

enum class GuideVariant { kLinear, kLogarithmic };

std::string_view GuideVariantName(GuideVariant variant);
GuideVariant ParseGuideVariant(std::string_view name);

struct GuidedLossConfig {
  double guide_weight = 1.0;
  GuideVariant variant = GuideVariant::kLinear;
};

// One-hot at each frame's argmax of the guiding posteriors. Among non-blanks
// the lowest index wins ties; the blank wins ties against non-blanks, and a
// blank-won frame yields an all-zero row.
SpikeMask BuildMask(const PosteriorGrid& guiding_grid);

// Linear: -sum(mask o grid). Logarithmic: -sum over masked frames of
// log grid[t][mask(t)], a frame-level cross-entropy against the guiding
// model's argmax symbols.
LossAndGrad GuideLoss(const PosteriorGrid& grid, const SpikeMask& mask,
                      GuideVariant variant);

// CtcLoss + guide_weight * GuideLoss, gradients combined the same way.
LossAndGrad GuidedCtcLoss(const PosteriorGrid& grid,
                          const TargetSequence& target, const SpikeMask& mask,
                          const GuidedLossConfig& config);

// Masks of a frozen guiding model, keyed by utterance id. Write-once.
class MaskStore {
 public:
  void Insert(const std::string& id, SpikeMask mask);
  const SpikeMask& at(const std::string& id) const;
  bool contains(const std::string& id) const { return masks_.count(id) > 0; }
  std::size_t size() const { return masks_.size(); }
  const std::map<std::string, SpikeMask>& entries() const { return masks_; }

  // "CTGM" u32 version, u32 num_symbols, u64 count, then per utterance the
  // id, frame count and run-length-encoded (start, length, symbol) runs of
  // set entries.
  void Save(const std::string& path) const;
  static MaskStore Load(const std::string& path);

  // frame,symbol rows for every set entry, prefixed by the utterance id.
  void ExportCsv(const std::string& path,
                 const std::vector<std::string>& symbol_names) const;

  bool operator==(const MaskStore&) const = default;

 private:
  std::map<std::string, SpikeMask> masks_;
};

// Runs the guiding model on every utterance. Throws AlphabetMismatch when the
// model's output_dim differs from the dataset's alphabet.
MaskStore PrecomputeMasks(const SequenceModel& guiding_model,
                          const Dataset& dataset);

}  // namespace ctcg

#endif  // CTCG_GUIDED_H_
