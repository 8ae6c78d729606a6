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

#include "ctcg/guided.h"

#include <cmath>
#include <fstream>
#include <string>

#include "binary_io.h"
#include "ctcg/ctc.h"
#include "ctcg/data.h"
#include "ctcg/error.h"
#include "ctcg/seqmodel.h"

namespace ctcg {

namespace {

constexpr char kMaskMagic[] = "CTGM";
constexpr std::uint32_t kMaskVersion = 1;

void CheckShapes(const PosteriorGrid& grid, const SpikeMask& mask) {
  if (grid.frames() != mask.frames() ||
      grid.num_symbols() != mask.num_symbols()) {
    throw Error(ErrorCode::kShapeMismatch,
                "grid " + std::to_string(grid.frames()) + "x" +
                    std::to_string(grid.num_symbols()) + " vs mask " +
                    std::to_string(mask.frames()) + "x" +
                    std::to_string(mask.num_symbols()));
  }
}

}  // namespace

SpikeMask::SpikeMask(int frames, int num_symbols)
    : num_symbols_(num_symbols), selected_(frames, kNone) {
  if (frames < 0 || num_symbols < 2) {
    throw Error(ErrorCode::kShapeMismatch, "bad mask shape");
  }
}

int SpikeMask::count() const {
  int n = 0;
  for (int s : selected_) n += s != kNone;
  return n;
}

void SpikeMask::Set(int t, int symbol) {
  if (t < 0 || t >= frames()) {
    throw Error(ErrorCode::kShapeMismatch,
                "frame " + std::to_string(t) + " outside the mask");
  }
  if (symbol < 0 || symbol >= num_symbols_ - 1) {
    throw Error(ErrorCode::kShapeMismatch,
                "mask symbol " + std::to_string(symbol) +
                    " is blank or out of range");
  }
  selected_[t] = symbol;
}

Matrix SpikeMask::Dense() const {
  Matrix dense = Matrix::Zero(frames(), num_symbols_);
  for (int t = 0; t < frames(); ++t) {
    if (selected_[t] != kNone) dense(t, selected_[t]) = 1.0;
  }
  return dense;
}

std::string_view GuideVariantName(GuideVariant variant) {
  return variant == GuideVariant::kLinear ? "linear" : "logarithmic";
}

GuideVariant ParseGuideVariant(std::string_view name) {
  if (name == "linear") return GuideVariant::kLinear;
  if (name == "logarithmic" || name == "log") {
    return GuideVariant::kLogarithmic;
  }
  throw Error(ErrorCode::kInvalidConfig,
              "unknown guide variant '" + std::string(name) + "'");
}

SpikeMask BuildMask(const PosteriorGrid& guiding_grid) {
  const int blank = guiding_grid.blank();
  SpikeMask mask(guiding_grid.frames(), guiding_grid.num_symbols());
  for (int t = 0; t < guiding_grid.frames(); ++t) {
    int best = 0;
    for (int s = 1; s < blank; ++s) {
      if (guiding_grid(t, s) > guiding_grid(t, best)) best = s;
    }
    if (guiding_grid(t, best) > guiding_grid(t, blank)) mask.Set(t, best);
  }
  return mask;
}

LossAndGrad GuideLoss(const PosteriorGrid& grid, const SpikeMask& mask,
                      GuideVariant variant) {
  CheckShapes(grid, mask);
  LossAndGrad result;
  result.grad = Matrix::Zero(grid.frames(), grid.num_symbols());
  double sum = 0.0;
  for (int t = 0; t < grid.frames(); ++t) {
    const int s = mask.symbol_at(t);
    if (s == SpikeMask::kNone) continue;
    const double p = grid(t, s);
    if (variant == GuideVariant::kLinear) {
      sum += p;
      result.grad(t, s) = -1.0;
    } else {
      sum += std::log(p);
      result.grad(t, s) = -1.0 / p;
    }
  }
  result.loss = -sum;
  return result;
}

LossAndGrad GuidedCtcLoss(const PosteriorGrid& grid,
                          const TargetSequence& target, const SpikeMask& mask,
                          const GuidedLossConfig& config) {
  CheckShapes(grid, mask);
  if (!std::isfinite(config.guide_weight) || config.guide_weight < 0.0) {
    throw Error(ErrorCode::kInvalidConfig,
                "guide_weight must be finite and non-negative");
  }
  LossAndGrad result = CtcLoss(grid, target);
  if (config.guide_weight == 0.0) return result;
  const LossAndGrad guide = GuideLoss(grid, mask, config.variant);
  result.loss += config.guide_weight * guide.loss;
  result.grad += config.guide_weight * guide.grad;
  return result;
}

void MaskStore::Insert(const std::string& id, SpikeMask mask) {
  if (!masks_.emplace(id, std::move(mask)).second) {
    throw Error(ErrorCode::kInvalidConfig, "duplicate mask for " + id);
  }
}

const SpikeMask& MaskStore::at(const std::string& id) const {
  const auto it = masks_.find(id);
  if (it == masks_.end()) {
    throw Error(ErrorCode::kMissingCache, "no mask for utterance " + id);
  }
  return it->second;
}

void MaskStore::Save(const std::string& path) const {
  io::Writer out(path);
  out.Bytes({kMaskMagic, 4});
  out.U32(kMaskVersion);
  const int num_symbols =
      masks_.empty() ? 0 : masks_.begin()->second.num_symbols();
  out.U32(static_cast<std::uint32_t>(num_symbols));
  out.U64(masks_.size());
  for (const auto& [id, mask] : masks_) {
    if (mask.num_symbols() != num_symbols) {
      throw Error(ErrorCode::kShapeMismatch,
                  "masks in one store must share the alphabet");
    }
    struct Run {
      int start, length, symbol;
    };
    std::vector<Run> runs;
    for (int t = 0; t < mask.frames(); ++t) {
      const int s = mask.symbol_at(t);
      if (s == SpikeMask::kNone) continue;
      if (!runs.empty() && runs.back().symbol == s &&
          runs.back().start + runs.back().length == t) {
        ++runs.back().length;
      } else {
        runs.push_back({t, 1, s});
      }
    }
    out.String(id);
    out.U32(static_cast<std::uint32_t>(mask.frames()));
    out.U32(static_cast<std::uint32_t>(runs.size()));
    for (const Run& run : runs) {
      out.U32(static_cast<std::uint32_t>(run.start));
      out.U32(static_cast<std::uint32_t>(run.length));
      out.U32(static_cast<std::uint32_t>(run.symbol));
    }
  }
  out.Close();
}

MaskStore MaskStore::Load(const std::string& path) {
  io::Reader in(path);
  if (in.Bytes(4) != std::string_view(kMaskMagic, 4)) in.Fail("bad magic");
  if (in.U32() != kMaskVersion) in.Fail("unsupported mask cache version");
  const int num_symbols = static_cast<int>(in.U32());
  const std::uint64_t count = in.U64();
  if (count > 0 && num_symbols < 2) in.Fail("bad symbol count");
  MaskStore store;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::string id = in.String();
    const std::uint32_t frames = in.U32();
    const std::uint32_t runs = in.U32();
    if (runs > frames) in.Fail("more runs than frames for " + id);
    SpikeMask mask(static_cast<int>(frames), num_symbols);
    for (std::uint32_t r = 0; r < runs; ++r) {
      const std::uint32_t start = in.U32();
      const std::uint32_t length = in.U32();
      const std::uint32_t symbol = in.U32();
      if (static_cast<std::uint64_t>(start) + length > frames ||
          symbol + 1 >= static_cast<std::uint32_t>(num_symbols)) {
        in.Fail("bad run in " + id);
      }
      for (std::uint32_t t = start; t < start + length; ++t) {
        mask.Set(static_cast<int>(t), static_cast<int>(symbol));
      }
    }
    if (store.contains(id)) in.Fail("duplicate id " + id);
    store.Insert(id, std::move(mask));
  }
  in.ExpectEnd();
  return store;
}

void MaskStore::ExportCsv(const std::string& path,
                          const std::vector<std::string>& symbol_names) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path);
  out << "utterance_id,frame,symbol\n";
  for (const auto& [id, mask] : masks_) {
    for (int t = 0; t < mask.frames(); ++t) {
      const int s = mask.symbol_at(t);
      if (s == SpikeMask::kNone) continue;
      out << id << ',' << t << ','
          << (s < static_cast<int>(symbol_names.size()) ? symbol_names[s]
                                                        : std::to_string(s))
          << '\n';
    }
  }
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

MaskStore PrecomputeMasks(const SequenceModel& guiding_model,
                          const Dataset& dataset) {
  if (guiding_model.config().output_dim != dataset.alphabet().num_outputs()) {
    throw Error(ErrorCode::kAlphabetMismatch,
                "guiding model has " +
                    std::to_string(guiding_model.config().output_dim) +
                    " outputs, dataset alphabet needs " +
                    std::to_string(dataset.alphabet().num_outputs()));
  }
  MaskStore store;
  for (const Utterance& utt : dataset.utterances()) {
    store.Insert(utt.id, BuildMask(guiding_model.Forward(utt.features)));
  }
  return store;
}

}  // namespace ctcg
