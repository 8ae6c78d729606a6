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

#include "ctcg/ensemble.h"

#include <cmath>
#include <string>

#include "binary_io.h"
#include "ctcg/ctc.h"
#include "ctcg/data.h"
#include "ctcg/error.h"
#include "ctcg/seqmodel.h"

namespace ctcg {

namespace {

constexpr char kTeacherMagic[] = "CTGT";
constexpr std::uint32_t kTeacherVersion = 1;

void CheckSameShape(const PosteriorGrid& a, const PosteriorGrid& b) {
  if (a.frames() != b.frames() || a.num_symbols() != b.num_symbols()) {
    throw Error(ErrorCode::kShapeMismatch,
                std::to_string(a.frames()) + "x" +
                    std::to_string(a.num_symbols()) + " vs " +
                    std::to_string(b.frames()) + "x" +
                    std::to_string(b.num_symbols()));
  }
}

}  // namespace

FusionWeights::FusionWeights(std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty()) throw Error(ErrorCode::kBadWeights, "no weights");
  double sum = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorCode::kBadWeights, "weights must be finite and >= 0");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw Error(ErrorCode::kBadWeights,
                "weights sum to " + std::to_string(sum));
  }
}

FusionWeights FusionWeights::Uniform(int members) {
  if (members < 1) throw Error(ErrorCode::kBadWeights, "no members");
  return FusionWeights(std::vector<double>(members, 1.0 / members));
}

PosteriorGrid Fuse(std::span<const PosteriorGrid> grids,
                   const FusionWeights& weights) {
  if (grids.empty() || static_cast<int>(grids.size()) != weights.size()) {
    throw Error(ErrorCode::kBadWeights,
                std::to_string(weights.size()) + " weights for " +
                    std::to_string(grids.size()) + " grids");
  }
  Matrix fused = weights[0] * grids[0].values();
  for (std::size_t i = 1; i < grids.size(); ++i) {
    CheckSameShape(grids[0], grids[i]);
    fused += weights[static_cast<int>(i)] * grids[i].values();
  }
  return PosteriorGrid(std::move(fused));
}

LossAndGrad KdFrameLoss(const PosteriorGrid& teacher,
                        const PosteriorGrid& student) {
  CheckSameShape(teacher, student);
  LossAndGrad result;
  result.grad = Matrix::Zero(student.frames(), student.num_symbols());
  double loss = 0.0;
  for (int t = 0; t < student.frames(); ++t) {
    for (int s = 0; s < student.num_symbols(); ++s) {
      const double target = teacher(t, s);
      if (target == 0.0) continue;
      loss += target * (std::log(target) - std::log(student(t, s)));
      result.grad(t, s) = -target / student(t, s);
    }
  }
  result.loss = std::max(loss, 0.0);
  return result;
}

LossAndGrad DistillLoss(const PosteriorGrid& student,
                        const TargetSequence& target,
                        const PosteriorGrid& teacher,
                        const DistillationConfig& config) {
  const double w = config.kd_weight;
  if (!(w >= 0.0 && w <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "kd_weight must be in [0, 1]");
  }
  if (w == 1.0) return KdFrameLoss(teacher, student);
  if (w == 0.0) return CtcLoss(student, target);
  LossAndGrad kd = KdFrameLoss(teacher, student);
  const LossAndGrad ctc = CtcLoss(student, target);
  kd.loss = w * kd.loss + (1.0 - w) * ctc.loss;
  kd.grad = w * kd.grad + (1.0 - w) * ctc.grad;
  return kd;
}

void TeacherStore::Insert(const std::string& id, PosteriorGrid grid) {
  if (!grids_.empty() &&
      grids_.begin()->second.num_symbols() != grid.num_symbols()) {
    throw Error(ErrorCode::kShapeMismatch,
                "teacher grids must share the alphabet");
  }
  if (!grids_.emplace(id, std::move(grid)).second) {
    throw Error(ErrorCode::kInvalidConfig, "duplicate teacher for " + id);
  }
}

const PosteriorGrid& TeacherStore::at(const std::string& id) const {
  const auto it = grids_.find(id);
  if (it == grids_.end()) {
    throw Error(ErrorCode::kMissingCache, "no teacher posteriors for " + id);
  }
  return it->second;
}

void TeacherStore::Save(const std::string& path) const {
  io::Writer out(path);
  out.Bytes({kTeacherMagic, 4});
  out.U32(kTeacherVersion);
  out.U32(grids_.empty() ? 0u
                         : static_cast<std::uint32_t>(
                               grids_.begin()->second.num_symbols()));
  out.U64(grids_.size());
  for (const auto& [id, grid] : grids_) {
    out.String(id);
    out.U32(static_cast<std::uint32_t>(grid.frames()));
    const Matrix& values = grid.values();
    for (Eigen::Index i = 0; i < values.size(); ++i) out.F64(values.data()[i]);
  }
  out.Close();
}

TeacherStore TeacherStore::Load(const std::string& path) {
  io::Reader in(path);
  if (in.Bytes(4) != std::string_view(kTeacherMagic, 4)) in.Fail("bad magic");
  if (in.U32() != kTeacherVersion) in.Fail("unsupported teacher version");
  const int num_symbols = static_cast<int>(in.U32());
  const std::uint64_t count = in.U64();
  if (count > 0 && num_symbols < 2) in.Fail("bad symbol count");
  TeacherStore store;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::string id = in.String();
    const std::uint32_t frames = in.U32();
    if (frames == 0 || frames > (1u << 24)) in.Fail("bad frame count");
    Matrix values(frames, num_symbols);
    for (Eigen::Index k = 0; k < values.size(); ++k) {
      values.data()[k] = in.F64();
    }
    if (store.contains(id)) in.Fail("duplicate id " + id);
    try {
      store.Insert(id, PosteriorGrid(std::move(values)));
    } catch (const Error& e) {
      in.Fail(id + ": " + e.what());
    }
  }
  in.ExpectEnd();
  return store;
}

PosteriorGrid FusedPosteriors(std::span<const SequenceModel> models,
                              const FusionWeights& weights,
                              const Matrix& features) {
  std::vector<PosteriorGrid> grids;
  grids.reserve(models.size());
  for (const SequenceModel& model : models) {
    grids.push_back(model.Forward(features));
  }
  return Fuse(grids, weights);
}

TeacherStore PrecomputeTeacher(std::span<const SequenceModel> models,
                               const FusionWeights& weights,
                               const Dataset& dataset) {
  for (const SequenceModel& model : models) {
    if (model.config().output_dim != dataset.alphabet().num_outputs()) {
      throw Error(ErrorCode::kAlphabetMismatch,
                  "teacher output_dim " +
                      std::to_string(model.config().output_dim) +
                      " does not match the dataset alphabet");
    }
  }
  TeacherStore store;
  for (const Utterance& utt : dataset.utterances()) {
    store.Insert(utt.id, FusedPosteriors(models, weights, utt.features));
  }
  return store;
}

}  // namespace ctcg
