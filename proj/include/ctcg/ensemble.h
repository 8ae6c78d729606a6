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

#ifndef CTCG_ENSEMBLE_H_
#define CTCG_ENSEMBLE_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "ctcg/types.h"

namespace ctcg {

class Dataset;
class SequenceModel;

// Convex combination weights for posterior fusion.
class FusionWeights {
 public:
  static constexpr double kSumTolerance = 1e-9;

  // Throws BadWeights unless all weights are >= 0 and sum to 1.
  explicit FusionWeights(std::vector<double> weights);
  static FusionWeights Uniform(int members);

  int size() const { return static_cast<int>(weights_.size()); }
  double operator[](int i) const { return weights_[i]; }
  const std::vector<double>& values() const { return weights_; }

 private:
  std::vector<double> weights_;
};

struct DistillationConfig {
  // 1.0 is pure frame-wise KL; 0.0 is plain CTC.
  double kd_weight = 1.0;
};

// Entrywise weighted average of posterior grids.
PosteriorGrid Fuse(std::span<const PosteriorGrid> grids,
                   const FusionWeights& weights);

// sum_t KL(teacher_t || student_t), with 0 log 0 = 0. Gradient w.r.t. the
// student grid: -teacher / student.
LossAndGrad KdFrameLoss(const PosteriorGrid& teacher,
                        const PosteriorGrid& student);

// kd_weight * KdFrameLoss + (1 - kd_weight) * CtcLoss. The CTC term is
// skipped entirely when kd_weight == 1.
LossAndGrad DistillLoss(const PosteriorGrid& student,
                        const TargetSequence& target,
                        const PosteriorGrid& teacher,
                        const DistillationConfig& config);

// Fused teacher posteriors keyed by utterance id.
class TeacherStore {
 public:
  void Insert(const std::string& id, PosteriorGrid grid);
  const PosteriorGrid& at(const std::string& id) const;
  bool contains(const std::string& id) const { return grids_.count(id) > 0; }
  std::size_t size() const { return grids_.size(); }
  const std::map<std::string, PosteriorGrid>& entries() const {
    return grids_;
  }

  // "CTGT" u32 version, u32 num_symbols, u64 count, then per utterance the
  // id, frame count and T x (V+1) little-endian doubles.
  void Save(const std::string& path) const;
  static TeacherStore Load(const std::string& path);

  bool operator==(const TeacherStore&) const = default;

 private:
  std::map<std::string, PosteriorGrid> grids_;
};

// Fused posteriors of `models` on one feature matrix.
PosteriorGrid FusedPosteriors(std::span<const SequenceModel> models,
                              const FusionWeights& weights,
                              const Matrix& features);

TeacherStore PrecomputeTeacher(std::span<const SequenceModel> models,
                               const FusionWeights& weights,
                               const Dataset& dataset);

}  // namespace ctcg

#endif  // CTCG_ENSEMBLE_H_
