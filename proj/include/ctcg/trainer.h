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

#ifndef CTCG_TRAINER_H_
#define CTCG_TRAINER_H_

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctcg/data.h"
#include "ctcg/ensemble.h"
#include "ctcg/guided.h"
#include "ctcg/seqmodel.h"

namespace ctcg {

struct TrainingSchedule {
  int epochs = 20;
  double lr_initial = 0.03;
  double momentum = 0.9;
  double anneal_factor = std::sqrt(0.5);
  // First epoch whose rate is annealed.
  int anneal_start_epoch = 11;
  int batch_size = 16;
  std::uint64_t seed = 1;
  // Global-norm gradient clip; <= 0 disables it.
  double clip_norm = 5.0;

  void Validate() const;
};

// lr_initial before anneal_start_epoch, then one factor of anneal_factor per
// epoch: epoch e >= start gets lr_initial * factor^(e - start + 1).
double LearningRate(const TrainingSchedule& schedule, int epoch);

// Epoch 1 sorts by frame count (ties by id); later epochs use a permutation
// seeded by (seed, epoch). Returns dataset indices cut into consecutive
// batches of batch_size.
std::vector<std::vector<int>> BatchOrder(const Dataset& dataset, int epoch,
                                         std::uint64_t seed, int batch_size);

// Nesterov update with `grad` evaluated at params + momentum * velocity:
//   velocity <- momentum * velocity - lr * grad
//   params   <- params + velocity
// Nothing is modified when grad has a non-finite entry.
void SgdNesterovStep(std::span<double> params, std::span<double> velocity,
                     std::span<const double> grad, double lr, double momentum,
                     int batch_id = -1);

enum class LossMode { kCtc, kGuided, kDistill };

std::string_view LossModeName(LossMode mode);

struct TrainingJob {
  SequenceModel model;
  LossMode loss_mode = LossMode::kCtc;
  TrainingSchedule schedule;
  GuidedLossConfig guided;
  DistillationConfig distill;
  // Required by kGuided / kDistill respectively; not owned.
  const MaskStore* masks = nullptr;
  const TeacherStore* teacher = nullptr;
  // When non-empty, epoch_NNN.ckpt and epoch_NNN.state are written per epoch.
  std::string checkpoint_dir;
  int num_threads = 1;
};

struct EpochMetrics {
  int epoch = 0;
  double mean_train_loss = 0.0;
  // NaN when no held-out set was given.
  double heldout_ser = 0.0;
  double lr = 0.0;
};

struct OptimizerState {
  std::vector<double> velocity;
  int completed_epochs = 0;
};

struct TrainingResult {
  SequenceModel model;
  OptimizerState optimizer;
  std::vector<EpochMetrics> metrics;
};

// Runs schedule.epochs epochs of forward, loss, backward and Nesterov steps.
// Per-utterance losses within a batch are averaged. `resume` continues from a
// saved optimizer state whose parameters are those of job.model.
TrainingResult RunTraining(const TrainingJob& job, const Dataset& train,
                           const Dataset* heldout,
                           const OptimizerState* resume = nullptr);

// Per-utterance loss and parameter gradient under the job's loss mode.
double UtteranceLossAndGradient(const TrainingJob& job,
                                const SequenceModel& model,
                                const Utterance& utterance,
                                std::vector<double>* gradient);

// Mean of per-utterance gradients in index order.
double BatchLossAndGradient(const TrainingJob& job, const SequenceModel& model,
                            const Dataset& dataset, std::span<const int> batch,
                            std::vector<double>* gradient);

double HeldoutErrorRate(const SequenceModel& model, const Dataset& heldout);

void SaveOptimizerState(const OptimizerState& state, const std::string& path);
OptimizerState LoadOptimizerState(const std::string& path);

// epoch,mean_train_loss,heldout_ser,lr with 17 significant digits.
void WriteMetricsCsv(const std::vector<EpochMetrics>& metrics,
                     const std::string& path);
std::string FormatMetricsCsv(const std::vector<EpochMetrics>& metrics);

// Plain-text key=value file; '#' starts a comment. Keys are tracked so that
// callers can reject leftovers.
class KeyValueConfig {
 public:
  static KeyValueConfig FromFile(const std::string& path);
  static KeyValueConfig FromString(std::string_view text);

  void Set(const std::string& key, const std::string& value);
  bool Has(const std::string& key) const { return values_.count(key) > 0; }
  std::optional<std::string> Take(const std::string& key);
  // Keys never taken.
  std::vector<std::string> Unused() const;

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> taken_;
};

// Consumes every TrainingSchedule key present in `config`.
void ApplyScheduleConfig(KeyValueConfig& config, TrainingSchedule* schedule);

}  // namespace ctcg

#endif  // CTCG_TRAINER_H_
