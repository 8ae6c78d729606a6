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

#include "ctcg/trainer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "binary_io.h"
#include "ctcg/ctc.h"
#include "ctcg/error.h"
#include "ctcg/parallel.h"

namespace ctcg {

namespace {

constexpr char kStateMagic[] = "CTGO";
constexpr std::uint32_t kStateVersion = 1;

std::string Trim(std::string_view text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return "";
  const auto end = text.find_last_not_of(" \t\r");
  return std::string(text.substr(begin, end - begin + 1));
}

double ParseDouble(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double parsed = std::strtod(value.c_str(), &end);
  if (value.empty() || *end != '\0') {
    throw Error(ErrorCode::kParseError,
                key + ": expected a number, got '" + value + "'");
  }
  return parsed;
}

long long ParseInteger(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long long parsed = std::strtoll(value.c_str(), &end, 10);
  if (value.empty() || *end != '\0') {
    throw Error(ErrorCode::kParseError,
                key + ": expected an integer, got '" + value + "'");
  }
  return parsed;
}

std::string Format17(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string EpochPath(const std::string& dir, int epoch, const char* ext) {
  char name[32];
  std::snprintf(name, sizeof(name), "epoch_%03d.%s", epoch, ext);
  return (std::filesystem::path(dir) / name).string();
}

void ClipGlobalNorm(std::vector<double>* grad, double max_norm) {
  if (max_norm <= 0.0) return;
  double squared = 0.0;
  for (double g : *grad) squared += g * g;
  const double norm = std::sqrt(squared);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (double& g : *grad) g *= scale;
  }
}

}  // namespace

void TrainingSchedule::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kInvalidConfig, what);
  };
  require(epochs >= 0, "epochs must be >= 0");
  require(std::isfinite(lr_initial) && lr_initial > 0.0,
          "lr_initial must be positive");
  require(momentum >= 0.0 && momentum < 1.0, "momentum must be in [0, 1)");
  require(anneal_factor > 0.0 && anneal_factor <= 1.0,
          "anneal_factor must be in (0, 1]");
  require(anneal_start_epoch >= 1, "anneal_start_epoch must be >= 1");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(std::isfinite(clip_norm), "clip_norm must be finite");
}

double LearningRate(const TrainingSchedule& schedule, int epoch) {
  if (epoch < 1 || epoch > schedule.epochs) {
    throw Error(ErrorCode::kOutOfRange,
                "epoch " + std::to_string(epoch) + " outside [1, " +
                    std::to_string(schedule.epochs) + "]");
  }
  if (epoch < schedule.anneal_start_epoch) return schedule.lr_initial;
  return schedule.lr_initial *
         std::pow(schedule.anneal_factor,
                  epoch - schedule.anneal_start_epoch + 1);
}

std::vector<std::vector<int>> BatchOrder(const Dataset& dataset, int epoch,
                                         std::uint64_t seed, int batch_size) {
  if (dataset.empty()) throw Error(ErrorCode::kEmptyDataset, "no utterances");
  if (epoch < 1) {
    throw Error(ErrorCode::kOutOfRange, "epochs are numbered from 1");
  }
  if (batch_size < 1) {
    throw Error(ErrorCode::kInvalidConfig, "batch_size must be >= 1");
  }
  std::vector<int> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  if (epoch == 1) {
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const Utterance& ua = dataset[a];
      const Utterance& ub = dataset[b];
      if (ua.frames() != ub.frames()) return ua.frames() < ub.frames();
      return ua.id < ub.id;
    });
  } else {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(epoch), 0x0bd3u};
    std::mt19937_64 rng(seq);
    std::shuffle(order.begin(), order.end(), rng);
  }
  std::vector<std::vector<int>> batches;
  for (std::size_t i = 0; i < order.size(); i += batch_size) {
    const std::size_t end = std::min(order.size(), i + batch_size);
    batches.emplace_back(order.begin() + i, order.begin() + end);
  }
  return batches;
}

void SgdNesterovStep(std::span<double> params, std::span<double> velocity,
                     std::span<const double> grad, double lr, double momentum,
                     int batch_id) {
  if (params.size() != velocity.size() || params.size() != grad.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "params/velocity/grad sizes " + std::to_string(params.size()) +
                    "/" + std::to_string(velocity.size()) + "/" +
                    std::to_string(grad.size()));
  }
  for (double g : grad) {
    if (!std::isfinite(g)) {
      throw Error(ErrorCode::kNonFiniteGradient,
                  "non-finite gradient in batch " + std::to_string(batch_id));
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    velocity[i] = momentum * velocity[i] - lr * grad[i];
    params[i] += velocity[i];
  }
}

std::string_view LossModeName(LossMode mode) {
  switch (mode) {
    case LossMode::kCtc: return "ctc";
    case LossMode::kGuided: return "guided";
    case LossMode::kDistill: return "distill";
  }
  return "unknown";
}

double UtteranceLossAndGradient(const TrainingJob& job,
                                const SequenceModel& model,
                                const Utterance& utterance,
                                std::vector<double>* gradient) {
  ForwardTrace trace;
  const PosteriorGrid grid = model.Forward(utterance.features, &trace);
  LossAndGrad loss;
  switch (job.loss_mode) {
    case LossMode::kCtc:
      loss = CtcLoss(grid, utterance.target);
      break;
    case LossMode::kGuided:
      loss = GuidedCtcLoss(grid, utterance.target, job.masks->at(utterance.id),
                           job.guided);
      break;
    case LossMode::kDistill:
      loss = DistillLoss(grid, utterance.target, job.teacher->at(utterance.id),
                         job.distill);
      break;
  }
  if (!std::isfinite(loss.loss)) {
    throw Error(ErrorCode::kNonFiniteLoss,
                "non-finite loss on utterance " + utterance.id);
  }
  *gradient = model.Backward(trace, loss.grad);
  return loss.loss;
}

double BatchLossAndGradient(const TrainingJob& job, const SequenceModel& model,
                            const Dataset& dataset, std::span<const int> batch,
                            std::vector<double>* gradient) {
  const int n = static_cast<int>(batch.size());
  std::vector<std::vector<double>> grads(n);
  std::vector<double> losses(n);
  ParallelFor(n, job.num_threads, [&](int i) {
    losses[i] = UtteranceLossAndGradient(job, model, dataset[batch[i]],
                                         &grads[i]);
  });
  gradient->assign(model.parameters().size(), 0.0);
  double loss = 0.0;
  for (int i = 0; i < n; ++i) {
    loss += losses[i];
    for (std::size_t k = 0; k < gradient->size(); ++k) {
      (*gradient)[k] += grads[i][k];
    }
  }
  for (double& g : *gradient) g /= n;
  return loss / n;
}

double HeldoutErrorRate(const SequenceModel& model, const Dataset& heldout) {
  std::vector<TargetSequence> hypotheses;
  std::vector<TargetSequence> references;
  for (const Utterance& utt : heldout.utterances()) {
    hypotheses.push_back(GreedyDecode(model.Forward(utt.features)));
    references.push_back(utt.target);
  }
  return SequenceErrorRate(hypotheses, references);
}

TrainingResult RunTraining(const TrainingJob& job, const Dataset& train,
                           const Dataset* heldout,
                           const OptimizerState* resume) {
  const TrainingSchedule& schedule = job.schedule;
  schedule.Validate();
  if (job.model.config().output_dim != train.alphabet().num_outputs()) {
    throw Error(ErrorCode::kAlphabetMismatch,
                "model output_dim does not match the training alphabet");
  }
  if (heldout != nullptr && !(heldout->alphabet() == train.alphabet())) {
    throw Error(ErrorCode::kAlphabetMismatch,
                "held-out alphabet differs from the training alphabet");
  }
  if (job.loss_mode == LossMode::kGuided && job.masks == nullptr) {
    throw Error(ErrorCode::kMissingCache, "guided training needs masks");
  }
  if (job.loss_mode == LossMode::kDistill && job.teacher == nullptr) {
    throw Error(ErrorCode::kMissingCache, "distillation needs a teacher");
  }

  TrainingResult result;
  result.model = job.model;
  std::vector<double> params = job.model.parameters();
  std::vector<double> velocity(params.size(), 0.0);
  int first_epoch = 1;
  if (resume != nullptr) {
    if (resume->velocity.size() != params.size()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "optimizer state does not match the model");
    }
    velocity = resume->velocity;
    first_epoch = resume->completed_epochs + 1;
  }
  result.optimizer.completed_epochs = first_epoch - 1;
  if (!job.checkpoint_dir.empty()) {
    std::filesystem::create_directories(job.checkpoint_dir);
  }

  SequenceModel lookahead = job.model;
  std::vector<double> point(params.size());
  std::vector<double> grad;
  for (int epoch = first_epoch; epoch <= schedule.epochs; ++epoch) {
    const double lr = LearningRate(schedule, epoch);
    const auto batches =
        BatchOrder(train, epoch, schedule.seed, schedule.batch_size);
    double loss_sum = 0.0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      for (std::size_t k = 0; k < params.size(); ++k) {
        point[k] = params[k] + schedule.momentum * velocity[k];
      }
      lookahead.set_parameters(point);
      const double batch_loss =
          BatchLossAndGradient(job, lookahead, train, batches[b], &grad);
      loss_sum += batch_loss * static_cast<double>(batches[b].size());
      ClipGlobalNorm(&grad, schedule.clip_norm);
      SgdNesterovStep(params, velocity, grad, lr, schedule.momentum,
                      static_cast<int>(b));
    }
    result.model.set_parameters(params);

    EpochMetrics metrics;
    metrics.epoch = epoch;
    metrics.mean_train_loss = loss_sum / static_cast<double>(train.size());
    metrics.heldout_ser = heldout != nullptr && !heldout->empty()
                              ? HeldoutErrorRate(result.model, *heldout)
                              : std::numeric_limits<double>::quiet_NaN();
    metrics.lr = lr;
    result.metrics.push_back(metrics);
    result.optimizer.velocity = velocity;
    result.optimizer.completed_epochs = epoch;

    if (!job.checkpoint_dir.empty()) {
      result.model.Save(EpochPath(job.checkpoint_dir, epoch, "ckpt"));
      SaveOptimizerState(result.optimizer,
                         EpochPath(job.checkpoint_dir, epoch, "state"));
    }
  }
  if (result.optimizer.velocity.empty()) result.optimizer.velocity = velocity;
  return result;
}

void SaveOptimizerState(const OptimizerState& state, const std::string& path) {
  io::Writer out(path);
  out.Bytes({kStateMagic, 4});
  out.U32(kStateVersion);
  out.U32(static_cast<std::uint32_t>(state.completed_epochs));
  out.U64(state.velocity.size());
  for (double v : state.velocity) out.F64(v);
  out.Close();
}

OptimizerState LoadOptimizerState(const std::string& path) {
  io::Reader in(path);
  if (in.Bytes(4) != std::string_view(kStateMagic, 4)) in.Fail("bad magic");
  if (in.U32() != kStateVersion) in.Fail("unsupported state version");
  OptimizerState state;
  state.completed_epochs = static_cast<int>(in.U32());
  const std::uint64_t count = in.U64();
  if (count > (1ULL << 32)) in.Fail("implausible velocity size");
  state.velocity.resize(count);
  for (double& v : state.velocity) v = in.F64();
  in.ExpectEnd();
  return state;
}

std::string FormatMetricsCsv(const std::vector<EpochMetrics>& metrics) {
  std::string out = "epoch,mean_train_loss,heldout_ser,lr\n";
  for (const EpochMetrics& m : metrics) {
    out += std::to_string(m.epoch) + "," + Format17(m.mean_train_loss) + "," +
           Format17(m.heldout_ser) + "," + Format17(m.lr) + "\n";
  }
  return out;
}

void WriteMetricsCsv(const std::vector<EpochMetrics>& metrics,
                     const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path);
  out << FormatMetricsCsv(metrics);
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

KeyValueConfig KeyValueConfig::FromFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return FromString(buffer.str());
  } catch (const Error& e) {
    throw Error(ErrorCode::kParseError, path + ":" + e.what());
  }
}

KeyValueConfig KeyValueConfig::FromString(std::string_view text) {
  KeyValueConfig config;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string trimmed = Trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kParseError,
                  std::to_string(number) + ": expected key=value");
    }
    const std::string key = Trim(std::string_view(trimmed).substr(0, eq));
    if (key.empty()) {
      throw Error(ErrorCode::kParseError,
                  std::to_string(number) + ": empty key");
    }
    config.Set(key, Trim(std::string_view(trimmed).substr(eq + 1)));
  }
  return config;
}

void KeyValueConfig::Set(const std::string& key, const std::string& value) {
  values_[key] = value;
  taken_.erase(key);
}

std::optional<std::string> KeyValueConfig::Take(const std::string& key) {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  taken_.insert(key);
  return it->second;
}

std::vector<std::string> KeyValueConfig::Unused() const {
  std::vector<std::string> unused;
  for (const auto& [key, value] : values_) {
    if (taken_.count(key) == 0) unused.push_back(key);
  }
  return unused;
}

void ApplyScheduleConfig(KeyValueConfig& config, TrainingSchedule* schedule) {
  if (auto v = config.Take("epochs")) {
    schedule->epochs = static_cast<int>(ParseInteger("epochs", *v));
  }
  if (auto v = config.Take("lr_initial")) {
    schedule->lr_initial = ParseDouble("lr_initial", *v);
  }
  if (auto v = config.Take("momentum")) {
    schedule->momentum = ParseDouble("momentum", *v);
  }
  if (auto v = config.Take("anneal_factor")) {
    schedule->anneal_factor = ParseDouble("anneal_factor", *v);
  }
  if (auto v = config.Take("anneal_start_epoch")) {
    schedule->anneal_start_epoch =
        static_cast<int>(ParseInteger("anneal_start_epoch", *v));
  }
  if (auto v = config.Take("batch_size")) {
    schedule->batch_size = static_cast<int>(ParseInteger("batch_size", *v));
  }
  if (auto v = config.Take("seed")) {
    schedule->seed = static_cast<std::uint64_t>(ParseInteger("seed", *v));
  }
  if (auto v = config.Take("clip_norm")) {
    schedule->clip_norm = ParseDouble("clip_norm", *v);
  }
}

}  // namespace ctcg
