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


// Acceptance suite: one PASS/FAIL line per criterion. Exit status is 0 only
// when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "ctcg/analysis.h"
#include "ctcg/ctc.h"
#include "ctcg/data.h"
#include "ctcg/ensemble.h"
#include "ctcg/guided.h"
#include "ctcg/seqmodel.h"
#include "ctcg/trainer.h"
#include "test_util.h"

namespace ctcg {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using testing::GradientCheck;
using testing::RandomGrid;
using testing::RandomLogits;
using testing::RandomTarget;

struct Options {
  std::string criteria = "1,2,3,4,5,6,7,8,9";
  std::string report;
  std::string scratch = (fs::temp_directory_path() / "ctcg_acceptance").string();
  int groups = 5;
  int distill_seeds = 3;
  int epochs = 20;
  int hidden_dim = 32;
  double prototype_scale = 0.15;
  double guide_weight = 4.0;
  int threads = 1;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(const char* format, double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), format, value);
  return buffer;
}

double Median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// 1. Forward-backward against enumeration.
Outcome CtcOracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20260101);
  std::uniform_int_distribution<int> frames_dist(1, 8);
  std::uniform_int_distribution<int> labels_dist(1, 3);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int frames = frames_dist(rng);
    const int labels = labels_dist(rng);
    const PosteriorGrid grid = RandomGrid(rng, frames, labels + 1);
    const TargetSequence target = RandomTarget(rng, labels, 4, frames);
    worst = std::max(worst, std::abs(CtcLoss(grid, target).loss -
                                     CtcLossBruteforce(grid, target)));
  }
  const double elapsed = Seconds(start);
  return {worst <= 1e-8 && elapsed < 60.0,
          "max |forward-backward - brute force| " + Fmt("%.2e", worst) +
              " over 1000 instances in " + Fmt("%.1f", elapsed) + " s"};
}

// 2. Finite-difference gradient checks.
Outcome Gradients() {
  std::mt19937_64 rng(20260102);
  std::uniform_int_distribution<int> frames_dist(1, 6);
  std::uniform_int_distribution<int> labels_dist(1, 3);
  struct Tally {
    const char* name;
    int failed_instances = 0;
    double worst = 0.0;
    void Add(const GradientCheck& c) {
      if (c.failed > 0) ++failed_instances;
      worst = std::max(worst, c.max_relative_error);
    }
  };
  Tally ctc{"ctc"}, linear{"guide-linear"}, log{"guide-log"}, kd{"kd"},
      guided{"guided-ctc"}, model{"guided-ctc via model"};
  for (int i = 0; i < 100; ++i) {
    const int frames = frames_dist(rng);
    const int labels = labels_dist(rng);
    const int symbols = labels + 1;
    const Matrix logits = RandomLogits(rng, frames, symbols);
    const TargetSequence target = RandomTarget(rng, labels, 4, frames);
    const SpikeMask mask = BuildMask(RandomGrid(rng, frames, symbols, 0.7));
    const PosteriorGrid teacher = RandomGrid(rng, frames, symbols);
    const GuidedLossConfig config{0.5 + i % 3, i % 2 == 0
                                                  ? GuideVariant::kLinear
                                                  : GuideVariant::kLogarithmic};
    ctc.Add(testing::CheckGridLossViaLogits(
        logits, [&](const PosteriorGrid& g) { return CtcLoss(g, target); }));
    linear.Add(testing::CheckGridLossViaLogits(
        logits, [&](const PosteriorGrid& g) {
          return GuideLoss(g, mask, GuideVariant::kLinear);
        }));
    log.Add(testing::CheckGridLossViaLogits(
        logits, [&](const PosteriorGrid& g) {
          return GuideLoss(g, mask, GuideVariant::kLogarithmic);
        }));
    kd.Add(testing::CheckGridLossViaLogits(
        logits,
        [&](const PosteriorGrid& g) { return KdFrameLoss(teacher, g); }));
    guided.Add(testing::CheckGridLossViaLogits(
        logits, [&](const PosteriorGrid& g) {
          return GuidedCtcLoss(g, target, mask, config);
        }));

    // The same composite loss pulled back to the parameters of a small LSTM.
    const ModelConfig mc{3, 3, 1 + i % 2,
                         i % 3 == 0 ? Direction::kBidirectional
                                    : Direction::kUnidirectional,
                         symbols, static_cast<std::uint64_t>(i + 1)};
    const SequenceModel net = SequenceModel::Init(mc);
    Matrix features = RandomLogits(rng, frames, 3, 1.0);
    ForwardTrace trace;
    const PosteriorGrid out = net.Forward(features, &trace);
    const std::vector<double> analytic =
        net.Backward(trace, GuidedCtcLoss(out, target, mask, config).grad);
    const std::vector<double> numeric = testing::NumericGradient(
        [&](const std::vector<double>& p) {
          return GuidedCtcLoss(SequenceModel(mc, p).Forward(features), target,
                               mask, config)
              .loss;
        },
        net.parameters());
    model.Add(testing::CompareGradients(analytic, numeric, 1e-4));
  }
  bool pass = true;
  std::string detail;
  for (const Tally* t : {&ctc, &linear, &log, &kd, &guided, &model}) {
    pass = pass && t->failed_instances == 0 && t->worst < 1e-4;
    if (!detail.empty()) detail += ", ";
    detail += std::string(t->name) + " " + Fmt("%.1e", t->worst);
  }
  return {pass, "max relative error over 100 instances each: " + detail};
}

// 3. Mask and guide-loss algebra.
Outcome MaskAlgebra() {
  std::mt19937_64 rng(20260103);
  std::uniform_int_distribution<int> frames_dist(1, 10);
  std::uniform_int_distribution<int> labels_dist(1, 5);
  int bit_mismatch = 0;
  int empty_nonzero = 0;
  int out_of_range = 0;
  for (int i = 0; i < 1000; ++i) {
    const int frames = frames_dist(rng);
    const int labels = labels_dist(rng);
    const PosteriorGrid grid = RandomGrid(rng, frames, labels + 1, 3.0);
    const TargetSequence target = RandomTarget(rng, labels, 4, frames);
    const SpikeMask mask = BuildMask(RandomGrid(rng, frames, labels + 1, 3.0));
    const GuideVariant variant =
        i % 2 == 0 ? GuideVariant::kLinear : GuideVariant::kLogarithmic;

    const LossAndGrad ctc = CtcLoss(grid, target);
    const LossAndGrad off = GuidedCtcLoss(grid, target, mask, {0.0, variant});
    if (off.loss != ctc.loss || off.grad != ctc.grad) ++bit_mismatch;

    const SpikeMask empty(frames, labels + 1);
    const LossAndGrad zero = GuideLoss(grid, empty, variant);
    if (zero.loss != 0.0 || !zero.grad.isZero(0.0)) ++empty_nonzero;

    const double linear = GuideLoss(grid, mask, GuideVariant::kLinear).loss;
    if (linear > 0.0 || linear < -frames) ++out_of_range;
  }
  return {bit_mismatch == 0 && empty_nonzero == 0 && out_of_range == 0,
          "over 1000 grids: weight-0 mismatches " +
              std::to_string(bit_mismatch) + ", empty-mask nonzero " +
              std::to_string(empty_nonzero) + ", linear loss outside [-T, 0] " +
              std::to_string(out_of_range)};
}

// Shared state of the trend experiments (criteria 4 to 7).
struct TrendTask {
  Dataset train;
  Dataset heldout;
};

TrendTask MakeTrendTask(const Options& options) {
  SyntheticTaskSpec spec;
  spec.prototype_scale = options.prototype_scale;
  spec.seed = 1;
  return {GenerateSynthetic(spec, 2000, 0), GenerateSynthetic(spec, 200, 2000)};
}

struct ModelSpec {
  std::uint64_t seed = 0;
  Direction direction = Direction::kUnidirectional;
  LossMode mode = LossMode::kCtc;
  const MaskStore* masks = nullptr;
  const TeacherStore* teacher = nullptr;
};

SequenceModel TrainModel(const Options& options, const Dataset& train,
                         const ModelSpec& spec) {
  TrainingJob job;
  job.model = SequenceModel::Init({train.input_dim(), options.hidden_dim, 1,
                                   spec.direction,
                                   train.alphabet().num_outputs(), spec.seed});
  job.schedule.epochs = options.epochs;
  job.schedule.seed = spec.seed * 7 + 3;
  job.loss_mode = spec.mode;
  job.masks = spec.masks;
  job.teacher = spec.teacher;
  job.guided.guide_weight = options.guide_weight;
  job.num_threads = options.threads;
  return RunTraining(job, train, nullptr).model;
}

double Ser(std::span<const SequenceModel> models, const Dataset& data) {
  std::vector<TargetSequence> hypotheses;
  std::vector<TargetSequence> references;
  const FusionWeights weights = FusionWeights::Uniform(models.size());
  for (const Utterance& u : data.utterances()) {
    hypotheses.push_back(
        GreedyDecode(FusedPosteriors(models, weights, u.features)));
    references.push_back(u.target);
  }
  return SequenceErrorRate(hypotheses, references);
}

struct Group {
  std::vector<SequenceModel> plain;
  SequenceModel guiding;
  std::vector<SequenceModel> guided;

  std::vector<double> plain_ser;
  std::vector<double> guided_ser;
  double plain_fusion = 0.0;
  double guided_fusion = 0.0;
  double cov_plain = 0.0;
  double cov_guided = 0.0;
  double cov_guiding = 0.0;
};

// Four non-guided models, one guiding model and four guided models.
Group TrainGroup(const Options& options, const TrendTask& task, int g) {
  const std::uint64_t base = 1000ULL * g;
  Group group;
  for (int i = 0; i < 4; ++i) {
    group.plain.push_back(TrainModel(options, task.train, {base + 10 + i}));
  }
  group.guiding = TrainModel(options, task.train, {base + 99});
  const MaskStore masks = PrecomputeMasks(group.guiding, task.train);
  for (int i = 0; i < 4; ++i) {
    group.guided.push_back(TrainModel(
        options, task.train,
        {base + 50 + i, Direction::kUnidirectional, LossMode::kGuided, &masks}));
  }

  const Dataset& held = task.heldout;
  for (int i = 0; i < 4; ++i) {
    group.plain_ser.push_back(Ser({&group.plain[i], 1}, held));
    group.guided_ser.push_back(Ser({&group.guided[i], 1}, held));
  }
  group.plain_fusion = Ser(group.plain, held);
  group.guided_fusion = Ser(group.guided, held);

  const auto spikes = [&](const SequenceModel& m) {
    return ExtractSpikes(m, held, held.alphabet());
  };
  const SpikeSet guiding = spikes(group.guiding);
  const SpikeSet g0 = spikes(group.guided[0]);
  group.cov_plain =
      CoverageRatio(spikes(group.plain[0]), spikes(group.plain[1]));
  group.cov_guided = CoverageRatio(g0, spikes(group.guided[1]));
  group.cov_guiding = CoverageRatio(guiding, g0);
  return group;
}

// 4. Coverage ordering.
Outcome CoverageTrend(const std::vector<Group>& groups) {
  std::vector<double> plain, guided, guiding;
  for (const Group& g : groups) {
    plain.push_back(g.cov_plain);
    guided.push_back(g.cov_guided);
    guiding.push_back(g.cov_guiding);
  }
  const double p = Median(plain), q = Median(guided), r = Median(guiding);
  return {r >= q && q > p && q - p >= 10.0,
          "median coverage guiding->guided " + Fmt("%.1f", r) +
              ", guided pair " + Fmt("%.1f", q) + ", non-guided pair " +
              Fmt("%.1f", p) + " (gap " + Fmt("%.1f", q - p) + " points)"};
}

// 5. Posterior fusion helps guided models only.
Outcome FusionTrend(const std::vector<Group>& groups) {
  std::vector<double> gf, gmin, pf, pmean;
  for (const Group& g : groups) {
    gf.push_back(g.guided_fusion);
    gmin.push_back(*std::min_element(g.guided_ser.begin(), g.guided_ser.end()));
    pf.push_back(g.plain_fusion);
    double sum = 0.0;
    for (double s : g.plain_ser) sum += s;
    pmean.push_back(sum / g.plain_ser.size());
  }
  const double a = Median(gf), b = Median(gmin), c = Median(pf),
               d = Median(pmean);
  return {a < b && c >= d - 0.5,
          "median SER guided fusion " + Fmt("%.2f", a) + " vs best single " +
              Fmt("%.2f", b) + "; non-guided fusion " + Fmt("%.2f", c) +
              " vs mean single " + Fmt("%.2f", d)};
}

// 6. Guided training does not hurt, and usually helps.
Outcome GuidedGain(const std::vector<Group>& groups) {
  std::vector<double> plain, guided;
  for (const Group& g : groups) {
    plain.insert(plain.end(), g.plain_ser.begin(), g.plain_ser.end());
    guided.insert(guided.end(), g.guided_ser.begin(), g.guided_ser.end());
  }
  const double p = Median(plain), q = Median(guided);
  return {q <= p, "median held-out SER guided " + Fmt("%.2f", q) +
                      " vs non-guided " + Fmt("%.2f", p) + " over " +
                      std::to_string(plain.size()) + " seed pairs"};
}

struct DistillRun {
  double naive = 0.0;
  double guided = 0.0;
};

// 7. Bi teacher to uni student, with and without a uni guiding model.
DistillRun TrainDistill(const Options& options, const TrendTask& task,
                        const SequenceModel& guiding, int g) {
  const std::uint64_t base = 1000ULL * g;
  const MaskStore masks = PrecomputeMasks(guiding, task.train);
  const std::vector<SequenceModel> plain_teacher{TrainModel(
      options, task.train, {base + 200, Direction::kBidirectional})};
  const std::vector<SequenceModel> guided_teacher{
      TrainModel(options, task.train,
                 {base + 201, Direction::kBidirectional, LossMode::kGuided,
                  &masks})};
  const FusionWeights one = FusionWeights::Uniform(1);
  const TeacherStore naive_posteriors =
      PrecomputeTeacher(plain_teacher, one, task.train);
  const TeacherStore guided_posteriors =
      PrecomputeTeacher(guided_teacher, one, task.train);
  const SequenceModel naive = TrainModel(
      options, task.train,
      {base + 300, Direction::kUnidirectional, LossMode::kDistill, nullptr,
       &naive_posteriors});
  const SequenceModel guided = TrainModel(
      options, task.train,
      {base + 300, Direction::kUnidirectional, LossMode::kDistill, nullptr,
       &guided_posteriors});
  return {Ser({&naive, 1}, task.heldout), Ser({&guided, 1}, task.heldout)};
}

Outcome DistillTrend(const std::vector<DistillRun>& runs) {
  std::vector<double> naive, guided;
  for (const DistillRun& r : runs) {
    naive.push_back(r.naive);
    guided.push_back(r.guided);
  }
  const double a = Median(naive), b = Median(guided);
  return {b < a, "median student SER from guided bi teacher " +
                     Fmt("%.2f", b) + " vs naive bi teacher " +
                     Fmt("%.2f", a) + " over " +
                     std::to_string(runs.size()) + " seeds"};
}

// 8. Byte-identical metrics logs on re-runs, for every loss mode and for
// different thread counts.
Outcome Determinism(const Options& options) {
  SyntheticTaskSpec spec;
  spec.seed = 8;
  const Dataset train = GenerateSynthetic(spec, 120);
  const Dataset heldout = GenerateSynthetic(spec, 30, 120);
  const ModelConfig config{8, 8, 1, Direction::kBidirectional, 7, 17};
  const SequenceModel guiding = SequenceModel::Init(config);
  const MaskStore masks = PrecomputeMasks(guiding, train);
  const std::vector<SequenceModel> teachers{guiding};
  const TeacherStore teacher =
      PrecomputeTeacher(teachers, FusionWeights::Uniform(1), train);

  const fs::path dir = fs::path(options.scratch) / "determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  int mismatches = 0;
  int runs = 0;
  for (LossMode mode : {LossMode::kCtc, LossMode::kGuided, LossMode::kDistill}) {
    std::vector<std::string> bytes;
    for (int threads : {1, 1, 3}) {
      TrainingJob job;
      job.model = SequenceModel::Init(config);
      job.schedule.epochs = 3;
      job.schedule.batch_size = 8;
      job.loss_mode = mode;
      job.masks = &masks;
      job.teacher = &teacher;
      job.num_threads = threads;
      const fs::path path =
          dir / ("metrics_" + std::string(LossModeName(mode)) + "_" +
                 std::to_string(runs++) + ".csv");
      WriteMetricsCsv(RunTraining(job, train, &heldout).metrics, path.string());
      std::ifstream in(path, std::ios::binary);
      bytes.emplace_back(std::istreambuf_iterator<char>(in),
                         std::istreambuf_iterator<char>());
    }
    for (std::size_t i = 1; i < bytes.size(); ++i) {
      if (bytes[i] != bytes[0]) ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(runs) +
                               " runs over ctc, guided and distill modes, "
                               "byte mismatches " +
                               std::to_string(mismatches)};
}

// 9. Save/load round trips.
Outcome RoundTrips(const Options& options) {
  const fs::path dir = fs::path(options.scratch) / "roundtrip";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::vector<std::string> failed;

  SyntheticTaskSpec spec;
  spec.seed = 9;
  const Dataset data = GenerateSynthetic(spec, 40);
  data.Save((dir / "data.ds").string());
  if (!(Dataset::Load((dir / "data.ds").string()) == data)) {
    failed.push_back("dataset");
  }

  for (Direction d : {Direction::kUnidirectional, Direction::kBidirectional}) {
    const SequenceModel model = SequenceModel::Init({8, 7, 2, d, 7, 23});
    const std::string path = (dir / "model.ckpt").string();
    model.Save(path);
    const SequenceModel back = SequenceModel::Load(path);
    if (!(back.config() == model.config()) ||
        back.parameters() != model.parameters() ||
        !(back.Forward(data[0].features) == model.Forward(data[0].features))) {
      failed.push_back(std::string("checkpoint ") +
                       std::string(DirectionName(d)));
    }
  }

  const SequenceModel model =
      SequenceModel::Init({8, 6, 1, Direction::kUnidirectional, 7, 5});
  const MaskStore masks = PrecomputeMasks(model, data);
  masks.Save((dir / "masks.bin").string());
  if (!(MaskStore::Load((dir / "masks.bin").string()) == masks)) {
    failed.push_back("mask cache");
  }

  int csv_bad = 0;
  for (const Utterance& u : data.utterances()) {
    const PosteriorGrid grid = model.Forward(u.features);
    const std::string path = (dir / "post.csv").string();
    WritePosteriorCsv(grid, path);
    if (!(ReadPosteriorCsv(path) == grid)) ++csv_bad;
  }
  if (csv_bad > 0) failed.push_back("posterior csv");

  std::string detail = "dataset, uni/bi checkpoints, mask cache, 40 posterior "
                       "CSVs";
  if (!failed.empty()) {
    detail += "; failed:";
    for (const auto& f : failed) detail += " " + f;
  } else {
    detail += " bit-exact";
  }
  return {failed.empty(), detail};
}

void Report(int number, const char* title, const Outcome& outcome,
            bool* all_pass) {
  std::printf("criterion %d %s: %s: %s\n", number,
              outcome.pass ? "PASS" : "FAIL", title, outcome.detail.c_str());
  std::fflush(stdout);
  *all_pass = *all_pass && outcome.pass;
}

void WriteTrendReport(const std::string& path, const Options& options,
                      const std::vector<Group>& groups,
                      const std::vector<DistillRun>& distill) {
  std::ofstream out(path);
  out << "# Trend experiment details\n\n"
      << "prototype_scale " << options.prototype_scale << ", hidden_dim "
      << options.hidden_dim << ", epochs " << options.epochs
      << ", guide_weight " << options.guide_weight << "\n\n"
      << "| group | non-guided SER | guided SER | fusion non-guided | "
         "fusion guided | cov non-guided | cov guided | cov guiding |\n"
      << "|---|---|---|---|---|---|---|---|\n";
  const auto join = [](const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : " ") + Fmt("%.2f", x);
    return s;
  };
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const Group& r = groups[g];
    out << "| " << g << " | " << join(r.plain_ser) << " | "
        << join(r.guided_ser) << " | " << Fmt("%.2f", r.plain_fusion)
        << " | " << Fmt("%.2f", r.guided_fusion) << " | "
        << Fmt("%.1f", r.cov_plain) << " | " << Fmt("%.1f", r.cov_guided)
        << " | " << Fmt("%.1f", r.cov_guiding) << " |\n";
  }
  out << "\n| seed | student from naive bi teacher | student from guided bi "
         "teacher |\n|---|---|---|\n";
  for (std::size_t s = 0; s < distill.size(); ++s) {
    out << "| " << s << " | " << Fmt("%.2f", distill[s].naive) << " | "
        << Fmt("%.2f", distill[s].guided) << " |\n";
  }
}

int Main(int argc, char** argv) {
  Options options;
  CLI::App app{"ctcg acceptance suite"};
  app.option_defaults()->always_capture_default();
  app.add_option("--criteria", options.criteria,
                 "Comma-separated criterion numbers to run");
  app.add_option("--report", options.report,
                 "Markdown file for the trend experiment details");
  app.add_option("--scratch", options.scratch, "Scratch directory");
  app.add_option("--groups", options.groups, "Seed groups for criteria 4-6");
  app.add_option("--distill-seeds", options.distill_seeds,
                 "Seeds for criterion 7");
  app.add_option("--epochs", options.epochs, "Epochs per trend model");
  app.add_option("--hidden-dim", options.hidden_dim, "LSTM cells");
  app.add_option("--prototype-scale", options.prototype_scale,
                 "Prototype spread of the trend task");
  app.add_option("--guide-weight", options.guide_weight,
                 "Guide loss weight of the trend experiments");
  CLI11_PARSE(app, argc, argv);
  if (const char* env = std::getenv("CTCG_THREADS")) {
    options.threads = std::max(1, std::atoi(env));
  } else {
    options.threads = std::max(1u, std::thread::hardware_concurrency());
  }

  std::set<int> selected;
  {
    std::stringstream in(options.criteria);
    std::string item;
    while (std::getline(in, item, ',')) selected.insert(std::stoi(item));
  }
  const auto want = [&](int n) { return selected.count(n) > 0; };

  bool all_pass = true;
  if (want(1)) Report(1, "CTC oracle equivalence", CtcOracle(), &all_pass);
  if (want(2)) Report(2, "gradient correctness", Gradients(), &all_pass);
  if (want(3)) Report(3, "mask and guide-loss algebra", MaskAlgebra(), &all_pass);

  const bool trends = want(4) || want(5) || want(6) || want(7);
  std::vector<Group> groups;
  std::vector<DistillRun> distill;
  if (trends) {
    const auto start = Clock::now();
    const TrendTask task = MakeTrendTask(options);
    const int needed = std::max(options.groups,
                                want(7) ? options.distill_seeds : 0);
    for (int g = 0; g < needed; ++g) {
      groups.push_back(TrainGroup(options, task, g));
    }
    if (want(7)) {
      for (int s = 0; s < options.distill_seeds; ++s) {
        distill.push_back(TrainDistill(options, task, groups[s].guiding, s));
      }
    }
    groups.resize(options.groups);
    std::printf("trend experiments trained in %.0f s\n", Seconds(start));
  }
  if (want(4)) Report(4, "coverage ordering", CoverageTrend(groups), &all_pass);
  if (want(5)) Report(5, "fusion trend", FusionTrend(groups), &all_pass);
  if (want(6)) Report(6, "guided-training gain", GuidedGain(groups), &all_pass);
  if (want(7)) {
    Report(7, "bi to uni distillation", DistillTrend(distill), &all_pass);
  }
  if (want(8)) Report(8, "determinism", Determinism(options), &all_pass);
  if (want(9)) Report(9, "round trips", RoundTrips(options), &all_pass);
  if (trends && !options.report.empty()) {
    WriteTrendReport(options.report, options, groups, distill);
  }
  return all_pass ? 0 : 1;
}

}  // namespace
}  // namespace ctcg

int main(int argc, char** argv) { return ctcg::Main(argc, argv); }
