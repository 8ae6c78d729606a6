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

// ctcg command-line front end. Usage errors exit 2, data and model errors
// exit 1.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "ctcg/alphabet.h"
#include "ctcg/analysis.h"
#include "ctcg/ctc.h"
#include "ctcg/data.h"
#include "ctcg/ensemble.h"
#include "ctcg/error.h"
#include "ctcg/guided.h"
#include "ctcg/seqmodel.h"
#include "ctcg/trainer.h"

namespace ctcg {
namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int ThreadCount() {
  if (const char* env = std::getenv("CTCG_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1) {
      throw UsageError("CTCG_THREADS must be a positive integer");
    }
    return static_cast<int>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double ParseReal(const std::string& name, const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw UsageError(name + ": not a number: '" + text + "'");
  }
  return value;
}

int ParseInt(const std::string& name, const std::string& text) {
  std::size_t used = 0;
  long value = 0;
  try {
    value = std::stol(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw UsageError(name + ": not an integer: '" + text + "'");
  }
  return static_cast<int>(value);
}

FusionWeights ParseWeights(const std::string& text, int members) {
  try {
    if (text.empty()) return FusionWeights::Uniform(members);
    std::vector<double> weights;
    for (const std::string& w : SplitList(text)) {
      weights.push_back(ParseReal("--weights", w));
    }
    if (static_cast<int>(weights.size()) != members) {
      throw UsageError(std::to_string(weights.size()) + " weights for " +
                       std::to_string(members) + " models");
    }
    return FusionWeights(std::move(weights));
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

std::vector<SequenceModel> LoadModels(const std::string& list) {
  std::vector<SequenceModel> models;
  for (const std::string& path : SplitList(list)) {
    models.push_back(SequenceModel::Load(path));
  }
  if (models.empty()) throw UsageError("no models given");
  return models;
}

std::string FormatPercent(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.4f", value);
  return buffer;
}

// Keys settable both from --config and from flags; flags win.
struct Knob {
  const char* key;
  const char* type;
  const char* fallback;
  const char* help;
};

constexpr Knob kScheduleKnobs[] = {
    {"epochs", "INT", "20", "Training epochs"},
    {"lr_initial", "FLOAT", "0.03", "Initial learning rate"},
    {"momentum", "FLOAT", "0.9", "Nesterov momentum"},
    {"anneal_factor", "FLOAT", "0.7071067811865476", "Per-epoch annealing factor"},
    {"anneal_start_epoch", "INT", "11", "First annealed epoch"},
    {"batch_size", "INT", "16", "Utterances per batch"},
    {"seed", "UINT", "1", "Seed for initialization and batch order"},
    {"clip_norm", "FLOAT", "5", "Global gradient-norm clip, <= 0 disables"},
    {"hidden_dim", "INT", "32", "LSTM cells per direction"},
    {"num_layers", "INT", "1", "Stacked LSTM layers"},
    {"direction", "TEXT", "uni", "uni or bi"},
};
constexpr Knob kGuidedKnobs[] = {
    {"guide_weight", "FLOAT", "1", "Weight of the guide loss"},
    {"guide_variant", "TEXT", "linear", "linear or logarithmic"},
};
constexpr Knob kDistillKnobs[] = {
    {"kd_weight", "FLOAT", "1", "1 is pure KL, 0 is plain CTC"},
};

struct TrainFlags {
  std::string config_path;
  std::string data;
  std::string heldout;
  std::string out;
  std::string init_from;
  int resume_epoch = 0;
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> knobs;

  // Training-specific inputs.
  std::string guiding_model;
  std::string mask_cache;
  std::string teachers;
  std::string weights;
  std::string teacher_cache;
};

template <std::size_t N>
void AddKnobs(CLI::App* app, TrainFlags* flags, const Knob (&knobs)[N]) {
  for (const Knob& knob : knobs) {
    std::string flag = std::string("--") + knob.key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    CLI::Option* opt =
        app->add_option(flag, flags->values[knob.key], knob.help)
            ->type_name(knob.type)
            ->default_str(knob.fallback);
    flags->knobs.emplace_back(knob.key, opt);
  }
}

void AddTrainFlags(CLI::App* app, TrainFlags* flags) {
  app->add_option("--config", flags->config_path,
                   "key=value file; flags override its entries");
  app->add_option("--data", flags->data, "Training dataset")->required();
  app->add_option("--heldout", flags->heldout, "Held-out dataset for SER");
  app->add_option("--out", flags->out,
                  "Output directory for model.ckpt, metrics.csv and "
                  "checkpoints/")
      ->required();
  app->add_option("--init-from", flags->init_from,
                  "Warm-start the encoder from this checkpoint");
  app->add_option("--resume-epoch", flags->resume_epoch,
                  "Resume from checkpoints/epoch_NNN in --out")
      ->capture_default_str();
  AddKnobs(app, flags, kScheduleKnobs);
}

struct Resolved {
  TrainingSchedule schedule;
  int hidden_dim = 32;
  int num_layers = 1;
  Direction direction = Direction::kUnidirectional;
  GuidedLossConfig guided;
  DistillationConfig distill;
};

Resolved ResolveConfig(TrainFlags& flags) {
  try {
    KeyValueConfig config = flags.config_path.empty()
                                ? KeyValueConfig::FromString("")
                                : KeyValueConfig::FromFile(flags.config_path);
    for (const auto& [key, opt] : flags.knobs) {
      if (opt->count() > 0) config.Set(key, flags.values[key]);
    }
    Resolved r;
    ApplyScheduleConfig(config, &r.schedule);
    if (auto v = config.Take("hidden_dim")) {
      r.hidden_dim = ParseInt("hidden_dim", *v);
    }
    if (auto v = config.Take("num_layers")) {
      r.num_layers = ParseInt("num_layers", *v);
    }
    if (auto v = config.Take("direction")) r.direction = ParseDirection(*v);
    if (auto v = config.Take("guide_weight")) {
      r.guided.guide_weight = ParseReal("guide_weight", *v);
    }
    if (auto v = config.Take("guide_variant")) {
      r.guided.variant = ParseGuideVariant(*v);
    }
    if (auto v = config.Take("kd_weight")) {
      r.distill.kd_weight = ParseReal("kd_weight", *v);
    }
    const std::vector<std::string> unused = config.Unused();
    if (!unused.empty()) {
      throw UsageError("unknown config key '" + unused.front() + "'");
    }
    r.schedule.Validate();
    if (!(r.guided.guide_weight >= 0.0) ||
        !std::isfinite(r.guided.guide_weight)) {
      throw UsageError("guide_weight must be finite and >= 0");
    }
    if (!(r.distill.kd_weight >= 0.0 && r.distill.kd_weight <= 1.0)) {
      throw UsageError("kd_weight must be in [0, 1]");
    }
    return r;
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

std::string EpochFile(const fs::path& dir, int epoch, const char* ext) {
  char name[32];
  std::snprintf(name, sizeof(name), "epoch_%03d.%s", epoch, ext);
  return (dir / name).string();
}

// Keeps the first `epochs` rows of an earlier metrics file so a resumed run
// ends with the same log as an uninterrupted one.
std::string EarlierMetrics(const fs::path& path, int epochs) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::string line;
  std::string kept;
  std::getline(in, line);
  for (int i = 0; i < epochs && std::getline(in, line); ++i) {
    kept += line + "\n";
  }
  return kept;
}

int RunTrain(TrainFlags& flags, LossMode mode) {
  const Resolved r = ResolveConfig(flags);
  const Dataset train = Dataset::Load(flags.data);
  std::optional<Dataset> heldout;
  if (!flags.heldout.empty()) heldout = Dataset::Load(flags.heldout);

  ModelConfig config;
  config.input_dim = train.input_dim();
  config.hidden_dim = r.hidden_dim;
  config.num_layers = r.num_layers;
  config.direction = r.direction;
  config.output_dim = train.alphabet().num_outputs();
  config.seed = r.schedule.seed;
  try {
    config.Validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  TrainingJob job;
  job.loss_mode = mode;
  job.schedule = r.schedule;
  job.guided = r.guided;
  job.distill = r.distill;
  job.num_threads = ThreadCount();
  const fs::path out(flags.out);
  job.checkpoint_dir = (out / "checkpoints").string();

  if (!flags.init_from.empty()) {
    job.model =
        SequenceModel::WarmStart(SequenceModel::Load(flags.init_from), config);
  } else {
    job.model = SequenceModel::Init(config);
  }

  std::optional<OptimizerState> resume;
  if (flags.resume_epoch > 0) {
    job.model = SequenceModel::Load(
        EpochFile(job.checkpoint_dir, flags.resume_epoch, "ckpt"));
    if (!(job.model.config() == config)) {
      throw UsageError("checkpoint config differs from the requested model");
    }
    resume = LoadOptimizerState(
        EpochFile(job.checkpoint_dir, flags.resume_epoch, "state"));
  } else if (flags.resume_epoch < 0) {
    throw UsageError("--resume-epoch must be >= 0");
  }

  MaskStore masks;
  if (mode == LossMode::kGuided) {
    if (!flags.mask_cache.empty() && fs::exists(flags.mask_cache)) {
      masks = MaskStore::Load(flags.mask_cache);
    } else {
      masks = PrecomputeMasks(SequenceModel::Load(flags.guiding_model), train);
      if (!flags.mask_cache.empty()) masks.Save(flags.mask_cache);
    }
    job.masks = &masks;
  }
  TeacherStore teacher;
  if (mode == LossMode::kDistill) {
    if (!flags.teacher_cache.empty() && fs::exists(flags.teacher_cache)) {
      teacher = TeacherStore::Load(flags.teacher_cache);
    } else {
      const std::vector<SequenceModel> teachers = LoadModels(flags.teachers);
      teacher = PrecomputeTeacher(
          teachers, ParseWeights(flags.weights, teachers.size()), train);
      if (!flags.teacher_cache.empty()) teacher.Save(flags.teacher_cache);
    }
    job.teacher = &teacher;
  }

  const TrainingResult result =
      RunTraining(job, train, heldout ? &*heldout : nullptr,
                  resume ? &*resume : nullptr);

  fs::create_directories(out);
  std::string metrics = FormatMetricsCsv(result.metrics);
  if (resume) {
    const std::size_t header = metrics.find('\n') + 1;
    metrics.insert(header,
                   EarlierMetrics(out / "metrics.csv", flags.resume_epoch));
  }
  {
    std::ofstream file(out / "metrics.csv", std::ios::binary | std::ios::trunc);
    file << metrics;
    if (!file) throw Error(ErrorCode::kIoError, "cannot write metrics.csv");
  }
  result.model.Save((out / "model.ckpt").string());

  if (!result.metrics.empty()) {
    const EpochMetrics& last = result.metrics.back();
    std::printf("epoch %d loss %.6f", last.epoch, last.mean_train_loss);
    if (heldout) std::printf(" heldout_ser %s", FormatPercent(last.heldout_ser).c_str());
    std::printf("\n");
  }
  return 0;
}

struct GenFlags {
  SyntheticTaskSpec spec;
  std::string out;
  std::string heldout_out;
  std::string alphabet_out;
  double heldout_fraction = 0.1;
  int count = 2000;
  int first_index = 0;
};

int RunGenData(const GenFlags& flags) {
  try {
    flags.spec.Validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (flags.count < 0 || flags.first_index < 0) {
    throw UsageError("--count and --first-index must be >= 0");
  }
  const Dataset data =
      GenerateSynthetic(flags.spec, flags.count, flags.first_index);
  if (flags.heldout_out.empty()) {
    data.Save(flags.out);
  } else {
    if (!(flags.heldout_fraction >= 0.0 && flags.heldout_fraction <= 1.0)) {
      throw UsageError("--heldout-fraction must be in [0, 1]");
    }
    const auto [train, heldout] = SplitHeldout(data, flags.heldout_fraction);
    train.Save(flags.out);
    heldout.Save(flags.heldout_out);
  }
  if (!flags.alphabet_out.empty()) data.alphabet().Save(flags.alphabet_out);
  return 0;
}

double DatasetSer(std::span<const SequenceModel> models,
                  const FusionWeights& weights, const Dataset& data) {
  std::vector<TargetSequence> hypotheses;
  std::vector<TargetSequence> references;
  for (const Utterance& u : data.utterances()) {
    hypotheses.push_back(
        GreedyDecode(FusedPosteriors(models, weights, u.features)));
    references.push_back(u.target);
  }
  return SequenceErrorRate(hypotheses, references);
}

int RunDecode(const std::string& model_path, const std::string& data_path,
              const std::string& out_path) {
  const SequenceModel model = SequenceModel::Load(model_path);
  const Dataset data = Dataset::Load(data_path);
  if (model.config().output_dim != data.alphabet().num_outputs()) {
    throw Error(ErrorCode::kAlphabetMismatch,
                "model output_dim does not match the dataset alphabet");
  }
  std::ostringstream text;
  for (const Utterance& u : data.utterances()) {
    text << u.id;
    for (const std::string& s :
         data.alphabet().Render(GreedyDecode(model.Forward(u.features)))) {
      text << ' ' << s;
    }
    text << '\n';
  }
  if (out_path.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
    file << text.str();
    if (!file) throw Error(ErrorCode::kIoError, "cannot write " + out_path);
  }
  return 0;
}

int RunFuseEval(const std::string& models_list, const std::string& weights,
                const std::string& data_path) {
  const std::vector<SequenceModel> models = LoadModels(models_list);
  const FusionWeights w = ParseWeights(weights, models.size());
  const Dataset data = Dataset::Load(data_path);
  for (const SequenceModel& m : models) {
    if (m.config().output_dim != data.alphabet().num_outputs()) {
      throw Error(ErrorCode::kAlphabetMismatch,
                  "model output_dim does not match the dataset alphabet");
    }
  }
  std::printf("SER %s\n", FormatPercent(DatasetSer(models, w, data)).c_str());
  return 0;
}

struct CoverageFlags {
  std::string model_a;
  std::string model_b;
  std::string data;
  std::string ignore_symbols;
  std::string report;
  std::string pair_name = "a_vs_b";
  std::string split = "data";
  int window = 0;
  double threshold = 0.0;
  bool frame_only = false;
};

int RunCoverage(const CoverageFlags& flags) {
  if (flags.window < 0) throw UsageError("--window must be >= 0");
  if (!(flags.threshold >= 0.0 && flags.threshold <= 1.0)) {
    throw UsageError("--threshold must be in [0, 1]");
  }
  const Dataset data = Dataset::Load(flags.data);
  Alphabet alphabet = data.alphabet();
  try {
    alphabet = alphabet.WithIgnored(SplitList(flags.ignore_symbols));
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const SpikeSet a = ExtractSpikes(SequenceModel::Load(flags.model_a), data,
                                   alphabet, flags.threshold);
  const SpikeSet b = ExtractSpikes(SequenceModel::Load(flags.model_b), data,
                                   alphabet, flags.threshold);
  const double coverage =
      CoverageRatio(a, b, CoverageOptions{flags.window, !flags.frame_only});
  std::printf("coverage %s\n", FormatPercent(coverage).c_str());
  if (!flags.report.empty()) {
    WriteCoverageReport({{flags.pair_name, flags.split, coverage}},
                        flags.report);
  }
  return 0;
}

int RunDump(const std::string& model_path, const std::string& data_path,
            const std::string& id, const std::string& out) {
  const SequenceModel model = SequenceModel::Load(model_path);
  const Dataset data = Dataset::Load(data_path);
  DumpPosteriors(model, data.Find(id).features, out);
  return 0;
}

int RunExportMasks(const std::string& model_path, const std::string& data_path,
                   const std::string& out, const std::string& csv) {
  const Dataset data = Dataset::Load(data_path);
  const MaskStore masks =
      PrecomputeMasks(SequenceModel::Load(model_path), data);
  masks.Save(out);
  if (!csv.empty()) masks.ExportCsv(csv, data.alphabet().symbols());
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"Guided CTC training and analysis toolkit"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  GenFlags gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic dataset");
  gen_cmd->add_option("--out", gen.out, "Dataset file to write")->required();
  gen_cmd->add_option("--heldout-out", gen.heldout_out,
                      "Also split off a held-out file by id hash");
  gen_cmd->add_option("--heldout-fraction", gen.heldout_fraction,
                      "Share routed to --heldout-out");
  gen_cmd->add_option("--alphabet-out", gen.alphabet_out,
                      "Write the alphabet, one symbol per line");
  gen_cmd->add_option("--count", gen.count, "Utterances to generate");
  gen_cmd->add_option("--first-index", gen.first_index,
                      "Index of the first utterance");
  gen_cmd->add_option("--seed", gen.spec.seed, "Generator seed");
  gen_cmd->add_option("--alphabet-size", gen.spec.alphabet_size,
                      "Non-blank symbols");
  gen_cmd->add_option("--input-dim", gen.spec.input_dim, "Feature dimension");
  gen_cmd->add_option("--min-symbols", gen.spec.min_symbols,
                      "Shortest target");
  gen_cmd->add_option("--max-symbols", gen.spec.max_symbols,
                      "Longest target");
  gen_cmd->add_option("--min-segment-frames", gen.spec.min_segment_frames,
                      "Shortest symbol segment");
  gen_cmd->add_option("--max-segment-frames", gen.spec.max_segment_frames,
                      "Longest symbol segment");
  gen_cmd->add_option("--noise-stddev", gen.spec.noise_stddev,
                      "Per-frame Gaussian noise");
  gen_cmd->add_option("--prototype-scale", gen.spec.prototype_scale,
                      "Standard deviation of the symbol prototypes");
  gen_cmd->add_flag("--allow-repeats", gen.spec.allow_repeats,
                    "Allow the same symbol twice in a row");

  TrainFlags train;
  CLI::App* train_cmd = app.add_subcommand("train", "Plain CTC training");
  AddTrainFlags(train_cmd, &train);

  TrainFlags guided;
  CLI::App* guided_cmd =
      app.add_subcommand("train-guided", "CTC training guided by a frozen model");
  AddTrainFlags(guided_cmd, &guided);
  AddKnobs(guided_cmd, &guided, kGuidedKnobs);
  guided_cmd->add_option("--guiding-model", guided.guiding_model,
                         "Frozen guiding checkpoint")
      ->required();
  guided_cmd->add_option("--mask-cache", guided.mask_cache,
                         "Mask file, read if present, else written");

  TrainFlags distill;
  CLI::App* distill_cmd = app.add_subcommand(
      "distill", "Train a student on fused teacher posteriors");
  AddTrainFlags(distill_cmd, &distill);
  AddKnobs(distill_cmd, &distill, kDistillKnobs);
  distill_cmd->add_option("--teachers", distill.teachers,
                          "Comma-separated teacher checkpoints");
  distill_cmd->add_option("--weights", distill.weights,
                          "Comma-separated fusion weights (default uniform)");
  distill_cmd->add_option("--teacher-cache", distill.teacher_cache,
                          "Teacher file, read if present, else written");

  std::string model_path, data_path, out_path, models_list, weights, utt_id;
  CLI::App* decode_cmd =
      app.add_subcommand("decode", "Greedy decode every utterance");
  decode_cmd->add_option("--model", model_path, "Checkpoint")->required();
  decode_cmd->add_option("--data", data_path, "Dataset")->required();
  decode_cmd->add_option("--out", out_path, "Output file (default stdout)");

  CLI::App* eval_cmd = app.add_subcommand("eval", "Report SER of one model");
  eval_cmd->add_option("--model", model_path, "Checkpoint")->required();
  eval_cmd->add_option("--data", data_path, "Dataset")->required();

  CLI::App* fuse_cmd =
      app.add_subcommand("fuse-eval", "Report SER of fused posteriors");
  fuse_cmd->add_option("--models", models_list, "Comma-separated checkpoints")
      ->required();
  fuse_cmd->add_option("--weights", weights,
                       "Comma-separated weights (default uniform)");
  fuse_cmd->add_option("--data", data_path, "Dataset")->required();

  CoverageFlags coverage;
  CLI::App* cov_cmd = app.add_subcommand(
      "analyze-coverage", "Share of model A's spikes covered by model B");
  cov_cmd->add_option("--model-a", coverage.model_a, "Checkpoint A")
      ->required();
  cov_cmd->add_option("--model-b", coverage.model_b, "Checkpoint B")
      ->required();
  cov_cmd->add_option("--data", coverage.data, "Dataset")->required();
  cov_cmd->add_option("--ignore-symbols", coverage.ignore_symbols,
                      "Comma-separated symbols that never spike");
  cov_cmd->add_option("--window", coverage.window, "Frame tolerance");
  cov_cmd->add_option("--threshold", coverage.threshold,
                      "Minimum posterior of a spike");
  cov_cmd->add_flag("--frame-only", coverage.frame_only,
                    "Match frames without comparing symbols");
  cov_cmd->add_option("--report", coverage.report, "Coverage CSV to write");
  cov_cmd->add_option("--pair-name", coverage.pair_name, "Report pair name");
  cov_cmd->add_option("--split", coverage.split, "Report split name");

  CLI::App* dump_cmd = app.add_subcommand(
      "dump-posteriors", "Write one utterance's posteriors as CSV");
  dump_cmd->add_option("--model", model_path, "Checkpoint")->required();
  dump_cmd->add_option("--data", data_path, "Dataset")->required();
  dump_cmd->add_option("--utterance-id", utt_id, "Utterance id")->required();
  dump_cmd->add_option("--out", out_path, "CSV file")->required();

  std::string csv_path;
  CLI::App* masks_cmd = app.add_subcommand(
      "export-masks", "Write the guiding masks of a model");
  masks_cmd->add_option("--guiding-model", model_path, "Checkpoint")
      ->required();
  masks_cmd->add_option("--data", data_path, "Dataset")->required();
  masks_cmd->add_option("--out", out_path, "Mask file")->required();
  masks_cmd->add_option("--csv", csv_path, "Also write a readable CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (gen_cmd->parsed()) return RunGenData(gen);
    if (train_cmd->parsed()) return RunTrain(train, LossMode::kCtc);
    if (guided_cmd->parsed()) return RunTrain(guided, LossMode::kGuided);
    if (distill_cmd->parsed()) {
      if (distill.teachers.empty() && distill.teacher_cache.empty()) {
        throw UsageError("distill needs --teachers or --teacher-cache");
      }
      return RunTrain(distill, LossMode::kDistill);
    }
    if (decode_cmd->parsed()) return RunDecode(model_path, data_path, out_path);
    if (eval_cmd->parsed()) return RunFuseEval(model_path, "", data_path);
    if (fuse_cmd->parsed()) return RunFuseEval(models_list, weights, data_path);
    if (cov_cmd->parsed()) return RunCoverage(coverage);
    if (dump_cmd->parsed()) {
      return RunDump(model_path, data_path, utt_id, out_path);
    }
    if (masks_cmd->parsed()) {
      return RunExportMasks(model_path, data_path, out_path, csv_path);
    }
  } catch (const UsageError& e) {
    std::fprintf(stderr, "ctcg: usage error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "ctcg: error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ctcg: error: %s\n", e.what());
    return 1;
  }
  return 2;
}

}  // namespace
}  // namespace ctcg

int main(int argc, char** argv) { return ctcg::Main(argc, argv); }
