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

#include "ctcg/seqmodel.h"

#include <cmath>
#include <random>
#include <string>

#include "binary_io.h"
#include "ctcg/error.h"

namespace ctcg {

namespace {

constexpr char kMagic[] = "CTCG";
constexpr std::uint32_t kFormatVersion = 1;

using ConstMap = Eigen::Map<const Matrix>;
using MutableMap = Eigen::Map<Matrix>;
using ConstVecMap = Eigen::Map<const Eigen::RowVectorXd>;
using MutableVecMap = Eigen::Map<Eigen::RowVectorXd>;

struct CellBlock {
  int input = 0;
  std::int64_t input_weights = 0;      // 4H x in
  std::int64_t recurrent_weights = 0;  // 4H x H
  std::int64_t bias = 0;               // 4H
};

struct Layout {
  int hidden = 0;
  int directions = 1;
  // [layer * directions + direction]
  std::vector<CellBlock> cells;
  int output_input = 0;
  std::int64_t output_weights = 0;  // O x H*dirs
  std::int64_t output_bias = 0;     // O
  std::int64_t total = 0;
};

Layout MakeLayout(const ModelConfig& config) {
  Layout layout;
  layout.hidden = config.hidden_dim;
  layout.directions = config.directions();
  const std::int64_t gates = 4LL * config.hidden_dim;
  std::int64_t offset = 0;
  int input = config.input_dim;
  for (int layer = 0; layer < config.num_layers; ++layer) {
    for (int d = 0; d < layout.directions; ++d) {
      CellBlock block;
      block.input = input;
      block.input_weights = offset;
      offset += gates * input;
      block.recurrent_weights = offset;
      offset += gates * config.hidden_dim;
      block.bias = offset;
      offset += gates;
      layout.cells.push_back(block);
    }
    input = config.hidden_dim * layout.directions;
  }
  layout.output_input = input;
  layout.output_weights = offset;
  offset += static_cast<std::int64_t>(config.output_dim) * input;
  layout.output_bias = offset;
  offset += config.output_dim;
  layout.total = offset;
  return layout;
}

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// One LSTM pass over `input`, forward in time or reversed.
void RunCell(const std::vector<double>& params, const CellBlock& block,
             int hidden, bool reverse, const Matrix& input,
             ForwardTrace::Pass* pass) {
  const int frames = static_cast<int>(input.rows());
  const int gates = 4 * hidden;
  ConstMap w_input(params.data() + block.input_weights, gates, block.input);
  ConstMap w_recurrent(params.data() + block.recurrent_weights, gates, hidden);
  ConstVecMap bias(params.data() + block.bias, gates);

  Matrix pre = input * w_input.transpose();
  pre.rowwise() += bias;

  pass->gates.resize(frames, gates);
  pass->cell.resize(frames, hidden);
  pass->hidden.resize(frames, hidden);
  Eigen::RowVectorXd h_prev = Eigen::RowVectorXd::Zero(hidden);
  Eigen::RowVectorXd c_prev = Eigen::RowVectorXd::Zero(hidden);
  for (int step = 0; step < frames; ++step) {
    const int t = reverse ? frames - 1 - step : step;
    Eigen::RowVectorXd z = pre.row(t) + h_prev * w_recurrent.transpose();
    for (int k = 0; k < 3 * hidden; ++k) z(k) = Sigmoid(z(k));
    for (int k = 3 * hidden; k < gates; ++k) z(k) = std::tanh(z(k));
    const auto in_gate = z.segment(0, hidden).array();
    const auto forget = z.segment(hidden, hidden).array();
    const auto out_gate = z.segment(2 * hidden, hidden).array();
    const auto candidate = z.segment(3 * hidden, hidden).array();
    Eigen::RowVectorXd c = forget * c_prev.array() + in_gate * candidate;
    Eigen::RowVectorXd h = out_gate * c.array().tanh();
    pass->gates.row(t) = z;
    pass->cell.row(t) = c;
    pass->hidden.row(t) = h;
    h_prev = h;
    c_prev = c;
  }
}

// Backprop through one pass. Accumulates parameter gradients into `grad` and
// returns dLoss/dInput.
Matrix BackpropCell(const std::vector<double>& params, const CellBlock& block,
                    int hidden, bool reverse, const Matrix& input,
                    const ForwardTrace::Pass& pass, const Matrix& grad_hidden,
                    std::vector<double>* grad) {
  const int frames = static_cast<int>(input.rows());
  const int gates = 4 * hidden;
  ConstMap w_input(params.data() + block.input_weights, gates, block.input);
  ConstMap w_recurrent(params.data() + block.recurrent_weights, gates, hidden);
  MutableMap g_input(grad->data() + block.input_weights, gates, block.input);
  MutableMap g_recurrent(grad->data() + block.recurrent_weights, gates,
                         hidden);
  MutableVecMap g_bias(grad->data() + block.bias, gates);

  Matrix grad_pre(frames, gates);
  Eigen::RowVectorXd dh_next = Eigen::RowVectorXd::Zero(hidden);
  Eigen::RowVectorXd dc_next = Eigen::RowVectorXd::Zero(hidden);
  const Eigen::RowVectorXd zeros = Eigen::RowVectorXd::Zero(hidden);
  for (int step = frames - 1; step >= 0; --step) {
    const int t = reverse ? frames - 1 - step : step;
    const int prev = reverse ? t + 1 : t - 1;
    const bool has_prev = step > 0;
    const auto z = pass.gates.row(t);
    const auto in_gate = z.segment(0, hidden).array();
    const auto forget = z.segment(hidden, hidden).array();
    const auto out_gate = z.segment(2 * hidden, hidden).array();
    const auto candidate = z.segment(3 * hidden, hidden).array();
    Eigen::RowVectorXd c_prev = zeros;
    Eigen::RowVectorXd h_prev = zeros;
    if (has_prev) {
      c_prev = pass.cell.row(prev);
      h_prev = pass.hidden.row(prev);
    }
    const Eigen::ArrayXXd tanh_c = pass.cell.row(t).array().tanh();

    const Eigen::ArrayXXd dh = (grad_hidden.row(t) + dh_next).array();
    const Eigen::ArrayXXd dc =
        dh * out_gate * (1.0 - tanh_c.square()) + dc_next.array();
    auto dz = grad_pre.row(t);
    dz.segment(0, hidden) = dc * candidate * in_gate * (1.0 - in_gate);
    dz.segment(hidden, hidden) =
        dc * c_prev.array() * forget * (1.0 - forget);
    dz.segment(2 * hidden, hidden) = dh * tanh_c * out_gate * (1.0 - out_gate);
    dz.segment(3 * hidden, hidden) =
        dc * in_gate * (1.0 - candidate.square());

    g_recurrent.noalias() += dz.transpose() * h_prev;
    dh_next = dz * w_recurrent;
    dc_next = dc * forget;
  }
  g_input.noalias() += grad_pre.transpose() * input;
  g_bias += grad_pre.colwise().sum();
  return grad_pre * w_input;
}

}  // namespace

std::string_view DirectionName(Direction direction) {
  return direction == Direction::kBidirectional ? "bidirectional"
                                                : "unidirectional";
}

Direction ParseDirection(std::string_view name) {
  if (name == "unidirectional" || name == "uni") {
    return Direction::kUnidirectional;
  }
  if (name == "bidirectional" || name == "bi") {
    return Direction::kBidirectional;
  }
  throw Error(ErrorCode::kInvalidConfig,
              "unknown direction '" + std::string(name) + "'");
}

void ModelConfig::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kInvalidConfig, what);
  };
  require(input_dim >= 1, "input_dim must be positive");
  require(hidden_dim >= 1, "hidden_dim must be positive");
  require(num_layers >= 1, "num_layers must be positive");
  require(output_dim >= 2, "output_dim must cover one symbol plus blank");
  require(direction == Direction::kUnidirectional ||
              direction == Direction::kBidirectional,
          "direction must be unidirectional or bidirectional");
}

std::int64_t ParameterCount(const ModelConfig& config) {
  config.Validate();
  return MakeLayout(config).total;
}

SequenceModel::SequenceModel(ModelConfig config, std::vector<double> parameters)
    : config_(config) {
  config_.Validate();
  set_parameters(std::move(parameters));
}

void SequenceModel::set_parameters(std::vector<double> parameters) {
  const std::int64_t expected = MakeLayout(config_).total;
  if (static_cast<std::int64_t>(parameters.size()) != expected) {
    throw Error(ErrorCode::kInvalidConfig,
                "expected " + std::to_string(expected) + " parameters, got " +
                    std::to_string(parameters.size()));
  }
  for (double value : parameters) {
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::kInvalidConfig, "non-finite parameter");
    }
  }
  parameters_ = std::move(parameters);
}

SequenceModel SequenceModel::Init(const ModelConfig& config) {
  config.Validate();
  const Layout layout = MakeLayout(config);
  std::vector<double> params(layout.total);
  std::mt19937_64 rng(config.seed);
  auto fill = [&](std::int64_t begin, std::int64_t end, int fan_in) {
    const double eps = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> uniform(-eps, eps);
    for (std::int64_t i = begin; i < end; ++i) params[i] = uniform(rng);
  };
  for (const CellBlock& block : layout.cells) {
    fill(block.input_weights, block.bias + 4LL * layout.hidden, block.input);
  }
  fill(layout.output_weights, layout.total, layout.output_input);
  return SequenceModel(config, std::move(params));
}

SequenceModel SequenceModel::WarmStart(const SequenceModel& source,
                                       const ModelConfig& config) {
  const ModelConfig& from = source.config();
  if (from.input_dim != config.input_dim ||
      from.hidden_dim != config.hidden_dim ||
      from.num_layers != config.num_layers ||
      from.direction != config.direction) {
    throw Error(ErrorCode::kInvalidConfig,
                "warm-start encoder shape differs from the target config");
  }
  SequenceModel model = Init(config);
  const std::int64_t encoder = MakeLayout(config).output_weights;
  std::copy(source.parameters_.begin(), source.parameters_.begin() + encoder,
            model.parameters_.begin());
  return model;
}

PosteriorGrid SequenceModel::Forward(const Matrix& features,
                                     ForwardTrace* trace) const {
  if (features.cols() != config_.input_dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "feature width " + std::to_string(features.cols()) +
                    " != input_dim " + std::to_string(config_.input_dim));
  }
  if (features.rows() < 1) {
    throw Error(ErrorCode::kDimensionMismatch, "no frames");
  }
  if (!features.allFinite()) {
    throw Error(ErrorCode::kDimensionMismatch, "non-finite features");
  }
  const Layout layout = MakeLayout(config_);
  const int frames = static_cast<int>(features.rows());
  const int hidden = config_.hidden_dim;
  const int dirs = layout.directions;

  ForwardTrace local;
  ForwardTrace& out = trace != nullptr ? *trace : local;
  out.layers.assign(config_.num_layers, {});
  const Matrix* input = &features;
  for (int layer = 0; layer < config_.num_layers; ++layer) {
    ForwardTrace::Layer& record = out.layers[layer];
    record.input = *input;
    record.passes.resize(dirs);
    record.output.resize(frames, hidden * dirs);
    for (int d = 0; d < dirs; ++d) {
      RunCell(parameters_, layout.cells[layer * dirs + d], hidden, d == 1,
              record.input, &record.passes[d]);
      record.output.middleCols(d * hidden, hidden) = record.passes[d].hidden;
    }
    input = &record.output;
  }

  ConstMap w_out(parameters_.data() + layout.output_weights,
                 config_.output_dim, layout.output_input);
  ConstVecMap b_out(parameters_.data() + layout.output_bias,
                    config_.output_dim);
  Matrix logits = *input * w_out.transpose();
  logits.rowwise() += b_out;
  for (int t = 0; t < frames; ++t) {
    auto row = logits.row(t);
    row.array() -= row.maxCoeff();
    row = row.array().exp().matrix();
    row /= row.sum();
  }
  out.probs = logits;
  return PosteriorGrid(std::move(logits));
}

std::vector<double> SequenceModel::Backward(const ForwardTrace& trace,
                                            const Matrix& grad_wrt_grid) const {
  if (static_cast<int>(trace.layers.size()) != config_.num_layers ||
      trace.probs.cols() != config_.output_dim ||
      grad_wrt_grid.rows() != trace.probs.rows() ||
      grad_wrt_grid.cols() != trace.probs.cols()) {
    throw Error(ErrorCode::kTraceMismatch,
                "gradient " + std::to_string(grad_wrt_grid.rows()) + "x" +
                    std::to_string(grad_wrt_grid.cols()) +
                    " does not match the trace " +
                    std::to_string(trace.probs.rows()) + "x" +
                    std::to_string(trace.probs.cols()));
  }
  const Layout layout = MakeLayout(config_);
  const int hidden = config_.hidden_dim;
  const int dirs = layout.directions;
  std::vector<double> grad(layout.total, 0.0);

  // Softmax Jacobian: dz = p o (g - <p, g>).
  const Matrix& probs = trace.probs;
  Matrix grad_logits = probs.cwiseProduct(grad_wrt_grid);
  const Eigen::VectorXd inner = grad_logits.rowwise().sum();
  grad_logits -= probs.cwiseProduct(inner.replicate(1, probs.cols()));

  const Matrix& top = trace.layers.back().output;
  ConstMap w_out(parameters_.data() + layout.output_weights,
                 config_.output_dim, layout.output_input);
  MutableMap g_out(grad.data() + layout.output_weights, config_.output_dim,
                   layout.output_input);
  MutableVecMap g_bias(grad.data() + layout.output_bias, config_.output_dim);
  g_out.noalias() = grad_logits.transpose() * top;
  g_bias = grad_logits.colwise().sum();
  Matrix grad_output = grad_logits * w_out;

  for (int layer = config_.num_layers - 1; layer >= 0; --layer) {
    const ForwardTrace::Layer& record = trace.layers[layer];
    Matrix grad_input = Matrix::Zero(record.input.rows(), record.input.cols());
    for (int d = 0; d < dirs; ++d) {
      const Matrix grad_hidden = grad_output.middleCols(d * hidden, hidden);
      grad_input += BackpropCell(parameters_, layout.cells[layer * dirs + d],
                                 hidden, d == 1, record.input,
                                 record.passes[d], grad_hidden, &grad);
    }
    grad_output = std::move(grad_input);
  }
  return grad;
}

void SequenceModel::Save(const std::string& path) const {
  io::Writer out(path);
  out.Bytes({kMagic, 4});
  out.U32(kFormatVersion);
  out.U32(static_cast<std::uint32_t>(config_.input_dim));
  out.U32(static_cast<std::uint32_t>(config_.hidden_dim));
  out.U32(static_cast<std::uint32_t>(config_.num_layers));
  out.U8(static_cast<std::uint8_t>(config_.direction));
  out.U32(static_cast<std::uint32_t>(config_.output_dim));
  out.U64(config_.seed);
  out.U64(parameters_.size());
  for (double value : parameters_) out.F64(value);
  out.Close();
}

SequenceModel SequenceModel::Load(const std::string& path) {
  io::Reader in(path);
  if (in.Bytes(4) != std::string_view(kMagic, 4)) in.Fail("bad magic");
  const std::uint32_t version = in.U32();
  if (version != kFormatVersion) {
    in.Fail("unsupported checkpoint version " + std::to_string(version));
  }
  ModelConfig config;
  config.input_dim = static_cast<int>(in.U32());
  config.hidden_dim = static_cast<int>(in.U32());
  config.num_layers = static_cast<int>(in.U32());
  const std::uint8_t direction = in.U8();
  if (direction > 1) in.Fail("bad direction byte");
  config.direction = static_cast<Direction>(direction);
  config.output_dim = static_cast<int>(in.U32());
  config.seed = in.U64();
  try {
    config.Validate();
  } catch (const Error& e) {
    in.Fail(e.what());
  }
  const std::uint64_t count = in.U64();
  if (static_cast<std::int64_t>(count) != MakeLayout(config).total) {
    in.Fail("parameter count " + std::to_string(count) +
            " does not match the config");
  }
  std::vector<double> params(count);
  for (double& value : params) value = in.F64();
  in.ExpectEnd();
  return SequenceModel(config, std::move(params));
}

}  // namespace ctcg
