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

#ifndef CTCG_SEQMODEL_H_
#define CTCG_SEQMODEL_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ctcg/types.h"

namespace ctcg {

enum class Direction : std::uint8_t {
  kUnidirectional = 0,
  kBidirectional = 1,
};

std::string_view DirectionName(Direction direction);
Direction ParseDirection(std::string_view name);

struct ModelConfig {
  int input_dim = 0;
  int hidden_dim = 0;
  int num_layers = 1;
  Direction direction = Direction::kUnidirectional;
  // Alphabet size plus one for the blank.
  int output_dim = 0;
  std::uint64_t seed = 0;

  int directions() const {
    return direction == Direction::kBidirectional ? 2 : 1;
  }
  void Validate() const;
  bool operator==(const ModelConfig&) const = default;
};

// Number of scalar parameters for `config`: per layer and direction an
// input matrix (4H x in), a recurrent matrix (4H x H) and a bias (4H), then
// an output projection (O x H*dirs) and its bias.
std::int64_t ParameterCount(const ModelConfig& config);

// Activations kept from a forward pass, needed by SequenceModel::Backward.
struct ForwardTrace {
  struct Pass {
    Matrix gates;   // T x 4H post-activation, blocks [input|forget|output|cell]
    Matrix cell;    // T x H
    Matrix hidden;  // T x H
  };
  struct Layer {
    Matrix input;   // T x in
    std::vector<Pass> passes;
    Matrix output;  // T x H*dirs
  };
  std::vector<Layer> layers;
  Matrix probs;  // T x O
};

// Stacked LSTM layers (uni- or bidirectional) followed by an affine output
// layer and a softmax. All math in double precision.
class SequenceModel {
 public:
  SequenceModel() = default;
  // Takes ownership of `parameters`; throws if the count does not match the
  // config or any value is non-finite.
  SequenceModel(ModelConfig config, std::vector<double> parameters);

  // Uniform init over (-eps, eps), eps = 1/sqrt(input size of the receiving
  // layer). Deterministic in config.seed.
  static SequenceModel Init(const ModelConfig& config);

  // Copies the recurrent encoder of `source` and draws a fresh output layer
  // from `config.seed`. Encoder shapes must agree.
  static SequenceModel WarmStart(const SequenceModel& source,
                                 const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  const std::vector<double>& parameters() const { return parameters_; }
  void set_parameters(std::vector<double> parameters);

  // features: T x input_dim, T >= 1. `trace` may be null for inference.
  PosteriorGrid Forward(const Matrix& features, ForwardTrace* trace) const;
  PosteriorGrid Forward(const Matrix& features) const {
    return Forward(features, nullptr);
  }

  // dLoss/dParameters given dLoss/dGrid. The softmax Jacobian is applied
  // here.
  std::vector<double> Backward(const ForwardTrace& trace,
                               const Matrix& grad_wrt_grid) const;

  // Binary container: "CTCG", u32 version, config block, u64 parameter
  // count, little-endian doubles.
  void Save(const std::string& path) const;
  static SequenceModel Load(const std::string& path);

 private:
  ModelConfig config_;
  std::vector<double> parameters_;
};

}  // namespace ctcg

#endif  // CTCG_SEQMODEL_H_
