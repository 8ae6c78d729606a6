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

#ifndef CTCG_DATA_H_
#define CTCG_DATA_H_

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ctcg/alphabet.h"
#include "ctcg/types.h"

namespace ctcg {

struct Utterance {
  std::string id;
  Matrix features;  // T x input_dim
  TargetSequence target;

  int frames() const { return static_cast<int>(features.rows()); }
  bool operator==(const Utterance& other) const {
    return id == other.id && target == other.target &&
           features.rows() == other.features.rows() &&
           features.cols() == other.features.cols() &&
           features == other.features;
  }
};

class Dataset {
 public:
  Dataset() = default;
  Dataset(Alphabet alphabet, int input_dim);

  const Alphabet& alphabet() const { return alphabet_; }
  int input_dim() const { return input_dim_; }
  const std::vector<Utterance>& utterances() const { return utterances_; }
  std::size_t size() const { return utterances_.size(); }
  bool empty() const { return utterances_.empty(); }
  const Utterance& operator[](std::size_t i) const { return utterances_[i]; }

  // Checks shape, finiteness and CTC feasibility; ids must be unique.
  void Add(Utterance utterance);
  const Utterance& Find(const std::string& id) const;

  // Text header ("CTCG-DATASET 1", input_dim, alphabet, count), then per
  // utterance a text line "utt <id> <T> <L> <symbols...>" followed by
  // T*input_dim little-endian doubles and a newline.
  void Save(const std::string& path) const;
  static Dataset Load(const std::string& path);

  bool operator==(const Dataset& other) const {
    return alphabet_ == other.alphabet_ && input_dim_ == other.input_dim_ &&
           utterances_ == other.utterances_;
  }

 private:
  Alphabet alphabet_;
  int input_dim_ = 0;
  std::vector<Utterance> utterances_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Deterministic train/held-out split by FNV-1a hash of the utterance id.
std::pair<Dataset, Dataset> SplitHeldout(const Dataset& dataset,
                                         double heldout_fraction = 0.1);

struct SyntheticTaskSpec {
  int alphabet_size = 6;
  int input_dim = 8;
  int min_symbols = 3;
  int max_symbols = 8;
  int min_segment_frames = 2;
  int max_segment_frames = 6;
  double noise_stddev = 0.3;
  // Per-dimension standard deviation of the symbol prototypes.
  double prototype_scale = 1.0;
  bool allow_repeats = false;
  std::uint64_t seed = 1;

  void Validate() const;
};

// Symbols are named "s0".."s{V-1}". Every symbol gets a prototype vector
// drawn from N(0, prototype_scale^2 I) under `seed`; each frame of a symbol's
// segment is that prototype plus N(0, noise^2) noise. Utterance k (ids "utt%06d") is drawn
// from its own stream seeded by (seed, k), so generating [first, first+n)
// gives the same utterances regardless of how the range is chunked.
Dataset GenerateSynthetic(const SyntheticTaskSpec& spec, int count,
                          int first_index = 0);

// The prototypes used by GenerateSynthetic, V x input_dim.
Matrix SymbolPrototypes(const SyntheticTaskSpec& spec);

}  // namespace ctcg

#endif  // CTCG_DATA_H_
