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

#include "ctcg/data.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "binary_io.h"
#include "ctcg/ctc.h"
#include "ctcg/error.h"

namespace ctcg {

namespace {

constexpr char kHeader[] = "CTCG-DATASET 1";

std::vector<std::string> SplitWords(const std::string& line) {
  std::istringstream stream(line);
  std::vector<std::string> words;
  std::string word;
  while (stream >> word) words.push_back(word);
  return words;
}

std::uint64_t Fnv1a(std::string_view text) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

class LineReader {
 public:
  explicit LineReader(const std::string& path)
      : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw Error(ErrorCode::kIoError, "cannot open " + path);
  }

  bool Next(std::string* line) {
    offset_ = static_cast<long long>(in_.tellg());
    if (!std::getline(in_, *line)) return false;
    ++line_;
    return true;
  }

  std::string Raw(std::size_t bytes) {
    offset_ = static_cast<long long>(in_.tellg());
    std::string data(bytes, '\0');
    in_.read(data.data(), static_cast<std::streamsize>(bytes));
    if (static_cast<std::size_t>(in_.gcount()) != bytes) {
      Fail("truncated feature block");
    }
    return data;
  }

  int Get() { return in_.get(); }
  bool AtEnd() { return in_.peek() == std::ifstream::traits_type::eof(); }

  [[noreturn]] void Fail(const std::string& what) const {
    throw Error(ErrorCode::kParseError,
                path_ + ":" + std::to_string(line_) + " (offset " +
                    std::to_string(offset_) + "): " + what);
  }

 private:
  std::string path_;
  std::ifstream in_;
  int line_ = 0;
  long long offset_ = 0;
};

int ParseInt(LineReader& reader, const std::string& word,
             const std::string& field) {
  try {
    std::size_t used = 0;
    const long value = std::stol(word, &used);
    if (used == word.size() && value >= 0 && value <= (1L << 30)) {
      return static_cast<int>(value);
    }
  } catch (const std::exception&) {
  }
  reader.Fail("bad " + field + " '" + word + "'");
}

}  // namespace

Dataset::Dataset(Alphabet alphabet, int input_dim)
    : alphabet_(std::move(alphabet)), input_dim_(input_dim) {
  if (input_dim_ < 1) {
    throw Error(ErrorCode::kInvalidConfig, "input_dim must be positive");
  }
}

void Dataset::Add(Utterance utterance) {
  const std::string& id = utterance.id;
  if (id.empty() || id.find_first_of(" \t\r\n") != std::string::npos) {
    throw Error(ErrorCode::kInvalidConfig,
                "utterance id '" + id + "' is empty or has whitespace");
  }
  if (utterance.features.rows() < 1 ||
      utterance.features.cols() != input_dim_) {
    throw Error(ErrorCode::kDimensionMismatch,
                id + ": features are " +
                    std::to_string(utterance.features.rows()) + "x" +
                    std::to_string(utterance.features.cols()) +
                    ", input_dim is " + std::to_string(input_dim_));
  }
  if (!utterance.features.allFinite()) {
    throw Error(ErrorCode::kDimensionMismatch, id + ": non-finite features");
  }
  for (int label : utterance.target) {
    if (label < 0 || label >= alphabet_.size()) {
      throw Error(ErrorCode::kUnknownSymbol,
                  id + ": label " + std::to_string(label) +
                      " is not a non-blank symbol");
    }
  }
  if (utterance.frames() < MinimumFrames(utterance.target)) {
    throw Error(ErrorCode::kInfeasible,
                id + ": target does not fit in " +
                    std::to_string(utterance.frames()) + " frames");
  }
  if (!index_.emplace(id, utterances_.size()).second) {
    throw Error(ErrorCode::kInvalidConfig, "duplicate utterance id " + id);
  }
  utterances_.push_back(std::move(utterance));
}

const Utterance& Dataset::Find(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) {
    throw Error(ErrorCode::kMissingCache, "no utterance with id " + id);
  }
  return utterances_[it->second];
}

void Dataset::Save(const std::string& path) const {
  io::Writer out(path);
  std::string header = std::string(kHeader) + "\n";
  header += "input_dim " + std::to_string(input_dim_) + "\n";
  header += "alphabet " + std::to_string(alphabet_.size());
  for (const std::string& symbol : alphabet_.symbols()) header += " " + symbol;
  header += "\ncount " + std::to_string(utterances_.size()) + "\n";
  out.Bytes(header);
  for (const Utterance& utt : utterances_) {
    std::string record = "utt " + utt.id + " " +
                         std::to_string(utt.frames()) + " " +
                         std::to_string(utt.target.size());
    for (int label : utt.target) record += " " + alphabet_.Symbol(label);
    record += "\n";
    for (Eigen::Index i = 0; i < utt.features.size(); ++i) {
      io::AppendF64(&record, utt.features.data()[i]);
    }
    record += "\n";
    out.Bytes(record);
  }
  out.Close();
}

Dataset Dataset::Load(const std::string& path) {
  LineReader reader(path);
  std::string line;
  if (!reader.Next(&line)) reader.Fail("missing header");
  if (line != kHeader) reader.Fail("expected '" + std::string(kHeader) + "'");

  if (!reader.Next(&line)) reader.Fail("missing input_dim");
  std::vector<std::string> words = SplitWords(line);
  if (words.size() != 2 || words[0] != "input_dim") {
    reader.Fail("expected 'input_dim <n>'");
  }
  const int input_dim = ParseInt(reader, words[1], "input_dim");
  if (input_dim < 1) reader.Fail("input_dim must be positive");

  if (!reader.Next(&line)) reader.Fail("missing alphabet");
  words = SplitWords(line);
  if (words.size() < 2 || words[0] != "alphabet") {
    reader.Fail("expected 'alphabet <n> <symbols...>'");
  }
  const int symbols = ParseInt(reader, words[1], "alphabet size");
  if (static_cast<int>(words.size()) != symbols + 2) {
    reader.Fail("alphabet lists " + std::to_string(words.size() - 2) +
                " symbols, header says " + std::to_string(symbols));
  }
  Alphabet alphabet;
  try {
    alphabet = Alphabet(std::vector<std::string>(words.begin() + 2,
                                                 words.end()));
  } catch (const Error& e) {
    reader.Fail(e.what());
  }

  if (!reader.Next(&line)) reader.Fail("missing count");
  words = SplitWords(line);
  if (words.size() != 2 || words[0] != "count") {
    reader.Fail("expected 'count <n>'");
  }
  const int count = ParseInt(reader, words[1], "count");

  Dataset dataset(alphabet, input_dim);
  for (int i = 0; i < count; ++i) {
    if (!reader.Next(&line)) {
      reader.Fail("expected " + std::to_string(count) + " utterances, got " +
                  std::to_string(i));
    }
    words = SplitWords(line);
    if (words.size() < 4 || words[0] != "utt") {
      reader.Fail("expected 'utt <id> <T> <L> <symbols...>'");
    }
    Utterance utt;
    utt.id = words[1];
    const int frames = ParseInt(reader, words[2], "frame count");
    const int length = ParseInt(reader, words[3], "target length");
    if (static_cast<int>(words.size()) != length + 4) {
      reader.Fail("target length " + std::to_string(length) + " but " +
                  std::to_string(words.size() - 4) + " symbols");
    }
    if (frames < 1) reader.Fail("utterance " + utt.id + " has no frames");
    for (int k = 0; k < length; ++k) {
      const std::string& symbol = words[4 + k];
      if (symbol == Alphabet::kBlankMarker) {
        reader.Fail("blank marker in target of " + utt.id);
      }
      if (std::find(alphabet.symbols().begin(), alphabet.symbols().end(),
                    symbol) == alphabet.symbols().end()) {
        reader.Fail("unknown symbol '" + symbol + "' in target of " + utt.id);
      }
      utt.target.push_back(alphabet.Lookup(symbol));
    }
    const std::string block =
        reader.Raw(static_cast<std::size_t>(frames) * input_dim * 8);
    utt.features.resize(frames, input_dim);
    for (Eigen::Index k = 0; k < utt.features.size(); ++k) {
      utt.features.data()[k] = io::DecodeF64(block.data() + 8 * k);
    }
    if (reader.Get() != '\n') reader.Fail("missing record terminator");
    try {
      dataset.Add(std::move(utt));
    } catch (const Error& e) {
      reader.Fail(e.what());
    }
  }
  if (!reader.AtEnd()) reader.Fail("trailing data after last utterance");
  return dataset;
}

std::pair<Dataset, Dataset> SplitHeldout(const Dataset& dataset,
                                         double heldout_fraction) {
  if (!(heldout_fraction >= 0.0 && heldout_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig,
                "held-out fraction must be in [0, 1]");
  }
  const auto cutoff = static_cast<std::uint64_t>(heldout_fraction * 10000.0);
  Dataset train(dataset.alphabet(), dataset.input_dim());
  Dataset heldout(dataset.alphabet(), dataset.input_dim());
  for (const Utterance& utt : dataset.utterances()) {
    if (Fnv1a(utt.id) % 10000 < cutoff) {
      heldout.Add(utt);
    } else {
      train.Add(utt);
    }
  }
  return {std::move(train), std::move(heldout)};
}

void SyntheticTaskSpec::Validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::kInvalidSpec, what);
  };
  require(alphabet_size >= 1, "alphabet_size must be positive");
  require(input_dim >= 1, "input_dim must be positive");
  require(min_symbols >= 1 && min_symbols <= max_symbols,
          "need 1 <= min_symbols <= max_symbols");
  require(min_segment_frames >= 1 &&
              min_segment_frames <= max_segment_frames,
          "need 1 <= min_segment_frames <= max_segment_frames");
  require(std::isfinite(noise_stddev) && noise_stddev >= 0.0,
          "noise_stddev must be finite and >= 0");
  require(std::isfinite(prototype_scale) && prototype_scale > 0.0,
          "prototype_scale must be finite and positive");
  require(allow_repeats || alphabet_size >= 2 || max_symbols == 1,
          "without repeats a multi-symbol utterance needs 2+ symbols");
  require(!allow_repeats || min_segment_frames >= 2,
          "repeats need segments of 2+ frames to stay CTC-feasible");
}

Matrix SymbolPrototypes(const SyntheticTaskSpec& spec) {
  spec.Validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix prototypes(spec.alphabet_size, spec.input_dim);
  for (Eigen::Index i = 0; i < prototypes.size(); ++i) {
    prototypes.data()[i] = spec.prototype_scale * normal(rng);
  }
  return prototypes;
}

Dataset GenerateSynthetic(const SyntheticTaskSpec& spec, int count,
                          int first_index) {
  spec.Validate();
  if (count < 0 || first_index < 0) {
    throw Error(ErrorCode::kInvalidSpec, "negative utterance count or index");
  }
  std::vector<std::string> names;
  for (int s = 0; s < spec.alphabet_size; ++s) {
    names.push_back("s" + std::to_string(s));
  }
  Dataset dataset(Alphabet(names), spec.input_dim);
  const Matrix prototypes = SymbolPrototypes(spec);

  for (int k = first_index; k < first_index + count; ++k) {
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed),
                      static_cast<std::uint32_t>(spec.seed >> 32),
                      static_cast<std::uint32_t>(k), 0x5eedu};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<int> length_dist(spec.min_symbols,
                                                   spec.max_symbols);
    std::uniform_int_distribution<int> duration_dist(spec.min_segment_frames,
                                                     spec.max_segment_frames);
    std::normal_distribution<double> noise(0.0, 1.0);

    Utterance utt;
    char id[32];
    std::snprintf(id, sizeof(id), "utt%06d", k);
    utt.id = id;
    const int length = length_dist(rng);
    std::vector<int> durations;
    for (int i = 0; i < length; ++i) {
      int symbol;
      if (spec.allow_repeats || utt.target.empty()) {
        symbol = std::uniform_int_distribution<int>(0, spec.alphabet_size - 1)(
            rng);
      } else {
        symbol = std::uniform_int_distribution<int>(0, spec.alphabet_size - 2)(
            rng);
        if (symbol >= utt.target.back()) ++symbol;
      }
      utt.target.push_back(symbol);
      durations.push_back(duration_dist(rng));
    }
    int frames = 0;
    for (int d : durations) frames += d;
    utt.features.resize(frames, spec.input_dim);
    int t = 0;
    for (int i = 0; i < length; ++i) {
      for (int f = 0; f < durations[i]; ++f, ++t) {
        for (int j = 0; j < spec.input_dim; ++j) {
          utt.features(t, j) =
              prototypes(utt.target[i], j) + spec.noise_stddev * noise(rng);
        }
      }
    }
    dataset.Add(std::move(utt));
  }
  return dataset;
}

}  // namespace ctcg
