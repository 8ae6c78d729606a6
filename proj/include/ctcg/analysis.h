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

#ifndef CTCG_ANALYSIS_H_
#define CTCG_ANALYSIS_H_

#include <map>
#include <string>
#include <vector>

#include "ctcg/alphabet.h"
#include "ctcg/types.h"

namespace ctcg {

class Dataset;
class SequenceModel;

struct Spike {
  int frame = 0;
  int symbol = 0;
  bool operator==(const Spike&) const = default;
  auto operator<=>(const Spike&) const = default;
};

// Spikes per utterance id, each list ordered by frame.
using SpikeSet = std::map<std::string, std::vector<Spike>>;

// A frame spikes when its overall argmax (lowest index on ties) is outside
// the ignore set and reaches `threshold`.
std::vector<Spike> ExtractSpikes(const PosteriorGrid& grid,
                                 const Alphabet& alphabet,
                                 double threshold = 0.0);

SpikeSet ExtractSpikes(const SequenceModel& model, const Dataset& dataset,
                       const Alphabet& alphabet, double threshold = 0.0);

struct CoverageOptions {
  // A spike of A at frame t is covered by a spike of B within |dt| <= window.
  int window = 0;
  // When false only the frame has to match.
  bool match_symbol = true;
};

// Percentage of A's spikes covered by B's (directional). Utterances missing
// from B count as uncovered. Throws EmptySpikeSet when A has no spikes.
double CoverageRatio(const SpikeSet& a, const SpikeSet& b,
                     const CoverageOptions& options = {});

// CSV: header "frame,symbol_0,...,symbol_V", one row per frame, values
// printed with 17 significant digits.
void WritePosteriorCsv(const PosteriorGrid& grid, const std::string& path);
PosteriorGrid ReadPosteriorCsv(const std::string& path);

void DumpPosteriors(const SequenceModel& model, const Matrix& features,
                    const std::string& path);

struct CoverageRow {
  std::string pair_name;
  std::string split;
  double coverage_percent = 0.0;
};

void WriteCoverageReport(const std::vector<CoverageRow>& rows,
                         const std::string& path);

}  // namespace ctcg

#endif  // CTCG_ANALYSIS_H_
