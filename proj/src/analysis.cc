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

#include "ctcg/analysis.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ctcg/data.h"
#include "ctcg/error.h"
#include "ctcg/seqmodel.h"

namespace ctcg {

std::vector<Spike> ExtractSpikes(const PosteriorGrid& grid,
                                 const Alphabet& alphabet, double threshold) {
  if (grid.num_symbols() != alphabet.num_outputs()) {
    throw Error(ErrorCode::kAlphabetMismatch,
                "grid has " + std::to_string(grid.num_symbols()) +
                    " symbols, alphabet " +
                    std::to_string(alphabet.num_outputs()));
  }
  std::vector<Spike> spikes;
  for (int t = 0; t < grid.frames(); ++t) {
    int best = 0;
    for (int s = 1; s < grid.num_symbols(); ++s) {
      if (grid(t, s) > grid(t, best)) best = s;
    }
    if (!alphabet.ignored(best) && grid(t, best) >= threshold) {
      spikes.push_back({t, best});
    }
  }
  return spikes;
}

SpikeSet ExtractSpikes(const SequenceModel& model, const Dataset& dataset,
                       const Alphabet& alphabet, double threshold) {
  SpikeSet spikes;
  for (const Utterance& utt : dataset.utterances()) {
    spikes[utt.id] = ExtractSpikes(model.Forward(utt.features), alphabet,
                                   threshold);
  }
  return spikes;
}

double CoverageRatio(const SpikeSet& a, const SpikeSet& b,
                     const CoverageOptions& options) {
  if (options.window < 0) {
    throw Error(ErrorCode::kInvalidConfig, "coverage window must be >= 0");
  }
  long long total = 0;
  long long covered = 0;
  const std::vector<Spike> none;
  for (const auto& [id, spikes] : a) {
    const auto found = b.find(id);
    const std::vector<Spike>& other = found == b.end() ? none : found->second;
    for (const Spike& spike : spikes) {
      ++total;
      const bool hit = std::any_of(
          other.begin(), other.end(), [&](const Spike& candidate) {
            return std::abs(candidate.frame - spike.frame) <= options.window &&
                   (!options.match_symbol || candidate.symbol == spike.symbol);
          });
      covered += hit;
    }
  }
  if (total == 0) {
    throw Error(ErrorCode::kEmptySpikeSet, "reference model has no spikes");
  }
  return 100.0 * static_cast<double>(covered) / static_cast<double>(total);
}

void WritePosteriorCsv(const PosteriorGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path);
  out << "frame";
  for (int s = 0; s < grid.num_symbols(); ++s) out << ",symbol_" << s;
  out << '\n';
  char buffer[32];
  for (int t = 0; t < grid.frames(); ++t) {
    out << t;
    for (int s = 0; s < grid.num_symbols(); ++s) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", grid(t, s));
      out << ',' << buffer;
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

PosteriorGrid ReadPosteriorCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("frame,", 0) != 0) {
    throw Error(ErrorCode::kParseError, path + ":1: missing header");
  }
  const int columns =
      static_cast<int>(std::count(line.begin(), line.end(), ','));
  std::vector<std::vector<double>> rows;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string field;
    std::getline(fields, field, ',');
    if (std::stoi(field) != static_cast<int>(rows.size())) {
      throw Error(ErrorCode::kParseError,
                  path + ":" + std::to_string(line_number) +
                      ": frames out of order");
    }
    std::vector<double> row;
    while (std::getline(fields, field, ',')) {
      char* end = nullptr;
      row.push_back(std::strtod(field.c_str(), &end));
      if (end == field.c_str() || *end != '\0') {
        throw Error(ErrorCode::kParseError,
                    path + ":" + std::to_string(line_number) + ": bad value '" +
                        field + "'");
      }
    }
    if (static_cast<int>(row.size()) != columns) {
      throw Error(ErrorCode::kParseError,
                  path + ":" + std::to_string(line_number) + ": expected " +
                      std::to_string(columns) + " values");
    }
    rows.push_back(std::move(row));
  }
  Matrix values(static_cast<Eigen::Index>(rows.size()), columns);
  for (std::size_t t = 0; t < rows.size(); ++t) {
    for (int s = 0; s < columns; ++s) values(t, s) = rows[t][s];
  }
  return PosteriorGrid(std::move(values));
}

void DumpPosteriors(const SequenceModel& model, const Matrix& features,
                    const std::string& path) {
  WritePosteriorCsv(model.Forward(features), path);
}

void WriteCoverageReport(const std::vector<CoverageRow>& rows,
                         const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path);
  out << "pair_name,split,coverage_percent\n";
  char buffer[32];
  for (const CoverageRow& row : rows) {
    std::snprintf(buffer, sizeof(buffer), "%.17g", row.coverage_percent);
    out << row.pair_name << ',' << row.split << ',' << buffer << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

}  // namespace ctcg
