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

#include "ctcg/alphabet.h"

#include <fstream>
#include <sstream>

#include "ctcg/error.h"

namespace ctcg {

Alphabet::Alphabet(std::vector<std::string> symbols,
                   const std::vector<std::string>& ignore_symbols)
    : symbols_(std::move(symbols)) {
  if (symbols_.empty()) {
    throw Error(ErrorCode::kInvalidAlphabet, "alphabet has no symbols");
  }
  for (int i = 0; i < size(); ++i) {
    const std::string& symbol = symbols_[i];
    if (symbol.empty()) {
      throw Error(ErrorCode::kInvalidAlphabet,
                  "empty symbol at index " + std::to_string(i));
    }
    if (symbol == kBlankMarker) {
      throw Error(ErrorCode::kInvalidAlphabet,
                  "the blank marker is implicit and cannot be listed");
    }
    if (symbol.find_first_of(" \t\r\n,") != std::string::npos) {
      throw Error(ErrorCode::kInvalidAlphabet,
                  "symbol '" + symbol + "' contains whitespace or a comma");
    }
    if (!index_.emplace(symbol, i).second) {
      throw Error(ErrorCode::kInvalidAlphabet,
                  "duplicate symbol '" + symbol + "'");
    }
  }
  ignore_ids_.insert(blank_id());
  for (const std::string& name : ignore_symbols) {
    ignore_ids_.insert(Lookup(name));
  }
}

Alphabet Alphabet::FromFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::vector<std::string> symbols;
  std::string line;
  while (std::getline(in, line)) {
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r");
    symbols.push_back(line.substr(begin, end - begin + 1));
  }
  return Alphabet(std::move(symbols));
}

void Alphabet::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path);
  for (const std::string& symbol : symbols_) out << symbol << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

Alphabet Alphabet::WithIgnored(const std::vector<std::string>& names) const {
  Alphabet copy = *this;
  for (const std::string& name : names) copy.ignore_ids_.insert(Lookup(name));
  return copy;
}

int Alphabet::Lookup(std::string_view symbol) const {
  const auto it = index_.find(std::string(symbol));
  if (it == index_.end()) {
    throw Error(ErrorCode::kUnknownSymbol,
                "'" + std::string(symbol) + "' is not in the alphabet");
  }
  return it->second;
}

const std::string& Alphabet::Symbol(int index) const {
  if (index < 0 || index >= size()) {
    throw Error(ErrorCode::kUnknownSymbol,
                "index " + std::to_string(index) + " has no symbol");
  }
  return symbols_[index];
}

TargetSequence Alphabet::ParseTarget(
    const std::vector<std::string>& tokens) const {
  TargetSequence target;
  target.reserve(tokens.size());
  for (const std::string& token : tokens) {
    if (token == kBlankMarker) {
      throw Error(ErrorCode::kUnknownSymbol,
                  "blank marker is not allowed in a target sequence");
    }
    target.push_back(Lookup(token));
  }
  return target;
}

std::vector<std::string> Alphabet::Render(const TargetSequence& target) const {
  std::vector<std::string> tokens;
  tokens.reserve(target.size());
  for (int label : target) tokens.push_back(Symbol(label));
  return tokens;
}

}  // namespace ctcg
