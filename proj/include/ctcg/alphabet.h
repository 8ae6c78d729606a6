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

#ifndef CTCG_ALPHABET_H_
#define CTCG_ALPHABET_H_

#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ctcg/types.h"

namespace ctcg {

// Symbol inventory. Non-blank symbols occupy indices 0..V-1 and the blank is
// always index V. The ignore set names the indices that never count as
// spikes; it always contains the blank.
class Alphabet {
 public:
  // Reserved textual form of the blank. It cannot appear in an alphabet file
  // and is rejected inside target sequences.
  static constexpr std::string_view kBlankMarker = "<b>";

  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> symbols,
                    const std::vector<std::string>& ignore_symbols = {});

  // Reads one symbol per line; blank lines and surrounding whitespace are
  // skipped.
  static Alphabet FromFile(const std::string& path);
  void Save(const std::string& path) const;

  int size() const { return static_cast<int>(symbols_.size()); }
  int num_outputs() const { return size() + 1; }
  int blank_id() const { return size(); }

  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::set<int>& ignore_ids() const { return ignore_ids_; }
  bool ignored(int index) const { return ignore_ids_.count(index) > 0; }

  // Returns the copy of this alphabet with `names` added to the ignore set.
  Alphabet WithIgnored(const std::vector<std::string>& names) const;

  int Lookup(std::string_view symbol) const;
  const std::string& Symbol(int index) const;

  // Converts whitespace-separated symbols into label indices. The blank
  // marker is rejected.
  TargetSequence ParseTarget(const std::vector<std::string>& tokens) const;
  std::vector<std::string> Render(const TargetSequence& target) const;

  bool operator==(const Alphabet& other) const {
    return symbols_ == other.symbols_;
  }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
  std::set<int> ignore_ids_;
};

}  // namespace ctcg

#endif  // CTCG_ALPHABET_H_
