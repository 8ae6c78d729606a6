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

#ifndef CTCG_BINARY_IO_H_
#define CTCG_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "ctcg/error.h"

namespace ctcg::io {

// Little-endian primitives shared by the checkpoint and cache formats.
class Writer {
 public:
  explicit Writer(const std::string& path);

  void Bytes(std::string_view bytes);
  void U8(std::uint8_t value) { Bytes({reinterpret_cast<char*>(&value), 1}); }
  void U32(std::uint32_t value);
  void U64(std::uint64_t value);
  void F64(double value) { U64(std::bit_cast<std::uint64_t>(value)); }
  void String(std::string_view value);
  // Flushes and reports IoError on a failed stream.
  void Close();

 private:
  std::string path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path);

  std::string Bytes(std::size_t count);
  std::uint8_t U8();
  std::uint32_t U32();
  std::uint64_t U64();
  double F64() { return std::bit_cast<double>(U64()); }
  std::string String();
  // ParseError unless the whole file has been consumed.
  void ExpectEnd();

  [[noreturn]] void Fail(const std::string& what) const;

 private:
  std::string path_;
  mutable std::ifstream in_;
};

// Appends/reads one double in the same encoding inside text-framed files.
void AppendF64(std::string* out, double value);
double DecodeF64(const char* bytes);

}  // namespace ctcg::io

#endif  // CTCG_BINARY_IO_H_
