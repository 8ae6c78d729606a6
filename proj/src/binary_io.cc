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

#include "binary_io.h"

namespace ctcg::io {

namespace {

void EncodeU64(std::uint64_t value, char* bytes) {
  for (int i = 0; i < 8; ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xff);
  }
}

std::uint64_t DecodeU64(const char* bytes) {
  std::uint64_t value = 0;
  for (int i = 0; i < 8; ++i) {
    value |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i]))
             << (8 * i);
  }
  return value;
}

}  // namespace

Writer::Writer(const std::string& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw Error(ErrorCode::kIoError, "cannot open " + path);
}

void Writer::Bytes(std::string_view bytes) {
  out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void Writer::U32(std::uint32_t value) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xff);
  }
  Bytes({bytes, 4});
}

void Writer::U64(std::uint64_t value) {
  char bytes[8];
  EncodeU64(value, bytes);
  Bytes({bytes, 8});
}

void Writer::String(std::string_view value) {
  U32(static_cast<std::uint32_t>(value.size()));
  Bytes(value);
}

void Writer::Close() {
  out_.flush();
  if (!out_) throw Error(ErrorCode::kIoError, "write failed: " + path_);
  out_.close();
}

Reader::Reader(const std::string& path)
    : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw Error(ErrorCode::kIoError, "cannot open " + path);
}

void Reader::Fail(const std::string& what) const {
  throw Error(ErrorCode::kParseError,
              path_ + " at offset " +
                  std::to_string(static_cast<long long>(in_.tellg())) +
                  ": " + what);
}

std::string Reader::Bytes(std::size_t count) {
  std::string bytes(count, '\0');
  in_.read(bytes.data(), static_cast<std::streamsize>(count));
  if (static_cast<std::size_t>(in_.gcount()) != count) {
    in_.clear();
    Fail("unexpected end of file");
  }
  return bytes;
}

std::uint8_t Reader::U8() { return static_cast<std::uint8_t>(Bytes(1)[0]); }

std::uint32_t Reader::U32() {
  const std::string bytes = Bytes(4);
  std::uint32_t value = 0;
  for (int i = 0; i < 4; ++i) {
    value |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i]))
             << (8 * i);
  }
  return value;
}

std::uint64_t Reader::U64() { return DecodeU64(Bytes(8).data()); }

std::string Reader::String() {
  const std::uint32_t size = U32();
  if (size > (1u << 20)) Fail("string length " + std::to_string(size));
  return Bytes(size);
}

void Reader::ExpectEnd() {
  if (in_.peek() != std::ifstream::traits_type::eof()) {
    Fail("trailing bytes");
  }
}

void AppendF64(std::string* out, double value) {
  char bytes[8];
  EncodeU64(std::bit_cast<std::uint64_t>(value), bytes);
  out->append(bytes, 8);
}

double DecodeF64(const char* bytes) {
  return std::bit_cast<double>(DecodeU64(bytes));
}

}  // namespace ctcg::io
