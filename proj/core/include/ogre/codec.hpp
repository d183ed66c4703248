// Copyright 2026 The ogrebench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Explicit little-endian encoding used for every byte that crosses a node
// boundary or lands in a file.

#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "ogre/error.hpp"

namespace ogre {

using Bytes = std::vector<std::byte>;

class ByteWriter {
 public:
  ByteWriter() = default;
  explicit ByteWriter(std::size_t reserve) { buf_.reserve(reserve); }

  void put_u8(std::uint8_t v) { buf_.push_back(static_cast<std::byte>(v)); }
  void put_u32(std::uint32_t v) { put_le(v); }
  void put_u64(std::uint64_t v) { put_le(v); }
  void put_f64(double v) { put_le(std::bit_cast<std::uint64_t>(v)); }

  void put_f64s(std::span<const double> values) {
    if constexpr (std::endian::native == std::endian::little) {
      const auto old = buf_.size();
      buf_.resize(old + values.size_bytes());
      if (!values.empty()) std::memcpy(buf_.data() + old, values.data(), values.size_bytes());
    } else {
      for (double v : values) put_f64(v);
    }
  }

  void put_u64s(std::span<const std::uint64_t> values) {
    for (auto v : values) put_u64(v);
  }

  void put_bytes(std::span<const std::byte> bytes) {
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
  }

  void put_string(const std::string& s) {
    put_u32(static_cast<std::uint32_t>(s.size()));
    put_bytes(std::as_bytes(std::span<const char>(s.data(), s.size())));
  }

  std::size_t size() const noexcept { return buf_.size(); }
  Bytes take() && { return std::move(buf_); }

 private:
  template <class T>
  void put_le(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      buf_.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFF));
    }
  }

  Bytes buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  std::uint8_t get_u8() { return static_cast<std::uint8_t>(take(1)[0]); }
  std::uint32_t get_u32() { return get_le<std::uint32_t>(); }
  std::uint64_t get_u64() { return get_le<std::uint64_t>(); }
  double get_f64() { return std::bit_cast<double>(get_le<std::uint64_t>()); }

  void get_f64s(std::span<double> out) {
    auto src = take(out.size_bytes());
    if constexpr (std::endian::native == std::endian::little) {
      if (!out.empty()) std::memcpy(out.data(), src.data(), src.size());
    } else {
      ByteReader sub(src);
      for (auto& v : out) v = sub.get_f64();
    }
  }

  void get_u64s(std::span<std::uint64_t> out) {
    for (auto& v : out) v = get_u64();
  }

  std::span<const std::byte> get_bytes(std::size_t n) { return take(n); }

  std::string get_string() {
    const auto n = get_u32();
    auto raw = take(n);
    return std::string(reinterpret_cast<const char*>(raw.data()), raw.size());
  }

  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
  std::size_t position() const noexcept { return pos_; }

 private:
  std::span<const std::byte> take(std::size_t n) {
    if (n > remaining()) fail(ErrorKind::io, "truncated buffer");
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  template <class T>
  T get_le() {
    auto raw = take(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(std::to_integer<std::uint8_t>(raw[i])) << (8 * i);
    }
    return v;
  }

  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace ogre
