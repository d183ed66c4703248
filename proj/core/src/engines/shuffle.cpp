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

#include "ogre/engines/shuffle.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <queue>
#include <random>
#include <sstream>

#include "ogre/error.hpp"

namespace ogre::engines {

namespace fs = std::filesystem;

fs::path default_workdir() {
  if (const char* env = std::getenv("OGREBENCH_WORKDIR"); env != nullptr && *env != '\0') {
    return fs::path(env);
  }
  return fs::temp_directory_path() / "ogrebench";
}

ScratchDir::ScratchDir(const fs::path& root) {
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) fail(ErrorKind::io, "cannot create work directory " + root.string() + ": " + ec.message());
  std::random_device rd;
  for (int attempt = 0; attempt < 16; ++attempt) {
    std::ostringstream name;
    name << "scratch-" << std::hex << rd() << rd();
    auto candidate = root / name.str();
    if (fs::create_directory(candidate, ec)) {
      path_ = std::move(candidate);
      return;
    }
  }
  fail(ErrorKind::io, "cannot create scratch directory under " + root.string());
}

ScratchDir::~ScratchDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

fs::path ScratchDir::next_file(const std::string& stem) {
  return path_ / (stem + "-" + std::to_string(counter_.fetch_add(1)) + ".run");
}

void write_file(const fs::path& path, std::span<const std::byte> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::io, "cannot write " + path.string());
}

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) fail(ErrorKind::io, "cannot open " + path.string());
  Bytes bytes(static_cast<std::size_t>(in.tellg()));
  in.seekg(0);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!in) fail(ErrorKind::io, "cannot read " + path.string());
  return bytes;
}

std::uint32_t record_key(const std::byte* record) noexcept {
  std::uint32_t key;
  std::memcpy(&key, record, sizeof key);
  return key;
}

Bytes merge_runs(const std::vector<std::span<const std::byte>>& runs, std::size_t record_bytes) {
  struct Head {
    std::uint32_t key;
    std::size_t run;
    std::size_t pos;
    bool operator>(const Head& o) const { return key != o.key ? key > o.key : run > o.run; }
  };
  std::size_t total = 0;
  std::priority_queue<Head, std::vector<Head>, std::greater<>> heads;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    if (runs[r].size() % record_bytes != 0) fail(ErrorKind::io, "torn record in sorted run");
    total += runs[r].size();
    if (!runs[r].empty()) heads.push(Head{record_key(runs[r].data()), r, 0});
  }
  Bytes out(total);
  std::size_t at = 0;
  while (!heads.empty()) {
    Head h = heads.top();
    heads.pop();
    const auto& run = runs[h.run];
    std::memcpy(out.data() + at, run.data() + h.pos, record_bytes);
    at += record_bytes;
    h.pos += record_bytes;
    if (h.pos < run.size()) {
      h.key = record_key(run.data() + h.pos);
      heads.push(h);
    }
  }
  return out;
}

MapOutputBuffer::MapOutputBuffer(std::size_t record_bytes, std::uint32_t partitions,
                                 std::uint64_t spill_threshold, ScratchDir& scratch,
                                 fabric::Metrics& metrics)
    : record_bytes_(record_bytes),
      partitions_(partitions),
      threshold_(spill_threshold),
      scratch_(scratch),
      metrics_(metrics) {
  if (record_bytes_ < 4) fail(ErrorKind::invalid_argument, "record smaller than its key");
  if (partitions_ == 0) fail(ErrorKind::invalid_argument, "need at least one partition");
  if (threshold_ == 0) fail(ErrorKind::invalid_argument, "spill threshold must be positive");
}

void MapOutputBuffer::emit(std::uint32_t key, std::span<const std::byte> payload) {
  if (payload.size() + 4 != record_bytes_) {
    fail(ErrorKind::shape_mismatch, "map output record has the wrong size");
  }
  const std::uint64_t offset = buffer_.size();
  buffer_.resize(offset + record_bytes_);
  std::memcpy(buffer_.data() + offset, &key, 4);
  std::memcpy(buffer_.data() + offset + 4, payload.data(), payload.size());
  index_.push_back(Entry{key % partitions_, key, offset});
  ++records_;
  if (buffer_.size() >= threshold_) spill();
}

std::vector<Bytes> MapOutputBuffer::sort_buffer() {
  std::stable_sort(index_.begin(), index_.end(), [](const Entry& a, const Entry& b) {
    return a.partition != b.partition ? a.partition < b.partition : a.key < b.key;
  });
  std::vector<Bytes> segments(partitions_);
  for (const auto& e : index_) {
    auto& seg = segments[e.partition];
    const auto* src = buffer_.data() + e.offset;
    seg.insert(seg.end(), src, src + record_bytes_);
  }
  buffer_.clear();
  index_.clear();
  return segments;
}

void MapOutputBuffer::spill() {
  auto segments = sort_buffer();
  Run run{scratch_.next_file("map-spill"), {}};
  Bytes flat;
  for (auto& seg : segments) {
    run.extents.emplace_back(flat.size(), seg.size());
    flat.insert(flat.end(), seg.begin(), seg.end());
  }
  write_file(run.file, flat);
  metrics_.add(fabric::Counter::spill_files);
  metrics_.add(fabric::Counter::spill_bytes, flat.size());
  runs_.push_back(std::move(run));
  ++spills_;
}

std::vector<Bytes> MapOutputBuffer::finish() {
  auto in_memory = sort_buffer();
  if (runs_.empty()) return in_memory;

  std::vector<Bytes> files;
  files.reserve(runs_.size());
  for (const auto& run : runs_) files.push_back(read_file(run.file));
  std::vector<Bytes> out(partitions_);
  for (std::uint32_t p = 0; p < partitions_; ++p) {
    std::vector<std::span<const std::byte>> parts;
    for (std::size_t r = 0; r < runs_.size(); ++r) {
      const auto [offset, length] = runs_[r].extents[p];
      parts.emplace_back(files[r].data() + offset, length);
    }
    parts.emplace_back(in_memory[p]);
    out[p] = merge_runs(parts, record_bytes_);
  }
  std::error_code ec;
  for (const auto& run : runs_) fs::remove(run.file, ec);
  runs_.clear();
  return out;
}

ReduceMerger::ReduceMerger(std::size_t record_bytes, std::uint64_t spill_threshold,
                           ScratchDir& scratch, fabric::Metrics& metrics)
    : record_bytes_(record_bytes), threshold_(spill_threshold), scratch_(scratch), metrics_(metrics) {
  if (threshold_ == 0) fail(ErrorKind::invalid_argument, "spill threshold must be positive");
}

void ReduceMerger::add(Bytes sorted_segment) {
  if (sorted_segment.size() % record_bytes_ != 0) {
    fail(ErrorKind::io, "torn record in shuffle segment");
  }
  held_bytes_ += sorted_segment.size();
  held_.push_back(std::move(sorted_segment));
  if (held_bytes_ > threshold_) spill();
}

void ReduceMerger::spill() {
  std::vector<std::span<const std::byte>> parts(held_.begin(), held_.end());
  const Bytes merged = merge_runs(parts, record_bytes_);
  auto file = scratch_.next_file("reduce-spill");
  write_file(file, merged);
  metrics_.add(fabric::Counter::spill_files);
  metrics_.add(fabric::Counter::spill_bytes, merged.size());
  spilled_.push_back(std::move(file));
  held_.clear();
  held_bytes_ = 0;
}

void ReduceMerger::for_each(const std::function<void(const std::byte* record)>& visit) {
  std::vector<Bytes> files;
  files.reserve(spilled_.size());
  for (const auto& f : spilled_) files.push_back(read_file(f));
  std::vector<std::span<const std::byte>> parts(files.begin(), files.end());
  parts.insert(parts.end(), held_.begin(), held_.end());
  const Bytes merged = merge_runs(parts, record_bytes_);
  for (std::size_t at = 0; at < merged.size(); at += record_bytes_) visit(merged.data() + at);
  std::error_code ec;
  for (const auto& f : spilled_) fs::remove(f, ec);
}

}  // namespace ogre::engines
