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

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include "ogre/dataset/dataset.hpp"
#include "ogre/error.hpp"

namespace ogre::dataset {
namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() /
         (name + "-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "-" +
          ::testing::UnitTest::GetInstance()->current_test_info()->name());
}

TEST(Generate, SameSeedIsByteIdentical) {
  const ScenarioSpec s{100, 2, 2, 7};
  EXPECT_EQ(generate(s).encode(), generate(s).encode());
  ScenarioSpec other = s;
  other.seed = 8;
  EXPECT_NE(generate(s).encode(), generate(other).encode());
}

TEST(Generate, HeaderMatchesSpec) {
  const auto bytes = generate(ScenarioSpec{100, 2, 2, 7}).encode();
  ASSERT_EQ(bytes.size(), kHeaderBytes + 100 * 2 * 8);
  ByteReader r(bytes);
  EXPECT_EQ(r.get_u8(), 'O');
  EXPECT_EQ(r.get_u8(), 'G');
  EXPECT_EQ(r.get_u8(), 'R');
  EXPECT_EQ(r.get_u8(), 'E');
  EXPECT_EQ(r.get_u32(), 1u);
  EXPECT_EQ(r.get_u64(), 100u);
  EXPECT_EQ(r.get_u32(), 2u);
}

TEST(Generate, RejectsInvalidSpecs) {
  EXPECT_THROW(generate(ScenarioSpec{0, 1}), Error);
  EXPECT_THROW(generate(ScenarioSpec{5, 6}), Error);
  EXPECT_THROW(generate(ScenarioSpec{5, 0}), Error);
  ScenarioSpec s{5, 1};
  s.dims = 0;
  EXPECT_THROW(generate(s), Error);
}

TEST(Generate, PointsStayNearTheirBlob) {
  // Point i belongs to blob i % k; with sd 0.05 nothing strays half a grid step.
  const auto file = generate(ScenarioSpec{2000, 8, 3, 11});
  const auto v = file.view();
  for (std::size_t i = 8; i < file.size(); ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_LT(std::abs(v[i][j] - v[i % 8][j]), 0.5) << "point " << i;
    }
  }
}

TEST(PointFile, WriteReadRoundTrip) {
  const auto file = generate(ScenarioSpec{257, 3, 3, 5});
  const auto path = temp_path("ogre-points");
  file.write(path);
  EXPECT_EQ(PointFile::read(path), file);
  std::filesystem::remove(path);
}

TEST(PointFile, DecodeRejectsCorruption) {
  auto bytes = generate(ScenarioSpec{10, 2, 2, 1}).encode();
  auto bad_magic = bytes;
  bad_magic[0] = std::byte{'X'};
  EXPECT_THROW(PointFile::decode(bad_magic), Error);
  bytes.pop_back();
  EXPECT_THROW(PointFile::decode(bytes), Error);
}

TEST(Partition, SpecExamples) {
  auto sizes = [](std::uint64_t n, std::uint64_t b) {
    std::vector<std::uint64_t> out;
    for (const auto& r : partition(n, b)) out.push_back(r.size());
    return out;
  };
  EXPECT_EQ(sizes(10, 4), (std::vector<std::uint64_t>{4, 4, 2}));
  EXPECT_EQ(sizes(4, 4), (std::vector<std::uint64_t>{4}));
  // 1,000,000 = 15 * 65,536 + 16,960
  const auto big = partition(1'000'000, 65'536);
  EXPECT_EQ(big.size(), 16u);
  EXPECT_EQ(big.back().size(), 1'000'000u - 15u * 65'536u);
  EXPECT_EQ(big.back().size(), 16'960u);
  EXPECT_THROW(partition(10, 0), Error);
}

TEST(Partition, DisjointCoverProperty) {
  for (std::uint64_t n : {1u, 7u, 64u, 1000u, 4097u}) {
    for (std::uint64_t b : {1u, 3u, 64u, 5000u}) {
      const auto blocks = partition(n, b);
      EXPECT_EQ(blocks.size(), (n + b - 1) / b);
      std::uint64_t next = 0;
      for (std::size_t i = 0; i < blocks.size(); ++i) {
        EXPECT_EQ(blocks[i].id, i);
        EXPECT_EQ(blocks[i].begin, next);
        EXPECT_GT(blocks[i].size(), 0u);
        if (i + 1 < blocks.size()) EXPECT_EQ(blocks[i].size(), b);
        next = blocks[i].end;
      }
      EXPECT_EQ(next, n);
    }
  }
}

std::set<std::vector<double>> as_set(const kernel::CentroidSet& c) {
  std::set<std::vector<double>> out;
  for (std::size_t i = 0; i < c.k(); ++i) out.emplace(c[i].begin(), c[i].end());
  return out;
}

TEST(InitCentroids, KEqualsNIsEveryPoint) {
  const auto file = generate(ScenarioSpec{50, 5, 2, 3});
  const auto c = init_centroids(file, 50, 9);
  std::set<std::vector<double>> all;
  for (std::size_t i = 0; i < file.size(); ++i) {
    all.emplace(file.view()[i].begin(), file.view()[i].end());
  }
  EXPECT_EQ(as_set(c), all);
}

TEST(InitCentroids, DeterministicDistinctAndBounded) {
  const auto file = generate(ScenarioSpec{1000, 10, 3, 3});
  EXPECT_EQ(init_centroids(file, 40, 5), init_centroids(file, 40, 5));
  EXPECT_EQ(as_set(init_centroids(file, 40, 5)).size(), 40u);
  EXPECT_EQ(init_centroids(file, 1, 5).k(), 1u);
  EXPECT_THROW(init_centroids(file, 1001, 5), Error);
}

TEST(Values, EncodeDecodeRoundTrip) {
  const std::vector<double> v{1.5, -2.25, 1e300};
  EXPECT_EQ(decode_values(encode_values(v)), v);
}

}  // namespace
}  // namespace ogre::dataset
