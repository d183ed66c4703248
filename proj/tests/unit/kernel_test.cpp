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

#include <random>

#include "ogre/codec.hpp"
#include "ogre/compress.hpp"
#include "ogre/dataset/dataset.hpp"
#include "ogre/error.hpp"
#include "ogre/kernel/kmeans.hpp"
#include "ogre/kernel/wire.hpp"
#include "support.hpp"

namespace ogre::kernel {
namespace {

using testing::naive_lloyd;
using testing::rows;
using testing::six_point_blobs;

CentroidSet set2(std::vector<double> coords) { return CentroidSet(2, std::move(coords)); }

std::vector<double> pt(std::initializer_list<double> v) { return v; }

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no ogre::Error thrown";
  return ErrorKind::run_failure;
}

TEST(Assign, NearerCentroidWins) {
  EXPECT_EQ(assign(pt({0, 0}), set2({1, 0, 5, 5})), 0u);
  EXPECT_EQ(assign(pt({4, 4}), set2({0, 0, 5, 5})), 1u);
}

TEST(Assign, ExactTieGoesToLowestIndex) {
  EXPECT_EQ(assign(pt({0, 0}), set2({1, 0, -1, 0})), 0u);
  EXPECT_EQ(assign(pt({0, 0}), set2({3, 3, 1, 0, -1, 0})), 1u);
}

TEST(Assign, DimensionMismatchIsRejected) {
  EXPECT_EQ(kind_of([] { assign(pt({0, 0, 0}), set2({1, 0})); }), ErrorKind::shape_mismatch);
}

TEST(Assign, TemplateNearestMatchesAssign) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5);
  std::vector<double> c(40 * 3);
  for (auto& v : c) v = u(rng);
  const CentroidSet cs(3, c);
  for (int i = 0; i < 500; ++i) {
    const std::vector<double> p{u(rng), u(rng), u(rng)};
    EXPECT_EQ(nearest(p, cs.k(), [&](std::size_t j) { return cs[j]; }), assign(p, cs));
  }
}

TEST(PartialSums, TwoPointsOneCluster) {
  const std::vector<double> pts{0, 0, 2, 2};
  const auto s = partial_sums(PointView(pts, 2), set2({1, 1, 9, 9}));
  EXPECT_EQ(s.sums, (std::vector<double>{2, 2, 0, 0}));
  EXPECT_EQ(s.counts, (std::vector<std::uint64_t>{2, 0}));
}

TEST(PartialSums, EmptySequenceIsZero) {
  const auto s = partial_sums(PointView({}, 2), set2({1, 1, 9, 9}));
  EXPECT_EQ(s, PartialSums::zero(2, 2));
}

TEST(PartialSums, SixPointBlobs) {
  const auto pts = six_point_blobs();
  const auto s = partial_sums(PointView(pts, 2), set2({0.5, 0.5, 10.5, 10.5}));
  EXPECT_EQ(s.counts, (std::vector<std::uint64_t>{3, 3}));
  EXPECT_EQ(s.sums, (std::vector<double>{1, 1, 31, 31}));
  EXPECT_EQ(s.total_count(), 6u);
}

TEST(Merge, IdentityAndAddition) {
  PartialSums a{1, 2, {1, 1}, {1}};
  PartialSums b{1, 2, {2, 0}, {3}};
  EXPECT_EQ(merge(a, PartialSums::zero(1, 2)), a);
  const auto m = merge(a, b);
  EXPECT_EQ(m.sums, (std::vector<double>{3, 1}));
  EXPECT_EQ(m.counts, (std::vector<std::uint64_t>{4}));
}

TEST(Merge, FourEqualContributions) {
  PartialSums acc = PartialSums::zero(1, 2);
  for (int i = 0; i < 4; ++i) merge_into(acc, PartialSums{1, 2, {1, 2}, {1}});
  EXPECT_EQ(acc.sums, (std::vector<double>{4, 8}));
  EXPECT_EQ(acc.counts, (std::vector<std::uint64_t>{4}));
}

TEST(Merge, ShapeMismatchIsRejected) {
  EXPECT_EQ(kind_of([] { merge(PartialSums::zero(1, 2), PartialSums::zero(2, 2)); }),
            ErrorKind::shape_mismatch);
}

TEST(Finalize, MeanAndEmptyClusterRetention) {
  const auto next = finalize(PartialSums{2, 2, {2, 2, 0, 0}, {2, 0}}, set2({5, 5, 7, 7}));
  EXPECT_EQ(std::vector<double>(next.coords().begin(), next.coords().end()),
            (std::vector<double>{1, 1, 7, 7}));
  EXPECT_EQ(next.iteration(), 1u);
}

TEST(Finalize, SixPointBlobMeans) {
  const auto pts = six_point_blobs();
  const auto prev = set2({0.5, 0.5, 10.5, 10.5});
  const auto next = finalize(partial_sums(PointView(pts, 2), prev), prev);
  EXPECT_DOUBLE_EQ(next[0][0], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(next[1][1], 31.0 / 3.0);
}

TEST(Converged, BoundaryIsInclusive) {
  const auto a = set2({0, 0});
  EXPECT_TRUE(converged(a, a, 0.0));
  EXPECT_FALSE(converged(a, set2({0.5, 0}), 0.1));
  EXPECT_TRUE(converged(a, set2({0.5, 0}), 0.5));
  EXPECT_DOUBLE_EQ(max_displacement(a, set2({3, 4})), 5.0);
}

TEST(RunReference, SixPointBlobsMatchHandEnumeration) {
  // Init on the first two points, both in blob A. Iteration 1 pulls centroid 1
  // to (7.75, 8); iteration 2 reaches the blob means; iteration 3 confirms.
  const auto pts = six_point_blobs();
  const auto r = run_reference(PointView(pts, 2), set2({0, 0, 0, 1}), 10, 1e-4);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 3u);
  ASSERT_EQ(r.trajectory.size(), 4u);
  EXPECT_DOUBLE_EQ(r.trajectory[1][0][0], 0.5);
  EXPECT_DOUBLE_EQ(r.trajectory[1][1][0], 7.75);
  EXPECT_DOUBLE_EQ(r.trajectory[1][1][1], 8.0);
  EXPECT_DOUBLE_EQ(r.final_centroids[0][0], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.final_centroids[1][0], 31.0 / 3.0);
  const auto naive = naive_lloyd(rows(pts, 2), {{0, 0}, {0, 1}}, 10, 1e-4);
  EXPECT_EQ(naive.iterations, r.iterations);
  EXPECT_EQ(rows(r.final_centroids), naive.centroids);
}

TEST(RunReference, SingleClusterReachesGlobalMeanInOneStep) {
  const auto pts = six_point_blobs();
  const auto r = run_reference(PointView(pts, 2), set2({0, 0}), 10, 0.0);
  EXPECT_DOUBLE_EQ(r.trajectory[1][0][0], 32.0 / 6.0);
  EXPECT_DOUBLE_EQ(r.trajectory[1][0][1], 32.0 / 6.0);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 2u);  // the second pass only confirms
  EXPECT_EQ(max_displacement(r.trajectory[1], r.trajectory[2]), 0.0);
}

TEST(RunReference, MaxIterOne) {
  const auto pts = six_point_blobs();
  const auto r = run_reference(PointView(pts, 2), set2({0, 0, 0, 1}), 1, 1e-4);
  EXPECT_EQ(r.trajectory.size(), 2u);
  EXPECT_EQ(r.iterations, 1u);
  EXPECT_FALSE(r.converged);
}

TEST(RunReference, RejectsZeroMaxIter) {
  const auto pts = six_point_blobs();
  EXPECT_EQ(kind_of([&] { run_reference(PointView(pts, 2), set2({0, 0}), 0, 1e-4); }),
            ErrorKind::invalid_argument);
}

TEST(RelativeError, Definition) {
  EXPECT_EQ(relative_error(0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(relative_error(1.0, 2.0), 0.5);
  EXPECT_DOUBLE_EQ(relative_error(-2.0, -1.0), 0.5);
}

TEST(FirstDivergence, ReportsIterationCentroidCoordinate) {
  const std::vector<CentroidSet> a{set2({0, 0, 1, 1}), set2({0, 0, 1, 1})};
  auto b = a;
  b[1] = set2({0, 0, 1, 1.5});
  const auto d = first_divergence(a, b, 1e-9);
  ASSERT_TRUE(d.has_value());
  EXPECT_EQ(d->iteration, 1u);
  EXPECT_EQ(d->centroid, 1u);
  EXPECT_EQ(d->coordinate, 1u);
  EXPECT_FALSE(first_divergence(a, a, 0.0).has_value());
  b.pop_back();
  EXPECT_TRUE(first_divergence(a, b, 1e-9).has_value());
}

TEST(Wire, PartialSumsSizeFollowsShape) {
  const PartialSums p{2, 2, {1, 2, 3, 4}, {5, 6}};
  // u32 k + u32 d + k*d f64 + k u64
  const std::size_t expected = 4 + 4 + 2 * 2 * 8 + 2 * 8;
  EXPECT_EQ(encoded_size(p), expected);
  const auto bytes = to_bytes(p);
  EXPECT_EQ(bytes.size(), expected);
  EXPECT_EQ(partial_sums_from_bytes(bytes), p);
}

TEST(Wire, CentroidRoundTripAndTruncation) {
  const CentroidSet c(3, {1, 2, 3, 4, 5, 6}, 7);
  const auto bytes = to_bytes(c);
  EXPECT_EQ(centroids_from_bytes(bytes), c);
  EXPECT_EQ(kind_of([&] { centroids_from_bytes(std::span(bytes).first(bytes.size() - 1)); }),
            ErrorKind::io);
}

TEST(Compress, RoundTripAndShrinksRedundantData) {
  Bytes raw(4096, std::byte{7});
  const auto packed = compress(raw);
  EXPECT_LT(packed.size(), raw.size());
  EXPECT_EQ(decompress(packed), raw);
}

// Properties over seeded random blob data.

class KernelProperty : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(KernelProperty, ObjectiveIsNonIncreasing) {
  dataset::ScenarioSpec s{600, 12, 3, GetParam(), 10, 0.0};
  const auto file = dataset::generate(s);
  const auto r = run_reference(file.view(), dataset::init_centroids(file, 12, GetParam()), 10, 0.0);
  ASSERT_EQ(r.trajectory.size(), r.iterations + 1);
  double prev = INFINITY;
  for (std::size_t i = 0; i + 1 < r.trajectory.size(); ++i) {
    // Objective of the assignment made against trajectory[i], evaluated after
    // the update: Lloyd never increases it.
    const double obj = objective(file.view(), r.trajectory[i + 1]);
    EXPECT_LE(obj, prev * (1 + 1e-12));
    prev = obj;
  }
}

TEST_P(KernelProperty, MatchesNaiveOracle) {
  dataset::ScenarioSpec s{400, 9, 2, GetParam(), 10, 1e-4};
  const auto file = dataset::generate(s);
  const auto init = dataset::init_centroids(file, 9, GetParam());
  const auto r = run_reference(file.view(), init, 10, 1e-4);
  const auto naive = naive_lloyd(rows({file.values().begin(), file.values().end()}, 2), rows(init),
                                 10, 1e-4);
  ASSERT_EQ(r.trajectory.size(), naive.trajectory.size());
  for (std::size_t i = 0; i < r.trajectory.size(); ++i) {
    EXPECT_EQ(rows(r.trajectory[i]), naive.trajectory[i]) << "iteration " << i;
  }
}

TEST_P(KernelProperty, MergeIsACommutativeMonoid) {
  std::mt19937_64 rng(GetParam());
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  auto random_sums = [&] {
    auto p = PartialSums::zero(4, 3);
    for (auto& v : p.sums) v = u(rng);
    for (auto& c : p.counts) c = rng() % 100;
    return p;
  };
  const auto a = random_sums(), b = random_sums(), c = random_sums();
  EXPECT_EQ(merge(a, b), merge(b, a));
  EXPECT_EQ(merge(a, PartialSums::zero(4, 3)), a);
  const auto left = merge(merge(a, b), c);
  const auto right = merge(a, merge(b, c));
  EXPECT_EQ(left.counts, right.counts);
  for (std::size_t i = 0; i < left.sums.size(); ++i) {
    EXPECT_LE(relative_error(left.sums[i], right.sums[i]), 1e-12);
  }
}

TEST_P(KernelProperty, FinalizeAtBlobMeansIsAFixedPoint) {
  dataset::ScenarioSpec s{500, 5, 3, GetParam(), 10, 0.0};
  const auto file = dataset::generate(s);
  const auto r = run_reference(file.view(), dataset::init_centroids(file, 5, GetParam()), 50, 0.0);
  ASSERT_TRUE(r.converged);
  const auto again = finalize(partial_sums(file.view(), r.final_centroids), r.final_centroids);
  EXPECT_TRUE(std::equal(again.coords().begin(), again.coords().end(),
                         r.final_centroids.coords().begin()));
}

INSTANTIATE_TEST_SUITE_P(Seeds, KernelProperty, ::testing::Values(1, 7, 42, 99, 2026));

}  // namespace
}  // namespace ogre::kernel
