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

// K-means mathematics shared by the sequential oracle and every engine.
// Everything here is a pure function of its inputs.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iterator>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace ogre::kernel {

using Point = std::span<const double>;

// Row-major view over `size()` points of dimension `dims()`.
class PointView {
 public:
  PointView() = default;
  PointView(std::span<const double> coords, std::size_t dims);

  std::size_t size() const noexcept { return dims_ == 0 ? 0 : coords_.size() / dims_; }
  std::size_t dims() const noexcept { return dims_; }
  bool empty() const noexcept { return size() == 0; }
  std::span<const double> coords() const noexcept { return coords_; }

  Point operator[](std::size_t i) const noexcept {
    return coords_.subspan(i * dims_, dims_);
  }

  // Points [begin, end).
  PointView slice(std::size_t begin, std::size_t end) const;

 private:
  std::span<const double> coords_;
  std::size_t dims_ = 0;
};

class CentroidSet {
 public:
  CentroidSet() = default;
  CentroidSet(std::size_t dims, std::vector<double> coords,
              std::uint64_t iteration = 0);

  std::size_t k() const noexcept { return dims_ == 0 ? 0 : coords_.size() / dims_; }
  std::size_t dims() const noexcept { return dims_; }
  std::uint64_t iteration() const noexcept { return iteration_; }
  std::span<const double> coords() const noexcept { return coords_; }

  Point operator[](std::size_t i) const noexcept {
    return std::span<const double>(coords_).subspan(i * dims_, dims_);
  }

  bool operator==(const CentroidSet&) const = default;

 private:
  std::vector<double> coords_;
  std::size_t dims_ = 0;
  std::uint64_t iteration_ = 0;
};

// Per-centroid coordinate sums and member counts. The payload of reduce
// tasks and of allreduce.
struct PartialSums {
  std::size_t k = 0;
  std::size_t dims = 0;
  std::vector<double> sums;            // k * dims, row-major
  std::vector<std::uint64_t> counts;   // k

  static PartialSums zero(std::size_t k, std::size_t dims);

  std::span<const double> sum(std::size_t i) const noexcept {
    return std::span<const double>(sums).subspan(i * dims, dims);
  }
  std::uint64_t total_count() const noexcept;

  bool operator==(const PartialSums&) const = default;
};

struct KMeansResult {
  CentroidSet final_centroids;
  std::uint64_t iterations = 0;
  // Initial set first; one snapshot per executed iteration after it.
  std::vector<CentroidSet> trajectory;
  bool converged = false;
};

double squared_distance(Point a, Point b) noexcept;

// Nearest centroid by squared Euclidean distance; ties go to the lowest index.
std::size_t assign(Point point, const CentroidSet& centroids);

// `assign` over any centroid storage: `centroid(i)` yields a contiguous range
// of point.size() coordinates. Same summation order and tie rule, so results
// are bit-identical to `assign`.
template <class CentroidAt>
std::size_t nearest(Point point, std::size_t k, CentroidAt&& centroid) {
  const double* p = point.data();
  const std::size_t d = point.size();
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) {
    const double* c = std::data(centroid(i));
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = p[j] - c[j];
      s += diff * diff;
    }
    if (s < best_dist) {
      best_dist = s;
      best = i;
    }
  }
  return best;
}

// Adds `point` to centroid `index`'s running sum.
void accumulate(PartialSums& acc, Point point, std::size_t index);

PartialSums partial_sums(PointView points, const CentroidSet& centroids);

PartialSums merge(const PartialSums& a, const PartialSums& b);
void merge_into(PartialSums& acc, const PartialSums& other);

// Averages the sums. A centroid with no members keeps its previous position.
CentroidSet finalize(const PartialSums& partials, const CentroidSet& previous);

// Largest Euclidean displacement between matching centroids.
double max_displacement(const CentroidSet& prev, const CentroidSet& next);
bool converged(const CentroidSet& prev, const CentroidSet& next, double epsilon);

// Sum of squared distances from each point to its assigned centroid.
double objective(PointView points, const CentroidSet& centroids);

KMeansResult run_reference(PointView points, const CentroidSet& initial,
                           std::uint64_t max_iter, double epsilon);

// |a - b| / max(|a|, |b|); zero when a == b.
double relative_error(double a, double b) noexcept;

struct Divergence {
  std::size_t iteration = 0;  // index into the trajectory
  std::size_t centroid = 0;
  std::size_t coordinate = 0;
  double expected = 0.0;
  double actual = 0.0;
  double error = 0.0;         // relative error, or infinity on shape mismatch
};

// First point where two trajectories differ by more than `tolerance`
// (relative, per coordinate). A length or shape difference is a divergence.
std::optional<Divergence> first_divergence(
    const std::vector<CentroidSet>& expected,
    const std::vector<CentroidSet>& actual, double tolerance);

}  // namespace ogre::kernel
