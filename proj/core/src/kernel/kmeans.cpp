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

#include "ogre/kernel/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ogre/error.hpp"

namespace ogre::kernel {

namespace {

void require_dims(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    fail(ErrorKind::shape_mismatch, std::string(what) + ": dimension " +
                                        std::to_string(got) + " != " +
                                        std::to_string(want));
  }
}

void require_same_shape(const PartialSums& a, const PartialSums& b) {
  if (a.k != b.k || a.dims != b.dims) {
    fail(ErrorKind::shape_mismatch, "partial sums shape mismatch");
  }
}

void require_same_shape(const CentroidSet& a, const CentroidSet& b) {
  if (a.k() != b.k() || a.dims() != b.dims()) {
    fail(ErrorKind::shape_mismatch, "centroid set shape mismatch");
  }
}

}  // namespace

PointView::PointView(std::span<const double> coords, std::size_t dims)
    : coords_(coords), dims_(dims) {
  if (dims == 0) fail(ErrorKind::invalid_argument, "dims must be >= 1");
  if (coords.size() % dims != 0) {
    fail(ErrorKind::shape_mismatch, "coordinate count not a multiple of dims");
  }
}

PointView PointView::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) {
    fail(ErrorKind::invalid_argument, "point slice out of range");
  }
  return PointView(coords_.subspan(begin * dims_, (end - begin) * dims_), dims_);
}

CentroidSet::CentroidSet(std::size_t dims, std::vector<double> coords,
                         std::uint64_t iteration)
    : coords_(std::move(coords)), dims_(dims), iteration_(iteration) {
  if (dims_ == 0) fail(ErrorKind::invalid_argument, "dims must be >= 1");
  if (coords_.empty() || coords_.size() % dims_ != 0) {
    fail(ErrorKind::shape_mismatch, "centroid coordinates not k * dims");
  }
  for (double c : coords_) {
    if (!std::isfinite(c)) {
      fail(ErrorKind::invalid_argument, "non-finite centroid coordinate");
    }
  }
}

PartialSums PartialSums::zero(std::size_t k, std::size_t dims) {
  PartialSums p;
  p.k = k;
  p.dims = dims;
  p.sums.assign(k * dims, 0.0);
  p.counts.assign(k, 0);
  return p;
}

std::uint64_t PartialSums::total_count() const noexcept {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  return total;
}

double squared_distance(Point a, Point b) noexcept {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

std::size_t assign(Point point, const CentroidSet& centroids) {
  const std::size_t d = centroids.dims();
  require_dims(point.size(), d, "assign");
  const double* c = centroids.coords().data();
  return nearest(point, centroids.k(), [c, d](std::size_t i) {
    return std::span<const double>(c + i * d, d);
  });
}

void accumulate(PartialSums& acc, Point point, std::size_t index) {
  double* dst = acc.sums.data() + index * acc.dims;
  for (std::size_t j = 0; j < acc.dims; ++j) dst[j] += point[j];
  ++acc.counts[index];
}

PartialSums partial_sums(PointView points, const CentroidSet& centroids) {
  if (!points.empty()) require_dims(points.dims(), centroids.dims(), "partial_sums");
  auto acc = PartialSums::zero(centroids.k(), centroids.dims());
  for (std::size_t i = 0; i < points.size(); ++i) {
    accumulate(acc, points[i], assign(points[i], centroids));
  }
  return acc;
}

void merge_into(PartialSums& acc, const PartialSums& other) {
  require_same_shape(acc, other);
  for (std::size_t i = 0; i < acc.sums.size(); ++i) acc.sums[i] += other.sums[i];
  for (std::size_t i = 0; i < acc.counts.size(); ++i) acc.counts[i] += other.counts[i];
}

PartialSums merge(const PartialSums& a, const PartialSums& b) {
  PartialSums out = a;
  merge_into(out, b);
  return out;
}

CentroidSet finalize(const PartialSums& partials, const CentroidSet& previous) {
  if (partials.k != previous.k() || partials.dims != previous.dims()) {
    fail(ErrorKind::shape_mismatch, "finalize: partial sums do not match centroids");
  }
  const std::size_t d = previous.dims();
  std::vector<double> next(previous.coords().begin(), previous.coords().end());
  for (std::size_t i = 0; i < partials.k; ++i) {
    const auto n = partials.counts[i];
    if (n == 0) continue;
    const double denom = static_cast<double>(n);
    for (std::size_t j = 0; j < d; ++j) {
      next[i * d + j] = partials.sums[i * d + j] / denom;
    }
  }
  return CentroidSet(d, std::move(next), previous.iteration() + 1);
}

double max_displacement(const CentroidSet& prev, const CentroidSet& next) {
  require_same_shape(prev, next);
  double worst = 0.0;
  for (std::size_t i = 0; i < prev.k(); ++i) {
    worst = std::max(worst, std::sqrt(squared_distance(prev[i], next[i])));
  }
  return worst;
}

bool converged(const CentroidSet& prev, const CentroidSet& next, double epsilon) {
  if (epsilon < 0.0) fail(ErrorKind::invalid_argument, "epsilon must be >= 0");
  return max_displacement(prev, next) <= epsilon;
}

double objective(PointView points, const CentroidSet& centroids) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    total += squared_distance(points[i], centroids[assign(points[i], centroids)]);
  }
  return total;
}

KMeansResult run_reference(PointView points, const CentroidSet& initial,
                           std::uint64_t max_iter, double epsilon) {
  if (max_iter < 1) fail(ErrorKind::invalid_argument, "max_iter must be >= 1");
  KMeansResult result;
  result.trajectory.push_back(initial);
  CentroidSet current = initial;
  for (std::uint64_t it = 0; it < max_iter; ++it) {
    CentroidSet next = finalize(partial_sums(points, current), current);
    result.converged = converged(current, next, epsilon);
    result.trajectory.push_back(next);
    current = std::move(next);
    ++result.iterations;
    if (result.converged) break;
  }
  result.final_centroids = current;
  return result;
}

double relative_error(double a, double b) noexcept {
  if (a == b) return 0.0;
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return std::fabs(a - b) / scale;
}

std::optional<Divergence> first_divergence(
    const std::vector<CentroidSet>& expected,
    const std::vector<CentroidSet>& actual, double tolerance) {
  const double inf = std::numeric_limits<double>::infinity();
  const std::size_t common = std::min(expected.size(), actual.size());
  for (std::size_t it = 0; it < common; ++it) {
    const auto& e = expected[it];
    const auto& a = actual[it];
    if (e.k() != a.k() || e.dims() != a.dims()) {
      return Divergence{it, 0, 0, 0.0, 0.0, inf};
    }
    for (std::size_t c = 0; c < e.k(); ++c) {
      for (std::size_t j = 0; j < e.dims(); ++j) {
        const double ev = e[c][j];
        const double av = a[c][j];
        const double err = relative_error(ev, av);
        if (!(err <= tolerance)) return Divergence{it, c, j, ev, av, err};
      }
    }
  }
  if (expected.size() != actual.size()) {
    return Divergence{common, 0, 0, 0.0, 0.0, inf};
  }
  return std::nullopt;
}

}  // namespace ogre::kernel
