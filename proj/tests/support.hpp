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

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ogre/kernel/kmeans.hpp"

namespace ogre::testing {

// Two well-separated blobs of three points each, blob A first.
inline std::vector<double> six_point_blobs() {
  return {0, 0, 0, 1, 1, 0, 10, 10, 10, 11, 11, 10};
}

// Straight-line Lloyd iteration kept apart from the library kernel: plain
// nested vectors, no spans, no shared helpers. Used as an independent oracle.
struct NaiveLloyd {
  std::vector<std::vector<double>> centroids;
  std::uint64_t iterations = 0;
  std::vector<std::vector<std::vector<double>>> trajectory;
};

inline NaiveLloyd naive_lloyd(const std::vector<std::vector<double>>& points,
                              std::vector<std::vector<double>> centroids, std::uint64_t max_iter,
                              double epsilon) {
  NaiveLloyd out;
  out.trajectory.push_back(centroids);
  const std::size_t k = centroids.size();
  const std::size_t d = centroids.front().size();
  for (std::uint64_t it = 0; it < max_iter; ++it) {
    std::vector<std::vector<double>> sums(k, std::vector<double>(d, 0.0));
    std::vector<std::uint64_t> counts(k, 0);
    for (const auto& p : points) {
      std::size_t best = 0;
      double best_d = INFINITY;
      for (std::size_t c = 0; c < k; ++c) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += (p[j] - centroids[c][j]) * (p[j] - centroids[c][j]);
        if (s < best_d) {
          best_d = s;
          best = c;
        }
      }
      for (std::size_t j = 0; j < d; ++j) sums[best][j] += p[j];
      ++counts[best];
    }
    auto next = centroids;
    double moved = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      double disp = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        next[c][j] = sums[c][j] / static_cast<double>(counts[c]);
        disp += (next[c][j] - centroids[c][j]) * (next[c][j] - centroids[c][j]);
      }
      moved = std::max(moved, std::sqrt(disp));
    }
    centroids = std::move(next);
    out.trajectory.push_back(centroids);
    ++out.iterations;
    if (moved <= epsilon) break;
  }
  out.centroids = std::move(centroids);
  return out;
}

inline std::vector<std::vector<double>> rows(const std::vector<double>& flat, std::size_t d) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < flat.size(); i += d) out.emplace_back(flat.begin() + i, flat.begin() + i + d);
  return out;
}

inline std::vector<std::vector<double>> rows(const kernel::CentroidSet& c) {
  return rows({c.coords().begin(), c.coords().end()}, c.dims());
}

}  // namespace ogre::testing
