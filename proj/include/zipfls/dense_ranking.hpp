// Copyright 2026 The zipfls Authors.
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

// Class rankings for Zipf soft labels: dense classification voting over the
// spatial positions of a feature map, and the plain sort of the global
// prediction used as a baseline.

#ifndef ZIPFLS_DENSE_RANKING_HPP_
#define ZIPFLS_DENSE_RANKING_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "zipfls/numerics.hpp"
#include "zipfls/zipf_label.hpp"

namespace zipfls {

// H x W x D feature map, channel-last: value(h, w, d) = data[(h*W + w)*D + d].
struct FeatureMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t depth = 0;
  Vector data;

  FeatureMap() = default;
  FeatureMap(std::size_t h, std::size_t w, std::size_t d, double fill = 0.0)
      : height(h), width(w), depth(d), data(h * w * d, fill) {}

  std::size_t locations() const { return height * width; }
  std::span<const double> at(std::size_t location) const {
    return {data.data() + location * depth, depth};
  }
  std::span<double> at(std::size_t location) {
    return {data.data() + location * depth, depth};
  }
};

// Non-owning view of a linear classifier: logits = weight * x + bias with
// weight stored row-major as num_classes x depth. The same view is used for
// the pooled (GAP) prediction and for every spatial location.
struct SharedClassifier {
  std::span<const double> weight;
  std::span<const double> bias;
  std::size_t num_classes = 0;
  std::size_t depth = 0;

  void apply(std::span<const double> x, std::span<double> logits) const;
};

// Per-location logits, H x W x C in the same layout as FeatureMap.
using SpatialLogits = FeatureMap;

struct VoteHistogram {
  std::vector<std::size_t> counts;

  std::size_t total() const;
};

SpatialLogits local_predictions(const FeatureMap& fm,
                                const SharedClassifier& clf);

// Per-location argmax, lowest class index on ties.
VoteHistogram vote_histogram(const SpatialLogits& logits);

// Adds the votes of `other` into `into` (both must have the same class count).
void merge_votes(VoteHistogram& into, const VoteHistogram& other);

// Non-target classes with at least one vote, by descending count, then by
// descending global probability, then by ascending index. Zero-vote classes
// form the unranked tail.
RankAssignment rank_from_votes(const VoteHistogram& hist,
                               std::span<const double> global_probs,
                               std::size_t target);

// All non-target classes by descending probability; ties by class index.
RankAssignment logit_ranking(std::span<const double> global_probs,
                             std::size_t target);

// Concatenates the spatial locations of several maps into one (sum H*W) x 1
// x D pool.
FeatureMap stack_feature_maps(std::span<const FeatureMap> maps);

}  // namespace zipfls

#endif  // ZIPFLS_DENSE_RANKING_HPP_
