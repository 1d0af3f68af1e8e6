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

#include "zipfls/dense_ranking.hpp"

#include <algorithm>
#include <numeric>

namespace zipfls {

void SharedClassifier::apply(std::span<const double> x,
                             std::span<double> logits) const {
  if (x.size() != depth || logits.size() != num_classes) {
    throw InvalidInput("SharedClassifier: dimension mismatch");
  }
  for (std::size_t c = 0; c < num_classes; ++c) {
    const double* w = weight.data() + c * depth;
    double acc = bias[c];
    for (std::size_t d = 0; d < depth; ++d) acc += w[d] * x[d];
    logits[c] = acc;
  }
}

std::size_t VoteHistogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

SpatialLogits local_predictions(const FeatureMap& fm,
                                const SharedClassifier& clf) {
  if (fm.depth != clf.depth) {
    throw InvalidInput("local_predictions: classifier depth " +
                       std::to_string(clf.depth) + " != feature depth " +
                       std::to_string(fm.depth));
  }
  if (clf.weight.size() != clf.num_classes * clf.depth ||
      clf.bias.size() != clf.num_classes) {
    throw InvalidInput("local_predictions: malformed classifier");
  }
  SpatialLogits out(fm.height, fm.width, clf.num_classes);
  for (std::size_t k = 0; k < fm.locations(); ++k) {
    clf.apply(fm.at(k), out.at(k));
  }
  return out;
}

VoteHistogram vote_histogram(const SpatialLogits& logits) {
  VoteHistogram hist;
  hist.counts.assign(logits.depth, 0);
  if (logits.depth == 0) return hist;
  for (std::size_t k = 0; k < logits.locations(); ++k) {
    const auto row = logits.at(k);
    // max_element returns the first maximum, i.e. the lowest class index.
    const auto best = std::max_element(row.begin(), row.end());
    ++hist.counts[static_cast<std::size_t>(best - row.begin())];
  }
  return hist;
}

void merge_votes(VoteHistogram& into, const VoteHistogram& other) {
  if (into.counts.size() != other.counts.size()) {
    throw InvalidInput("merge_votes: class count mismatch");
  }
  for (std::size_t c = 0; c < into.counts.size(); ++c) {
    into.counts[c] += other.counts[c];
  }
}

RankAssignment rank_from_votes(const VoteHistogram& hist,
                               std::span<const double> global_probs,
                               std::size_t target) {
  const std::size_t num_classes = hist.counts.size();
  if (global_probs.size() != num_classes) {
    throw InvalidInput("rank_from_votes: histogram and probabilities differ "
                       "in length");
  }
  if (target >= num_classes) {
    throw InvalidInput("rank_from_votes: target out of range");
  }
  RankAssignment ranks;
  ranks.excluded = target;
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (c == target) continue;
    (hist.counts[c] > 0 ? ranks.ranked : ranks.unranked).push_back(c);
  }
  std::sort(ranks.ranked.begin(), ranks.ranked.end(),
            [&](std::size_t a, std::size_t b) {
              if (hist.counts[a] != hist.counts[b]) {
                return hist.counts[a] > hist.counts[b];
              }
              if (global_probs[a] != global_probs[b]) {
                return global_probs[a] > global_probs[b];
              }
              return a < b;
            });
  return ranks;
}

RankAssignment logit_ranking(std::span<const double> global_probs,
                             std::size_t target) {
  if (target >= global_probs.size()) {
    throw InvalidInput("logit_ranking: target out of range");
  }
  RankAssignment ranks;
  ranks.excluded = target;
  for (std::size_t c : sort_desc_with_indices(global_probs).indices) {
    if (c != target) ranks.ranked.push_back(c);
  }
  return ranks;
}

FeatureMap stack_feature_maps(std::span<const FeatureMap> maps) {
  if (maps.empty()) throw InvalidInput("stack_feature_maps: no maps");
  const std::size_t depth = maps.front().depth;
  std::size_t locations = 0;
  for (const auto& m : maps) {
    if (m.depth != depth) {
      throw InvalidInput("stack_feature_maps: channel mismatch");
    }
    locations += m.locations();
  }
  if (maps.size() == 1) return maps.front();
  FeatureMap out(locations, 1, depth);
  auto dst = out.data.begin();
  for (const auto& m : maps) dst = std::copy(m.data.begin(), m.data.end(), dst);
  return out;
}

}  // namespace zipfls
