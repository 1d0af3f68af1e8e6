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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

namespace zipfls {
namespace {

struct OwnedClassifier {
  Vector weight;
  Vector bias;
  std::size_t classes;
  std::size_t depth;

  SharedClassifier view() const { return {weight, bias, classes, depth}; }
};

OwnedClassifier random_classifier(SeededRng& rng, std::size_t c, std::size_t d,
                                  bool with_bias = true) {
  OwnedClassifier out{Vector(c * d), Vector(c, 0.0), c, d};
  for (double& w : out.weight) w = rng.normal();
  if (with_bias) {
    for (double& b : out.bias) b = rng.normal();
  }
  return out;
}

FeatureMap random_map(SeededRng& rng, std::size_t h, std::size_t w, std::size_t d) {
  FeatureMap fm(h, w, d);
  for (double& x : fm.data) x = rng.normal();
  return fm;
}

// Builds logits whose per-location argmax follows `winners`.
SpatialLogits logits_with_argmax(const std::vector<std::size_t>& winners,
                                 std::size_t h, std::size_t w, std::size_t c) {
  SpatialLogits sl(h, w, c);
  for (std::size_t k = 0; k < winners.size(); ++k) sl.at(k)[winners[k]] = 1.0;
  return sl;
}

TEST(LocalPredictions, IdentityClassifier) {
  const OwnedClassifier clf{{1, 0, 0, 1}, {0, 0}, 2, 2};
  FeatureMap fm(1, 1, 2);
  fm.data = {3.0, 1.0};
  const SpatialLogits sl = local_predictions(fm, clf.view());
  EXPECT_EQ(sl.data, (Vector{3.0, 1.0}));
  EXPECT_EQ(vote_histogram(sl).counts, (std::vector<std::size_t>{1, 0}));
}

TEST(LocalPredictions, ConstantMapGivesIdenticalLogits) {
  SeededRng rng(1);
  const OwnedClassifier clf = random_classifier(rng, 5, 3);
  FeatureMap fm(3, 4, 3);
  for (std::size_t k = 0; k < fm.locations(); ++k) {
    std::copy_n(Vector{0.4, -1.2, 2.0}.begin(), 3, fm.at(k).begin());
  }
  const SpatialLogits sl = local_predictions(fm, clf.view());
  for (std::size_t k = 1; k < sl.locations(); ++k) {
    EXPECT_TRUE(std::equal(sl.at(k).begin(), sl.at(k).end(), sl.at(0).begin()));
  }
}

TEST(LocalPredictions, DepthMismatchThrows) {
  SeededRng rng(2);
  const OwnedClassifier clf = random_classifier(rng, 4, 3);
  EXPECT_THROW(local_predictions(FeatureMap(2, 2, 5), clf.view()), InvalidInput);
}

TEST(VoteHistogram, Examples) {
  EXPECT_EQ(vote_histogram(logits_with_argmax({2, 2, 1, 3}, 2, 2, 5)).counts,
            (std::vector<std::size_t>{0, 1, 2, 1, 0}));
  const VoteHistogram all = vote_histogram(logits_with_argmax({4, 4, 4, 4, 4, 4}, 2, 3, 6));
  EXPECT_EQ(all.counts, (std::vector<std::size_t>{0, 0, 0, 0, 6, 0}));
  EXPECT_EQ(all.total(), 6u);
}

TEST(VoteHistogram, TiesGoToLowestIndex) {
  SpatialLogits sl(1, 1, 4);
  sl.data = {0.0, 2.0, 2.0, 1.0};
  EXPECT_EQ(vote_histogram(sl).counts, (std::vector<std::size_t>{0, 1, 0, 0}));
}

TEST(RankFromVotes, WorkedExample) {
  const VoteHistogram hist{{0, 1, 2, 1, 0}};
  const Vector probs{0.1, 0.3, 0.35, 0.15, 0.1};
  const RankAssignment r = rank_from_votes(hist, probs, 0);
  EXPECT_EQ(r.ranked, (std::vector<std::size_t>{2, 1, 3}));
  EXPECT_EQ(r.unranked, (std::vector<std::size_t>{4}));
  EXPECT_EQ(r.excluded, 0u);
}

TEST(RankFromVotes, NoNonTargetVotes) {
  const VoteHistogram hist{{0, 0, 4, 0}};
  const RankAssignment r = rank_from_votes(hist, Vector{0.1, 0.2, 0.5, 0.2}, 2);
  EXPECT_TRUE(r.ranked.empty());
  EXPECT_EQ(r.unranked, (std::vector<std::size_t>{0, 1, 3}));
}

TEST(RankFromVotes, TargetWithMostVotesIsExcluded) {
  const VoteHistogram hist{{1, 9, 3, 0}};
  const RankAssignment r = rank_from_votes(hist, Vector{0.1, 0.6, 0.2, 0.1}, 1);
  EXPECT_EQ(r.ranked, (std::vector<std::size_t>{2, 0}));
  EXPECT_EQ(r.unranked, (std::vector<std::size_t>{3}));
}

TEST(RankFromVotes, FullTieFallsBackToIndex) {
  const VoteHistogram hist{{2, 2, 2}};
  const RankAssignment r = rank_from_votes(hist, Vector{0.2, 0.4, 0.4}, 0);
  EXPECT_EQ(r.ranked, (std::vector<std::size_t>{1, 2}));
}

TEST(RankFromVotes, RejectsBadInput) {
  EXPECT_THROW(rank_from_votes({{1, 1}}, Vector{0.5, 0.3, 0.2}, 0), InvalidInput);
  EXPECT_THROW(rank_from_votes({{1, 1, 0}}, Vector{0.5, 0.3, 0.2}, 3), InvalidInput);
}

TEST(LogitRanking, Examples) {
  EXPECT_EQ(logit_ranking(Vector{0.5, 0.2, 0.3}, 0).ranked,
            (std::vector<std::size_t>{2, 1}));
  const RankAssignment uniform = logit_ranking(Vector(4, 0.25), 1);
  EXPECT_EQ(uniform.ranked, (std::vector<std::size_t>{0, 2, 3}));
  EXPECT_TRUE(uniform.unranked.empty());
  EXPECT_EQ(logit_ranking(Vector{0.9, 0.1}, 1).ranked, (std::vector<std::size_t>{0}));
}

TEST(StackFeatureMaps, Examples) {
  SeededRng rng(3);
  const FeatureMap a = random_map(rng, 4, 4, 3);
  const FeatureMap b = random_map(rng, 2, 2, 3);

  const std::vector<FeatureMap> one{a};
  EXPECT_EQ(stack_feature_maps(one).data, a.data);

  const std::vector<FeatureMap> two{a, b};
  const FeatureMap s = stack_feature_maps(two);
  EXPECT_EQ(s.locations(), 20u);
  EXPECT_EQ(s.depth, 3u);

  const OwnedClassifier clf = random_classifier(rng, 6, 3);
  const std::vector<FeatureMap> twice{a, a};
  const VoteHistogram h1 = vote_histogram(local_predictions(a, clf.view()));
  const VoteHistogram h2 =
      vote_histogram(local_predictions(stack_feature_maps(twice), clf.view()));
  for (std::size_t c = 0; c < 6; ++c) EXPECT_EQ(h2.counts[c], 2 * h1.counts[c]);
  const Vector probs(6, 1.0 / 6.0);
  EXPECT_EQ(rank_from_votes(h1, probs, 0).ranked, rank_from_votes(h2, probs, 0).ranked);

  const std::vector<FeatureMap> bad{a, random_map(rng, 2, 2, 4)};
  EXPECT_THROW(stack_feature_maps(bad), InvalidInput);
}

TEST(DenseRanking, SingleLocationTopClassMatchesLogitRanking) {
  SeededRng rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t c = 2 + rng.below(9);
    const std::size_t d = 1 + rng.below(6);
    const OwnedClassifier clf = random_classifier(rng, c, d);
    const FeatureMap fm = random_map(rng, 1, 1, d);
    Vector logits(c);
    clf.view().apply(fm.at(0), logits);
    const Vector probs = softmax(logits);
    const std::size_t target = rng.below(c);
    const RankAssignment dense =
        rank_from_votes(vote_histogram(local_predictions(fm, clf.view())), probs, target);
    const RankAssignment logit = logit_ranking(probs, target);
    const std::size_t top =
        std::max_element(logits.begin(), logits.end()) - logits.begin();
    if (top == target) {
      EXPECT_TRUE(dense.ranked.empty());
    } else {
      ASSERT_EQ(dense.ranked.size(), 1u);
      EXPECT_EQ(dense.ranked[0], logit.ranked[0]);
    }
  }
}

TEST(DenseRanking, PositiveFeatureScalingKeepsVotes) {
  SeededRng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const OwnedClassifier clf = random_classifier(rng, 7, 4, /*with_bias=*/false);
    FeatureMap fm = random_map(rng, 3, 3, 4);
    const VoteHistogram before = vote_histogram(local_predictions(fm, clf.view()));
    const double s = 0.01 + 10.0 * rng.uniform();
    for (double& x : fm.data) x *= s;
    EXPECT_EQ(vote_histogram(local_predictions(fm, clf.view())).counts, before.counts);
  }
}

TEST(DenseRanking, LogitShiftKeepsVotes) {
  SeededRng rng(6);
  const OwnedClassifier clf = random_classifier(rng, 5, 3);
  SpatialLogits sl = local_predictions(random_map(rng, 4, 4, 3), clf.view());
  const VoteHistogram before = vote_histogram(sl);
  for (std::size_t k = 0; k < sl.locations(); ++k) {
    for (double& x : sl.at(k)) x += 3.5;
  }
  EXPECT_EQ(vote_histogram(sl).counts, before.counts);
}

TEST(DenseRanking, ClassPermutationEquivariance) {
  SeededRng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t c = 6, d = 4;
    const OwnedClassifier clf = random_classifier(rng, c, d);
    const FeatureMap fm = random_map(rng, 3, 3, d);
    std::vector<std::size_t> perm(c);  // new index of old class
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(perm);
    OwnedClassifier permuted = clf;
    for (std::size_t old = 0; old < c; ++old) {
      std::copy_n(clf.weight.begin() + old * d, d,
                  permuted.weight.begin() + perm[old] * d);
      permuted.bias[perm[old]] = clf.bias[old];
    }
    Vector probs(c);
    for (double& p : probs) p = rng.uniform();
    Vector probs_p(c);
    for (std::size_t old = 0; old < c; ++old) probs_p[perm[old]] = probs[old];
    const std::size_t target = rng.below(c);

    const VoteHistogram h = vote_histogram(local_predictions(fm, clf.view()));
    const VoteHistogram hp = vote_histogram(local_predictions(fm, permuted.view()));
    for (std::size_t old = 0; old < c; ++old) EXPECT_EQ(hp.counts[perm[old]], h.counts[old]);

    const RankAssignment r = rank_from_votes(h, probs, target);
    const RankAssignment rp = rank_from_votes(hp, probs_p, perm[target]);
    ASSERT_EQ(r.ranked.size(), rp.ranked.size());
    for (std::size_t i = 0; i < r.ranked.size(); ++i) {
      EXPECT_EQ(rp.ranked[i], perm[r.ranked[i]]);
    }
  }
}

TEST(MergeVotes, AddsCounts) {
  VoteHistogram a{{1, 2, 0}};
  merge_votes(a, VoteHistogram{{0, 3, 4}});
  EXPECT_EQ(a.counts, (std::vector<std::size_t>{1, 5, 4}));
  EXPECT_THROW(merge_votes(a, VoteHistogram{{1}}), InvalidInput);
}

}  // namespace
}  // namespace zipfls
