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

#include "zipfls/numerics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

namespace zipfls {
namespace {

Vector random_probs(SeededRng& rng, std::size_t n) {
  Vector p(n);
  double s = 0.0;
  for (double& x : p) {
    x = rng.uniform() + 1e-3;
    s += x;
  }
  for (double& x : p) x /= s;
  return p;
}

TEST(Softmax, SymmetricPair) {
  const Vector p = softmax(Vector{0.0, 0.0});
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[1], 0.5);
}

TEST(Softmax, LargeLogitsDoNotOverflow) {
  const Vector p = softmax(Vector{1000.0, 1000.0, 999.0});
  // exp(x - max) by hand: 1, 1, e^-1.
  const double denom = 2.0 + std::exp(-1.0);
  EXPECT_NEAR(p[0], 1.0 / denom, 1e-15);
  EXPECT_NEAR(p[1], 1.0 / denom, 1e-15);
  EXPECT_NEAR(p[2], std::exp(-1.0) / denom, 1e-15);
  EXPECT_NEAR(p[0], 0.4223, 1e-4);
  EXPECT_NEAR(p[2], 0.1554, 1e-4);
}

TEST(Softmax, ShiftInvariant) {
  SeededRng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    Vector z(2 + rng.below(30));
    for (double& x : z) x = 5.0 * rng.normal();
    const double c = 200.0 * (rng.uniform() - 0.5);
    Vector shifted = z;
    for (double& x : shifted) x += c;
    const Vector a = softmax(z), b = softmax(shifted);
    for (std::size_t i = 0; i < z.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
  }
}

TEST(Softmax, ValidProbVectorForHugeLogits) {
  SeededRng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Vector z(2 + rng.below(50));
    for (double& x : z) x = 1e4 * (2.0 * rng.uniform() - 1.0);
    const Vector p = softmax(z);
    double s = 0.0;
    for (double x : p) {
      EXPECT_GE(x, 0.0);
      s += x;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Softmax, OrderPreserving) {
  const Vector z{0.3, -1.0, 2.5, 0.29};
  const Vector p = softmax(z);
  for (std::size_t i = 0; i < z.size(); ++i) {
    for (std::size_t j = 0; j < z.size(); ++j) {
      if (z[i] > z[j]) {
        EXPECT_GT(p[i], p[j]);
      }
    }
  }
}

TEST(Softmax, RejectsNonFinite) {
  EXPECT_THROW(softmax(Vector{0.0, NAN}), InvalidInput);
  EXPECT_THROW(softmax(Vector{INFINITY, 0.0}), InvalidInput);
}

TEST(KlDivergence, Examples) {
  EXPECT_EQ(kl_divergence(Vector{0.5, 0.5}, Vector{0.5, 0.5}), 0.0);
  EXPECT_NEAR(kl_divergence(Vector{1.0, 0.0}, Vector{0.5, 0.5}), std::log(2.0),
              1e-15);
  EXPECT_THROW(kl_divergence(Vector{0.5, 0.5}, Vector{1.0, 0.0}), DomainError);
  EXPECT_THROW(kl_divergence(Vector{1.0}, Vector{0.5, 0.5}), InvalidInput);
}

TEST(KlDivergence, SelfIsExactlyZero) {
  SeededRng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    Vector p = random_probs(rng, 1 + rng.below(40));
    p[0] = 0.0;  // exercise the 0 log 0 convention
    EXPECT_EQ(kl_divergence(p, p), 0.0);
  }
}

TEST(JsDivergence, Examples) {
  EXPECT_EQ(js_divergence(Vector{0.3, 0.7}, Vector{0.3, 0.7}), 0.0);
  EXPECT_NEAR(js_divergence(Vector{1.0, 0.0}, Vector{0.0, 1.0}), std::log(2.0),
              1e-15);
}

TEST(JsDivergence, SymmetricAndBounded) {
  SeededRng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(20);
    const Vector p = random_probs(rng, n), q = random_probs(rng, n);
    const double a = js_divergence(p, q), b = js_divergence(q, p);
    EXPECT_NEAR(a, b, 1e-15);
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, std::log(2.0));
  }
}

TEST(SortDescWithIndices, Examples) {
  auto s = sort_desc_with_indices(Vector{0.1, 0.7, 0.2});
  EXPECT_EQ(s.values, (Vector{0.7, 0.2, 0.1}));
  EXPECT_EQ(s.indices, (std::vector<std::size_t>{1, 2, 0}));

  s = sort_desc_with_indices(Vector{0.5, 0.5});
  EXPECT_EQ(s.indices, (std::vector<std::size_t>{0, 1}));

  const Vector desc{9.0, 4.0, 4.0, 1.0, -3.0};
  s = sort_desc_with_indices(desc);
  EXPECT_EQ(s.values, desc);
  EXPECT_EQ(s.indices, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
}

TEST(SortDescWithIndices, IsPermutation) {
  SeededRng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    Vector v(1 + rng.below(60));
    for (double& x : v) x = std::round(4.0 * rng.normal());  // many ties
    const auto s = sort_desc_with_indices(v);
    Vector a = v, b = s.values;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(s.values[i], v[s.indices[i]]);
    for (std::size_t i = 1; i < v.size(); ++i) {
      ASSERT_GE(s.values[i - 1], s.values[i]);
      if (s.values[i - 1] == s.values[i]) {
        EXPECT_LT(s.indices[i - 1], s.indices[i]);
      }
    }
  }
}

TEST(StandardNormalMatrix, SameSeedIsBitwiseIdentical) {
  SeededRng a(42), b(42);
  const Matrix x = standard_normal_matrix(a, 30, 40);
  const Matrix y = standard_normal_matrix(b, 30, 40);
  EXPECT_EQ(x.data, y.data);
}

TEST(StandardNormalMatrix, Moments) {
  SeededRng rng(1234);
  const Matrix m = standard_normal_matrix(rng, 1000, 1000);
  double mean = 0.0;
  for (double x : m.data) mean += x;
  mean /= m.data.size();
  double var = 0.0;
  for (double x : m.data) var += (x - mean) * (x - mean);
  var /= m.data.size() - 1;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(var, 1.0, 0.02);
}

TEST(StandardNormalMatrix, DifferentSeedsDiffer) {
  SeededRng a(1), b(2);
  const Matrix x = standard_normal_matrix(a, 100, 100);
  const Matrix y = standard_normal_matrix(b, 100, 100);
  std::size_t differ = 0;
  for (std::size_t i = 0; i < x.data.size(); ++i) differ += x.data[i] != y.data[i];
  EXPECT_GE(differ, x.data.size() * 99 / 100);
}

TEST(StandardNormalMatrix, RejectsEmpty) {
  SeededRng rng(0);
  EXPECT_THROW(standard_normal_matrix(rng, 0, 3), InvalidInput);
}

TEST(SeededRng, PinnedStream) {
  // mt19937_64 is fully specified by the standard: its 10000th output from
  // the default seed is fixed.
  std::mt19937_64 ref;
  ref.discard(9999);
  EXPECT_EQ(ref(), 9981545732273789042ULL);
  SeededRng rng(5489);
  for (int i = 0; i < 9999; ++i) rng.next_u64();
  EXPECT_EQ(rng.next_u64(), 9981545732273789042ULL);
}

TEST(SeededRng, DerivedStreamsAreDistinct) {
  SeededRng root(77);
  EXPECT_NE(root.derive(0).seed(), root.derive(1).seed());
  EXPECT_EQ(root.derive(3).seed(), SeededRng(77).derive(3).seed());
}

TEST(SeededRng, BelowStaysInRange) {
  SeededRng rng(8);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) ++hits[rng.below(7)];
  for (int h : hits) EXPECT_GT(h, 800);
}

}  // namespace
}  // namespace zipfls
