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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace zipfls {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream_index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream_index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SeededRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform_open_zero() {
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double SeededRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open_zero();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(theta);
  has_spare_ = true;
  return radius * std::cos(theta);
}

std::size_t SeededRng::below(std::size_t n) {
  if (n == 0) throw InvalidInput("SeededRng::below: n must be positive");
  // Rejection sampling; plain modulo would bias small values.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

SeededRng SeededRng::derive(std::uint64_t stream_index) const {
  return SeededRng(mix_seed(seed_, stream_index));
}

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw InvalidInput(std::string(what) + ": non-finite entry");
    }
  }
}

double log_sum_exp(std::span<const double> z) {
  if (z.empty()) throw InvalidInput("log_sum_exp: empty input");
  require_finite(z, "log_sum_exp");
  const double m = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double x : z) s += std::exp(x - m);
  return m + std::log(s);
}

Vector softmax(std::span<const double> z) {
  if (z.empty()) throw InvalidInput("softmax: empty input");
  require_finite(z, "softmax");
  const double m = *std::max_element(z.begin(), z.end());
  Vector p(z.size());
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp(z[i] - m);
    s += p[i];
  }
  for (double& x : p) x /= s;
  return p;
}

Vector log_softmax(std::span<const double> z) {
  const double lse = log_sum_exp(z);
  Vector out(z.begin(), z.end());
  for (double& x : out) x -= lse;
  return out;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw InvalidInput("kl_divergence: length mismatch");
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) {
      throw DomainError("kl_divergence: q has no mass where p > 0 (index " +
                        std::to_string(i) + ")");
    }
    kl += p[i] * std::log(p[i] / q[i]);
  }
  // Rounding can leave a tiny negative value for p ~= q.
  return std::max(kl, 0.0);
}

double js_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw InvalidInput("js_divergence: length mismatch");
  }
  Vector m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = 0.5 * (p[i] + q[i]);
  return 0.5 * kl_divergence(p, m) + 0.5 * kl_divergence(q, m);
}

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

SortedWithIndices sort_desc_with_indices(std::span<const double> v) {
  require_finite(v, "sort_desc_with_indices");
  SortedWithIndices out;
  out.indices.resize(v.size());
  std::iota(out.indices.begin(), out.indices.end(), std::size_t{0});
  std::stable_sort(out.indices.begin(), out.indices.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  out.values.reserve(v.size());
  for (std::size_t i : out.indices) out.values.push_back(v[i]);
  return out;
}

Matrix standard_normal_matrix(SeededRng& rng, std::size_t rows,
                              std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw InvalidInput("standard_normal_matrix: rows and cols must be >= 1");
  }
  Matrix m(rows, cols);
  for (double& x : m.data) x = rng.normal();
  return m;
}

}  // namespace zipfls
