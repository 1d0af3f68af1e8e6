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

// Numerical primitives shared by the rest of the library: the softmax family,
// divergences, index-tracking sorts and a seeded, platform-independent random
// number generator.
//
// All probability math is carried out in double precision.

#ifndef ZIPFLS_NUMERICS_HPP_
#define ZIPFLS_NUMERICS_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace zipfls {

using Vector = std::vector<double>;

// Error hierarchy. Every failure raised by the library derives from Error so
// that the C API can map it onto a status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Arguments that violate an operation's preconditions (shapes, ranges,
// non-finite inputs).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Mathematically undefined results, e.g. KL(p||q) where q lacks support.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Iterative procedures that failed to converge or produced non-finite values.
class NumericError : public Error {
 public:
  using Error::Error;
};

// File and text format problems.
class IoError : public Error {
 public:
  using Error::Error;
};

// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vector data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
  std::span<double> row(std::size_t r) {
    return {data.data() + r * cols, cols};
  }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }
};

// Seeded generator with a fixed algorithm so that streams are identical on
// every platform: std::mt19937_64 (whose output sequence is pinned by the C++
// standard) for raw bits, the top 53 bits for uniforms, and the Box-Muller
// transform for standard normals. std::normal_distribution is deliberately not
// used because its algorithm is implementation-defined.
class SeededRng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64+box_muller";

  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1).
  double uniform();
  // Uniform on (0, 1]; safe for log().
  double uniform_open_zero();
  double normal();
  // Uniform integer on [0, n).
  std::size_t below(std::size_t n);

  // Independent child stream; children of the same parent with distinct
  // indices never share a seed.
  SeededRng derive(std::uint64_t stream_index) const;

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// SplitMix64 finalizer, used to derive well-separated child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream_index);

Vector softmax(std::span<const double> z);
Vector log_softmax(std::span<const double> z);
double log_sum_exp(std::span<const double> z);

// Sum p_i log(p_i / q_i) with 0 log 0 := 0. Throws DomainError when some
// p_i > 0 has q_i == 0.
double kl_divergence(std::span<const double> p, std::span<const double> q);
double js_divergence(std::span<const double> p, std::span<const double> q);

// Shannon entropy in nats, 0 log 0 := 0.
double entropy(std::span<const double> p);

struct SortedWithIndices {
  Vector values;
  std::vector<std::size_t> indices;
};

// Stable descending sort; ties keep their original index order.
SortedWithIndices sort_desc_with_indices(std::span<const double> v);

Matrix standard_normal_matrix(SeededRng& rng, std::size_t rows,
                              std::size_t cols);

void require_finite(std::span<const double> v, const char* what);

}  // namespace zipfls

#endif  // ZIPFLS_NUMERICS_HPP_
