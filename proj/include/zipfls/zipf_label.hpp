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

// Zipf distributions over ranks and the per-sample soft labels built from
// them.

#ifndef ZIPFLS_ZIPF_LABEL_HPP_
#define ZIPFLS_ZIPF_LABEL_HPP_

#include <cstddef>
#include <vector>

#include "zipfls/numerics.hpp"

namespace zipfls {

inline constexpr double kDefaultAlpha = 1.0;

struct ZipfParams {
  double alpha = kDefaultAlpha;
  std::size_t support_size = 1;
};

// Ranking of the non-target classes of one sample. `ranked[0]` holds rank 1;
// every class in `unranked` shares the rank after the last ranked class.
// Together with `excluded` (the target) the three sets partition 0..C-1.
struct RankAssignment {
  std::vector<std::size_t> ranked;
  std::vector<std::size_t> unranked;
  std::size_t excluded = 0;

  // Throws InvalidInput unless the sets partition 0..num_classes-1.
  void validate(std::size_t num_classes) const;
};

struct ZipfSoftLabel {
  Vector probs;  // length C, probs[target] == 0
  std::size_t target = 0;
};

// f(r) = r^-alpha / sum_{s=1..N} s^-alpha for r = 1..N (index r-1).
Vector zipf_pmf(const ZipfParams& params);

// Ranked classes get r^-alpha; each unranked class gets the mean of the unused
// weights r^-alpha for r = k+1..C-1 (the clipped uniform tail). The result is
// normalized and carries zero mass on the target.
ZipfSoftLabel make_zipf_soft_label(const RankAssignment& ranks, double alpha,
                                   std::size_t num_classes);

}  // namespace zipfls

#endif  // ZIPFLS_ZIPF_LABEL_HPP_
