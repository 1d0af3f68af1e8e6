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

#include "zipfls/zipf_label.hpp"

#include <cmath>
#include <string>

namespace zipfls {

void RankAssignment::validate(std::size_t num_classes) const {
  if (excluded >= num_classes) {
    throw InvalidInput("RankAssignment: target index out of range");
  }
  std::vector<char> seen(num_classes, 0);
  seen[excluded] = 1;
  auto mark = [&](std::size_t c) {
    if (c >= num_classes) {
      throw InvalidInput("RankAssignment: class index " + std::to_string(c) +
                         " out of range");
    }
    if (seen[c]) {
      throw InvalidInput("RankAssignment: class " + std::to_string(c) +
                         " appears more than once");
    }
    seen[c] = 1;
  };
  for (std::size_t c : ranked) mark(c);
  for (std::size_t c : unranked) mark(c);
  if (ranked.size() + unranked.size() + 1 != num_classes) {
    throw InvalidInput("RankAssignment: classes missing from the partition");
  }
}

Vector zipf_pmf(const ZipfParams& params) {
  if (params.support_size < 1) {
    throw InvalidInput("zipf_pmf: support size must be >= 1");
  }
  if (!std::isfinite(params.alpha) || params.alpha < 0.0) {
    throw InvalidInput("zipf_pmf: alpha must be finite and >= 0");
  }
  Vector f(params.support_size);
  double total = 0.0;
  for (std::size_t r = 1; r <= params.support_size; ++r) {
    f[r - 1] = std::pow(static_cast<double>(r), -params.alpha);
    total += f[r - 1];
  }
  for (double& x : f) x /= total;
  return f;
}

ZipfSoftLabel make_zipf_soft_label(const RankAssignment& ranks, double alpha,
                                   std::size_t num_classes) {
  if (num_classes < 2) {
    throw InvalidInput("make_zipf_soft_label: need at least one non-target");
  }
  if (!std::isfinite(alpha) || alpha <= 0.0) {
    throw InvalidInput("make_zipf_soft_label: alpha must be > 0");
  }
  ranks.validate(num_classes);

  const std::size_t n = num_classes - 1;
  const std::size_t k = ranks.ranked.size();
  auto weight = [alpha](std::size_t r) {
    return std::pow(static_cast<double>(r), -alpha);
  };

  ZipfSoftLabel label;
  label.target = ranks.excluded;
  label.probs.assign(num_classes, 0.0);

  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double w = weight(i + 1);
    label.probs[ranks.ranked[i]] = w;
    total += w;
  }
  if (k < n) {
    double rest = 0.0;
    for (std::size_t r = k + 1; r <= n; ++r) rest += weight(r);
    const double tail = rest / static_cast<double>(n - k);
    for (std::size_t c : ranks.unranked) label.probs[c] = tail;
    total += rest;
  }
  for (double& p : label.probs) p /= total;
  return label;
}

}  // namespace zipfls
