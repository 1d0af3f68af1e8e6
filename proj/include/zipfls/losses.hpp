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

// Losses over a single sample's logits together with their analytic
// gradients with respect to those logits.

#ifndef ZIPFLS_LOSSES_HPP_
#define ZIPFLS_LOSSES_HPP_

#include <cstddef>
#include <optional>
#include <span>

#include "zipfls/numerics.hpp"
#include "zipfls/zipf_label.hpp"

namespace zipfls {

struct LossValue {
  double value = 0.0;
  Vector grad;  // d value / d logits
};

struct SmoothingConfig {
  double lambda = 1.0;         // weight of the Zipf term
  double ls_epsilon = 0.1;     // uniform label smoothing mass
  double aux_ce_weight = 0.1;  // weight of the auxiliary head's CE

  void validate() const;
};

LossValue cross_entropy(std::span<const double> z, std::size_t y);

// Softmax over the logits with index != y; entry y is 0.
Vector normalized_nontarget_probs(std::span<const double> z, std::size_t y);

// KL(ptilde || phat) over the non-target classes. The gradient is
// phat_c - ptilde_c off the target and exactly 0 on it; ptilde is a constant.
LossValue zipf_loss(std::span<const double> z, std::size_t y,
                    const ZipfSoftLabel& ptilde);

// Cross-entropy against (1 - eps) on y and eps / (C - 1) elsewhere.
LossValue label_smoothing_loss(std::span<const double> z, std::size_t y,
                               double ls_epsilon);

struct AuxiliaryHead {
  std::span<const double> logits;
  std::size_t label = 0;
};

struct CombinedLoss {
  double value = 0.0;
  double ce = 0.0;
  double zipf = 0.0;
  double aux_ce = 0.0;
  Vector grad;      // w.r.t. the main logits
  Vector aux_grad;  // w.r.t. the auxiliary logits, empty without a head
};

// CE + lambda * Zipf (+ aux_ce_weight * CE(aux)). A missing soft label drops
// the Zipf term.
CombinedLoss combined_loss(std::span<const double> z, std::size_t y,
                           const ZipfSoftLabel* ptilde,
                           const SmoothingConfig& cfg,
                           std::optional<AuxiliaryHead> aux = std::nullopt);

}  // namespace zipfls

#endif  // ZIPFLS_LOSSES_HPP_
