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

#include "zipfls/losses.hpp"

#include <cmath>
#include <string>

namespace zipfls {
namespace {

void check_label(std::span<const double> z, std::size_t y, const char* who) {
  if (z.size() < 2) {
    throw InvalidInput(std::string(who) + ": need at least two classes");
  }
  if (y >= z.size()) {
    throw InvalidInput(std::string(who) + ": label out of range");
  }
  require_finite(z, who);
}

// log-sum-exp over all entries except `skip`.
double nontarget_log_normalizer(std::span<const double> z, std::size_t skip) {
  double m = -INFINITY;
  for (std::size_t c = 0; c < z.size(); ++c) {
    if (c != skip && z[c] > m) m = z[c];
  }
  double s = 0.0;
  for (std::size_t c = 0; c < z.size(); ++c) {
    if (c != skip) s += std::exp(z[c] - m);
  }
  return m + std::log(s);
}

}  // namespace

void SmoothingConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidInput("lambda must be finite and >= 0");
  }
  if (!(ls_epsilon >= 0.0 && ls_epsilon < 1.0)) {
    throw InvalidInput("ls_epsilon must lie in [0, 1)");
  }
  if (!(aux_ce_weight >= 0.0) || !std::isfinite(aux_ce_weight)) {
    throw InvalidInput("aux_ce_weight must be finite and >= 0");
  }
}

LossValue cross_entropy(std::span<const double> z, std::size_t y) {
  check_label(z, y, "cross_entropy");
  const Vector log_p = log_softmax(z);
  LossValue out;
  out.value = -log_p[y];
  out.grad.resize(z.size());
  for (std::size_t c = 0; c < z.size(); ++c) out.grad[c] = std::exp(log_p[c]);
  out.grad[y] -= 1.0;
  return out;
}

Vector normalized_nontarget_probs(std::span<const double> z, std::size_t y) {
  check_label(z, y, "normalized_nontarget_probs");
  const double lse = nontarget_log_normalizer(z, y);
  Vector p(z.size(), 0.0);
  for (std::size_t c = 0; c < z.size(); ++c) {
    if (c != y) p[c] = std::exp(z[c] - lse);
  }
  return p;
}

LossValue zipf_loss(std::span<const double> z, std::size_t y,
                    const ZipfSoftLabel& ptilde) {
  check_label(z, y, "zipf_loss");
  if (ptilde.probs.size() != z.size()) {
    throw InvalidInput("zipf_loss: soft label length " +
                       std::to_string(ptilde.probs.size()) +
                       " != logit count " + std::to_string(z.size()));
  }
  if (ptilde.target != y) {
    throw InvalidInput("zipf_loss: soft label was built for another target");
  }
  const double lse = nontarget_log_normalizer(z, y);
  LossValue out;
  out.grad.assign(z.size(), 0.0);
  for (std::size_t c = 0; c < z.size(); ++c) {
    if (c == y) continue;
    const double log_phat = z[c] - lse;
    const double t = ptilde.probs[c];
    if (t > 0.0) out.value += t * (std::log(t) - log_phat);
    out.grad[c] = std::exp(log_phat) - t;
  }
  if (out.value < 0.0) out.value = 0.0;
  return out;
}

LossValue label_smoothing_loss(std::span<const double> z, std::size_t y,
                               double ls_epsilon) {
  check_label(z, y, "label_smoothing_loss");
  if (!(ls_epsilon >= 0.0 && ls_epsilon < 1.0)) {
    throw InvalidInput("label_smoothing_loss: epsilon must lie in [0, 1)");
  }
  const Vector log_p = log_softmax(z);
  const double off = ls_epsilon / static_cast<double>(z.size() - 1);
  LossValue out;
  out.grad.resize(z.size());
  for (std::size_t c = 0; c < z.size(); ++c) {
    const double t = (c == y) ? 1.0 - ls_epsilon : off;
    if (t > 0.0) out.value -= t * log_p[c];
    out.grad[c] = std::exp(log_p[c]) - t;
  }
  return out;
}

CombinedLoss combined_loss(std::span<const double> z, std::size_t y,
                           const ZipfSoftLabel* ptilde,
                           const SmoothingConfig& cfg,
                           std::optional<AuxiliaryHead> aux) {
  cfg.validate();
  CombinedLoss out;
  LossValue ce = cross_entropy(z, y);
  out.ce = ce.value;
  out.value = ce.value;
  out.grad = std::move(ce.grad);

  if (ptilde != nullptr) {
    const LossValue zl = zipf_loss(z, y, *ptilde);
    out.zipf = zl.value;
    out.value += cfg.lambda * zl.value;
    for (std::size_t c = 0; c < z.size(); ++c) {
      out.grad[c] += cfg.lambda * zl.grad[c];
    }
  }

  if (aux) {
    LossValue a = cross_entropy(aux->logits, aux->label);
    out.aux_ce = a.value;
    out.value += cfg.aux_ce_weight * a.value;
    for (double& g : a.grad) g *= cfg.aux_ce_weight;
    out.aux_grad = std::move(a.grad);
  }
  return out;
}

}  // namespace zipfls
