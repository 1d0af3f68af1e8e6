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

// Training loop and experiment runner comparing plain cross-entropy, uniform
// label smoothing and Zipf soft labels (logit-sorted or dense-vote ranked).

#ifndef ZIPFLS_TRAIN_HPP_
#define ZIPFLS_TRAIN_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zipfls/dataset.hpp"
#include "zipfls/losses.hpp"
#include "zipfls/tiny_net.hpp"
#include "zipfls/zipf_label.hpp"
#include "zipfls/zipf_stats.hpp"

namespace zipfls {

enum class Method { kCe, kLs, kZipfLogit, kZipfDense };

inline constexpr Method kAllMethods[] = {Method::kCe, Method::kLs,
                                         Method::kZipfLogit, Method::kZipfDense};

std::string_view method_name(Method m);
// Throws InvalidInput listing the valid names.
Method parse_method(std::string_view name);

struct TrainConfig {
  DatasetOptions data;
  std::size_t conv1_channels = 8;
  std::size_t conv2_channels = 16;
  std::size_t epochs = 15;
  std::size_t batch_size = 32;
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::uint64_t seed = 0;  // also seeds the dataset
  Method method = Method::kZipfDense;
  SmoothingConfig smoothing;
  double alpha = kDefaultAlpha;
  // 1: vote on the final map only; 2: also vote with an auxiliary classifier
  // on the previous pooled map, trained with aux_ce_weight * CE.
  std::size_t dense_layers = 1;
  // Steps before the Zipf term is switched on.
  std::size_t warmup_steps = 0;

  NetShape net_shape() const;
  DatasetOptions dataset_options() const;
  void validate() const;
};

TrainConfig train_config_from_json(std::string_view text);
std::string train_config_to_json(const TrainConfig& cfg);

struct EpochMetrics {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double train_ce = 0.0;
  double train_zipf = 0.0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  // Mean entropy of the normalized non-target prediction on the test split.
  double test_nontarget_entropy = 0.0;
  // Mean entropy of the full prediction on the test split.
  double test_entropy = 0.0;
};

using MetricsHistory = std::vector<EpochMetrics>;

struct SgdState {
  Vector velocity;
};

struct BatchGradient {
  double loss = 0.0;
  double ce = 0.0;
  double zipf = 0.0;
  double aux_ce = 0.0;
  std::size_t correct = 0;
  Vector grad;  // mean over the batch
};

// Zipf soft labels for each sample of the batch, computed from the current
// network with no gradient path; empty optionals for methods without a Zipf
// term (or during warmup).
std::vector<std::optional<ZipfSoftLabel>> soft_labels_for_batch(
    const TinyNet& net, const Split& split,
    std::span<const std::size_t> indices, const TrainConfig& cfg,
    std::size_t step = 0);

// Soft label for one sample from an already computed forward pass.
std::optional<ZipfSoftLabel> soft_label_from_forward(const TinyNet& net,
                                                     const ForwardResult& fw,
                                                     std::size_t y,
                                                     const TrainConfig& cfg,
                                                     std::size_t step);

// Mean loss over the batch and its gradient with respect to every parameter.
// With empty `labels` each soft label is built from the same forward pass that
// produces the gradient; otherwise the given labels are held fixed.
BatchGradient loss_and_gradient(
    const TinyNet& net, const Split& split,
    std::span<const std::size_t> indices, const TrainConfig& cfg,
    std::span<const std::optional<ZipfSoftLabel>> labels, std::size_t step = 0);

// One SGD-with-momentum step on the batch. Throws NumericError if the loss is
// not finite.
BatchGradient backward_and_step(TinyNet& net, SgdState& opt,
                                const Split& split,
                                std::span<const std::size_t> indices,
                                const TrainConfig& cfg, std::size_t step);

std::vector<ForwardResult> forward_batch(const TinyNet& net, const Split& split,
                                         std::span<const std::size_t> indices);

struct Evaluation {
  double accuracy = 0.0;
  double nontarget_entropy = 0.0;
  double entropy = 0.0;
};

Evaluation evaluate(const TinyNet& net, const Split& split);

struct ExperimentResult {
  MetricsHistory history;
  TinyNet net;
};

ExperimentResult run_experiment(const TrainConfig& cfg);

// Sorted softmax predictions of `net` over `split`, averaged per rank.
EmpiricalRankDistribution collect_model_rank_distribution(
    const TinyNet& net, const Split& split, std::size_t top_k,
    bool keep_per_sample = false);

std::string history_to_csv(const MetricsHistory& history);
std::string summary_to_json(const TrainConfig& cfg,
                            const MetricsHistory& history);

struct MethodSummary {
  Method method = Method::kCe;
  std::vector<double> test_accuracy;  // one entry per seed
  std::vector<double> train_accuracy;
  std::vector<double> nontarget_entropy;
};

struct ComparisonTable {
  std::vector<std::uint64_t> seeds;
  std::vector<MethodSummary> methods;
};

// Runs every method for every seed (seed overrides cfg.seed).
ComparisonTable compare_methods(const TrainConfig& cfg,
                                std::span<const std::uint64_t> seeds);
std::string comparison_to_json(const ComparisonTable& table);

}  // namespace zipfls

#endif  // ZIPFLS_TRAIN_HPP_
