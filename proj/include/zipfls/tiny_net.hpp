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

// A small convolutional classifier with hand-written backpropagation:
//
//   image -> conv3x3 -> ReLU -> avgpool2 -> [aux feature map]
//         -> conv3x3 -> ReLU -> avgpool2 -> [final feature map F]
//         -> GAP -> linear classifier -> logits
//
// The linear classifier applied after GAP is the same parameter block that
// classifies every spatial location of F for dense ranking. An optional
// auxiliary classifier reads the first pooled map.

#ifndef ZIPFLS_TINY_NET_HPP_
#define ZIPFLS_TINY_NET_HPP_

#include <cstddef>
#include <optional>
#include <span>

#include "zipfls/dense_ranking.hpp"
#include "zipfls/numerics.hpp"

namespace zipfls {

struct NetShape {
  std::size_t image_size = 16;
  std::size_t in_channels = 1;
  std::size_t conv1_channels = 8;
  std::size_t conv2_channels = 16;
  std::size_t num_classes = 20;
  bool aux_head = false;

  std::size_t aux_size() const { return image_size / 2; }
  std::size_t feature_size() const { return image_size / 4; }
  void validate() const;
};

// Offsets of every parameter block inside the flat parameter vector.
struct ParamLayout {
  std::size_t conv1_w, conv1_b;
  std::size_t conv2_w, conv2_b;
  std::size_t fc_w, fc_b;
  std::size_t aux_w, aux_b;
  std::size_t total;

  explicit ParamLayout(const NetShape& s);
};

struct ForwardResult {
  Vector logits;
  FeatureMap features;                     // final map, feature_size^2 x conv2
  std::optional<FeatureMap> aux_features;  // first pooled map when aux_head
  Vector aux_logits;                       // empty without aux head
};

// Intermediate activations kept by forward() for backward().
struct Activations {
  Vector input;
  Vector conv1_pre;  // image_size^2 x conv1
  Vector pool1;      // aux_size^2 x conv1
  Vector conv2_pre;  // aux_size^2 x conv2
  Vector pooled;     // GAP of the final map, conv2
  Vector aux_pooled;  // GAP of pool1, conv1 (aux head only)
};

class TinyNet {
 public:
  // He-normal weights, zero biases.
  TinyNet(const NetShape& shape, SeededRng& rng);

  const NetShape& shape() const { return shape_; }
  const ParamLayout& layout() const { return layout_; }
  Vector& params() { return params_; }
  const Vector& params() const { return params_; }

  // Views into params(); never copies.
  SharedClassifier classifier() const;
  std::optional<SharedClassifier> aux_classifier() const;

  // Records what backward() needs into `tape` when it is non-null.
  ForwardResult forward(std::span<const double> image,
                        Activations* tape = nullptr) const;

  // Adds d loss / d params into `grad` given the loss gradient with respect to
  // the logits (and the aux logits; pass an empty span to skip the head).
  void backward(const Activations& tape, std::span<const double> dlogits,
                std::span<const double> daux_logits,
                std::span<double> grad) const;

 private:
  NetShape shape_;
  ParamLayout layout_;
  Vector params_;
};

}  // namespace zipfls

#endif  // ZIPFLS_TINY_NET_HPP_
