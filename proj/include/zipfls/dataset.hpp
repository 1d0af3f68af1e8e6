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

// Synthetic image-classification data with controlled class similarity, and a
// reader for CIFAR binary batches.

#ifndef ZIPFLS_DATASET_HPP_
#define ZIPFLS_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "zipfls/numerics.hpp"

namespace zipfls {

// Images are stored channel-last, H x W x channels, one after another.
struct Split {
  std::size_t image_size = 0;
  std::size_t channels = 0;
  std::vector<double> images;
  std::vector<std::size_t> labels;

  std::size_t size() const { return labels.size(); }
  std::size_t pixels() const { return image_size * image_size * channels; }
  std::span<const double> image(std::size_t i) const {
    return {images.data() + i * pixels(), pixels()};
  }
};

struct DatasetOptions {
  std::uint64_t seed = 0;
  std::size_t num_classes = 20;
  std::size_t train_per_class = 200;
  std::size_t test_per_class = 50;
  std::size_t image_size = 16;
  std::size_t channels = 1;
  // Standard deviation of the per-pixel Gaussian noise; prototypes have unit
  // pixel variance.
  double noise = 1.5;
  // Classes are arranged in groups that share a common base pattern; the
  // squared weight of that shared component.
  std::size_t group_size = 4;
  double group_overlap = 0.5;
};

struct SyntheticDataset {
  std::size_t num_classes = 0;
  Split train;
  Split test;
  Matrix prototypes;  // num_classes x pixels
  Matrix similarity;  // cosine similarity of prototypes, num_classes^2
};

SyntheticDataset generate_dataset(const DatasetOptions& options);

// Reads a CIFAR-10 (1 label byte) or CIFAR-100 (coarse + fine label bytes,
// fine label used) binary file. Pixels are scaled to [0, 1] and centred per
// channel with the dataset mean. `limit` = 0 reads everything.
Split load_cifar_binary(const std::string& path, bool cifar100,
                        std::size_t limit = 0);

}  // namespace zipfls

#endif  // ZIPFLS_DATASET_HPP_
