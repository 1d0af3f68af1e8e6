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

#include "zipfls/dataset.hpp"

#include <cmath>
#include <fstream>
#include <iterator>

namespace zipfls {
namespace {

// Sum of a few signed Gaussian blobs at random positions, standardized to zero
// mean and unit variance.
Vector random_pattern(SeededRng& rng, std::size_t size, std::size_t channels) {
  const std::size_t kBlobs = 4;
  Vector img(size * size * channels, 0.0);
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t b = 0; b < kBlobs; ++b) {
      const double cy = rng.uniform() * static_cast<double>(size);
      const double cx = rng.uniform() * static_cast<double>(size);
      const double width = 1.0 + rng.uniform() * 0.15 * static_cast<double>(size);
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      for (std::size_t y = 0; y < size; ++y) {
        for (std::size_t x = 0; x < size; ++x) {
          const double dy = static_cast<double>(y) - cy;
          const double dx = static_cast<double>(x) - cx;
          img[(y * size + x) * channels + c] +=
              sign * std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
        }
      }
    }
  }
  double mean = 0.0;
  for (double v : img) mean += v;
  mean /= static_cast<double>(img.size());
  double var = 0.0;
  for (double v : img) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(img.size()));
  for (double& v : img) v = sd > 0.0 ? (v - mean) / sd : 0.0;
  return img;
}

void standardize(std::span<double> v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / static_cast<double>(v.size()));
  for (double& x : v) x = sd > 0.0 ? (x - mean) / sd : 0.0;
}

void render(SeededRng& rng, const Matrix& prototypes, std::size_t per_class,
            double noise, Split& split) {
  const std::size_t pixels = prototypes.cols;
  split.images.reserve(prototypes.rows * per_class * pixels);
  for (std::size_t c = 0; c < prototypes.rows; ++c) {
    const auto proto = prototypes.row(c);
    for (std::size_t i = 0; i < per_class; ++i) {
      for (std::size_t p = 0; p < pixels; ++p) {
        split.images.push_back(proto[p] + noise * rng.normal());
      }
      split.labels.push_back(c);
    }
  }
}

}  // namespace

SyntheticDataset generate_dataset(const DatasetOptions& o) {
  if (o.num_classes < 3) {
    throw InvalidInput("generate_dataset: need at least 3 classes");
  }
  if (o.image_size < 1 || o.channels < 1 || o.train_per_class < 1) {
    throw InvalidInput("generate_dataset: sizes must be positive");
  }
  if (!(o.noise >= 0.0) || !(o.group_overlap >= 0.0 && o.group_overlap <= 1.0)) {
    throw InvalidInput("generate_dataset: noise >= 0, overlap in [0, 1]");
  }
  if (o.group_size < 1) throw InvalidInput("generate_dataset: group_size >= 1");

  SeededRng root(o.seed);
  SeededRng proto_rng = root.derive(0);
  SeededRng train_rng = root.derive(1);
  SeededRng test_rng = root.derive(2);

  const std::size_t pixels = o.image_size * o.image_size * o.channels;
  const std::size_t groups = (o.num_classes + o.group_size - 1) / o.group_size;
  std::vector<Vector> bases;
  for (std::size_t g = 0; g < groups; ++g) {
    bases.push_back(random_pattern(proto_rng, o.image_size, o.channels));
  }

  SyntheticDataset ds;
  ds.num_classes = o.num_classes;
  ds.prototypes = Matrix(o.num_classes, pixels);
  const double shared = std::sqrt(o.group_overlap);
  const double own = std::sqrt(1.0 - o.group_overlap);
  for (std::size_t c = 0; c < o.num_classes; ++c) {
    const Vector u = random_pattern(proto_rng, o.image_size, o.channels);
    const Vector& b = bases[c / o.group_size];
    auto row = ds.prototypes.row(c);
    for (std::size_t p = 0; p < pixels; ++p) row[p] = shared * b[p] + own * u[p];
    standardize(row);
  }

  ds.similarity = Matrix(o.num_classes, o.num_classes);
  for (std::size_t a = 0; a < o.num_classes; ++a) {
    for (std::size_t b = a; b < o.num_classes; ++b) {
      double dot = 0.0, na = 0.0, nb = 0.0;
      for (std::size_t p = 0; p < pixels; ++p) {
        dot += ds.prototypes(a, p) * ds.prototypes(b, p);
        na += ds.prototypes(a, p) * ds.prototypes(a, p);
        nb += ds.prototypes(b, p) * ds.prototypes(b, p);
      }
      const double s = a == b ? 1.0 : dot / std::sqrt(na * nb);
      ds.similarity(a, b) = s;
      ds.similarity(b, a) = s;
    }
  }

  for (Split* s : {&ds.train, &ds.test}) {
    s->image_size = o.image_size;
    s->channels = o.channels;
  }
  render(train_rng, ds.prototypes, o.train_per_class, o.noise, ds.train);
  render(test_rng, ds.prototypes, o.test_per_class, o.noise, ds.test);
  return ds;
}

Split load_cifar_binary(const std::string& path, bool cifar100,
                        std::size_t limit) {
  constexpr std::size_t kSide = 32, kChannels = 3;
  constexpr std::size_t kPixels = kSide * kSide * kChannels;
  const std::size_t label_bytes = cifar100 ? 2 : 1;
  const std::size_t record = label_bytes + kPixels;

  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open CIFAR file '" + path + "'");
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  if (bytes.empty() || bytes.size() % record != 0) {
    throw IoError("'" + path + "' is not a CIFAR binary file (size " +
                  std::to_string(bytes.size()) + " is not a multiple of " +
                  std::to_string(record) + ")");
  }
  std::size_t n = bytes.size() / record;
  if (limit > 0 && limit < n) n = limit;

  Split split;
  split.image_size = kSide;
  split.channels = kChannels;
  split.images.resize(n * kPixels);
  split.labels.resize(n);
  double mean[kChannels] = {0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char* rec = bytes.data() + i * record;
    split.labels[i] = rec[label_bytes - 1];
    const unsigned char* px = rec + label_bytes;
    // Source layout is planar (all R, then G, then B).
    for (std::size_t c = 0; c < kChannels; ++c) {
      for (std::size_t p = 0; p < kSide * kSide; ++p) {
        const double v = px[c * kSide * kSide + p] / 255.0;
        split.images[i * kPixels + p * kChannels + c] = v;
        mean[c] += v;
      }
    }
  }
  for (double& m : mean) m /= static_cast<double>(n * kSide * kSide);
  for (std::size_t i = 0; i < split.images.size(); ++i) {
    split.images[i] -= mean[i % kChannels];
  }
  return split;
}

}  // namespace zipfls
