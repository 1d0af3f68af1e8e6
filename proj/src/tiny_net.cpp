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

#include "zipfls/tiny_net.hpp"

#include <algorithm>
#include <cmath>

namespace zipfls {
namespace {

// 3x3 convolution, stride 1, zero padding 1, channel-last tensors and HWIO
// weights: w[((ky * 3 + kx) * cin + ci) * cout + co].
void conv3x3_forward(const double* in, std::size_t size, std::size_t cin,
                     const double* w, const double* b, std::size_t cout,
                     double* out) {
  const long n = static_cast<long>(size);
  for (long y = 0; y < n; ++y) {
    for (long x = 0; x < n; ++x) {
      double* o = out + (y * n + x) * cout;
      for (std::size_t co = 0; co < cout; ++co) o[co] = b[co];
      for (long ky = 0; ky < 3; ++ky) {
        const long yy = y + ky - 1;
        if (yy < 0 || yy >= n) continue;
        for (long kx = 0; kx < 3; ++kx) {
          const long xx = x + kx - 1;
          if (xx < 0 || xx >= n) continue;
          const double* src = in + (yy * n + xx) * cin;
          const double* wt = w + (ky * 3 + kx) * cin * cout;
          for (std::size_t ci = 0; ci < cin; ++ci) {
            const double v = src[ci];
            const double* wr = wt + ci * cout;
            for (std::size_t co = 0; co < cout; ++co) o[co] += wr[co] * v;
          }
        }
      }
    }
  }
}

// Accumulates weight and bias gradients, and the input gradient when `din`
// is non-null.
void conv3x3_backward(const double* in, std::size_t size, std::size_t cin,
                      const double* w, std::size_t cout, const double* dout,
                      double* dw, double* db, double* din) {
  const long n = static_cast<long>(size);
  for (long y = 0; y < n; ++y) {
    for (long x = 0; x < n; ++x) {
      const double* g = dout + (y * n + x) * cout;
      for (std::size_t co = 0; co < cout; ++co) db[co] += g[co];
      for (long ky = 0; ky < 3; ++ky) {
        const long yy = y + ky - 1;
        if (yy < 0 || yy >= n) continue;
        for (long kx = 0; kx < 3; ++kx) {
          const long xx = x + kx - 1;
          if (xx < 0 || xx >= n) continue;
          const double* src = in + (yy * n + xx) * cin;
          const std::size_t tap = static_cast<std::size_t>(ky * 3 + kx);
          double* dwt = dw + tap * cin * cout;
          const double* wt = w + tap * cin * cout;
          double* dsrc = din ? din + (yy * n + xx) * cin : nullptr;
          for (std::size_t ci = 0; ci < cin; ++ci) {
            const double v = src[ci];
            double* dwr = dwt + ci * cout;
            for (std::size_t co = 0; co < cout; ++co) dwr[co] += v * g[co];
            if (dsrc) {
              const double* wr = wt + ci * cout;
              double acc = 0.0;
              for (std::size_t co = 0; co < cout; ++co) acc += wr[co] * g[co];
              dsrc[ci] += acc;
            }
          }
        }
      }
    }
  }
}

// 2x2 average pooling of relu(in).
void relu_avgpool2(const double* in, std::size_t size, std::size_t ch,
                   double* out) {
  const std::size_t half = size / 2;
  for (std::size_t y = 0; y < half; ++y) {
    for (std::size_t x = 0; x < half; ++x) {
      double* o = out + (y * half + x) * ch;
      for (std::size_t c = 0; c < ch; ++c) o[c] = 0.0;
      for (std::size_t dy = 0; dy < 2; ++dy) {
        for (std::size_t dx = 0; dx < 2; ++dx) {
          const double* s = in + ((2 * y + dy) * size + 2 * x + dx) * ch;
          for (std::size_t c = 0; c < ch; ++c) o[c] += std::max(s[c], 0.0);
        }
      }
      for (std::size_t c = 0; c < ch; ++c) o[c] *= 0.25;
    }
  }
}

// Gradient of relu_avgpool2 with respect to its (pre-activation) input.
void relu_avgpool2_backward(const double* in, std::size_t size, std::size_t ch,
                            const double* dout, double* din) {
  const std::size_t half = size / 2;
  for (std::size_t y = 0; y < size; ++y) {
    for (std::size_t x = 0; x < size; ++x) {
      const double* s = in + (y * size + x) * ch;
      const double* g = dout + ((y / 2) * half + x / 2) * ch;
      double* d = din + (y * size + x) * ch;
      for (std::size_t c = 0; c < ch; ++c) d[c] = s[c] > 0.0 ? 0.25 * g[c] : 0.0;
    }
  }
}

Vector global_average(const Vector& map, std::size_t locations,
                      std::size_t ch) {
  Vector g(ch, 0.0);
  for (std::size_t k = 0; k < locations; ++k) {
    for (std::size_t c = 0; c < ch; ++c) g[c] += map[k * ch + c];
  }
  for (double& v : g) v /= static_cast<double>(locations);
  return g;
}

void linear_backward(std::span<const double> x, std::span<const double> dz,
                     const double* w, std::size_t depth, double* dw,
                     double* db, Vector& dx) {
  dx.assign(depth, 0.0);
  for (std::size_t c = 0; c < dz.size(); ++c) {
    const double g = dz[c];
    db[c] += g;
    const double* wr = w + c * depth;
    double* dwr = dw + c * depth;
    for (std::size_t d = 0; d < depth; ++d) {
      dwr[d] += g * x[d];
      dx[d] += g * wr[d];
    }
  }
}

}  // namespace

void NetShape::validate() const {
  if (image_size < 4 || image_size % 4 != 0) {
    throw InvalidInput("NetShape: image size must be a positive multiple of 4");
  }
  if (in_channels == 0 || conv1_channels == 0 || conv2_channels == 0) {
    throw InvalidInput("NetShape: channel counts must be positive");
  }
  if (num_classes < 2) throw InvalidInput("NetShape: need >= 2 classes");
}

ParamLayout::ParamLayout(const NetShape& s) {
  std::size_t off = 0;
  auto take = [&off](std::size_t n) {
    const std::size_t at = off;
    off += n;
    return at;
  };
  conv1_w = take(9 * s.in_channels * s.conv1_channels);
  conv1_b = take(s.conv1_channels);
  conv2_w = take(9 * s.conv1_channels * s.conv2_channels);
  conv2_b = take(s.conv2_channels);
  fc_w = take(s.num_classes * s.conv2_channels);
  fc_b = take(s.num_classes);
  aux_w = take(s.aux_head ? s.num_classes * s.conv1_channels : 0);
  aux_b = take(s.aux_head ? s.num_classes : 0);
  total = off;
}

TinyNet::TinyNet(const NetShape& shape, SeededRng& rng)
    : shape_(shape), layout_((shape.validate(), shape)), params_(layout_.total) {
  auto fill = [&](std::size_t at, std::size_t n, double sd) {
    for (std::size_t i = 0; i < n; ++i) params_[at + i] = sd * rng.normal();
  };
  const auto& s = shape_;
  fill(layout_.conv1_w, 9 * s.in_channels * s.conv1_channels,
       std::sqrt(2.0 / (9.0 * s.in_channels)));
  fill(layout_.conv2_w, 9 * s.conv1_channels * s.conv2_channels,
       std::sqrt(2.0 / (9.0 * s.conv1_channels)));
  fill(layout_.fc_w, s.num_classes * s.conv2_channels,
       std::sqrt(1.0 / s.conv2_channels));
  if (s.aux_head) {
    fill(layout_.aux_w, s.num_classes * s.conv1_channels,
         std::sqrt(1.0 / s.conv1_channels));
  }
}

SharedClassifier TinyNet::classifier() const {
  const std::size_t c = shape_.num_classes, d = shape_.conv2_channels;
  return SharedClassifier{{params_.data() + layout_.fc_w, c * d},
                          {params_.data() + layout_.fc_b, c},
                          c,
                          d};
}

std::optional<SharedClassifier> TinyNet::aux_classifier() const {
  if (!shape_.aux_head) return std::nullopt;
  const std::size_t c = shape_.num_classes, d = shape_.conv1_channels;
  return SharedClassifier{{params_.data() + layout_.aux_w, c * d},
                          {params_.data() + layout_.aux_b, c},
                          c,
                          d};
}

ForwardResult TinyNet::forward(std::span<const double> image,
                               Activations* tape) const {
  const auto& s = shape_;
  const std::size_t size = s.image_size, half = s.aux_size(),
                    quarter = s.feature_size();
  if (image.size() != size * size * s.in_channels) {
    throw InvalidInput("TinyNet::forward: image has " +
                       std::to_string(image.size()) + " values, expected " +
                       std::to_string(size * size * s.in_channels));
  }
  const double* p = params_.data();

  Vector conv1(size * size * s.conv1_channels);
  conv3x3_forward(image.data(), size, s.in_channels, p + layout_.conv1_w,
                  p + layout_.conv1_b, s.conv1_channels, conv1.data());
  Vector pool1(half * half * s.conv1_channels);
  relu_avgpool2(conv1.data(), size, s.conv1_channels, pool1.data());

  Vector conv2(half * half * s.conv2_channels);
  conv3x3_forward(pool1.data(), half, s.conv1_channels, p + layout_.conv2_w,
                  p + layout_.conv2_b, s.conv2_channels, conv2.data());

  ForwardResult out;
  out.features = FeatureMap(quarter, quarter, s.conv2_channels);
  relu_avgpool2(conv2.data(), half, s.conv2_channels, out.features.data.data());

  const Vector pooled =
      global_average(out.features.data, quarter * quarter, s.conv2_channels);
  out.logits.resize(s.num_classes);
  classifier().apply(pooled, out.logits);

  Vector aux_pooled;
  if (s.aux_head) {
    aux_pooled = global_average(pool1, half * half, s.conv1_channels);
    out.aux_logits.resize(s.num_classes);
    aux_classifier()->apply(aux_pooled, out.aux_logits);
    FeatureMap aux(half, half, s.conv1_channels);
    aux.data = pool1;
    out.aux_features = std::move(aux);
  }

  if (tape) {
    tape->input.assign(image.begin(), image.end());
    tape->conv1_pre = std::move(conv1);
    tape->pool1 = std::move(pool1);
    tape->conv2_pre = std::move(conv2);
    tape->pooled = pooled;
    tape->aux_pooled = std::move(aux_pooled);
  }
  return out;
}

void TinyNet::backward(const Activations& tape, std::span<const double> dlogits,
                       std::span<const double> daux_logits,
                       std::span<double> grad) const {
  const auto& s = shape_;
  if (grad.size() != layout_.total || dlogits.size() != s.num_classes) {
    throw InvalidInput("TinyNet::backward: gradient shape mismatch");
  }
  const std::size_t size = s.image_size, half = s.aux_size(),
                    quarter = s.feature_size();
  const double* p = params_.data();
  double* g = grad.data();

  Vector dpooled;
  linear_backward(tape.pooled, dlogits, p + layout_.fc_w, s.conv2_channels,
                  g + layout_.fc_w, g + layout_.fc_b, dpooled);

  // GAP spreads the gradient evenly over the final map.
  const double inv_q = 1.0 / static_cast<double>(quarter * quarter);
  Vector dfeat(quarter * quarter * s.conv2_channels);
  for (std::size_t k = 0; k < quarter * quarter; ++k) {
    for (std::size_t c = 0; c < s.conv2_channels; ++c) {
      dfeat[k * s.conv2_channels + c] = dpooled[c] * inv_q;
    }
  }
  Vector dconv2(half * half * s.conv2_channels);
  relu_avgpool2_backward(tape.conv2_pre.data(), half, s.conv2_channels,
                         dfeat.data(), dconv2.data());

  Vector dpool1(half * half * s.conv1_channels, 0.0);
  conv3x3_backward(tape.pool1.data(), half, s.conv1_channels,
                   p + layout_.conv2_w, s.conv2_channels, dconv2.data(),
                   g + layout_.conv2_w, g + layout_.conv2_b, dpool1.data());

  if (s.aux_head && !daux_logits.empty()) {
    if (daux_logits.size() != s.num_classes) {
      throw InvalidInput("TinyNet::backward: aux gradient shape mismatch");
    }
    Vector daux_pooled;
    linear_backward(tape.aux_pooled, daux_logits, p + layout_.aux_w,
                    s.conv1_channels, g + layout_.aux_w, g + layout_.aux_b,
                    daux_pooled);
    const double inv_h = 1.0 / static_cast<double>(half * half);
    for (std::size_t k = 0; k < half * half; ++k) {
      for (std::size_t c = 0; c < s.conv1_channels; ++c) {
        dpool1[k * s.conv1_channels + c] += daux_pooled[c] * inv_h;
      }
    }
  }

  Vector dconv1(size * size * s.conv1_channels);
  relu_avgpool2_backward(tape.conv1_pre.data(), size, s.conv1_channels,
                         dpool1.data(), dconv1.data());
  conv3x3_backward(tape.input.data(), size, s.in_channels, p + layout_.conv1_w,
                   s.conv1_channels, dconv1.data(), g + layout_.conv1_w,
                   g + layout_.conv1_b, nullptr);
}

}  // namespace zipfls
