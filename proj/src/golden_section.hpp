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

// Derivative-free scalar maximization used by the distribution fits.

#ifndef ZIPFLS_SRC_GOLDEN_SECTION_HPP_
#define ZIPFLS_SRC_GOLDEN_SECTION_HPP_

#include <cmath>
#include <cstddef>
#include <string>

#include "zipfls/numerics.hpp"

namespace zipfls::detail {

struct ScalarOptimum {
  double argmax = 0.0;
  double value = 0.0;
  int iterations = 0;
};

// Maximizes f on [lo, hi]. A coarse grid scan picks the bracket around the
// best grid point, then golden-section search shrinks it to width `tol`.
// The scan guards against the non-unimodal profiles that nested fits produce.
template <typename F>
ScalarOptimum golden_section_maximize(F&& f, double lo, double hi,
                                      double tol = 1e-8,
                                      std::size_t grid_points = 41,
                                      int max_iter = 500) {
  if (!(lo < hi)) throw InvalidInput("golden_section_maximize: empty bracket");
  const double step = (hi - lo) / static_cast<double>(grid_points - 1);
  std::size_t best = 0;
  double best_val = -INFINITY;
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double v = f(lo + step * static_cast<double>(i));
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = best == 0 ? lo : lo + step * static_cast<double>(best - 1);
  double b = best + 1 >= grid_points ? hi
                                      : lo + step * static_cast<double>(best + 1);

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int it = 0;
  while (b - a > tol) {
    if (++it > max_iter) {
      throw NumericError("golden_section_maximize: no convergence after " +
                         std::to_string(max_iter) + " iterations (bracket [" +
                         std::to_string(a) + ", " + std::to_string(b) + "])");
    }
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  ScalarOptimum out;
  out.argmax = 0.5 * (a + b);
  out.value = f(out.argmax);
  out.iterations = it;
  // The interior search never evaluates the bracket ends themselves.
  for (double edge : {lo, hi}) {
    if (std::abs(out.argmax - edge) <= tol) {
      const double v = f(edge);
      if (v >= out.value) {
        out.argmax = edge;
        out.value = v;
      }
    }
  }
  if (!std::isfinite(out.value)) {
    throw NumericError("golden_section_maximize: non-finite objective");
  }
  return out;
}

}  // namespace zipfls::detail

#endif  // ZIPFLS_SRC_GOLDEN_SECTION_HPP_
