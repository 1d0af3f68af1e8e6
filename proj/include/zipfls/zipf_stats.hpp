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

// Statistics of ranked softmax outputs: the Gaussian-logits simulation,
// maximum-likelihood fits of truncated Zipf, exponential and log-normal laws
// over ranks 1..K, a goodness-of-fit battery, and signal-to-noise analysis of
// per-rank probabilities.

#ifndef ZIPFLS_ZIPF_STATS_HPP_
#define ZIPFLS_ZIPF_STATS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "zipfls/numerics.hpp"

namespace zipfls {

// Averaged sorted predictions over ranks 1..K (index r-1).
struct EmpiricalRankDistribution {
  Vector mean_probs;
  Vector std_probs;                       // optional, same length when set
  std::optional<Matrix> per_sample_probs;  // n_samples x K, rows descending

  std::size_t top_k() const { return mean_probs.size(); }
};

// Each row of `probs` is one sample's predicted distribution. Rows are sorted
// descending, averaged, and truncated to the top `top_k` ranks.
EmpiricalRankDistribution rank_distribution_from_probs(
    const Matrix& probs, std::size_t top_k, bool keep_per_sample = false);

// Draws N(0, 1) logits for every sample, sorts each row, applies softmax,
// averages across samples and keeps the `top_k` largest ranks.
EmpiricalRankDistribution simulate_gaussian_softmax(
    SeededRng& rng, std::size_t n_samples, std::size_t n_classes,
    std::size_t top_k, bool keep_per_sample = false);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Least-squares line through (log r, log values[r-1]).
LineFit loglog_fit(std::span<const double> values);

enum class Family { kZipf, kExponential, kLogNormal };

std::string_view family_name(Family f);
Family parse_family(std::string_view name);

// Search brackets for the maximum-likelihood fits.
inline constexpr double kAlphaLo = 0.0, kAlphaHi = 10.0;
inline constexpr double kRateLo = 0.0, kRateHi = 10.0;
inline constexpr double kSigmaLo = 1e-6, kSigmaHi = 10.0;
inline constexpr double kMuLo = -10.0, kMuHi = 10.0;
inline constexpr double kFitTolerance = 1e-8;

// Model pmf over ranks 1..K, normalized on that finite support.
// zipf: {alpha}; exponential: {rate}; lognormal: {mu, sigma}.
Vector model_pmf(Family family, std::span<const double> params, std::size_t k);

double fit_zipf_mle(const EmpiricalRankDistribution& emp);
double fit_exponential_mle(const EmpiricalRankDistribution& emp);
std::pair<double, double> fit_lognormal_mle(
    const EmpiricalRankDistribution& emp);

struct FitReport {
  Family family = Family::kZipf;
  std::vector<std::pair<std::string, double>> params;
  double log_likelihood = 0.0;  // weighted, per unit mass
  double r_squared = 0.0;       // computed on log probabilities
  double kl = 0.0;              // KL(empirical || model)
  double js = 0.0;
  double chi_square = 0.0;
  std::size_t chi_square_dof = 0;
  double chi_square_p = 0.0;
  std::size_t chi_square_cells = 0;
  std::size_t merged_cells = 0;  // rank cells folded into neighbours (E < 5)
  double ks_d = 0.0;
  double ks_p = 0.0;
  std::size_t n_mc = 0;

  Vector param_values() const;
};

// Fits `family` and fills `params` and `log_likelihood`.
FitReport fit_family(const EmpiricalRankDistribution& emp, Family family);

inline constexpr std::size_t kDefaultMonteCarloSamples = 100000;

// R^2 (log space), KL and JS against the normalized empirical distribution;
// chi-square and Kolmogorov-Smirnov on `n_mc` categorical draws from it.
FitReport goodness_battery(const EmpiricalRankDistribution& emp,
                           FitReport fit, SeededRng& rng,
                           std::size_t n_mc = kDefaultMonteCarloSamples);

// Survival function of the asymptotic Kolmogorov distribution,
// P(K > x) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 x^2).
double kolmogorov_survival(double x);

// R^2 of model vs data computed on log values.
double log_r_squared(std::span<const double> data, std::span<const double> model);

struct SnrCurve {
  Vector mean;
  Vector std;
  Vector snr;  // +infinity where std == 0

  std::size_t size() const { return mean.size(); }
  // Number of leading ranks with SNR > 1.
  std::size_t crossing_rank() const;
  // True when {r : SNR(r) > 1} is exactly 1..crossing_rank().
  bool above_one_is_prefix() const;
};

// Per-rank mean, unbiased std and their ratio over rows of sorted
// probabilities.
SnrCurve snr_curve(const Matrix& sorted_probs);

// CSV. Doubles are printed with 17 significant digits.
void write_rank_csv(const EmpiricalRankDistribution& emp,
                    const std::string& path, bool with_std);
EmpiricalRankDistribution read_rank_csv(const std::string& path);
void write_snr_csv(const SnrCurve& curve, const std::string& path);
// Matrix of numbers, one sample per row; a non-numeric first line is treated
// as a header.
Matrix read_matrix_csv(const std::string& path);

std::string fit_reports_to_json(std::span<const FitReport> reports);

}  // namespace zipfls

#endif  // ZIPFLS_ZIPF_STATS_HPP_
