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

#include "zipfls/zipf_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "golden_section.hpp"
#include "json.hpp"
#include "text_io.hpp"

namespace zipfls {
namespace {

Vector normalized_weights(const EmpiricalRankDistribution& emp,
                          std::size_t min_k, const char* who) {
  if (emp.top_k() < min_k) {
    throw InvalidInput(std::string(who) + ": need at least " +
                       std::to_string(min_k) + " ranks");
  }
  require_finite(emp.mean_probs, who);
  double total = 0.0;
  for (double p : emp.mean_probs) {
    if (!(p > 0.0)) {
      throw InvalidInput(std::string(who) + ": rank probabilities must be > 0");
    }
    total += p;
  }
  Vector w(emp.mean_probs);
  for (double& x : w) x /= total;
  return w;
}

// Normalizes unnormalized log-probabilities in place.
void normalize_log(Vector& logp) {
  const double lse = log_sum_exp(logp);
  for (double& x : logp) x -= lse;
}

Vector zipf_log_pmf(double alpha, std::size_t k) {
  Vector lp(k);
  for (std::size_t r = 1; r <= k; ++r) {
    lp[r - 1] = -alpha * std::log(static_cast<double>(r));
  }
  normalize_log(lp);
  return lp;
}

Vector exponential_log_pmf(double rate, std::size_t k) {
  Vector lp(k);
  for (std::size_t r = 1; r <= k; ++r) {
    lp[r - 1] = -rate * static_cast<double>(r);
  }
  normalize_log(lp);
  return lp;
}

Vector lognormal_log_pmf(double mu, double sigma, std::size_t k) {
  Vector lp(k);
  for (std::size_t r = 1; r <= k; ++r) {
    const double lr = std::log(static_cast<double>(r));
    const double d = lr - mu;
    lp[r - 1] = -lr - d * d / (2.0 * sigma * sigma);
  }
  normalize_log(lp);
  return lp;
}

double weighted_ll(std::span<const double> w, const Vector& logp) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * logp[i];
  return s;
}

Vector model_log_pmf(Family family, std::span<const double> params,
                     std::size_t k) {
  switch (family) {
    case Family::kZipf:
      if (params.size() != 1) break;
      return zipf_log_pmf(params[0], k);
    case Family::kExponential:
      if (params.size() != 1) break;
      return exponential_log_pmf(params[0], k);
    case Family::kLogNormal:
      if (params.size() != 2) break;
      if (!(params[1] > 0.0)) {
        throw InvalidInput("lognormal sigma must be > 0");
      }
      return lognormal_log_pmf(params[0], params[1], k);
  }
  throw InvalidInput("wrong parameter count for family " +
                     std::string(family_name(family)));
}

}  // namespace

EmpiricalRankDistribution rank_distribution_from_probs(const Matrix& probs,
                                                       std::size_t top_k,
                                                       bool keep_per_sample) {
  if (probs.rows == 0 || probs.cols == 0) {
    throw InvalidInput("rank_distribution_from_probs: empty matrix");
  }
  if (top_k == 0 || top_k > probs.cols) {
    throw InvalidInput("top_k must lie in [1, number of classes]");
  }
  EmpiricalRankDistribution emp;
  emp.mean_probs.assign(top_k, 0.0);
  Vector sum_sq(top_k, 0.0);
  if (keep_per_sample) emp.per_sample_probs = Matrix(probs.rows, top_k);
  Vector sorted;
  for (std::size_t i = 0; i < probs.rows; ++i) {
    const auto row = probs.row(i);
    sorted.assign(row.begin(), row.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    for (std::size_t r = 0; r < top_k; ++r) {
      emp.mean_probs[r] += sorted[r];
      sum_sq[r] += sorted[r] * sorted[r];
      if (keep_per_sample) (*emp.per_sample_probs)(i, r) = sorted[r];
    }
  }
  const double n = static_cast<double>(probs.rows);
  for (double& m : emp.mean_probs) m /= n;
  if (probs.rows >= 2) {
    emp.std_probs.resize(top_k);
    for (std::size_t r = 0; r < top_k; ++r) {
      const double var =
          (sum_sq[r] - n * emp.mean_probs[r] * emp.mean_probs[r]) / (n - 1.0);
      emp.std_probs[r] = std::sqrt(std::max(var, 0.0));
    }
  }
  return emp;
}

EmpiricalRankDistribution simulate_gaussian_softmax(SeededRng& rng,
                                                    std::size_t n_samples,
                                                    std::size_t n_classes,
                                                    std::size_t top_k,
                                                    bool keep_per_sample) {
  if (n_samples == 0 || n_classes == 0) {
    throw InvalidInput("simulate_gaussian_softmax: sizes must be >= 1");
  }
  if (top_k == 0 || top_k > n_classes) {
    throw InvalidInput("simulate_gaussian_softmax: top_k must lie in [1, " +
                       std::to_string(n_classes) + "]");
  }
  Matrix probs = standard_normal_matrix(rng, n_samples, n_classes);
  for (std::size_t i = 0; i < n_samples; ++i) {
    auto row = probs.row(i);
    std::sort(row.begin(), row.end(), std::greater<>());
    const Vector p = softmax(row);
    std::copy(p.begin(), p.end(), row.begin());
  }
  return rank_distribution_from_probs(probs, top_k, keep_per_sample);
}

LineFit loglog_fit(std::span<const double> values) {
  if (values.size() < 2) throw InvalidInput("loglog_fit: need >= 2 points");
  const std::size_t n = values.size();
  Vector x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(values[i] > 0.0)) throw InvalidInput("loglog_fit: values must be > 0");
    x[i] = std::log(static_cast<double>(i + 1));
    y[i] = std::log(values[i]);
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += e * e;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

std::string_view family_name(Family f) {
  switch (f) {
    case Family::kZipf:
      return "zipf";
    case Family::kExponential:
      return "exponential";
    case Family::kLogNormal:
      return "lognormal";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "zipf") return Family::kZipf;
  if (name == "exponential" || name == "exp") return Family::kExponential;
  if (name == "lognormal" || name == "log-normal") return Family::kLogNormal;
  throw InvalidInput("unknown family '" + std::string(name) +
                     "' (expected zipf, exponential or lognormal)");
}

Vector model_pmf(Family family, std::span<const double> params, std::size_t k) {
  if (k == 0) throw InvalidInput("model_pmf: empty support");
  Vector p = model_log_pmf(family, params, k);
  for (double& x : p) x = std::exp(x);
  return p;
}

double fit_zipf_mle(const EmpiricalRankDistribution& emp) {
  const Vector w = normalized_weights(emp, 2, "fit_zipf_mle");
  const std::size_t k = w.size();
  return detail::golden_section_maximize(
             [&](double a) { return weighted_ll(w, zipf_log_pmf(a, k)); },
             kAlphaLo, kAlphaHi, kFitTolerance)
      .argmax;
}

double fit_exponential_mle(const EmpiricalRankDistribution& emp) {
  const Vector w = normalized_weights(emp, 2, "fit_exponential_mle");
  const std::size_t k = w.size();
  return detail::golden_section_maximize(
             [&](double l) { return weighted_ll(w, exponential_log_pmf(l, k)); },
             kRateLo, kRateHi, kFitTolerance)
      .argmax;
}

std::pair<double, double> fit_lognormal_mle(
    const EmpiricalRankDistribution& emp) {
  const Vector w = normalized_weights(emp, 3, "fit_lognormal_mle");
  const std::size_t k = w.size();
  auto best_sigma = [&](double mu) {
    return detail::golden_section_maximize(
        [&](double s) { return weighted_ll(w, lognormal_log_pmf(mu, s, k)); },
        kSigmaLo, kSigmaHi, kFitTolerance);
  };
  const auto outer = detail::golden_section_maximize(
      [&](double mu) { return best_sigma(mu).value; }, kMuLo, kMuHi,
      kFitTolerance);
  return {outer.argmax, best_sigma(outer.argmax).argmax};
}

Vector FitReport::param_values() const {
  Vector v;
  for (const auto& [name, value] : params) v.push_back(value);
  return v;
}

FitReport fit_family(const EmpiricalRankDistribution& emp, Family family) {
  FitReport rep;
  rep.family = family;
  switch (family) {
    case Family::kZipf:
      rep.params = {{"alpha", fit_zipf_mle(emp)}};
      break;
    case Family::kExponential:
      rep.params = {{"rate", fit_exponential_mle(emp)}};
      break;
    case Family::kLogNormal: {
      const auto [mu, sigma] = fit_lognormal_mle(emp);
      rep.params = {{"mu", mu}, {"sigma", sigma}};
      break;
    }
  }
  const Vector w = normalized_weights(emp, 1, "fit_family");
  rep.log_likelihood =
      weighted_ll(w, model_log_pmf(family, rep.param_values(), w.size()));
  return rep;
}

double log_r_squared(std::span<const double> data,
                     std::span<const double> model) {
  if (data.size() != model.size() || data.empty()) {
    throw InvalidInput("log_r_squared: length mismatch");
  }
  const std::size_t n = data.size();
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = std::log(data[i]);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - std::log(model[i]);
    ss_res += e * e;
    ss_tot += (y[i] - my) * (y[i] - my);
  }
  if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : -INFINITY;
  return 1.0 - ss_res / ss_tot;
}

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 1.0) {
    // Jacobi-theta form of the CDF converges fast for small x.
    const double pi2 = M_PI * M_PI;
    double cdf = 0.0;
    for (int j = 1; j <= 50; ++j) {
      const double t = 2.0 * j - 1.0;
      cdf += std::exp(-t * t * pi2 / (8.0 * x * x));
    }
    cdf *= std::sqrt(2.0 * M_PI) / x;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * x * x);
    sum += (j % 2 == 1) ? term : -term;
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

FitReport goodness_battery(const EmpiricalRankDistribution& emp, FitReport fit,
                           SeededRng& rng, std::size_t n_mc) {
  const Vector w = normalized_weights(emp, 1, "goodness_battery");
  const std::size_t k = w.size();
  if (fit.params.empty()) {
    throw InvalidInput("goodness_battery: fit has no parameters");
  }
  if (n_mc == 0) throw InvalidInput("goodness_battery: n_mc must be >= 1");
  const Vector q = model_pmf(fit.family, fit.param_values(), k);

  fit.r_squared = log_r_squared(w, q);
  fit.kl = kl_divergence(w, q);
  fit.js = js_divergence(w, q);
  fit.n_mc = n_mc;

  // Categorical draws from the empirical distribution by inverse CDF.
  Vector cdf(k);
  std::partial_sum(w.begin(), w.end(), cdf.begin());
  cdf.back() = 1.0;
  std::vector<std::size_t> observed(k, 0);
  for (std::size_t i = 0; i < n_mc; ++i) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    ++observed[std::min<std::size_t>(it - cdf.begin(), k - 1)];
  }
  const double n = static_cast<double>(n_mc);

  // Chi-square with adjacent cells merged until each expects >= 5 counts.
  struct Cell {
    double expected = 0.0;
    double observed = 0.0;
  };
  std::vector<Cell> cells;
  Cell open;
  std::size_t open_ranks = 0;
  fit.merged_cells = 0;
  for (std::size_t r = 0; r < k; ++r) {
    open.expected += n * q[r];
    open.observed += static_cast<double>(observed[r]);
    ++open_ranks;
    if (open.expected >= 5.0) {
      fit.merged_cells += open_ranks - 1;
      cells.push_back(open);
      open = Cell{};
      open_ranks = 0;
    }
  }
  if (open_ranks > 0) {
    if (cells.empty()) {
      cells.push_back(open);
      fit.merged_cells += open_ranks - 1;
    } else {
      cells.back().expected += open.expected;
      cells.back().observed += open.observed;
      fit.merged_cells += open_ranks;
    }
  }
  fit.chi_square = 0.0;
  for (const Cell& c : cells) {
    const double d = c.observed - c.expected;
    fit.chi_square += d * d / c.expected;
  }
  fit.chi_square_cells = cells.size();
  fit.chi_square_dof = cells.size() > 1 ? cells.size() - 1 : 0;
  if (fit.chi_square_dof > 0) {
    boost::math::chi_squared dist(static_cast<double>(fit.chi_square_dof));
    fit.chi_square_p = boost::math::cdf(complement(dist, fit.chi_square));
  } else {
    fit.chi_square_p = 1.0;
  }

  // Both CDFs are step functions on the same support, so the supremum is
  // attained at a rank.
  double ecdf = 0.0, mcdf = 0.0, d = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    ecdf += static_cast<double>(observed[r]) / n;
    mcdf += q[r];
    d = std::max(d, std::abs(ecdf - mcdf));
  }
  fit.ks_d = d;
  fit.ks_p = kolmogorov_survival(std::sqrt(n) * d);
  return fit;
}

std::size_t SnrCurve::crossing_rank() const {
  std::size_t r = 0;
  while (r < snr.size() && snr[r] > 1.0) ++r;
  return r;
}

bool SnrCurve::above_one_is_prefix() const {
  const std::size_t c = crossing_rank();
  for (std::size_t r = c; r < snr.size(); ++r) {
    if (snr[r] > 1.0) return false;
  }
  return true;
}

SnrCurve snr_curve(const Matrix& sorted_probs) {
  if (sorted_probs.rows < 2) {
    throw InvalidInput("snr_curve: need at least two samples");
  }
  if (sorted_probs.cols == 0) throw InvalidInput("snr_curve: no ranks");
  const std::size_t k = sorted_probs.cols;
  const double n = static_cast<double>(sorted_probs.rows);
  SnrCurve curve;
  curve.mean.assign(k, 0.0);
  curve.std.assign(k, 0.0);
  curve.snr.assign(k, 0.0);
  // Two passes over values shifted by the first sample, so that a column of
  // identical values has exactly zero spread and an exact mean.
  const auto first = sorted_probs.row(0);
  Vector shift_mean(k, 0.0);
  for (std::size_t i = 0; i < sorted_probs.rows; ++i) {
    for (std::size_t r = 0; r < k; ++r) {
      shift_mean[r] += sorted_probs(i, r) - first[r];
    }
  }
  for (double& m : shift_mean) m /= n;
  for (std::size_t i = 0; i < sorted_probs.rows; ++i) {
    for (std::size_t r = 0; r < k; ++r) {
      const double d = (sorted_probs(i, r) - first[r]) - shift_mean[r];
      curve.std[r] += d * d;
    }
  }
  for (std::size_t r = 0; r < k; ++r) curve.mean[r] = first[r] + shift_mean[r];
  for (std::size_t r = 0; r < k; ++r) {
    curve.std[r] = std::sqrt(curve.std[r] / (n - 1.0));
    curve.snr[r] = curve.std[r] > 0.0 ? curve.mean[r] / curve.std[r] : INFINITY;
  }
  return curve;
}

void write_rank_csv(const EmpiricalRankDistribution& emp,
                    const std::string& path, bool with_std) {
  with_std = with_std && emp.std_probs.size() == emp.mean_probs.size();
  std::string out = with_std ? "rank,mean_prob,std\n" : "rank,mean_prob\n";
  for (std::size_t r = 0; r < emp.top_k(); ++r) {
    out += std::to_string(r + 1) + "," + detail::format_double(emp.mean_probs[r]);
    if (with_std) out += "," + detail::format_double(emp.std_probs[r]);
    out += "\n";
  }
  detail::write_text(path, out);
}

EmpiricalRankDistribution read_rank_csv(const std::string& path) {
  const auto lines = detail::split_lines(detail::read_text(path));
  EmpiricalRankDistribution emp;
  std::size_t first = 0;
  if (!lines.empty() && !detail::looks_numeric(detail::split_fields(lines[0])[0])) {
    first = 1;
  }
  for (std::size_t i = first; i < lines.size(); ++i) {
    const std::string ctx = path + ":" + std::to_string(i + 1);
    const auto fields = detail::split_fields(lines[i]);
    if (fields.size() < 2 || fields.size() > 3) {
      throw IoError(ctx + ": expected 'rank,mean_prob[,std]'");
    }
    const double rank = detail::parse_double(fields[0], ctx);
    if (rank != static_cast<double>(emp.mean_probs.size() + 1)) {
      throw IoError(ctx + ": ranks must run 1, 2, 3, ...");
    }
    emp.mean_probs.push_back(detail::parse_double(fields[1], ctx));
    if (fields.size() == 3) {
      emp.std_probs.push_back(detail::parse_double(fields[2], ctx));
    }
  }
  if (emp.mean_probs.empty()) throw IoError(path + ": no data rows");
  if (!emp.std_probs.empty() && emp.std_probs.size() != emp.mean_probs.size()) {
    throw IoError(path + ": std column present on only some rows");
  }
  return emp;
}

void write_snr_csv(const SnrCurve& curve, const std::string& path) {
  std::string out = "rank,mean,std,snr\n";
  for (std::size_t r = 0; r < curve.size(); ++r) {
    out += std::to_string(r + 1) + "," + detail::format_double(curve.mean[r]) +
           "," + detail::format_double(curve.std[r]) + "," +
           detail::format_double(curve.snr[r]) + "\n";
  }
  detail::write_text(path, out);
}

Matrix read_matrix_csv(const std::string& path) {
  const auto lines = detail::split_lines(detail::read_text(path));
  std::size_t first = 0;
  if (!lines.empty() && !detail::looks_numeric(detail::split_fields(lines[0])[0])) {
    first = 1;
  }
  if (lines.size() <= first) throw IoError(path + ": no data rows");
  Matrix m;
  m.cols = detail::split_fields(lines[first]).size();
  for (std::size_t i = first; i < lines.size(); ++i) {
    const std::string ctx = path + ":" + std::to_string(i + 1);
    const auto fields = detail::split_fields(lines[i]);
    if (fields.size() != m.cols) {
      throw IoError(ctx + ": expected " + std::to_string(m.cols) + " columns");
    }
    for (auto f : fields) m.data.push_back(detail::parse_double(f, ctx));
    ++m.rows;
  }
  return m;
}

std::string fit_reports_to_json(std::span<const FitReport> reports) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const FitReport& r : reports) {
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [name, value] : r.params) params[name] = value;
    nlohmann::ordered_json j;
    j["family"] = family_name(r.family);
    j["params"] = params;
    j["log_likelihood"] = r.log_likelihood;
    j["r_squared"] = r.r_squared;
    j["r_squared_space"] = "log";
    j["kl"] = r.kl;
    j["js"] = r.js;
    j["chi_square"] = r.chi_square;
    j["chi_square_dof"] = r.chi_square_dof;
    j["chi_square_p"] = r.chi_square_p;
    j["chi_square_cells"] = r.chi_square_cells;
    j["chi_square_merged_cells"] = r.merged_cells;
    j["ks_d"] = r.ks_d;
    j["ks_p"] = r.ks_p;
    j["n_mc"] = r.n_mc;
    j["support"] = "truncated 1..K";
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

}  // namespace zipfls
