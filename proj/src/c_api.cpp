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

#include "zipfls/zipfls.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <new>
#include <string>
#include <vector>

#include "text_io.hpp"
#include "zipfls/dense_ranking.hpp"
#include "zipfls/losses.hpp"
#include "zipfls/numerics.hpp"
#include "zipfls/train.hpp"
#include "zipfls/zipf_label.hpp"
#include "zipfls/zipf_stats.hpp"

struct zls_rank_dist_s {
  zipfls::EmpiricalRankDistribution dist;
};

struct zls_snr_s {
  zipfls::SnrCurve curve;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
zls_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return ZLS_OK;
  } catch (const zipfls::InvalidInput& e) {
    g_last_error = e.what();
    return ZLS_ERR_INVALID_ARGUMENT;
  } catch (const zipfls::DomainError& e) {
    g_last_error = e.what();
    return ZLS_ERR_DOMAIN;
  } catch (const zipfls::NumericError& e) {
    g_last_error = e.what();
    return ZLS_ERR_NUMERIC;
  } catch (const zipfls::IoError& e) {
    g_last_error = e.what();
    return ZLS_ERR_IO;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return ZLS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ZLS_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return ZLS_ERR_INTERNAL;
  }
}

void require(bool ok, const char* msg) {
  if (!ok) throw zipfls::InvalidInput(msg);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::span<const double> view(const double* p, size_t n) { return {p, n}; }

void write_loss(const zipfls::LossValue& l, double* value, double* grad) {
  if (value) *value = l.value;
  if (grad) std::copy(l.grad.begin(), l.grad.end(), grad);
}

std::vector<zipfls::Family> parse_families(const char* families) {
  std::vector<zipfls::Family> out;
  const std::string list = families && *families ? families
                                                 : "zipf,exponential,lognormal";
  for (auto field : zipfls::detail::split_fields(list)) {
    if (!field.empty()) out.push_back(zipfls::parse_family(field));
  }
  require(!out.empty(), "no families given");
  return out;
}

}  // namespace

extern "C" {

const char* zls_version(void) { return "1.0.0"; }

const char* zls_status_string(zls_status status) {
  switch (status) {
    case ZLS_OK:
      return "ok";
    case ZLS_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case ZLS_ERR_DOMAIN:
      return "domain error";
    case ZLS_ERR_NUMERIC:
      return "numeric error";
    case ZLS_ERR_IO:
      return "i/o error";
    case ZLS_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* zls_last_error(void) { return g_last_error.c_str(); }

void zls_string_free(char* s) { std::free(s); }

zls_status zls_softmax(const double* z, size_t n, double* out) {
  return guarded([&] {
    require(z && out, "null pointer");
    const auto p = zipfls::softmax(view(z, n));
    std::copy(p.begin(), p.end(), out);
  });
}

zls_status zls_kl_divergence(const double* p, const double* q, size_t n,
                             double* out) {
  return guarded([&] {
    require(p && q && out, "null pointer");
    *out = zipfls::kl_divergence(view(p, n), view(q, n));
  });
}

zls_status zls_js_divergence(const double* p, const double* q, size_t n,
                             double* out) {
  return guarded([&] {
    require(p && q && out, "null pointer");
    *out = zipfls::js_divergence(view(p, n), view(q, n));
  });
}

zls_status zls_zipf_pmf(size_t n, double alpha, double* out) {
  return guarded([&] {
    require(out != nullptr, "null pointer");
    const auto f = zipfls::zipf_pmf({alpha, n});
    std::copy(f.begin(), f.end(), out);
  });
}

zls_status zls_zipf_soft_label(size_t num_classes, size_t target,
                               const size_t* ranked, size_t n_ranked,
                               double alpha, double* out) {
  return guarded([&] {
    require(out && (ranked || n_ranked == 0), "null pointer");
    require(target < num_classes, "target out of range");
    zipfls::RankAssignment ranks;
    ranks.excluded = target;
    ranks.ranked.assign(ranked, ranked + n_ranked);
    std::vector<char> used(num_classes, 0);
    used[target] = 1;
    for (size_t c : ranks.ranked) {
      require(c < num_classes, "ranked class out of range");
      used[c] = 1;
    }
    for (size_t c = 0; c < num_classes; ++c) {
      if (!used[c]) ranks.unranked.push_back(c);
    }
    const auto label = zipfls::make_zipf_soft_label(ranks, alpha, num_classes);
    std::copy(label.probs.begin(), label.probs.end(), out);
  });
}

zls_status zls_dense_rank(const double* features, size_t height, size_t width,
                          size_t depth, const double* weight,
                          const double* bias, size_t num_classes,
                          size_t target, size_t* ranked_out,
                          size_t* n_ranked) {
  return guarded([&] {
    require(features && weight && bias && ranked_out && n_ranked,
            "null pointer");
    require(height > 0 && width > 0 && depth > 0 && num_classes >= 2,
            "empty feature map or fewer than two classes");
    zipfls::FeatureMap fm(height, width, depth);
    std::copy(features, features + fm.data.size(), fm.data.begin());
    const zipfls::SharedClassifier clf{view(weight, num_classes * depth),
                                       view(bias, num_classes), num_classes,
                                       depth};
    zipfls::Vector pooled(depth, 0.0);
    for (size_t k = 0; k < fm.locations(); ++k) {
      for (size_t d = 0; d < depth; ++d) pooled[d] += fm.at(k)[d];
    }
    for (double& v : pooled) v /= static_cast<double>(fm.locations());
    zipfls::Vector logits(num_classes);
    clf.apply(pooled, logits);
    const auto votes =
        zipfls::vote_histogram(zipfls::local_predictions(fm, clf));
    const auto ranks =
        zipfls::rank_from_votes(votes, zipfls::softmax(logits), target);
    std::copy(ranks.ranked.begin(), ranks.ranked.end(), ranked_out);
    *n_ranked = ranks.ranked.size();
  });
}

zls_status zls_cross_entropy(const double* z, size_t n, size_t y,
                             double* value, double* grad) {
  return guarded([&] {
    require(z != nullptr, "null pointer");
    write_loss(zipfls::cross_entropy(view(z, n), y), value, grad);
  });
}

zls_status zls_label_smoothing_loss(const double* z, size_t n, size_t y,
                                    double epsilon, double* value,
                                    double* grad) {
  return guarded([&] {
    require(z != nullptr, "null pointer");
    write_loss(zipfls::label_smoothing_loss(view(z, n), y, epsilon), value,
               grad);
  });
}

zls_status zls_zipf_loss(const double* z, size_t n, size_t y,
                         const double* soft_label, double* value,
                         double* grad) {
  return guarded([&] {
    require(z && soft_label, "null pointer");
    zipfls::ZipfSoftLabel label;
    label.target = y;
    label.probs.assign(soft_label, soft_label + n);
    write_loss(zipfls::zipf_loss(view(z, n), y, label), value, grad);
  });
}

zls_status zls_simulate_gaussian(uint64_t seed, size_t n_samples,
                                 size_t n_classes, size_t top_k,
                                 zls_rank_dist* out) {
  return guarded([&] {
    require(out != nullptr, "null pointer");
    zipfls::SeededRng rng(seed);
    auto dist = zipfls::simulate_gaussian_softmax(rng, n_samples, n_classes,
                                                  top_k);
    *out = new zls_rank_dist_s{std::move(dist)};
  });
}

zls_status zls_rank_dist_from_array(const double* mean_probs, size_t k,
                                    zls_rank_dist* out) {
  return guarded([&] {
    require(mean_probs && out, "null pointer");
    require(k > 0, "empty distribution");
    zipfls::EmpiricalRankDistribution dist;
    dist.mean_probs.assign(mean_probs, mean_probs + k);
    *out = new zls_rank_dist_s{std::move(dist)};
  });
}

zls_status zls_rank_dist_read_csv(const char* path, zls_rank_dist* out) {
  return guarded([&] {
    require(path && out, "null pointer");
    *out = new zls_rank_dist_s{zipfls::read_rank_csv(path)};
  });
}

zls_status zls_rank_dist_write_csv(zls_rank_dist dist, const char* path) {
  return guarded([&] {
    require(dist && path, "null pointer");
    zipfls::write_rank_csv(dist->dist, path, false);
  });
}

zls_status zls_rank_dist_size(zls_rank_dist dist, size_t* k) {
  return guarded([&] {
    require(dist && k, "null pointer");
    *k = dist->dist.top_k();
  });
}

zls_status zls_rank_dist_values(zls_rank_dist dist, double* out,
                                size_t capacity) {
  return guarded([&] {
    require(dist && out, "null pointer");
    require(capacity >= dist->dist.top_k(), "output buffer too small");
    std::copy(dist->dist.mean_probs.begin(), dist->dist.mean_probs.end(), out);
  });
}

zls_status zls_rank_dist_loglog_fit(zls_rank_dist dist, double* slope,
                                    double* intercept, double* r_squared) {
  return guarded([&] {
    require(dist != nullptr, "null pointer");
    const auto fit = zipfls::loglog_fit(dist->dist.mean_probs);
    if (slope) *slope = fit.slope;
    if (intercept) *intercept = fit.intercept;
    if (r_squared) *r_squared = fit.r_squared;
  });
}

void zls_rank_dist_free(zls_rank_dist dist) { delete dist; }

zls_status zls_fit_json(zls_rank_dist dist, const char* families, size_t n_mc,
                        uint64_t seed, char** json_out) {
  return guarded([&] {
    require(dist && json_out, "null pointer");
    const auto fams = parse_families(families);
    std::vector<zipfls::FitReport> reports;
    for (std::size_t i = 0; i < fams.size(); ++i) {
      // Each family draws from its own stream of the master seed.
      zipfls::SeededRng rng = zipfls::SeededRng(seed).derive(
          static_cast<std::uint64_t>(fams[i]));
      reports.push_back(zipfls::goodness_battery(
          dist->dist, zipfls::fit_family(dist->dist, fams[i]), rng, n_mc));
    }
    *json_out = dup_string(zipfls::fit_reports_to_json(reports));
  });
}

zls_status zls_snr_from_simulation(uint64_t seed, size_t n_samples,
                                   size_t n_classes, size_t top_k,
                                   zls_snr* out) {
  return guarded([&] {
    require(out != nullptr, "null pointer");
    zipfls::SeededRng rng(seed);
    const auto dist = zipfls::simulate_gaussian_softmax(
        rng, n_samples, n_classes, top_k == 0 ? n_classes : top_k, true);
    *out = new zls_snr_s{zipfls::snr_curve(*dist.per_sample_probs)};
  });
}

zls_status zls_snr_from_matrix_csv(const char* path, zls_snr* out) {
  return guarded([&] {
    require(path && out, "null pointer");
    zipfls::Matrix m = zipfls::read_matrix_csv(path);
    for (std::size_t i = 0; i < m.rows; ++i) {
      auto row = m.row(i);
      std::sort(row.begin(), row.end(), std::greater<>());
    }
    *out = new zls_snr_s{zipfls::snr_curve(m)};
  });
}

zls_status zls_snr_size(zls_snr curve, size_t* k) {
  return guarded([&] {
    require(curve && k, "null pointer");
    *k = curve->curve.size();
  });
}

zls_status zls_snr_values(zls_snr curve, double* mean, double* std,
                          double* snr, size_t capacity) {
  return guarded([&] {
    require(curve != nullptr, "null pointer");
    const auto& c = curve->curve;
    require(capacity >= c.size(), "output buffer too small");
    if (mean) std::copy(c.mean.begin(), c.mean.end(), mean);
    if (std) std::copy(c.std.begin(), c.std.end(), std);
    if (snr) std::copy(c.snr.begin(), c.snr.end(), snr);
  });
}

zls_status zls_snr_crossing_rank(zls_snr curve, size_t* rank, int* is_prefix) {
  return guarded([&] {
    require(curve && rank, "null pointer");
    *rank = curve->curve.crossing_rank();
    if (is_prefix) *is_prefix = curve->curve.above_one_is_prefix() ? 1 : 0;
  });
}

zls_status zls_snr_write_csv(zls_snr curve, const char* path) {
  return guarded([&] {
    require(curve && path, "null pointer");
    zipfls::write_snr_csv(curve->curve, path);
  });
}

void zls_snr_free(zls_snr curve) { delete curve; }

zls_status zls_default_config_json(char** json_out) {
  return guarded([&] {
    require(json_out != nullptr, "null pointer");
    *json_out = dup_string(zipfls::train_config_to_json(zipfls::TrainConfig{}) +
                           "\n");
  });
}

zls_status zls_train(const char* config_json, const char* out_dir,
                     char** summary_json) {
  return guarded([&] {
    require(config_json && out_dir, "null pointer");
    const auto cfg = zipfls::train_config_from_json(config_json);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
      throw zipfls::IoError("cannot create '" + std::string(out_dir) +
                            "': " + ec.message());
    }
    const auto result = zipfls::run_experiment(cfg);
    const std::filesystem::path dir(out_dir);
    zipfls::detail::write_text((dir / "metrics.csv").string(),
                               zipfls::history_to_csv(result.history));
    const std::string summary = zipfls::summary_to_json(cfg, result.history);
    zipfls::detail::write_text((dir / "summary.json").string(), summary);
    if (summary_json) *summary_json = dup_string(summary);
  });
}

zls_status zls_compare(const char* config_json, const uint64_t* seeds,
                       size_t n_seeds, char** table_json) {
  return guarded([&] {
    require(config_json && seeds && table_json, "null pointer");
    const auto cfg = zipfls::train_config_from_json(config_json);
    const std::vector<std::uint64_t> s(seeds, seeds + n_seeds);
    *table_json = dup_string(
        zipfls::comparison_to_json(zipfls::compare_methods(cfg, s)));
  });
}

}  // extern "C"
