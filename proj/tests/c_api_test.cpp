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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;

std::string take(char* s) {
  std::string out(s);
  zls_string_free(s);
  return out;
}

TEST(CApi, VersionAndStatusStrings) {
  EXPECT_STREQ(zls_version(), "1.0.0");
  EXPECT_STREQ(zls_status_string(ZLS_OK), "ok");
  EXPECT_STRNE(zls_status_string(ZLS_ERR_IO), zls_status_string(ZLS_ERR_DOMAIN));
}

TEST(CApi, SoftmaxAndErrors) {
  const double z[3] = {1000.0, 1000.0, 999.0};
  double p[3];
  ASSERT_EQ(zls_softmax(z, 3, p), ZLS_OK);
  EXPECT_NEAR(p[0], 1.0 / (2.0 + std::exp(-1.0)), 1e-15);

  const double bad[2] = {0.0, NAN};
  EXPECT_EQ(zls_softmax(bad, 2, p), ZLS_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::string(zls_last_error()).find("non-finite"), std::string::npos);
  EXPECT_EQ(zls_softmax(nullptr, 2, p), ZLS_ERR_INVALID_ARGUMENT);
}

TEST(CApi, DivergenceDomainError) {
  const double p[2] = {0.5, 0.5}, q[2] = {1.0, 0.0};
  double kl = -1.0, js = -1.0;
  EXPECT_EQ(zls_kl_divergence(p, q, 2, &kl), ZLS_ERR_DOMAIN);
  ASSERT_EQ(zls_js_divergence(p, q, 2, &js), ZLS_OK);
  EXPECT_GT(js, 0.0);
}

TEST(CApi, SoftLabelWorkedExample) {
  const size_t ranked[2] = {3, 1};
  double out[5];
  ASSERT_EQ(zls_zipf_soft_label(5, 0, ranked, 2, 1.0, out), ZLS_OK);
  const double expected[5] = {0.0, 0.24, 0.14, 0.48, 0.14};
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(out[i], expected[i], 1e-15);
  const size_t dup[2] = {1, 1};
  EXPECT_EQ(zls_zipf_soft_label(5, 0, dup, 2, 1.0, out), ZLS_ERR_INVALID_ARGUMENT);
}

TEST(CApi, ZipfPmf) {
  double f[3];
  ASSERT_EQ(zls_zipf_pmf(3, 1.0, f), ZLS_OK);
  EXPECT_NEAR(f[0], 6.0 / 11.0, 1e-15);
  EXPECT_EQ(zls_zipf_pmf(0, 1.0, f), ZLS_ERR_INVALID_ARGUMENT);
}

TEST(CApi, DenseRank) {
  // 2x1 map, D = 2, identity classifier over C = 3 with one zero row.
  const double features[4] = {3.0, 1.0, 0.0, 2.0};
  const double weight[6] = {1, 0, 0, 1, 0, 0};
  const double bias[3] = {0, 0, 0};
  size_t ranked[2];
  size_t n = 99;
  ASSERT_EQ(zls_dense_rank(features, 2, 1, 2, weight, bias, 3, 2, ranked, &n), ZLS_OK);
  ASSERT_EQ(n, 2u);
  EXPECT_EQ(ranked[0], 0u);  // one vote each and equal GAP probability
  EXPECT_EQ(ranked[1], 1u);
}

TEST(CApi, Losses) {
  const double z[3] = {0.0, 1.0, 0.0};
  const double label[3] = {0.0, 0.5, 0.5};
  double value, grad[3];
  ASSERT_EQ(zls_zipf_loss(z, 3, 0, label, &value, grad), ZLS_OK);
  EXPECT_NEAR(value, 0.1201, 1e-4);
  EXPECT_EQ(grad[0], 0.0);
  ASSERT_EQ(zls_zipf_loss(z, 3, 0, label, &value, nullptr), ZLS_OK);
  const double zz[2] = {0.0, 0.0};
  ASSERT_EQ(zls_cross_entropy(zz, 2, 0, &value, grad), ZLS_OK);
  EXPECT_NEAR(value, std::log(2.0), 1e-15);
  EXPECT_EQ(zls_label_smoothing_loss(zz, 2, 0, 1.5, &value, grad),
            ZLS_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(zls_cross_entropy(zz, 2, 5, &value, grad), ZLS_ERR_INVALID_ARGUMENT);
}

TEST(CApi, SimulationAndFit) {
  zls_rank_dist dist = nullptr;
  EXPECT_EQ(zls_simulate_gaussian(0, 10, 5, 6, &dist), ZLS_ERR_INVALID_ARGUMENT);
  ASSERT_EQ(zls_simulate_gaussian(0, 300, 300, 30, &dist), ZLS_OK);
  size_t k = 0;
  ASSERT_EQ(zls_rank_dist_size(dist, &k), ZLS_OK);
  EXPECT_EQ(k, 30u);
  std::vector<double> v(k);
  ASSERT_EQ(zls_rank_dist_values(dist, v.data(), v.size()), ZLS_OK);
  EXPECT_EQ(zls_rank_dist_values(dist, v.data(), 3), ZLS_ERR_INVALID_ARGUMENT);
  double slope, intercept, r2;
  ASSERT_EQ(zls_rank_dist_loglog_fit(dist, &slope, &intercept, &r2), ZLS_OK);
  EXPECT_LT(slope, 0.0);

  char* json = nullptr;
  ASSERT_EQ(zls_fit_json(dist, "zipf,lognormal", 2000, 1, &json), ZLS_OK);
  const auto j = nlohmann::json::parse(take(json));
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[0]["family"], "zipf");
  EXPECT_EQ(j[1]["family"], "lognormal");
  EXPECT_EQ(j[1]["n_mc"], 2000);
  EXPECT_EQ(zls_fit_json(dist, "zipf,pareto", 2000, 1, &json), ZLS_ERR_INVALID_ARGUMENT);
  zls_rank_dist_free(dist);
}

TEST(CApi, CsvRoundTrip) {
  const fs::path p = fs::temp_directory_path() / "zipfls_capi_ranks.csv";
  const double values[4] = {0.4, 0.3, 0.2, 0.1};
  zls_rank_dist dist = nullptr, back = nullptr;
  ASSERT_EQ(zls_rank_dist_from_array(values, 4, &dist), ZLS_OK);
  ASSERT_EQ(zls_rank_dist_write_csv(dist, p.c_str()), ZLS_OK);
  ASSERT_EQ(zls_rank_dist_read_csv(p.c_str(), &back), ZLS_OK);
  double out[4];
  ASSERT_EQ(zls_rank_dist_values(back, out, 4), ZLS_OK);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(out[i], values[i]);
  zls_rank_dist_free(dist);
  zls_rank_dist_free(back);
  EXPECT_EQ(zls_rank_dist_read_csv("/nonexistent/x.csv", &back), ZLS_ERR_IO);
  zls_rank_dist_free(nullptr);
}

TEST(CApi, Snr) {
  zls_snr curve = nullptr;
  ASSERT_EQ(zls_snr_from_simulation(0, 100, 50, 0, &curve), ZLS_OK);
  size_t k = 0;
  ASSERT_EQ(zls_snr_size(curve, &k), ZLS_OK);
  EXPECT_EQ(k, 50u);
  std::vector<double> mean(k), sd(k), snr(k);
  ASSERT_EQ(zls_snr_values(curve, mean.data(), sd.data(), snr.data(), k), ZLS_OK);
  for (size_t r = 0; r < k; ++r) EXPECT_NEAR(snr[r], mean[r] / sd[r], 1e-12 * snr[r]);
  size_t crossing = 0;
  int prefix = -1;
  ASSERT_EQ(zls_snr_crossing_rank(curve, &crossing, &prefix), ZLS_OK);
  EXPECT_TRUE(prefix == 0 || prefix == 1);
  zls_snr_free(curve);
}

TEST(CApi, ConfigAndBadConfig) {
  char* json = nullptr;
  ASSERT_EQ(zls_default_config_json(&json), ZLS_OK);
  const auto cfg = nlohmann::json::parse(take(json));
  EXPECT_EQ(cfg["method"], "zipf-dense");
  EXPECT_EQ(cfg["num_classes"], 20);
  char* summary = nullptr;
  EXPECT_EQ(zls_train(R"({"method": "bogus"})", "/tmp/zipfls_capi_bad", &summary),
            ZLS_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::string(zls_last_error()).find("zipf-dense"), std::string::npos);
}

TEST(CApi, TrainWritesFiles) {
  const fs::path dir = fs::temp_directory_path() / "zipfls_capi_train";
  fs::remove_all(dir);
  const char* cfg =
      R"({"num_classes": 4, "train_per_class": 6, "test_per_class": 2,
          "image_size": 8, "conv1_channels": 3, "conv2_channels": 4,
          "epochs": 2, "batch_size": 4, "method": "zipf-dense"})";
  char* summary = nullptr;
  ASSERT_EQ(zls_train(cfg, dir.c_str(), &summary), ZLS_OK) << zls_last_error();
  const auto j = nlohmann::json::parse(take(summary));
  EXPECT_EQ(j["epochs"], 2);
  EXPECT_TRUE(fs::exists(dir / "metrics.csv"));
  EXPECT_TRUE(fs::exists(dir / "summary.json"));

  const uint64_t seeds[1] = {4};
  char* table = nullptr;
  ASSERT_EQ(zls_compare(cfg, seeds, 1, &table), ZLS_OK);
  EXPECT_EQ(nlohmann::json::parse(take(table))["methods"].size(), 4u);
  EXPECT_EQ(zls_compare(cfg, seeds, 0, &table), ZLS_ERR_INVALID_ARGUMENT);
}

}  // namespace
