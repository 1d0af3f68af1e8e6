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

// Command-line front end. Everything goes through the C API in zipfls.h.
//
//   zipfls simulate --n-samples 1000 --n-classes 1000 --top-k 32 --out sim.csv
//   zipfls fit --in sim.csv --families zipf,exponential,lognormal --out fit.json
//   zipfls snr --from-sim --out snr.csv
//   zipfls train --config cfg.json --out runs/zipf
//   zipfls compare --config cfg.json --seeds 0,1,2 --out table.json
//
// Exit codes: 0 success, 2 usage/config/input error, 1 runtime failure.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zipfls/zipfls.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

int exit_code_for(zls_status s) {
  switch (s) {
    case ZLS_OK:
      return kExitOk;
    case ZLS_ERR_INVALID_ARGUMENT:
    case ZLS_ERR_IO:
      return kExitUsage;
    default:
      return kExitRuntime;
  }
}

// Prints the library error and returns the matching exit code.
int report(zls_status s, const char* what) {
  if (s != ZLS_OK) {
    std::cerr << "zipfls " << what << ": " << zls_status_string(s) << ": "
              << zls_last_error() << "\n";
  }
  return exit_code_for(s);
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

// Writes `text` to `path`, or stdout for "-".
bool write_file(const std::string& path, const char* text) {
  if (path == "-") {
    std::cout << text;
    return static_cast<bool>(std::cout);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  return static_cast<bool>(out);
}

struct Options {
  std::uint64_t seed = 0;
  std::string out = "-";
  std::string in;
  std::string config;
  std::size_t n_samples = 1000;
  std::size_t n_classes = 1000;
  std::size_t top_k = 32;
  std::size_t snr_top_k = 0;
  std::string families = "zipf,exponential,lognormal";
  std::size_t n_mc = 100000;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  bool from_sim = false;
};

int cmd_simulate(const Options& o) {
  zls_rank_dist dist = nullptr;
  zls_status s =
      zls_simulate_gaussian(o.seed, o.n_samples, o.n_classes, o.top_k, &dist);
  if (s == ZLS_OK) s = zls_rank_dist_write_csv(dist, o.out.c_str());
  zls_rank_dist_free(dist);
  return report(s, "simulate");
}

int cmd_fit(const Options& o) {
  zls_rank_dist dist = nullptr;
  zls_status s = zls_rank_dist_read_csv(o.in.c_str(), &dist);
  char* json = nullptr;
  if (s == ZLS_OK) {
    s = zls_fit_json(dist, o.families.c_str(), o.n_mc, o.seed, &json);
  }
  zls_rank_dist_free(dist);
  if (s != ZLS_OK) return report(s, "fit");
  const bool ok = write_file(o.out, json);
  zls_string_free(json);
  if (!ok) {
    std::cerr << "zipfls fit: cannot write '" << o.out << "'\n";
    return kExitUsage;
  }
  return kExitOk;
}

int cmd_snr(const Options& o) {
  if (o.from_sim == !o.in.empty()) {
    std::cerr << "zipfls snr: give exactly one of --in or --from-sim\n";
    return kExitUsage;
  }
  zls_snr curve = nullptr;
  zls_status s = o.from_sim ? zls_snr_from_simulation(o.seed, o.n_samples,
                                                      o.n_classes, o.snr_top_k,
                                                      &curve)
                            : zls_snr_from_matrix_csv(o.in.c_str(), &curve);
  if (s == ZLS_OK) s = zls_snr_write_csv(curve, o.out.c_str());
  if (s == ZLS_OK) {
    std::size_t rank = 0;
    int prefix = 0;
    s = zls_snr_crossing_rank(curve, &rank, &prefix);
    if (s == ZLS_OK) {
      std::cerr << "snr > 1 for the first " << rank << " ranks"
                << (prefix ? "" : " (and again further down)") << "\n";
    }
  }
  zls_snr_free(curve);
  return report(s, "snr");
}

int cmd_train(const Options& o) {
  std::string config;
  if (!read_file(o.config, config)) {
    std::cerr << "zipfls train: cannot read config '" << o.config << "'\n";
    return kExitUsage;
  }
  char* summary = nullptr;
  const zls_status s = zls_train(config.c_str(), o.out.c_str(), &summary);
  if (s == ZLS_OK) {
    std::cout << summary;
    zls_string_free(summary);
  }
  return report(s, "train");
}

int cmd_compare(const Options& o) {
  std::string config;
  if (!read_file(o.config, config)) {
    std::cerr << "zipfls compare: cannot read config '" << o.config << "'\n";
    return kExitUsage;
  }
  char* table = nullptr;
  const zls_status s =
      zls_compare(config.c_str(), o.seeds.data(), o.seeds.size(), &table);
  if (s != ZLS_OK) return report(s, "compare");
  const bool ok = write_file(o.out, table);
  zls_string_free(table);
  if (!ok) {
    std::cerr << "zipfls compare: cannot write '" << o.out << "'\n";
    return kExitUsage;
  }
  return kExitOk;
}

int cmd_config() {
  char* json = nullptr;
  const zls_status s = zls_default_config_json(&json);
  if (s == ZLS_OK) {
    std::cout << json;
    zls_string_free(json);
  }
  return report(s, "config");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zipf soft labels, Gaussian-logit simulation and rank statistics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", zls_version());
  Options o;

  auto* simulate = app.add_subcommand(
      "simulate", "Average sorted softmax of Gaussian logits; CSV rank,mean_prob");
  simulate->add_option("--n-samples", o.n_samples, "Samples")->capture_default_str();
  simulate->add_option("--n-classes", o.n_classes, "Classes per sample")->capture_default_str();
  simulate->add_option("--top-k", o.top_k, "Ranks kept")->capture_default_str();
  simulate->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
  simulate->add_option("--out", o.out, "Output CSV ('-' for stdout)")->capture_default_str();

  auto* fit = app.add_subcommand(
      "fit", "Fit Zipf / exponential / log-normal and run goodness-of-fit tests");
  fit->add_option("--in", o.in, "Rank CSV (rank,mean_prob)")->required();
  fit->add_option("--families", o.families, "Comma-separated families")->capture_default_str();
  fit->add_option("--n-mc", o.n_mc, "Monte-Carlo draws for chi-square/KS")->capture_default_str();
  fit->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
  fit->add_option("--out", o.out, "Output JSON ('-' for stdout)")->capture_default_str();

  auto* snr = app.add_subcommand("snr", "Per-rank signal-to-noise ratio");
  snr->add_option("--in", o.in, "Matrix CSV, one sample per row");
  snr->add_flag("--from-sim", o.from_sim, "Use the Gaussian-logit simulation");
  snr->add_option("--n-samples", o.n_samples, "Simulation samples")->capture_default_str();
  snr->add_option("--n-classes", o.n_classes, "Simulation classes")->capture_default_str();
  snr->add_option("--top-k", o.snr_top_k, "Ranks kept (0 = all)")->capture_default_str();
  snr->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
  snr->add_option("--out", o.out, "Output CSV ('-' for stdout)")->capture_default_str();

  auto* train = app.add_subcommand(
      "train", "Train the toy network; writes metrics.csv and summary.json");
  train->add_option("--config", o.config, "JSON training config")->required();
  train->add_option("--out", o.out, "Output directory")->required();

  auto* compare = app.add_subcommand(
      "compare", "Run ce, ls, zipf-logit and zipf-dense over several seeds");
  compare->add_option("--config", o.config, "JSON training config")->required();
  compare->add_option("--seeds", o.seeds, "Comma-separated seeds")
      ->delimiter(',')
      ->capture_default_str();
  compare->add_option("--out", o.out, "Output JSON ('-' for stdout)")->capture_default_str();

  auto* config = app.add_subcommand("config", "Print the default training config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  if (simulate->parsed()) return cmd_simulate(o);
  if (fit->parsed()) return cmd_fit(o);
  if (snr->parsed()) return cmd_snr(o);
  if (train->parsed()) return cmd_train(o);
  if (compare->parsed()) return cmd_compare(o);
  if (config->parsed()) return cmd_config();
  return kExitUsage;
}
