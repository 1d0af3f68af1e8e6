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

#include "zipfls/train.hpp"

#include <cmath>
#include <numeric>
#include <set>

#include "json.hpp"
#include "text_io.hpp"

namespace zipfls {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::uint64_t kInitStream = 10;
constexpr std::uint64_t kShuffleStream = 11;

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sample standard deviation; 0 for fewer than two values.
double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

bool uses_zipf(Method m) {
  return m == Method::kZipfLogit || m == Method::kZipfDense;
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kCe:
      return "ce";
    case Method::kLs:
      return "ls";
    case Method::kZipfLogit:
      return "zipf-logit";
    case Method::kZipfDense:
      return "zipf-dense";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : kAllMethods) {
    if (method_name(m) == name) return m;
  }
  throw InvalidInput("invalid method '" + std::string(name) +
                     "'; valid methods: ce, ls, zipf-logit, zipf-dense");
}

NetShape TrainConfig::net_shape() const {
  NetShape s;
  s.image_size = data.image_size;
  s.in_channels = data.channels;
  s.conv1_channels = conv1_channels;
  s.conv2_channels = conv2_channels;
  s.num_classes = data.num_classes;
  s.aux_head = dense_layers == 2;
  return s;
}

DatasetOptions TrainConfig::dataset_options() const {
  DatasetOptions o = data;
  o.seed = seed;
  return o;
}

void TrainConfig::validate() const {
  net_shape().validate();
  smoothing.validate();
  if (data.num_classes < 3) throw InvalidInput("num_classes must be >= 3");
  if (epochs == 0 || batch_size == 0) {
    throw InvalidInput("epochs and batch_size must be positive");
  }
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidInput("learning_rate must be finite and >= 0");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw InvalidInput("momentum must lie in [0, 1)");
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidInput("alpha must be finite and > 0");
  }
  if (dense_layers != 1 && dense_layers != 2) {
    throw InvalidInput("dense_layers must be 1 or 2");
  }
}

TrainConfig train_config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw InvalidInput("config: top level must be an object");

  static const std::set<std::string> kKeys = {
      "num_classes",    "image_size",     "channels",      "train_per_class",
      "test_per_class", "noise",          "group_size",    "group_overlap",
      "conv1_channels", "conv2_channels", "epochs",        "batch_size",
      "learning_rate",  "momentum",       "seed",          "method",
      "lambda",         "ls_epsilon",     "aux_ce_weight", "alpha",
      "dense_layers",   "warmup_steps"};
  for (const auto& item : j.items()) {
    if (!kKeys.count(item.key())) {
      throw InvalidInput("config: unknown key '" + item.key() + "'");
    }
  }

  TrainConfig cfg;
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) {
        field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
      }
    };
    get("num_classes", cfg.data.num_classes);
    get("image_size", cfg.data.image_size);
    get("channels", cfg.data.channels);
    get("train_per_class", cfg.data.train_per_class);
    get("test_per_class", cfg.data.test_per_class);
    get("noise", cfg.data.noise);
    get("group_size", cfg.data.group_size);
    get("group_overlap", cfg.data.group_overlap);
    get("conv1_channels", cfg.conv1_channels);
    get("conv2_channels", cfg.conv2_channels);
    get("epochs", cfg.epochs);
    get("batch_size", cfg.batch_size);
    get("learning_rate", cfg.learning_rate);
    get("momentum", cfg.momentum);
    get("seed", cfg.seed);
    get("lambda", cfg.smoothing.lambda);
    get("ls_epsilon", cfg.smoothing.ls_epsilon);
    get("aux_ce_weight", cfg.smoothing.aux_ce_weight);
    get("alpha", cfg.alpha);
    get("dense_layers", cfg.dense_layers);
    get("warmup_steps", cfg.warmup_steps);
    if (j.contains("method")) {
      cfg.method = parse_method(j.at("method").get<std::string>());
    }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string train_config_to_json(const TrainConfig& cfg) {
  ordered_json j;
  j["num_classes"] = cfg.data.num_classes;
  j["image_size"] = cfg.data.image_size;
  j["channels"] = cfg.data.channels;
  j["train_per_class"] = cfg.data.train_per_class;
  j["test_per_class"] = cfg.data.test_per_class;
  j["noise"] = cfg.data.noise;
  j["group_size"] = cfg.data.group_size;
  j["group_overlap"] = cfg.data.group_overlap;
  j["conv1_channels"] = cfg.conv1_channels;
  j["conv2_channels"] = cfg.conv2_channels;
  j["epochs"] = cfg.epochs;
  j["batch_size"] = cfg.batch_size;
  j["learning_rate"] = cfg.learning_rate;
  j["momentum"] = cfg.momentum;
  j["seed"] = cfg.seed;
  j["method"] = method_name(cfg.method);
  j["lambda"] = cfg.smoothing.lambda;
  j["ls_epsilon"] = cfg.smoothing.ls_epsilon;
  j["aux_ce_weight"] = cfg.smoothing.aux_ce_weight;
  j["alpha"] = cfg.alpha;
  j["dense_layers"] = cfg.dense_layers;
  j["warmup_steps"] = cfg.warmup_steps;
  return j.dump(2);
}

std::vector<ForwardResult> forward_batch(const TinyNet& net, const Split& split,
                                         std::span<const std::size_t> indices) {
  std::vector<ForwardResult> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(net.forward(split.image(i)));
  return out;
}

std::optional<ZipfSoftLabel> soft_label_from_forward(const TinyNet& net,
                                                     const ForwardResult& fw,
                                                     std::size_t y,
                                                     const TrainConfig& cfg,
                                                     std::size_t step) {
  if (!uses_zipf(cfg.method) || step < cfg.warmup_steps) return std::nullopt;
  const Vector probs = softmax(fw.logits);
  RankAssignment ranks;
  if (cfg.method == Method::kZipfLogit) {
    ranks = logit_ranking(probs, y);
  } else {
    VoteHistogram votes =
        vote_histogram(local_predictions(fw.features, net.classifier()));
    if (fw.aux_features) {
      merge_votes(votes, vote_histogram(local_predictions(
                             *fw.aux_features, *net.aux_classifier())));
    }
    ranks = rank_from_votes(votes, probs, y);
  }
  return make_zipf_soft_label(ranks, cfg.alpha, net.shape().num_classes);
}

std::vector<std::optional<ZipfSoftLabel>> soft_labels_for_batch(
    const TinyNet& net, const Split& split,
    std::span<const std::size_t> indices, const TrainConfig& cfg,
    std::size_t step) {
  std::vector<std::optional<ZipfSoftLabel>> labels;
  labels.reserve(indices.size());
  for (std::size_t i : indices) {
    labels.push_back(soft_label_from_forward(net, net.forward(split.image(i)),
                                             split.labels[i], cfg, step));
  }
  return labels;
}

BatchGradient loss_and_gradient(
    const TinyNet& net, const Split& split,
    std::span<const std::size_t> indices, const TrainConfig& cfg,
    std::span<const std::optional<ZipfSoftLabel>> labels, std::size_t step) {
  if (!labels.empty() && labels.size() != indices.size()) {
    throw InvalidInput("loss_and_gradient: one soft-label slot per sample");
  }
  if (indices.empty()) throw InvalidInput("loss_and_gradient: empty batch");
  BatchGradient out;
  out.grad.assign(net.params().size(), 0.0);
  Activations tape;
  for (std::size_t b = 0; b < indices.size(); ++b) {
    const std::size_t y = split.labels[indices[b]];
    const ForwardResult fw = net.forward(split.image(indices[b]), &tape);
    const auto best = std::max_element(fw.logits.begin(), fw.logits.end());
    if (static_cast<std::size_t>(best - fw.logits.begin()) == y) ++out.correct;

    std::optional<AuxiliaryHead> aux;
    if (!fw.aux_logits.empty()) aux = AuxiliaryHead{fw.aux_logits, y};

    Vector dlogits, daux;
    if (cfg.method == Method::kLs) {
      LossValue ls = label_smoothing_loss(fw.logits, y,
                                          cfg.smoothing.ls_epsilon);
      out.loss += ls.value;
      out.ce += ls.value;
      dlogits = std::move(ls.grad);
      if (aux) {
        LossValue a = cross_entropy(aux->logits, y);
        out.aux_ce += a.value;
        out.loss += cfg.smoothing.aux_ce_weight * a.value;
        daux = std::move(a.grad);
        for (double& g : daux) g *= cfg.smoothing.aux_ce_weight;
      }
    } else {
      // The label is a constant target built from this same forward pass.
      std::optional<ZipfSoftLabel> own;
      if (labels.empty()) own = soft_label_from_forward(net, fw, y, cfg, step);
      const std::optional<ZipfSoftLabel>& label =
          labels.empty() ? own : labels[b];
      const ZipfSoftLabel* pt = label ? &*label : nullptr;
      CombinedLoss l = combined_loss(fw.logits, y, pt, cfg.smoothing, aux);
      out.loss += l.value;
      out.ce += l.ce;
      out.zipf += l.zipf;
      out.aux_ce += l.aux_ce;
      dlogits = std::move(l.grad);
      daux = std::move(l.aux_grad);
    }
    net.backward(tape, dlogits, daux, out.grad);
  }
  const double inv = 1.0 / static_cast<double>(indices.size());
  out.loss *= inv;
  out.ce *= inv;
  out.zipf *= inv;
  out.aux_ce *= inv;
  for (double& g : out.grad) g *= inv;
  return out;
}

BatchGradient backward_and_step(TinyNet& net, SgdState& opt,
                                const Split& split,
                                std::span<const std::size_t> indices,
                                const TrainConfig& cfg, std::size_t step) {
  BatchGradient g = loss_and_gradient(net, split, indices, cfg, {}, step);
  if (!std::isfinite(g.loss)) {
    throw NumericError("non-finite loss at step " + std::to_string(step) +
                       " (ce " + std::to_string(g.ce) + ", zipf " +
                       std::to_string(g.zipf) + ")");
  }
  Vector& params = net.params();
  if (opt.velocity.size() != params.size()) {
    opt.velocity.assign(params.size(), 0.0);
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    opt.velocity[i] = cfg.momentum * opt.velocity[i] + g.grad[i];
    params[i] -= cfg.learning_rate * opt.velocity[i];
  }
  return g;
}

Evaluation evaluate(const TinyNet& net, const Split& split) {
  Evaluation ev;
  if (split.size() == 0) return ev;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < split.size(); ++i) {
    const ForwardResult fw = net.forward(split.image(i));
    const std::size_t y = split.labels[i];
    const auto best = std::max_element(fw.logits.begin(), fw.logits.end());
    if (static_cast<std::size_t>(best - fw.logits.begin()) == y) ++correct;
    ev.entropy += entropy(softmax(fw.logits));
    ev.nontarget_entropy += entropy(normalized_nontarget_probs(fw.logits, y));
  }
  const double n = static_cast<double>(split.size());
  ev.accuracy = static_cast<double>(correct) / n;
  ev.entropy /= n;
  ev.nontarget_entropy /= n;
  return ev;
}

ExperimentResult run_experiment(const TrainConfig& cfg) {
  cfg.validate();
  const SyntheticDataset data = generate_dataset(cfg.dataset_options());
  SeededRng root(cfg.seed);
  SeededRng init_rng = root.derive(kInitStream);
  SeededRng shuffle_rng = root.derive(kShuffleStream);
  ExperimentResult result{{}, TinyNet(cfg.net_shape(), init_rng)};
  TinyNet& net = result.net;
  SgdState opt;

  std::vector<std::size_t> order(data.train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    EpochMetrics m;
    m.epoch = epoch + 1;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const std::span<const std::size_t> batch(order.data() + start, end - start);
      const BatchGradient g = backward_and_step(net, opt, data.train, batch,
                                                cfg, step++);
      const double w = static_cast<double>(batch.size());
      m.train_loss += g.loss * w;
      m.train_ce += g.ce * w;
      m.train_zipf += g.zipf * w;
    }
    const double n = static_cast<double>(order.size());
    m.train_loss /= n;
    m.train_ce /= n;
    m.train_zipf /= n;
    m.train_accuracy = evaluate(net, data.train).accuracy;
    const Evaluation test = evaluate(net, data.test);
    m.test_accuracy = test.accuracy;
    m.test_nontarget_entropy = test.nontarget_entropy;
    m.test_entropy = test.entropy;
    result.history.push_back(m);
  }
  return result;
}

EmpiricalRankDistribution collect_model_rank_distribution(const TinyNet& net,
                                                          const Split& split,
                                                          std::size_t top_k,
                                                          bool keep_per_sample) {
  if (split.size() == 0) {
    throw InvalidInput("collect_model_rank_distribution: empty split");
  }
  const std::size_t c = net.shape().num_classes;
  Matrix probs(split.size(), c);
  for (std::size_t i = 0; i < split.size(); ++i) {
    const Vector p = softmax(net.forward(split.image(i)).logits);
    std::copy(p.begin(), p.end(), probs.row(i).begin());
  }
  return rank_distribution_from_probs(probs, top_k, keep_per_sample);
}

std::string history_to_csv(const MetricsHistory& history) {
  std::string out =
      "epoch,train_loss,train_ce,train_zipf,train_accuracy,test_accuracy,"
      "test_nontarget_entropy,test_entropy\n";
  for (const EpochMetrics& m : history) {
    out += std::to_string(m.epoch);
    for (double v : {m.train_loss, m.train_ce, m.train_zipf, m.train_accuracy,
                     m.test_accuracy, m.test_nontarget_entropy,
                     m.test_entropy}) {
      out += "," + detail::format_double(v);
    }
    out += "\n";
  }
  return out;
}

std::string summary_to_json(const TrainConfig& cfg,
                            const MetricsHistory& history) {
  ordered_json j;
  j["method"] = method_name(cfg.method);
  j["seed"] = cfg.seed;
  j["epochs"] = history.size();
  if (!history.empty()) {
    const EpochMetrics& last = history.back();
    j["final_train_accuracy"] = last.train_accuracy;
    j["final_test_accuracy"] = last.test_accuracy;
    j["mean_nontarget_entropy"] = last.test_nontarget_entropy;
    j["mean_entropy"] = last.test_entropy;
    j["final_train_loss"] = last.train_loss;
  }
  j["config"] = ordered_json::parse(train_config_to_json(cfg));
  return j.dump(2) + "\n";
}

ComparisonTable compare_methods(const TrainConfig& cfg,
                                std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw InvalidInput("compare_methods: no seeds given");
  ComparisonTable table;
  table.seeds.assign(seeds.begin(), seeds.end());
  for (Method m : kAllMethods) {
    MethodSummary s;
    s.method = m;
    for (std::uint64_t seed : seeds) {
      TrainConfig run = cfg;
      run.method = m;
      run.seed = seed;
      const ExperimentResult r = run_experiment(run);
      s.test_accuracy.push_back(r.history.back().test_accuracy);
      s.train_accuracy.push_back(r.history.back().train_accuracy);
      s.nontarget_entropy.push_back(r.history.back().test_nontarget_entropy);
    }
    table.methods.push_back(std::move(s));
  }
  return table;
}

std::string comparison_to_json(const ComparisonTable& table) {
  ordered_json j;
  j["seeds"] = table.seeds;
  ordered_json rows = ordered_json::array();
  for (const MethodSummary& s : table.methods) {
    ordered_json r;
    r["method"] = method_name(s.method);
    r["test_accuracy_mean"] = mean_of(s.test_accuracy);
    r["test_accuracy_std"] = std_of(s.test_accuracy);
    r["train_accuracy_mean"] = mean_of(s.train_accuracy);
    r["train_accuracy_std"] = std_of(s.train_accuracy);
    r["nontarget_entropy_mean"] = mean_of(s.nontarget_entropy);
    r["nontarget_entropy_std"] = std_of(s.nontarget_entropy);
    r["per_seed"] = {{"test_accuracy", s.test_accuracy},
                     {"train_accuracy", s.train_accuracy},
                     {"nontarget_entropy", s.nontarget_entropy}};
    rows.push_back(std::move(r));
  }
  j["methods"] = rows;
  return j.dump(2) + "\n";
}

}  // namespace zipfls
