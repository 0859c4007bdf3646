#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "srfed/rng.hpp"

namespace srfed {

struct LabeledDataset {
  std::size_t n_features = 0;
  std::vector<double> features;  // row-major, size() x n_features
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * n_features, n_features};
  }
  void push_row(std::span<const double> x, int label) {
    features.insert(features.end(), x.begin(), x.end());
    labels.push_back(label);
  }
  int num_classes() const {
    int c = 0;
    for (int l : labels) c = std::max(c, l + 1);
    return c;
  }
};

struct DenseLayer {
  std::size_t in = 0, out = 0;
  std::vector<double> W;  // out x in, row-major
  std::vector<double> b;  // out
};

// Dense MLP with tanh hidden activations and a linear output layer trained
// under softmax cross-entropy. Parameters flatten to layer groups
// [W1, b1, W2, b2, ...] so the aggregation side can work layer-wise.
struct Model {
  std::vector<DenseLayer> layers;

  struct ParamGroup {
    std::size_t offset = 0;
    std::size_t size = 0;
  };

  static Model init(std::span<const std::size_t> dims, Rng& rng) {
    if (dims.size() < 2) throw std::invalid_argument("Model::init: need at least input and output dims");
    Model m;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      DenseLayer layer;
      layer.in = dims[l];
      layer.out = dims[l + 1];
      layer.W.resize(layer.in * layer.out);
      layer.b.assign(layer.out, 0.0);
      const double limit = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
      std::uniform_real_distribution<double> dist(-limit, limit);
      for (double& w : layer.W) w = dist(rng);
      m.layers.push_back(std::move(layer));
    }
    return m;
  }

  std::size_t input_dim() const { return layers.front().in; }
  std::size_t output_dim() const { return layers.back().out; }

  std::size_t param_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.W.size() + l.b.size();
    return n;
  }

  std::vector<ParamGroup> param_groups() const {
    std::vector<ParamGroup> groups;
    std::size_t offset = 0;
    for (const auto& l : layers) {
      groups.push_back({offset, l.W.size()});
      offset += l.W.size();
      groups.push_back({offset, l.b.size()});
      offset += l.b.size();
    }
    return groups;
  }

  std::vector<double> flatten() const {
    std::vector<double> flat;
    flat.reserve(param_count());
    for (const auto& l : layers) {
      flat.insert(flat.end(), l.W.begin(), l.W.end());
      flat.insert(flat.end(), l.b.begin(), l.b.end());
    }
    return flat;
  }

  void unflatten(std::span<const double> flat) {
    if (flat.size() != param_count()) throw std::invalid_argument("Model::unflatten: size mismatch");
    std::size_t pos = 0;
    for (auto& l : layers) {
      std::copy_n(flat.begin() + pos, l.W.size(), l.W.begin());
      pos += l.W.size();
      std::copy_n(flat.begin() + pos, l.b.size(), l.b.begin());
      pos += l.b.size();
    }
  }
};

inline void softmax_inplace(std::span<double> v) {
  const double m = *std::max_element(v.begin(), v.end());
  double sum = 0;
  for (double& x : v) {
    x = std::exp(x - m);
    sum += x;
  }
  for (double& x : v) x /= sum;
}

// Forward pass keeping per-layer activations for backprop.
inline std::vector<std::vector<double>> forward_activations(const Model& m, std::span<const double> x) {
  std::vector<std::vector<double>> acts;
  acts.emplace_back(x.begin(), x.end());
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    const auto& layer = m.layers[l];
    std::vector<double> z(layer.out);
    const auto& a = acts.back();
    for (std::size_t o = 0; o < layer.out; ++o) {
      double acc = layer.b[o];
      const double* wrow = layer.W.data() + o * layer.in;
      for (std::size_t i = 0; i < layer.in; ++i) acc += wrow[i] * a[i];
      z[o] = acc;
    }
    if (l + 1 < m.layers.size())
      for (double& v : z) v = std::tanh(v);
    acts.push_back(std::move(z));
  }
  return acts;
}

inline std::vector<double> logits(const Model& m, std::span<const double> x) {
  return forward_activations(m, x).back();
}

inline int predict(const Model& m, std::span<const double> x) {
  auto out = logits(m, x);
  return static_cast<int>(std::max_element(out.begin(), out.end()) - out.begin());
}

// Mean softmax cross-entropy loss and flat gradient over the given sample
// indices. Gradient layout matches Model::flatten().
inline double batch_loss_grad(const Model& m, const LabeledDataset& data,
                              std::span<const std::size_t> idx, std::vector<double>& grad) {
  grad.assign(m.param_count(), 0.0);
  const auto groups = m.param_groups();
  double loss = 0;
  std::vector<std::vector<double>> deltas(m.layers.size());

  for (std::size_t s : idx) {
    auto acts = forward_activations(m, data.row(s));
    std::vector<double> probs = acts.back();
    softmax_inplace(probs);
    const int y = data.labels[s];
    loss += -std::log(std::max(probs[y], 1e-300));

    // delta at the output, then back through tanh layers
    deltas.back() = probs;
    deltas.back()[y] -= 1.0;
    for (std::size_t l = m.layers.size(); l-- > 1;) {
      const auto& layer = m.layers[l];
      std::vector<double>& up = deltas[l];
      std::vector<double>& down = deltas[l - 1];
      down.assign(layer.in, 0.0);
      for (std::size_t o = 0; o < layer.out; ++o) {
        const double d = up[o];
        const double* wrow = layer.W.data() + o * layer.in;
        for (std::size_t i = 0; i < layer.in; ++i) down[i] += wrow[i] * d;
      }
      const auto& a = acts[l];  // tanh outputs of layer l-1
      for (std::size_t i = 0; i < layer.in; ++i) down[i] *= 1.0 - a[i] * a[i];
    }

    for (std::size_t l = 0; l < m.layers.size(); ++l) {
      const auto& layer = m.layers[l];
      const auto& a = acts[l];
      double* gW = grad.data() + groups[2 * l].offset;
      double* gb = grad.data() + groups[2 * l + 1].offset;
      for (std::size_t o = 0; o < layer.out; ++o) {
        const double d = deltas[l][o];
        double* grow = gW + o * layer.in;
        for (std::size_t i = 0; i < layer.in; ++i) grow[i] += d * a[i];
        gb[o] += d;
      }
    }
  }

  const double inv = 1.0 / static_cast<double>(idx.size());
  for (double& g : grad) g *= inv;
  return loss * inv;
}

inline double dataset_loss(const Model& m, const LabeledDataset& data) {
  double loss = 0;
  for (std::size_t s = 0; s < data.size(); ++s) {
    auto out = logits(m, data.row(s));
    softmax_inplace(out);
    loss += -std::log(std::max(out[data.labels[s]], 1e-300));
  }
  return loss / static_cast<double>(data.size());
}

// Mini-batch SGD with momentum. Deterministic for a given rng state.
inline Model train_local(const Model& model, const LabeledDataset& data, std::size_t epochs,
                         double lr, double momentum, std::size_t batch, Rng& rng) {
  if (data.empty()) throw std::invalid_argument("train_local: empty dataset");
  if (data.n_features != model.input_dim())
    throw std::invalid_argument("train_local: feature dimension does not match the model");
  for (int l : data.labels)
    if (l < 0 || static_cast<std::size_t>(l) >= model.output_dim())
      throw std::invalid_argument("train_local: label outside the model's class range");

  Model out = model;
  std::vector<double> velocity(model.param_count(), 0.0);
  std::vector<double> grad;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  auto flat = out.flatten();
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t len = std::min(batch, order.size() - start);
      const double loss = batch_loss_grad(out, data, {order.data() + start, len}, grad);
      if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "train_local: loss diverged at epoch " << epoch << ", batch offset " << start;
        throw std::runtime_error(msg.str());
      }
      for (std::size_t i = 0; i < flat.size(); ++i) {
        velocity[i] = momentum * velocity[i] + grad[i];
        flat[i] -= lr * velocity[i];
      }
      out.unflatten(flat);
    }
  }
  return out;
}

struct Metrics {
  double oa = 0;
  std::optional<double> sa;
  std::optional<double> asr;
};

inline Metrics evaluate_predictions(std::span<const int> preds, std::span<const int> labels,
                                    int l_src, int l_tar) {
  if (preds.size() != labels.size() || preds.empty())
    throw std::invalid_argument("evaluate_predictions: prediction/label size mismatch");
  std::size_t correct = 0, src_total = 0, src_correct = 0, src_to_tar = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] == labels[i]) ++correct;
    if (labels[i] == l_src) {
      ++src_total;
      if (preds[i] == l_src) ++src_correct;
      if (preds[i] == l_tar) ++src_to_tar;
    }
  }
  Metrics m;
  m.oa = static_cast<double>(correct) / static_cast<double>(preds.size());
  if (src_total > 0) {
    m.sa = static_cast<double>(src_correct) / static_cast<double>(src_total);
    m.asr = static_cast<double>(src_to_tar) / static_cast<double>(src_total);
  }
  return m;
}

inline Metrics evaluate(const Model& model, const LabeledDataset& test, int l_src, int l_tar) {
  if (test.empty()) throw std::invalid_argument("evaluate: empty test set");
  std::vector<int> preds(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) preds[i] = predict(model, test.row(i));
  return evaluate_predictions(preds, test.labels, l_src, l_tar);
}

struct PartitionSpec {
  double alpha = 0.2;
  std::uint32_t n_clients = 20;
  std::uint64_t seed = 0;
};

// Non-IID split: per class, client shares drawn from Dirichlet(alpha) and
// sample counts allocated by largest remainder. Every sample lands on exactly
// one client.
inline std::vector<LabeledDataset> dirichlet_partition(const LabeledDataset& data,
                                                       const PartitionSpec& spec) {
  if (spec.n_clients < 1) throw std::invalid_argument("dirichlet_partition: need at least one client");
  if (spec.alpha <= 0) throw std::invalid_argument("dirichlet_partition: alpha must be positive");

  Rng rng = make_rng(spec.seed);
  const int classes = data.num_classes();
  std::vector<std::vector<std::size_t>> by_class(classes);
  for (std::size_t i = 0; i < data.size(); ++i) by_class[data.labels[i]].push_back(i);

  std::vector<LabeledDataset> parts(spec.n_clients);
  for (auto& p : parts) p.n_features = data.n_features;

  std::gamma_distribution<double> gamma(spec.alpha, 1.0);
  for (int c = 0; c < classes; ++c) {
    auto& idx = by_class[c];
    if (idx.empty()) continue;
    std::shuffle(idx.begin(), idx.end(), rng);

    std::vector<double> weights(spec.n_clients);
    double total = 0;
    for (double& w : weights) {
      w = gamma(rng);
      total += w;
    }
    if (total <= 0) {
      weights.assign(spec.n_clients, 1.0);
      total = static_cast<double>(spec.n_clients);
    }

    // Largest-remainder allocation of idx.size() samples.
    std::vector<std::size_t> counts(spec.n_clients);
    std::vector<std::pair<double, std::uint32_t>> remainders;
    std::size_t assigned = 0;
    for (std::uint32_t k = 0; k < spec.n_clients; ++k) {
      const double exact = weights[k] / total * static_cast<double>(idx.size());
      counts[k] = static_cast<std::size_t>(exact);
      assigned += counts[k];
      remainders.push_back({exact - std::floor(exact), k});
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (std::size_t r = 0; assigned < idx.size(); ++assigned, ++r)
      ++counts[remainders[r % remainders.size()].second];

    std::size_t pos = 0;
    for (std::uint32_t k = 0; k < spec.n_clients; ++k)
      for (std::size_t j = 0; j < counts[k]; ++j, ++pos)
        parts[k].push_row(data.row(idx[pos]), c);
  }
  return parts;
}

// Gaussian class clusters on unit-vector centroids; expected inter-centroid
// distance tracks `separation` in units of the per-class sample sigma.
inline std::pair<LabeledDataset, LabeledDataset> generate_synthetic(std::size_t n, int classes,
                                                                    std::size_t n_features,
                                                                    double separation,
                                                                    std::uint64_t seed) {
  if (classes < 2) throw std::invalid_argument("generate_synthetic: need at least two classes");
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<std::vector<double>> centroids(classes, std::vector<double>(n_features));
  for (auto& c : centroids) {
    double norm = 0;
    for (double& v : c) {
      v = normal(rng);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    const double scale = norm > 0 ? separation / (std::sqrt(2.0) * norm) : 0.0;
    for (double& v : c) v *= scale;
  }

  LabeledDataset train, test;
  train.n_features = test.n_features = n_features;
  std::vector<double> x(n_features);
  for (int c = 0; c < classes; ++c) {
    std::size_t count = n / classes + (static_cast<std::size_t>(c) < n % classes ? 1 : 0);
    const std::size_t train_count = (count * 8 + 5) / 10;
    for (std::size_t s = 0; s < count; ++s) {
      for (std::size_t f = 0; f < n_features; ++f) x[f] = centroids[c][f] + normal(rng);
      (s < train_count ? train : test).push_row(x, c);
    }
  }

  // Mix class order so mini-batches are not class-sorted.
  auto mix = [&rng](LabeledDataset& d) {
    std::vector<std::size_t> order(d.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    LabeledDataset shuffled;
    shuffled.n_features = d.n_features;
    for (std::size_t i : order) shuffled.push_row(d.row(i), d.labels[i]);
    d = std::move(shuffled);
  };
  mix(train);
  mix(test);
  return {std::move(train), std::move(test)};
}

// CSV loader: header row, feature columns, trailing integer label column.
inline LabeledDataset load_csv_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv_dataset: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_csv_dataset: missing header in " + path);

  LabeledDataset data;
  std::size_t line_no = 1;
  std::vector<double> row;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    row.clear();
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error("load_csv_dataset: bad numeric value at " + path + ":" +
                                 std::to_string(line_no));
      }
    }
    if (row.size() < 2)
      throw std::runtime_error("load_csv_dataset: need features and a label at " + path + ":" +
                               std::to_string(line_no));
    const double label_val = row.back();
    row.pop_back();
    const int label = static_cast<int>(label_val);
    if (label < 0 || static_cast<double>(label) != label_val)
      throw std::runtime_error("load_csv_dataset: label must be a non-negative integer at " + path +
                               ":" + std::to_string(line_no));
    if (data.n_features == 0)
      data.n_features = row.size();
    else if (row.size() != data.n_features)
      throw std::runtime_error("load_csv_dataset: inconsistent column count at " + path + ":" +
                               std::to_string(line_no));
    data.push_row(row, label);
  }
  if (data.empty()) throw std::runtime_error("load_csv_dataset: no data rows in " + path);
  return data;
}

}  // namespace srfed
