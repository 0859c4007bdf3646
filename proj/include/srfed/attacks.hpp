#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "srfed/ml.hpp"
#include "srfed/rng.hpp"

namespace srfed {

enum class AttackKind { kNone, kLabelFlip, kGaussian };

inline AttackKind attack_kind_from_string(const std::string& s) {
  if (s == "none") return AttackKind::kNone;
  if (s == "label_flip") return AttackKind::kLabelFlip;
  if (s == "gaussian") return AttackKind::kGaussian;
  throw std::invalid_argument("unknown attack kind: " + s);
}

inline const char* to_string(AttackKind k) {
  switch (k) {
    case AttackKind::kNone: return "none";
    case AttackKind::kLabelFlip: return "label_flip";
    case AttackKind::kGaussian: return "gaussian";
  }
  return "none";
}

struct AttackConfig {
  AttackKind kind = AttackKind::kNone;
  int l_src = 0;
  int l_tar = 4;
  double noise_std = 0.5;
  double malicious_fraction = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (kind == AttackKind::kLabelFlip && l_src == l_tar)
      throw std::invalid_argument("attack: l_src and l_tar must differ for label_flip");
    if (malicious_fraction < 0 || malicious_fraction > 0.5)
      throw std::invalid_argument("attack: malicious_fraction must lie in [0, 0.5]");
    if (kind == AttackKind::kGaussian && noise_std <= 0)
      throw std::invalid_argument("attack: noise_std must be positive for gaussian");
  }
};

// The compromised subset is the first floor(fraction * I) positions of the
// seeded permutation of client indices; fixed for the whole run.
inline std::vector<std::uint32_t> malicious_clients(std::uint32_t n_clients, double fraction,
                                                    std::uint64_t seed) {
  std::vector<std::uint32_t> order(n_clients);
  std::iota(order.begin(), order.end(), 0u);
  Rng rng = make_rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto count = static_cast<std::size_t>(fraction * n_clients);
  order.resize(count);
  std::sort(order.begin(), order.end());
  return order;
}

inline LabeledDataset flip_labels(const LabeledDataset& data, int l_src, int l_tar) {
  if (l_src == l_tar) throw std::invalid_argument("flip_labels: l_src and l_tar must differ");
  LabeledDataset out = data;
  for (int& l : out.labels)
    if (l == l_src) l = l_tar;
  return out;
}

inline Model gaussian_poison(const Model& model, double noise_std, Rng& rng) {
  if (noise_std <= 0) throw std::invalid_argument("gaussian_poison: noise_std must be positive");
  Model out = model;
  std::normal_distribution<double> noise(0.0, noise_std);
  for (auto& layer : out.layers) {
    for (double& w : layer.W) w += noise(rng);
    for (double& b : layer.b) b += noise(rng);
  }
  return out;
}

}  // namespace srfed
