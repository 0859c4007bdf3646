#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "srfed/defe.hpp"
#include "srfed/fixedpoint.hpp"
#include "srfed/rng.hpp"

namespace srfed {

struct ProjectionVector {
  std::vector<double> values;  // one projection per model layer group
  std::uint32_t client_index = 0;
  std::uint64_t round = 0;
};

struct ClusterReport {
  std::vector<int> assignments;
  std::vector<std::vector<double>> centroids;
  std::vector<double> avg_cos;
  int rejected_cluster = 0;
  std::vector<int> benign_mask;  // gamma_t
};

inline double l2_norm(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Projection of one encrypted client layer onto the server's plaintext global
// layer: AggDec result decoded at scale^2, normalized by the layer norm.
inline double project_layer(const GroupParams& params, const ProjectionKey& skf,
                            std::span<const Ciphertext> cts, std::span<const double> global_layer,
                            const FixedPointCodec& codec) {
  if (cts.size() != global_layer.size())
    throw std::invalid_argument("project_layer: layer size mismatch");
  const double norm = l2_norm(global_layer);
  if (norm == 0) throw std::domain_error("project_layer: zero-norm global layer");

  std::vector<std::int64_t> y(global_layer.size());
  for (std::size_t i = 0; i < global_layer.size(); ++i) y[i] = codec.encode_clip(global_layer[i]);
  const Bigint raw = agg_dec(params, skf.value, cts, y);
  return codec.decode_product(raw) / norm;
}

// Integer-exact plaintext twin of project_layer: same Bigint inner product,
// same decode. Serves as the oracle side of the encrypted/plaintext pair.
inline double project_layer_plain(std::span<const std::int64_t> client_enc, const Bigint& eta,
                                  std::span<const double> global_layer,
                                  const FixedPointCodec& codec) {
  if (client_enc.size() != global_layer.size())
    throw std::invalid_argument("project_layer_plain: layer size mismatch");
  const double norm = l2_norm(global_layer);
  if (norm == 0) throw std::domain_error("project_layer_plain: zero-norm global layer");
  Bigint acc = 0;
  for (std::size_t i = 0; i < client_enc.size(); ++i)
    acc += (Bigint(client_enc[i]) + eta) * codec.encode_clip(global_layer[i]);
  return codec.decode_product(acc) / norm;
}

struct KMeansResult {
  std::vector<int> assignments;
  std::vector<std::vector<double>> centroids;
};

namespace detail {

inline double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace detail

// Lloyd iteration with k-means++ seeding. Deterministic per seed; empty
// clusters are repaired by moving in the point farthest from its centroid.
inline KMeansResult kmeans(const std::vector<std::vector<double>>& points, std::uint32_t k,
                           std::uint64_t seed, std::uint32_t max_iter = 100) {
  const std::size_t n = points.size();
  if (k < 2) throw std::invalid_argument("kmeans: need K >= 2");
  if (n < k) throw std::invalid_argument("kmeans: need at least K points");
  const std::size_t dim = points.front().size();

  Rng rng = make_rng(seed);
  std::vector<std::vector<double>> centroids;
  centroids.reserve(k);

  // k-means++ seeding
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  centroids.push_back(points[first(rng)]);
  std::vector<double> d2(n);
  while (centroids.size() < k) {
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::max();
      for (const auto& c : centroids) best = std::min(best, detail::sq_dist(points[i], c));
      d2[i] = best;
      total += best;
    }
    std::size_t chosen;
    if (total <= 0) {
      chosen = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    } else {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng), acc = 0;
      chosen = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= target) {
          chosen = i;
          break;
        }
      }
    }
    centroids.push_back(points[chosen]);
  }

  std::vector<int> assign(n, -1);
  for (std::uint32_t iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = detail::sq_dist(points[i], centroids[0]);
      for (std::uint32_t c = 1; c < k; ++c) {
        const double d = detail::sq_dist(points[i], centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }

    // Repair empty clusters with the globally farthest point.
    std::vector<std::size_t> sizes(k, 0);
    for (int a : assign) ++sizes[a];
    for (std::uint32_t c = 0; c < k; ++c) {
      if (sizes[c] > 0) continue;
      std::size_t far_idx = 0;
      double far_d = -1;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[assign[i]] <= 1) continue;
        const double d = detail::sq_dist(points[i], centroids[assign[i]]);
        if (d > far_d) {
          far_d = d;
          far_idx = i;
        }
      }
      --sizes[assign[far_idx]];
      assign[far_idx] = static_cast<int>(c);
      ++sizes[c];
      changed = true;
    }

    for (auto& c : centroids) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t f = 0; f < dim; ++f) centroids[assign[i]][f] += points[i][f];
    for (std::uint32_t c = 0; c < k; ++c)
      for (std::size_t f = 0; f < dim; ++f) centroids[c][f] /= static_cast<double>(sizes[c]);

    if (!changed) break;
  }
  return {std::move(assign), std::move(centroids)};
}

// Cosine of a member vector against its centroid; zero vectors contribute 0.
inline double cosine(std::span<const double> a, std::span<const double> b) {
  const double na = l2_norm(a), nb = l2_norm(b);
  if (na == 0 || nb == 0) return 0;
  double dot = 0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return dot / (na * nb);
}

// The cluster with the lowest average member-to-centroid cosine similarity is
// rejected; ties break toward the lowest cluster id.
inline ClusterReport filter_clusters(const std::vector<std::vector<double>>& points,
                                     const std::vector<int>& assignments,
                                     const std::vector<std::vector<double>>& centroids) {
  if (points.size() != assignments.size())
    throw std::invalid_argument("filter_clusters: assignment size mismatch");
  const std::size_t k = centroids.size();
  ClusterReport report;
  report.assignments = assignments;
  report.centroids = centroids;
  report.avg_cos.assign(k, 0.0);

  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    report.avg_cos[assignments[i]] += cosine(points[i], centroids[assignments[i]]);
    ++sizes[assignments[i]];
  }
  for (std::size_t c = 0; c < k; ++c)
    if (sizes[c] > 0) report.avg_cos[c] /= static_cast<double>(sizes[c]);

  report.rejected_cluster = 0;
  for (std::size_t c = 1; c < k; ++c)
    if (report.avg_cos[c] < report.avg_cos[report.rejected_cluster])
      report.rejected_cluster = static_cast<int>(c);

  report.benign_mask.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    report.benign_mask[i] = assignments[i] == report.rejected_cluster ? 0 : 1;
  return report;
}

inline std::vector<int> select_and_weight(const ClusterReport& report) { return report.benign_mask; }

}  // namespace srfed
