#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "docforge/common.hpp"
#include "docforge/embedding.hpp"
#include "docforge/retriever.hpp"
#include "docforge/text.hpp"

namespace docforge {

/// Sparse hashed feature vector, L2-normalized.
struct SparseFeatures {
  std::vector<std::pair<std::uint32_t, double>> entries;  // (bucket, weight)
};

/// Trainable dense retriever: hashed text features through a linear
/// projection, cosine scoring. Gradients of the contrastive loss are fully
/// analytic, so fine-tuning is testable against finite differences.
class TrainableToyRetriever : public Retriever {
 public:
  TrainableToyRetriever(std::size_t feature_dim, std::size_t embed_dim, std::uint64_t seed)
      : feature_dim_(feature_dim), embed_dim_(embed_dim), seed_(seed),
        weights_(feature_dim * embed_dim) {
    Rng rng = StreamSeed(seed).with("toy_retriever_init").rng();
    double scale = std::sqrt(6.0 / static_cast<double>(feature_dim + embed_dim));
    for (auto& w : weights_) w = (rng.next_double() * 2.0 - 1.0) * scale;
  }

  std::size_t feature_dim() const { return feature_dim_; }
  std::size_t embed_dim() const { return embed_dim_; }
  const std::vector<double>& weights() const { return weights_; }
  std::vector<double>& mutable_weights() { return weights_; }

  double score(std::string_view query_text, std::string_view doc_text) const override {
    auto q = embed_unit(features(query_text));
    auto d = embed_unit(features(doc_text));
    double dot = 0.0;
    for (std::size_t i = 0; i < embed_dim_; ++i) dot += q[i] * d[i];
    return dot;
  }

  std::string fingerprint() const override {
    std::uint64_t h = fnv1a64("toy_retriever");
    h = fnv1a64_u64(feature_dim_, h);
    h = fnv1a64_u64(embed_dim_, h);
    h = fnv1a64_u64(seed_, h);
    for (double w : weights_) {
      std::uint64_t bits;
      static_assert(sizeof(bits) == sizeof(w));
      std::memcpy(&bits, &w, sizeof(bits));
      h = fnv1a64_u64(bits, h);
    }
    return "toy:H=" + std::to_string(feature_dim_) + ":E=" + std::to_string(embed_dim_) +
           ":w=" + std::to_string(h);
  }

  EmbeddingVector embed(std::string_view text) const {
    auto e = embed_unit(features(text));
    EmbeddingVector out(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) out[i] = static_cast<float>(e[i]);
    return out;
  }

  SparseFeatures features(std::string_view text) const {
    auto tokens = tokenize(text);
    if (tokens.empty()) fail("empty_text", "toy retriever: no tokens after tokenization");
    std::map<std::uint32_t, double> buckets;
    detail::hash_features(tokens, seed_, [&](std::uint64_t h, float sign) {
      buckets[static_cast<std::uint32_t>(h % feature_dim_)] += sign;
    });
    double norm_sq = 0.0;
    for (const auto& [bucket, w] : buckets) norm_sq += w * w;
    double inv = norm_sq > 0.0 ? 1.0 / std::sqrt(norm_sq) : 0.0;
    SparseFeatures out;
    out.entries.reserve(buckets.size());
    for (const auto& [bucket, w] : buckets) out.entries.emplace_back(bucket, w * inv);
    return out;
  }

  /// One contrastive step over a batch of (query, positive) feature pairs:
  /// softmax cross-entropy with in-batch negatives. A constant zero logit is
  /// included among the candidates, which keeps the loss informative even
  /// for a singleton batch. Returns the loss; accumulates dLoss/dW.
  double contrastive_loss_grad(const std::vector<std::pair<SparseFeatures, SparseFeatures>>& pairs,
                               std::vector<double>* grad) const {
    std::size_t batch = pairs.size();
    if (batch == 0) fail("no_pairs", "toy retriever: empty training batch");

    struct Side {
      std::vector<double> raw;   // W * h
      std::vector<double> unit;  // normalized
      double norm = 0.0;
    };
    auto project = [&](const SparseFeatures& h) {
      Side side;
      side.raw = embed_raw(h);
      side.unit = side.raw;
      double norm_sq = 0.0;
      for (double v : side.raw) norm_sq += v * v;
      side.norm = std::sqrt(norm_sq);
      if (side.norm > 0.0) {
        for (double& v : side.unit) v /= side.norm;
      }
      return side;
    };

    std::vector<Side> queries(batch), docs(batch);
    for (std::size_t i = 0; i < batch; ++i) {
      queries[i] = project(pairs[i].first);
      docs[i] = project(pairs[i].second);
    }

    auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
      return s;
    };

    std::vector<std::vector<double>> sims(batch, std::vector<double>(batch));
    for (std::size_t i = 0; i < batch; ++i) {
      for (std::size_t j = 0; j < batch; ++j) sims[i][j] = dot(queries[i].unit, docs[j].unit);
    }

    double loss = 0.0;
    double inv_batch = 1.0 / static_cast<double>(batch);
    for (std::size_t i = 0; i < batch; ++i) {
      double denom = 1.0;  // exp(0) background logit
      for (std::size_t j = 0; j < batch; ++j) denom += std::exp(sims[i][j]);
      loss += -(sims[i][i] - std::log(denom)) * inv_batch;

      if (grad == nullptr) continue;
      for (std::size_t j = 0; j < batch; ++j) {
        double g = inv_batch * (std::exp(sims[i][j]) / denom - (i == j ? 1.0 : 0.0));
        if (g == 0.0) continue;
        // d sim / d raw_q = (u_d - sim * u_q) / |raw_q|, symmetric for the doc.
        accumulate_outer(g, docs[j].unit, sims[i][j], queries[i], pairs[i].first, grad);
        accumulate_outer(g, queries[i].unit, sims[i][j], docs[j], pairs[j].second, grad);
      }
    }
    if (!std::isfinite(loss)) fail("non_finite_loss", "toy retriever: loss diverged");
    return loss;
  }

  /// Contrastive fine-tuning: `steps` single-batch updates at rate `lr`.
  /// Batches are drawn from `pairs` without replacement per step, capped at
  /// `batch_cap`. A zero-step call leaves weights and fingerprint untouched.
  void finetune(const std::vector<std::pair<std::string, std::string>>& text_pairs,
                std::size_t steps, double lr, Rng& rng, std::size_t batch_cap = 32) {
    if (text_pairs.empty()) fail("no_pairs", "toy retriever: need at least one positive pair");
    std::vector<std::pair<SparseFeatures, SparseFeatures>> featurized;
    featurized.reserve(text_pairs.size());
    for (const auto& [q, d] : text_pairs) {
      featurized.emplace_back(features(q), features(d));
    }
    std::vector<std::size_t> order(featurized.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::size_t batch = std::min(batch_cap, featurized.size());
    std::vector<double> grad(weights_.size());
    for (std::size_t step = 0; step < steps; ++step) {
      for (std::size_t i = 0; i < batch; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.next_below(order.size() - i));
        std::swap(order[i], order[j]);
      }
      std::vector<std::pair<SparseFeatures, SparseFeatures>> chosen;
      chosen.reserve(batch);
      for (std::size_t i = 0; i < batch; ++i) chosen.push_back(featurized[order[i]]);

      std::fill(grad.begin(), grad.end(), 0.0);
      contrastive_loss_grad(chosen, &grad);
      for (std::size_t i = 0; i < weights_.size(); ++i) {
        weights_[i] -= lr * grad[i];
        if (!std::isfinite(weights_[i])) {
          fail("non_finite_loss", "toy retriever: weights diverged");
        }
      }
    }
  }

 private:
  std::vector<double> embed_raw(const SparseFeatures& h) const {
    std::vector<double> e(embed_dim_, 0.0);
    for (const auto& [bucket, w] : h.entries) {
      const double* col = &weights_[static_cast<std::size_t>(bucket) * embed_dim_];
      for (std::size_t r = 0; r < embed_dim_; ++r) e[r] += col[r] * w;
    }
    return e;
  }

  template <typename SideT>
  void accumulate_outer(double g, const std::vector<double>& other_unit, double sim,
                        const SideT& side, const SparseFeatures& h,
                        std::vector<double>* grad) const {
    if (side.norm <= 0.0) return;
    // dL/d raw = g * (other_unit - sim * unit) / norm; dL/dW = dL/draw (x) h
    for (const auto& [bucket, w] : h.entries) {
      double* col = &(*grad)[static_cast<std::size_t>(bucket) * embed_dim_];
      for (std::size_t r = 0; r < embed_dim_; ++r) {
        col[r] += g * (other_unit[r] - sim * side.unit[r]) / side.norm * w;
      }
    }
  }

  std::size_t feature_dim_;
  std::size_t embed_dim_;
  std::uint64_t seed_;
  std::vector<double> weights_;  // column-major: bucket-major blocks of embed_dim
};

/// Spec-shaped wrapper: returns an updated copy with a new fingerprint.
inline TrainableToyRetriever finetune_toy_retriever(
    const TrainableToyRetriever& retriever,
    const std::vector<std::pair<std::string, std::string>>& positive_pairs, std::size_t steps,
    double lr, Rng rng) {
  TrainableToyRetriever updated = retriever;
  updated.finetune(positive_pairs, steps, lr, rng);
  return updated;
}

}  // namespace docforge
