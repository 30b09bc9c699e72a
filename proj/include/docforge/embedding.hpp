#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "docforge/common.hpp"
#include "docforge/retriever.hpp"
#include "docforge/text.hpp"

namespace docforge {

/// Fixed-dimension 32-bit embedding. Cosine-similarity retrievers keep these
/// L2-normalized (norm 1 within 1e-6).
using EmbeddingVector = std::vector<float>;

inline constexpr std::size_t kColbertDocMaxTokens = 256;
inline constexpr std::size_t kColbertQueryMaxTokens = 64;

/// Cosine similarity of two normalized vectors (plain dot product).
inline double dense_score(const EmbeddingVector& query_vec, const EmbeddingVector& doc_vec) {
  if (query_vec.size() != doc_vec.size()) {
    fail("dimension_mismatch", "dense_score: " + std::to_string(query_vec.size()) + " vs " +
                                   std::to_string(doc_vec.size()));
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < query_vec.size(); ++i) {
    dot += static_cast<double>(query_vec[i]) * static_cast<double>(doc_vec[i]);
  }
  return dot;
}

/// Late interaction: sum over query tokens of the best cosine match among
/// document tokens. Bounded by the number of query tokens.
inline double maxsim_score(const std::vector<EmbeddingVector>& query_token_vecs,
                           const std::vector<EmbeddingVector>& doc_token_vecs) {
  if (query_token_vecs.empty() || doc_token_vecs.empty()) {
    fail("empty_token_list", "maxsim_score: token lists must be nonempty");
  }
  double total = 0.0;
  for (const auto& q : query_token_vecs) {
    double best = -2.0;
    for (const auto& d : doc_token_vecs) {
      double sim = dense_score(q, d);
      if (sim > best) best = sim;
    }
    total += best;
  }
  return total;
}

inline void l2_normalize(EmbeddingVector& vec) {
  double norm_sq = 0.0;
  for (float v : vec) norm_sq += static_cast<double>(v) * static_cast<double>(v);
  if (norm_sq <= 0.0) return;
  float inv = static_cast<float>(1.0 / std::sqrt(norm_sq));
  for (float& v : vec) v *= inv;
}

namespace detail {

/// Signed feature hashing of token unigrams and bigrams: bucket from one
/// hash stream, sign from another.
template <typename Sink>
void hash_features(const std::vector<std::string>& tokens, std::uint64_t seed, Sink&& sink) {
  const std::uint64_t base = fnv1a64_u64(seed);
  auto emit = [&](std::string_view feature) {
    std::uint64_t h = fnv1a64(feature, base);
    float sign = (fnv1a64_u64(h) & 1) ? 1.0f : -1.0f;
    sink(h, sign);
  };
  for (const auto& t : tokens) emit(t);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    emit(tokens[i] + "\x1f" + tokens[i + 1]);
  }
}

}  // namespace detail

/// Deterministic stand-in embedder: feature-hash unigrams and bigrams into
/// `dimension` buckets with hashed ±1 signs, then L2-normalize.
inline EmbeddingVector hash_embed(std::string_view text, std::size_t dimension,
                                  std::uint64_t seed) {
  if (dimension < 8) fail("bad_dimension", "hash_embed: dimension must be >= 8");
  auto tokens = tokenize(text);
  if (tokens.empty()) fail("empty_text", "hash_embed: no tokens after tokenization");
  EmbeddingVector vec(dimension, 0.0f);
  detail::hash_features(tokens, seed, [&](std::uint64_t h, float sign) {
    vec[h % dimension] += sign;
  });
  l2_normalize(vec);
  return vec;
}

/// Single-vector dense retriever over hash embeddings.
class HashDenseRetriever : public Retriever {
 public:
  HashDenseRetriever(std::size_t dimension, std::uint64_t seed)
      : dimension_(dimension), seed_(seed) {}

  double score(std::string_view query_text, std::string_view doc_text) const override {
    return dense_score(hash_embed(query_text, dimension_, seed_),
                       hash_embed(doc_text, dimension_, seed_));
  }

  std::string fingerprint() const override {
    return "hash_dense:dim=" + std::to_string(dimension_) + ":seed=" + std::to_string(seed_);
  }

  EmbeddingVector embed(std::string_view text) const {
    return hash_embed(text, dimension_, seed_);
  }

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
};

/// Multi-vector late-interaction retriever: one hash embedding per token,
/// MaxSim aggregation, ColBERT-style token caps.
class HashMaxSimRetriever : public Retriever {
 public:
  HashMaxSimRetriever(std::size_t dimension, std::uint64_t seed,
                      std::size_t doc_max_tokens = kColbertDocMaxTokens,
                      std::size_t query_max_tokens = kColbertQueryMaxTokens)
      : dimension_(dimension),
        seed_(seed),
        doc_max_tokens_(doc_max_tokens),
        query_max_tokens_(query_max_tokens) {}

  double score(std::string_view query_text, std::string_view doc_text) const override {
    return maxsim_score(token_vectors(query_text, query_max_tokens_),
                        token_vectors(doc_text, doc_max_tokens_));
  }

  std::string fingerprint() const override {
    return "hash_maxsim:dim=" + std::to_string(dimension_) + ":seed=" + std::to_string(seed_) +
           ":dmax=" + std::to_string(doc_max_tokens_) +
           ":qmax=" + std::to_string(query_max_tokens_);
  }

  std::vector<EmbeddingVector> token_vectors(std::string_view text, std::size_t cap) const {
    auto tokens = tokenize(text);
    if (tokens.empty()) fail("empty_text", "maxsim: no tokens after tokenization");
    if (tokens.size() > cap) tokens.resize(cap);
    std::vector<EmbeddingVector> vecs;
    vecs.reserve(tokens.size());
    for (const auto& t : tokens) vecs.push_back(hash_embed(t, dimension_, seed_));
    return vecs;
  }

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
  std::size_t doc_max_tokens_;
  std::size_t query_max_tokens_;
};

}  // namespace docforge
