#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <unordered_set>
#include <vector>

#include "docforge/common.hpp"

namespace docforge {

/// One ranked result. Scores are stored at the precision the ranking was
/// produced with; ordering is score descending, ties ascending by doc id.
struct RankedItem {
  std::string doc_id;
  double score = 0.0;
};

using RankedList = std::vector<RankedItem>;

/// The global tie-break: higher score first, equal scores ordered by
/// ascending doc id. Every ranking in the library is total under this order.
inline bool ranked_before(double score_a, const std::string& id_a, double score_b,
                          const std::string& id_b) {
  if (score_a != score_b) return score_a > score_b;
  return id_a < id_b;
}

inline void sort_ranked(RankedList& items) {
  std::sort(items.begin(), items.end(), [](const RankedItem& a, const RankedItem& b) {
    return ranked_before(a.score, a.doc_id, b.score, b.doc_id);
  });
}

namespace detail {

/// Shared nDCG arithmetic: binary gains in rank order, summed rank 1..k in
/// ascending order so every caller produces bit-identical doubles.
inline double ndcg_from_gains(const std::vector<char>& gains, std::size_t relevant_count,
                              std::size_t k) {
  double dcg = 0.0;
  std::size_t limit = std::min(k, gains.size());
  for (std::size_t i = 0; i < limit; ++i) {
    if (gains[i]) dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  }
  double idcg = 0.0;
  std::size_t ideal = std::min(relevant_count, k);
  for (std::size_t i = 0; i < ideal; ++i) {
    idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  }
  return dcg / idcg;
}

}  // namespace detail

/// nDCG@k with binary gains and 1/log2(rank+1) discounts. The ideal ranking
/// places min(|relevant|, k) relevant documents at the top. Undefined (and
/// rejected) when `relevant` is empty.
inline double ndcg_at_k(const RankedList& ranking,
                        const std::unordered_set<std::string>& relevant, std::size_t k) {
  if (relevant.empty()) fail("empty_relevant_set", "ndcg_at_k: no relevant documents");
  if (k < 1) fail("bad_cutoff", "ndcg_at_k: k must be >= 1");
  std::vector<char> gains;
  std::size_t limit = std::min(k, ranking.size());
  gains.reserve(limit);
  for (std::size_t i = 0; i < limit; ++i) {
    gains.push_back(relevant.count(ranking[i].doc_id) ? 1 : 0);
  }
  return detail::ndcg_from_gains(gains, relevant.size(), k);
}

/// Fraction of relevant documents appearing in the top-k.
inline double recall_at_k(const RankedList& ranking,
                          const std::unordered_set<std::string>& relevant, std::size_t k) {
  if (relevant.empty()) fail("empty_relevant_set", "recall_at_k: no relevant documents");
  if (k < 1) fail("bad_cutoff", "recall_at_k: k must be >= 1");
  std::size_t hits = 0;
  std::size_t limit = std::min(k, ranking.size());
  for (std::size_t i = 0; i < limit; ++i) {
    if (relevant.count(ranking[i].doc_id)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

}  // namespace docforge
