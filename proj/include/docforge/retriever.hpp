#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "docforge/common.hpp"
#include "docforge/metrics.hpp"

namespace docforge {

/// Ranking scores are quantized to 32-bit floats at this single choke point.
/// Caches store float vectors, and both the incremental and the from-scratch
/// ranking paths quantize identically, which is what makes them bit-equal.
inline float ranking_score(double raw) { return static_cast<float>(raw); }

/// The fixed target retriever. `score` must be a pure function of the two
/// texts and the retriever's own frozen state; the fingerprint changes
/// whenever any scoring-relevant parameter changes.
class Retriever {
 public:
  virtual ~Retriever() = default;
  virtual double score(std::string_view query_text, std::string_view doc_text) const = 0;
  virtual std::string fingerprint() const = 0;
};

/// (id, text) view of whatever collection is being ranked.
using DocRef = std::pair<std::string_view, std::string_view>;

/// Exact ranking: scores every document and keeps the top-k under the global
/// tie-break. Scores in the result are the quantized ranking scores.
inline RankedList rank(const Retriever& retriever, std::string_view query_text,
                       const std::vector<DocRef>& docs, std::size_t k) {
  RankedList all;
  all.reserve(docs.size());
  for (const auto& [id, text] : docs) {
    all.push_back({std::string(id), ranking_score(retriever.score(query_text, text))});
  }
  sort_ranked(all);
  if (all.size() > k) all.resize(k);
  return all;
}

}  // namespace docforge
