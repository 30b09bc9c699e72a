#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "docforge/common.hpp"
#include "docforge/retriever.hpp"
#include "docforge/text.hpp"

namespace docforge {

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

/// Okapi BM25 over an exact inverted index. idf uses the +1-inside-log
/// variant, ln(1 + (N - df + 0.5)/(df + 0.5)), so scores are never negative.
/// Query term multiplicity is ignored: each distinct term contributes once.
class Bm25Index {
 public:
  struct Posting {
    std::uint32_t doc = 0;  // ordinal in id order
    std::uint32_t tf = 0;
  };

  Bm25Index() = default;

  Bm25Index(const std::vector<DocRef>& docs, Bm25Params params) : params_(params) {
    std::vector<std::pair<std::string, std::string_view>> sorted;
    sorted.reserve(docs.size());
    for (const auto& [id, text] : docs) sorted.emplace_back(std::string(id), text);
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    doc_ids_.reserve(sorted.size());
    lengths_.reserve(sorted.size());
    std::uint64_t total_len = 0;
    for (std::uint32_t ord = 0; ord < sorted.size(); ++ord) {
      const auto& [id, text] = sorted[ord];
      ordinal_[id] = ord;
      doc_ids_.push_back(id);
      auto tokens = tokenize(text);
      lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
      total_len += tokens.size();
      std::map<std::string, std::uint32_t> tf;
      for (const auto& t : tokens) ++tf[t];
      for (const auto& [term, count] : tf) {
        postings_[term].push_back({ord, count});  // ord ascending by construction
      }
    }
    avgdl_ = sorted.empty() ? 0.0
                            : static_cast<double>(total_len) / static_cast<double>(sorted.size());

    std::uint64_t h = fnv1a64("bm25");
    h = fnv1a64(format_param(params_.k1), h);
    h = fnv1a64(format_param(params_.b), h);
    h = fnv1a64_u64(sorted.size(), h);
    h = fnv1a64_u64(total_len, h);
    for (const auto& [term, plist] : postings_) {
      h = fnv1a64(term, h);
      h = fnv1a64_u64(plist.size(), h);
    }
    fingerprint_ = "bm25:k1=" + format_param(params_.k1) + ":b=" + format_param(params_.b) +
                   ":corpus=" + std::to_string(h);
  }

  const Bm25Params& params() const { return params_; }
  double avgdl() const { return avgdl_; }
  std::size_t num_docs() const { return doc_ids_.size(); }
  const std::string& fingerprint() const { return fingerprint_; }

  std::size_t doc_frequency(const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? 0 : it->second.size();
  }

  double idf(const std::string& term) const {
    double n = static_cast<double>(num_docs());
    double df = static_cast<double>(doc_frequency(term));
    return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
  }

  /// Score of an indexed document for a tokenized query. Distinct query
  /// terms are taken in first-occurrence order so the arithmetic matches
  /// text-based scoring exactly.
  double score(const std::vector<std::string>& query_terms, const std::string& doc_id) const {
    auto it = ordinal_.find(doc_id);
    if (it == ordinal_.end()) fail("unknown_doc", "bm25: document not indexed: " + doc_id);
    std::uint32_t ord = it->second;
    double score = 0.0;
    for (const auto& term : dedupe(query_terms)) {
      score += term_score(term, term_frequency(term, ord), lengths_[ord]);
    }
    return score;
  }

  /// Score of arbitrary text under the index's frozen statistics (N, df,
  /// avgdl). Used for counterfactual candidates that are not indexed.
  double score_text(const std::vector<std::string>& query_terms, std::string_view doc_text) const {
    auto tokens = tokenize(doc_text);
    std::unordered_map<std::string, std::uint32_t> tf;
    for (const auto& t : tokens) ++tf[t];
    double score = 0.0;
    for (const auto& term : dedupe(query_terms)) {
      auto it = tf.find(term);
      std::uint32_t count = it == tf.end() ? 0 : it->second;
      score += term_score(term, count, tokens.size());
    }
    return score;
  }

 private:
  static std::string format_param(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
  }

  static std::vector<std::string> dedupe(const std::vector<std::string>& terms) {
    std::vector<std::string> unique;
    unique.reserve(terms.size());
    for (const auto& t : terms) {
      if (std::find(unique.begin(), unique.end(), t) == unique.end()) unique.push_back(t);
    }
    return unique;
  }

  std::uint32_t term_frequency(const std::string& term, std::uint32_t ord) const {
    auto it = postings_.find(term);
    if (it == postings_.end()) return 0;
    const auto& plist = it->second;
    auto pos = std::lower_bound(plist.begin(), plist.end(), ord,
                                [](const Posting& p, std::uint32_t o) { return p.doc < o; });
    return (pos != plist.end() && pos->doc == ord) ? pos->tf : 0;
  }

  double term_score(const std::string& term, std::uint32_t tf, std::size_t doc_len) const {
    if (tf == 0) return 0.0;
    double f = static_cast<double>(tf);
    double norm = params_.k1 * (1.0 - params_.b +
                                params_.b * static_cast<double>(doc_len) / avgdl_);
    return idf(term) * f * (params_.k1 + 1.0) / (f + norm);
  }

  Bm25Params params_;
  std::map<std::string, std::vector<Posting>> postings_;
  std::unordered_map<std::string, std::uint32_t> ordinal_;
  std::vector<std::string> doc_ids_;
  std::vector<std::uint32_t> lengths_;
  double avgdl_ = 0.0;
  std::string fingerprint_;
};

/// Lexical retriever backed by a Bm25Index. Corpus statistics are frozen at
/// build time; candidate texts are scored against those statistics, which
/// keeps counterfactual evaluation consistent with the cached collection.
class Bm25Retriever : public Retriever {
 public:
  Bm25Retriever(const std::vector<DocRef>& docs, Bm25Params params = {})
      : index_(docs, params) {}

  double score(std::string_view query_text, std::string_view doc_text) const override {
    return index_.score_text(tokenize(query_text), doc_text);
  }

  std::string fingerprint() const override { return index_.fingerprint(); }

  const Bm25Index& index() const { return index_; }

 private:
  Bm25Index index_;
};

}  // namespace docforge
