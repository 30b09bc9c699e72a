#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "docforge/common.hpp"
#include "docforge/text.hpp"

namespace docforge {

inline constexpr std::size_t kDefaultMaxDocumentTokens = 1024;

struct Document {
  std::string id;
  std::string text;
  std::map<std::string, std::string> meta;
};

struct Query {
  std::string id;
  std::string text;
};

/// Binary relevance: query id -> set of relevant document ids. Graded
/// judgments are rejected at load time.
using RelevanceJudgments = std::map<std::string, std::set<std::string>>;

struct DocAnnotations {
  std::string doc_id;
  std::vector<std::string> positives;  // train queries judged relevant
  std::vector<std::string> negatives;  // filled by the mining module
};

struct QuerySplit {
  std::set<std::string> train;
  std::set<std::string> test;
  std::uint64_t seed = 0;
  double train_fraction = 0.0;
};

namespace detail {

inline nlohmann::json parse_record(const std::string& line, std::size_t line_no,
                                   const std::string& path) {
  nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
  if (record.is_discarded() || !record.is_object()) {
    fail("malformed_record", path + ":" + std::to_string(line_no) + ": not a JSON object");
  }
  return record;
}

inline std::string require_string(const nlohmann::json& record, const char* key,
                                  std::size_t line_no, const std::string& path) {
  if (!record.contains(key) || !record[key].is_string()) {
    fail("malformed_record",
         path + ":" + std::to_string(line_no) + ": missing string field \"" + key + "\"");
  }
  return record[key].get<std::string>();
}

}  // namespace detail

/// Loads a line-delimited document collection. Documents keep file order.
/// Texts longer than `max_tokens` are truncated with a warning; empty texts
/// and duplicate ids are errors (the duplicate error names both lines).
inline std::vector<Document> load_corpus(const std::string& path,
                                         std::size_t max_tokens = kDefaultMaxDocumentTokens) {
  std::ifstream in(path);
  if (!in) fail("missing_file", "cannot open corpus file: " + path);
  std::vector<Document> docs;
  std::unordered_map<std::string, std::size_t> first_line;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto record = detail::parse_record(line, line_no, path);
    Document doc;
    doc.id = detail::require_string(record, "id", line_no, path);
    doc.text = detail::require_string(record, "text", line_no, path);
    if (doc.id.empty()) {
      fail("empty_id", path + ":" + std::to_string(line_no) + ": empty document id");
    }
    if (trim(doc.text).empty()) {
      fail("empty_text",
           path + ":" + std::to_string(line_no) + ": empty text for document " + doc.id);
    }
    if (record.contains("meta")) {
      if (!record["meta"].is_object()) {
        fail("malformed_record", path + ":" + std::to_string(line_no) + ": meta must be an object");
      }
      for (auto& [key, value] : record["meta"].items()) {
        doc.meta[key] = value.is_string() ? value.get<std::string>() : value.dump();
      }
    }
    auto [it, inserted] = first_line.emplace(doc.id, line_no);
    if (!inserted) {
      fail("duplicate_id", path + ": duplicate document id \"" + doc.id + "\" on lines " +
                               std::to_string(it->second) + " and " + std::to_string(line_no));
    }
    if (token_count(doc.text) > max_tokens) {
      doc.text = truncate_tokens(doc.text, max_tokens);
      warn("document " + doc.id + " truncated to " + std::to_string(max_tokens) + " tokens");
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

inline void save_corpus(const std::vector<Document>& docs, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("io_error", "cannot write corpus file: " + path);
  for (const auto& doc : docs) {
    nlohmann::json record{{"id", doc.id}, {"text", doc.text}};
    if (!doc.meta.empty()) {
      record["meta"] = doc.meta;
    }
    out << record.dump() << "\n";
  }
}

inline std::vector<Query> load_queries(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("missing_file", "cannot open query file: " + path);
  std::vector<Query> queries;
  std::unordered_map<std::string, std::size_t> first_line;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto record = detail::parse_record(line, line_no, path);
    Query query;
    query.id = detail::require_string(record, "id", line_no, path);
    query.text = detail::require_string(record, "text", line_no, path);
    if (query.id.empty()) {
      fail("empty_id", path + ":" + std::to_string(line_no) + ": empty query id");
    }
    auto [it, inserted] = first_line.emplace(query.id, line_no);
    if (!inserted) {
      fail("duplicate_id", path + ": duplicate query id \"" + query.id + "\" on lines " +
                               std::to_string(it->second) + " and " + std::to_string(line_no));
    }
    queries.push_back(std::move(query));
  }
  return queries;
}

inline void save_queries(const std::vector<Query>& queries, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("io_error", "cannot write query file: " + path);
  for (const auto& query : queries) {
    out << nlohmann::json{{"id", query.id}, {"text", query.text}}.dump() << "\n";
  }
}

/// Tab-separated judgments: `query_id <TAB> doc_id <TAB> relevance(0|1)`.
/// Referenced ids must exist; any other relevance value is rejected.
inline RelevanceJudgments load_judgments(const std::string& path,
                                         const std::vector<Query>& queries,
                                         const std::vector<Document>& docs) {
  std::ifstream in(path);
  if (!in) fail("missing_file", "cannot open judgments file: " + path);
  std::unordered_set<std::string> query_ids;
  for (const auto& q : queries) query_ids.insert(q.id);
  std::unordered_set<std::string> doc_ids;
  for (const auto& d : docs) doc_ids.insert(d.id);

  RelevanceJudgments judgments;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto where = path + ":" + std::to_string(line_no);
    std::size_t tab1 = line.find('\t');
    std::size_t tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) fail("malformed_record", where + ": expected 3 tab-separated fields");
    std::string qid = line.substr(0, tab1);
    std::string did = line.substr(tab1 + 1, tab2 - tab1 - 1);
    std::string grade = trim(line.substr(tab2 + 1));
    if (!query_ids.count(qid)) fail("unknown_id", where + ": unknown query id \"" + qid + "\"");
    if (!doc_ids.count(did)) fail("unknown_id", where + ": unknown document id \"" + did + "\"");
    if (grade != "0" && grade != "1") {
      fail("graded_judgment", where + ": relevance must be 0 or 1, got \"" + grade + "\"");
    }
    if (grade == "1") judgments[qid].insert(did);
  }
  for (auto it = judgments.begin(); it != judgments.end(); ++it) {
    if (it->second.empty()) {
      fail("empty_relevant_set", path + ": query " + it->first + " has no relevant documents");
    }
  }
  return judgments;
}

inline void save_judgments(const RelevanceJudgments& judgments, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("io_error", "cannot write judgments file: " + path);
  for (const auto& [qid, docs] : judgments) {
    for (const auto& did : docs) {
      out << qid << "\t" << did << "\t1\n";
    }
  }
}

/// Deterministic uniform split without replacement: |train| = round(f * N).
inline QuerySplit split_queries(const std::vector<Query>& queries, double fraction,
                                std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    fail("bad_fraction", "split_queries: fraction must be in (0, 1)");
  }
  if (queries.size() < 2) fail("too_few_queries", "split_queries: need at least 2 queries");

  std::vector<std::string> ids;
  ids.reserve(queries.size());
  for (const auto& q : queries) ids.push_back(q.id);
  std::sort(ids.begin(), ids.end());

  auto train_size = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(ids.size())));

  // Partial Fisher-Yates over the sorted id list.
  Rng rng = StreamSeed(seed).with("query_split").rng();
  for (std::size_t i = 0; i < train_size && i + 1 < ids.size(); ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.next_below(ids.size() - i));
    std::swap(ids[i], ids[j]);
  }

  QuerySplit split;
  split.seed = seed;
  split.train_fraction = fraction;
  split.train.insert(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(train_size));
  split.test.insert(ids.begin() + static_cast<std::ptrdiff_t>(train_size), ids.end());
  return split;
}

/// Transpose of the judgments restricted to train queries: a document's
/// positives are the train queries whose relevant set contains it. Negatives
/// start empty and are filled by mining.
inline std::map<std::string, DocAnnotations> build_annotations(
    const RelevanceJudgments& judgments, const QuerySplit& split,
    const std::vector<Document>& docs) {
  std::unordered_set<std::string> doc_ids;
  for (const auto& d : docs) doc_ids.insert(d.id);

  std::map<std::string, DocAnnotations> annotations;
  for (const auto& d : docs) {
    annotations[d.id].doc_id = d.id;
  }
  for (const auto& [qid, relevant] : judgments) {
    if (!split.train.count(qid) && !split.test.count(qid)) {
      fail("unknown_id", "build_annotations: query " + qid + " missing from the split");
    }
    if (!split.train.count(qid)) continue;
    for (const auto& did : relevant) {
      auto it = annotations.find(did);
      if (it == annotations.end()) {
        fail("unknown_id", "build_annotations: judgment references unknown document " + did);
      }
      it->second.positives.push_back(qid);
    }
  }
  // judgments iterate in qid order, so positives are already sorted.
  return annotations;
}

inline void save_annotations(const std::map<std::string, DocAnnotations>& annotations,
                             const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("io_error", "cannot write annotations file: " + path);
  for (const auto& [doc_id, ann] : annotations) {
    out << nlohmann::json{{"doc_id", doc_id},
                          {"positives", ann.positives},
                          {"negatives", ann.negatives}}
               .dump()
        << "\n";
  }
}

inline std::map<std::string, DocAnnotations> load_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("missing_file", "cannot open annotations file: " + path);
  std::map<std::string, DocAnnotations> annotations;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto record = detail::parse_record(line, line_no, path);
    DocAnnotations ann;
    ann.doc_id = detail::require_string(record, "doc_id", line_no, path);
    for (const auto& q : record.value("positives", nlohmann::json::array())) {
      ann.positives.push_back(q.get<std::string>());
    }
    for (const auto& q : record.value("negatives", nlohmann::json::array())) {
      ann.negatives.push_back(q.get<std::string>());
    }
    for (const auto& p : ann.positives) {
      if (std::find(ann.negatives.begin(), ann.negatives.end(), p) != ann.negatives.end()) {
        fail("overlapping_annotations",
             path + ":" + std::to_string(line_no) + ": query " + p + " is both positive and negative");
      }
    }
    annotations[ann.doc_id] = std::move(ann);
  }
  return annotations;
}

}  // namespace docforge
