#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace docforge {

inline bool is_token_byte(unsigned char c) {
  // ASCII alphanumerics plus any non-ASCII byte, so UTF-8 sequences stay
  // inside one token. Case folding is ASCII-only.
  if (c >= 0x80) return true;
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

inline char fold_case(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

/// Lowercased tokens split on non-alphanumerics. No stemming, no stopwords.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    if (is_token_byte(static_cast<unsigned char>(ch))) {
      current.push_back(fold_case(ch));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

inline std::size_t token_count(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  for (char ch : text) {
    bool t = is_token_byte(static_cast<unsigned char>(ch));
    if (t && !in_token) ++count;
    in_token = t;
  }
  return count;
}

/// Truncates `text` after its `max_tokens`-th token, preserving the original
/// bytes up to that point. Returns the input unchanged when within the cap.
inline std::string truncate_tokens(std::string_view text, std::size_t max_tokens) {
  std::size_t count = 0;
  bool in_token = false;
  std::size_t end = text.size();
  for (std::size_t i = 0; i < text.size(); ++i) {
    bool t = is_token_byte(static_cast<unsigned char>(text[i]));
    if (t && !in_token) {
      if (count == max_tokens) {
        end = i;
        break;
      }
      ++count;
    }
    in_token = t;
  }
  if (end == text.size()) return std::string(text);
  while (end > 0 && !is_token_byte(static_cast<unsigned char>(text[end - 1]))) --end;
  return std::string(text.substr(0, end));
}

inline std::string trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return std::string(text.substr(begin, end - begin));
}

}  // namespace docforge
