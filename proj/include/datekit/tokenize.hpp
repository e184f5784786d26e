#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace datekit {

/// A token sequence and its per-token occurrence counts.
class TokenizedText {
 public:
  TokenizedText() = default;
  explicit TokenizedText(std::vector<std::string> tokens);

  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::map<std::string, std::size_t, std::less<>>& counts() const { return counts_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  std::size_t count(std::string_view token) const;

  friend bool operator==(const TokenizedText& a, const TokenizedText& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, std::size_t, std::less<>> counts_;
};

/// Word-level tokenizer used by the test embedder and BLEU-1.
///
/// Splits on Unicode whitespace, lowercases ASCII and Latin-1 letters, and
/// strips leading/trailing punctuation from each piece. Pieces that are pure
/// punctuation vanish. Invalid UTF-8 bytes are kept verbatim.
TokenizedText tokenize_words(std::string_view text);

}  // namespace datekit
