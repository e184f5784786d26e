#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include "datekit/embedder.hpp"
#include "datekit/tokenize.hpp"

namespace datekit {

class Corpus;

/// Document frequencies and smoothed idf over a document collection:
///   idf(t) = ln((1 + N) / (1 + df(t))) + 1,
/// with unseen tokens taking df = 0.
class CorpusStats {
 public:
  struct Entry {
    std::size_t document_frequency;
    double idf;
  };

  /// Throws InputError when `documents` is empty.
  static CorpusStats build(std::span<const TokenizedText> documents);

  std::size_t document_count() const { return document_count_; }
  std::size_t document_frequency(std::string_view token) const;
  double idf(std::string_view token) const;
  double idf_unseen() const { return idf_unseen_; }
  const std::map<std::string, Entry, std::less<>>& entries() const { return entries_; }

  /// One "token<TAB>df<TAB>idf" line per token, sorted by token.
  void dump(std::ostream& out) const;

 private:
  std::size_t document_count_ = 0;
  double idf_unseen_ = 0.0;
  std::map<std::string, Entry, std::less<>> entries_;
};

inline CorpusStats build_stats(std::span<const TokenizedText> documents) { return CorpusStats::build(documents); }

/// Statistics over every reference text of the corpus, tokenized by the
/// embedder. Candidates do not contribute.
CorpusStats reference_stats(const Corpus& corpus, const Embedder& embedder);

struct WeightedVector {
  Vector vector;
  double norm = 0.0;
};

/// Sum over token occurrences of idf(token) * E(occurrence). Throws
/// InputError when the embedding tokens do not match the text tokens.
WeightedVector weighted_pool(const TokenizedText& text, const EmbeddingMatrix& embeddings,
                             const CorpusStats& stats);

}  // namespace datekit
