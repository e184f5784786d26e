#include "datekit/tfidf.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <unordered_set>

#include "datekit/corpus.hpp"
#include "datekit/error.hpp"

namespace datekit {

namespace {

double smoothed_idf(std::size_t documents, std::size_t df) {
  return std::log((1.0 + static_cast<double>(documents)) / (1.0 + static_cast<double>(df))) + 1.0;
}

}  // namespace

CorpusStats CorpusStats::build(std::span<const TokenizedText> documents) {
  if (documents.empty()) throw InputError("cannot build idf statistics from zero documents");
  CorpusStats stats;
  stats.document_count_ = documents.size();
  for (const auto& doc : documents) {
    for (const auto& [token, count] : doc.counts()) {
      auto [it, inserted] = stats.entries_.try_emplace(token, Entry{0, 0.0});
      ++it->second.document_frequency;
    }
  }
  for (auto& [token, entry] : stats.entries_) entry.idf = smoothed_idf(stats.document_count_, entry.document_frequency);
  stats.idf_unseen_ = smoothed_idf(stats.document_count_, 0);
  return stats;
}

std::size_t CorpusStats::document_frequency(std::string_view token) const {
  auto it = entries_.find(token);
  return it == entries_.end() ? 0 : it->second.document_frequency;
}

double CorpusStats::idf(std::string_view token) const {
  auto it = entries_.find(token);
  return it == entries_.end() ? idf_unseen_ : it->second.idf;
}

void CorpusStats::dump(std::ostream& out) const {
  out << "# documents\t" << document_count_ << '\n';
  out << std::setprecision(17);
  for (const auto& [token, entry] : entries_) {
    out << token << '\t' << entry.document_frequency << '\t' << entry.idf << '\n';
  }
}

CorpusStats reference_stats(const Corpus& corpus, const Embedder& embedder) {
  std::vector<TokenizedText> documents;
  for (const auto& r : corpus.records()) {
    for (const auto& ref : r.references) documents.push_back(embedder.tokenize(ref));
  }
  return CorpusStats::build(documents);
}

WeightedVector weighted_pool(const TokenizedText& text, const EmbeddingMatrix& embeddings,
                             const CorpusStats& stats) {
  if (text.tokens() != embeddings.tokens()) {
    throw InputError("token misalignment between text and embeddings");
  }
  WeightedVector out;
  out.vector.assign(embeddings.dimension(), 0.0);
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    const double weight = stats.idf(embeddings.tokens()[i]);
    const auto row = embeddings.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) out.vector[k] += weight * row[k];
  }
  out.norm = l2_norm(out.vector);
  return out;
}

}  // namespace datekit
