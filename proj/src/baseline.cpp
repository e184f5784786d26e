#include "datekit/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "datekit/corpus.hpp"
#include "datekit/error.hpp"
#include "datekit/kernels.hpp"
#include "datekit/tokenize.hpp"

namespace datekit {

std::string_view to_string(MetricId id) {
  switch (id) {
    case MetricId::Date:
      return "date";
    case MetricId::Cosine:
      return "cosine";
    case MetricId::Bleu1:
      break;
  }
  return "bleu1";
}

std::optional<MetricId> parse_metric(std::string_view text) {
  if (text == "date") return MetricId::Date;
  if (text == "cosine") return MetricId::Cosine;
  if (text == "bleu1") return MetricId::Bleu1;
  return std::nullopt;
}

double cosine_baseline(std::string_view candidate, std::span<const std::string> references,
                       const Embedder& embedder) {
  if (references.empty()) throw InputError("cosine baseline needs at least one reference");
  const auto cand = embedder.embed_sentence(candidate);
  const auto refs = embedder.embed_sentence_batch(references);
  const double cand_norm = l2_norm(cand);
  double best = 0.0;
  for (const auto& ref : refs) {
    best = std::max(best, kernels::clamped_cosine(cand, cand_norm, ref, l2_norm(ref)));
  }
  return best;
}

std::vector<double> cosine_baseline_corpus(const Corpus& corpus, const Embedder& embedder) {
  std::vector<std::string> texts;
  std::unordered_map<std::string, std::size_t> slot;
  auto intern = [&](const std::string& text) {
    auto [it, inserted] = slot.emplace(text, texts.size());
    if (inserted) texts.push_back(text);
    return it->second;
  };
  for (const auto& r : corpus.records()) {
    intern(r.candidate);
    for (const auto& ref : r.references) intern(ref);
  }
  const auto vectors = embedder.embed_sentence_batch(texts);
  std::vector<double> norms(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) norms[i] = l2_norm(vectors[i]);

  std::vector<double> scores;
  scores.reserve(corpus.size());
  for (const auto& r : corpus.records()) {
    const auto c = slot.at(r.candidate);
    double best = 0.0;
    for (const auto& ref : r.references) {
      const auto k = slot.at(ref);
      best = std::max(best, kernels::clamped_cosine(vectors[c], norms[c], vectors[k], norms[k]));
    }
    scores.push_back(best);
  }
  return scores;
}

double bleu1(std::string_view candidate, std::span<const std::string> references) {
  if (references.empty()) throw InputError("BLEU needs at least one reference");
  const auto cand = tokenize_words(candidate);
  if (cand.empty()) return 0.0;

  std::map<std::string, std::size_t, std::less<>> max_ref_count;
  const auto c = cand.size();
  std::size_t closest = 0;
  bool first = true;
  for (const auto& ref_text : references) {
    const auto ref = tokenize_words(ref_text);
    for (const auto& [token, count] : ref.counts()) {
      auto& slot = max_ref_count[token];
      slot = std::max(slot, count);
    }
    const auto r = ref.size();
    const auto diff = r > c ? r - c : c - r;
    const auto best_diff = closest > c ? closest - c : c - closest;
    if (first || diff < best_diff || (diff == best_diff && r < closest)) closest = r;
    first = false;
  }

  std::size_t clipped = 0;
  for (const auto& [token, count] : cand.counts()) {
    auto it = max_ref_count.find(token);
    if (it != max_ref_count.end()) clipped += std::min(count, it->second);
  }
  const double precision = static_cast<double>(clipped) / static_cast<double>(c);
  const double bp = c > closest ? 1.0 : std::exp(1.0 - static_cast<double>(closest) / static_cast<double>(c));
  return precision * bp;
}

}  // namespace datekit
