#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "datekit/embedder.hpp"

namespace datekit {

class Corpus;

enum class MetricId { Date, Cosine, Bleu1 };

std::string_view to_string(MetricId id);
std::optional<MetricId> parse_metric(std::string_view text);

/// Max over references of the clamped cosine between pooled sentence vectors.
/// This is an embedding-cosine baseline without any fluency penalty.
double cosine_baseline(std::string_view candidate, std::span<const std::string> references,
                       const Embedder& embedder);

/// cosine_baseline for every record, embedding each distinct text once.
std::vector<double> cosine_baseline_corpus(const Corpus& corpus, const Embedder& embedder);

/// Unigram BLEU: clipped unigram precision (clip count = max count in any one
/// reference) times the brevity penalty against the closest reference length
/// (shorter wins ties). Empty candidates score 0. Tokenized with tokenize_words().
double bleu1(std::string_view candidate, std::span<const std::string> references);

}  // namespace datekit
