#pragma once

#include <cstdint>
#include <string_view>

#include "datekit/embedder.hpp"

namespace datekit {

/// Stable 64-bit FNV-1a hash of a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

/// The SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Hermetic embedder: each token maps to a seeded pseudo-random unit vector.
///
/// For token t and seed s the key is
///   key = mix64(fnv1a64(t) ^ mix64(s + 0x9E3779B97F4A7C15))
/// and the k-th 64-bit draw (k = 0, 1, ...) is mix64(key + (k + 1) * 0x9E3779B97F4A7C15).
/// Draws are consumed in pairs (a, b) to form u1 = ((a >> 11) + 1) * 2^-53 and
/// u2 = (b >> 11) * 2^-53; Box-Muller gives sqrt(-2 ln u1) * cos(2 pi u2) and
/// sqrt(-2 ln u1) * sin(2 pi u2). The first D variates are L2-normalized.
///
/// Tokenization is tokenize_words(); the sentence vector is the mean of the
/// token vectors (zero for empty text).
class TestEmbedder final : public Embedder {
 public:
  explicit TestEmbedder(std::size_t dimension = EmbedderConfig::kDefaultDimension,
                        std::uint64_t seed = EmbedderConfig::kDefaultSeed);

  std::size_t dimension() const override { return dimension_; }
  std::uint64_t seed() const { return seed_; }
  std::string fingerprint() const override;

  TokenizedText tokenize(std::string_view text) const override;
  EmbeddingMatrix embed_tokens(std::string_view text) const override;
  Vector embed_sentence(std::string_view text) const override;
  std::vector<EmbeddingMatrix> embed_tokens_batch(std::span<const std::string> texts) const override;

  Vector token_vector(std::string_view token) const;

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
};

}  // namespace datekit
