#include "datekit/embedder.hpp"

#include <cmath>

#include "datekit/error.hpp"
#include "datekit/remote_embedder.hpp"
#include "datekit/test_embedder.hpp"

namespace datekit {

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> tokens, std::vector<double> values,
                                 std::size_t dimension)
    : tokens_(std::move(tokens)), values_(std::move(values)), dimension_(dimension) {
  if (dimension_ == 0) throw InputError("embedding dimension must be positive");
  if (values_.size() != tokens_.size() * dimension_) {
    throw InputError("embedding matrix holds " + std::to_string(values_.size()) + " values for " +
                     std::to_string(tokens_.size()) + " tokens of dimension " + std::to_string(dimension_));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw InputError("non-finite embedding component");
  }
}

TokenizedText Embedder::tokenize(std::string_view text) const {
  return TokenizedText(embed_tokens(text).tokens());
}

std::vector<EmbeddingMatrix> Embedder::embed_tokens_batch(std::span<const std::string> texts) const {
  std::vector<EmbeddingMatrix> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_tokens(t));
  return out;
}

std::vector<Vector> Embedder::embed_sentence_batch(std::span<const std::string> texts) const {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_sentence(t));
  return out;
}

void EmbedderConfig::validate() const {
  if (batch_size == 0) throw InputError("batch size must be positive");
  if (backend == EmbedderBackend::Test && dimension == 0) throw InputError("dimension must be positive");
  if (backend == EmbedderBackend::Remote) {
    if (endpoint.empty()) throw InputError("remote embedder requires an endpoint");
    if (concurrency == 0) throw InputError("concurrency must be positive");
  }
}

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& config) {
  config.validate();
  if (config.backend == EmbedderBackend::Test) {
    return std::make_unique<TestEmbedder>(config.dimension, config.seed);
  }
  std::unique_ptr<Embedder> remote = std::make_unique<RemoteEmbedder>(config);
  if (config.cache_dir) return std::make_unique<CachingEmbedder>(std::move(remote), *config.cache_dir);
  return remote;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
  return sum;
}

double l2_norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

}  // namespace datekit
