#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "datekit/tokenize.hpp"

namespace datekit {

using Vector = std::vector<double>;

/// Per-token vectors for one text, row-major.
class EmbeddingMatrix {
 public:
  /// Throws InputError on shape mismatch, zero dimension or non-finite values.
  EmbeddingMatrix(std::vector<std::string> tokens, std::vector<double> values, std::size_t dimension);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::vector<double>& values() const { return values_; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values_).subspan(i * dimension_, dimension_);
  }

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

 private:
  std::vector<std::string> tokens_;
  std::vector<double> values_;
  std::size_t dimension_;
};

/// Text embedding backend. Implementations must be deterministic for a fixed
/// configuration and safe to call concurrently.
class Embedder {
 public:
  virtual ~Embedder() = default;

  virtual std::size_t dimension() const = 0;
  /// Stable identity of backend + configuration, echoed into reports.
  virtual std::string fingerprint() const = 0;

  virtual EmbeddingMatrix embed_tokens(std::string_view text) const = 0;
  virtual Vector embed_sentence(std::string_view text) const = 0;

  /// The backend's own tokenization; by default the token list of embed_tokens.
  virtual TokenizedText tokenize(std::string_view text) const;

  virtual std::vector<EmbeddingMatrix> embed_tokens_batch(std::span<const std::string> texts) const;
  virtual std::vector<Vector> embed_sentence_batch(std::span<const std::string> texts) const;
};

enum class EmbedderBackend { Test, Remote };

struct EmbedderConfig {
  static constexpr std::size_t kDefaultDimension = 384;
  static constexpr std::uint64_t kDefaultSeed = 42;

  EmbedderBackend backend = EmbedderBackend::Test;
  std::size_t dimension = kDefaultDimension;
  std::uint64_t seed = kDefaultSeed;
  std::string endpoint;
  std::size_t batch_size = 32;
  std::size_t concurrency = 4;
  std::chrono::milliseconds timeout{30000};
  /// Remote results are cached here when set.
  std::optional<std::filesystem::path> cache_dir;

  /// Throws InputError when the selected backend is missing settings.
  void validate() const;
};

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& config);

double l2_norm(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace datekit
