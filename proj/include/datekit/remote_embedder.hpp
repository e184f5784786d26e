#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "datekit/embedder.hpp"

namespace datekit {

// Wire format of the embedding service (POST /v1/embed, GET /v1/health).
//
//   request:  {"texts": [str, ...], "mode": "tokens" | "sentence"}
//   response: {"model_id": str, "dimension": D,
//              "results": [{"tokens": [str, ...], "embedding": <vectors>}, ...]}
//
// <vectors> is base64 of little-endian float32 values, row-major (one row per
// token in tokens mode, a single row in sentence mode, where "tokens" is
// absent). A JSON array of numbers (flat, or one array per row) is accepted too.
namespace wire {

enum class EmbedMode { Tokens, Sentence };

inline constexpr std::size_t kMaxBatch = 256;
inline constexpr std::size_t kMaxTextBytes = 16 * 1024;

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws RemoteError on malformed input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

std::string encode_f32(std::span<const double> values);
std::vector<double> decode_f32(std::string_view base64);

nlohmann::json make_request(std::span<const std::string> texts, EmbedMode mode);

struct TokenResult {
  std::vector<std::string> tokens;
  std::vector<double> values;
};

struct Response {
  std::string model_id;
  std::size_t dimension = 0;
  std::vector<TokenResult> results;  // sentence mode leaves tokens empty
};

/// Validates shape against the request; throws RemoteError on any mismatch.
Response parse_response(const nlohmann::json& body, EmbedMode mode, std::size_t expected_results);

struct Health {
  std::string status;
  std::string model_id;
  std::size_t dimension = 0;
};

Health parse_health(const nlohmann::json& body);

}  // namespace wire

/// Client for the embedding service. The constructor probes /v1/health and
/// fails with RemoteError unless the service reports ready.
class RemoteEmbedder final : public Embedder {
 public:
  explicit RemoteEmbedder(const EmbedderConfig& config);

  std::size_t dimension() const override { return dimension_; }
  std::string fingerprint() const override;
  const std::string& model_id() const { return model_id_; }

  EmbeddingMatrix embed_tokens(std::string_view text) const override;
  Vector embed_sentence(std::string_view text) const override;
  std::vector<EmbeddingMatrix> embed_tokens_batch(std::span<const std::string> texts) const override;
  std::vector<Vector> embed_sentence_batch(std::span<const std::string> texts) const override;

 private:
  wire::Response post(std::span<const std::string> texts, wire::EmbedMode mode) const;
  std::vector<wire::TokenResult> run_batched(std::span<const std::string> texts, wire::EmbedMode mode) const;

  EmbedderConfig config_;
  std::string model_id_;
  std::size_t dimension_ = 0;
};

/// Disk cache in front of another embedder, keyed by (fingerprint, mode, text).
class CachingEmbedder final : public Embedder {
 public:
  CachingEmbedder(std::unique_ptr<Embedder> inner, std::filesystem::path directory);

  std::size_t dimension() const override { return inner_->dimension(); }
  std::string fingerprint() const override { return inner_->fingerprint(); }

  EmbeddingMatrix embed_tokens(std::string_view text) const override;
  Vector embed_sentence(std::string_view text) const override;
  std::vector<EmbeddingMatrix> embed_tokens_batch(std::span<const std::string> texts) const override;
  std::vector<Vector> embed_sentence_batch(std::span<const std::string> texts) const override;

  const std::filesystem::path& directory() const { return directory_; }

 private:
  std::filesystem::path entry_path(std::string_view mode, std::string_view text) const;
  bool load(const std::filesystem::path& path, std::string_view text, wire::TokenResult& out) const;
  void store(const std::filesystem::path& path, std::string_view text, const wire::TokenResult& entry) const;

  std::unique_ptr<Embedder> inner_;
  std::filesystem::path directory_;
};

}  // namespace datekit
