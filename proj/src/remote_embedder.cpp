#include "datekit/remote_embedder.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>

#include <httplib.h>

#include "datekit/error.hpp"
#include "datekit/test_embedder.hpp"

namespace datekit {

using nlohmann::json;

namespace wire {

namespace {

constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int sextet(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+' || c == '-') return 62;
  if (c == '/' || c == '_') return 63;
  return -1;
}

std::string_view mode_name(EmbedMode mode) { return mode == EmbedMode::Tokens ? "tokens" : "sentence"; }

std::vector<double> read_vectors(const json& value, std::size_t dimension) {
  if (value.is_string()) return decode_f32(value.get<std::string>());
  if (!value.is_array()) throw RemoteError("'embedding' must be a base64 string or an array");
  std::vector<double> out;
  for (const auto& item : value) {
    if (item.is_array()) {
      if (item.size() != dimension) throw RemoteError("embedding row has wrong dimension");
      for (const auto& x : item) out.push_back(x.get<double>());
    } else if (item.is_number()) {
      out.push_back(item.get<double>());
    } else {
      throw RemoteError("non-numeric embedding component");
    }
  }
  return out;
}

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t n = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out.push_back(kAlphabet[(n >> 18) & 63]);
    out.push_back(kAlphabet[(n >> 12) & 63]);
    out.push_back(kAlphabet[(n >> 6) & 63]);
    out.push_back(kAlphabet[n & 63]);
  }
  if (i < bytes.size()) {
    std::uint32_t n = bytes[i] << 16;
    if (i + 1 < bytes.size()) n |= bytes[i + 1] << 8;
    out.push_back(kAlphabet[(n >> 18) & 63]);
    out.push_back(kAlphabet[(n >> 12) & 63]);
    out.push_back(i + 1 < bytes.size() ? kAlphabet[(n >> 6) & 63] : '=');
    out.push_back('=');
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  while (!text.empty() && text.back() == '=') text.remove_suffix(1);
  if (text.size() % 4 == 1) throw RemoteError("invalid base64 length");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() * 3 / 4);
  std::uint32_t acc = 0;
  int bits = 0;
  for (char c : text) {
    const int v = sextet(c);
    if (v < 0) throw RemoteError("invalid base64 character");
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xFF));
    }
  }
  return out;
}

std::string encode_f32(std::span<const double> values) {
  std::vector<std::uint8_t> bytes(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(values[i]));
    for (int b = 0; b < 4; ++b) bytes[i * 4 + b] = static_cast<std::uint8_t>(bits >> (8 * b));
  }
  return base64_encode(bytes);
}

std::vector<double> decode_f32(std::string_view base64) {
  const auto bytes = base64_decode(base64);
  if (bytes.size() % 4 != 0) throw RemoteError("float32 payload length not a multiple of 4");
  std::vector<double> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[i * 4 + b]) << (8 * b);
    out[i] = static_cast<double>(std::bit_cast<float>(bits));
  }
  return out;
}

json make_request(std::span<const std::string> texts, EmbedMode mode) {
  return json{{"texts", std::vector<std::string>(texts.begin(), texts.end())}, {"mode", mode_name(mode)}};
}

Response parse_response(const json& body, EmbedMode mode, std::size_t expected_results) {
  Response r;
  try {
    r.model_id = body.at("model_id").get<std::string>();
    r.dimension = body.at("dimension").get<std::size_t>();
    const auto& results = body.at("results");
    if (!results.is_array()) throw RemoteError("'results' must be an array");
    if (r.dimension == 0) throw RemoteError("service reported dimension 0");
    if (results.size() != expected_results) {
      throw RemoteError("expected " + std::to_string(expected_results) + " results, got " +
                        std::to_string(results.size()));
    }
    for (const auto& item : results) {
      TokenResult tr;
      tr.values = read_vectors(item.at("embedding"), r.dimension);
      if (mode == EmbedMode::Tokens) {
        tr.tokens = item.at("tokens").get<std::vector<std::string>>();
        if (tr.values.size() != tr.tokens.size() * r.dimension) {
          throw RemoteError("token vector count does not match token count");
        }
      } else if (tr.values.size() != r.dimension) {
        throw RemoteError("sentence vector has wrong dimension");
      }
      r.results.push_back(std::move(tr));
    }
  } catch (const json::exception& e) {
    throw RemoteError(std::string("malformed embed response: ") + e.what());
  }
  return r;
}

Health parse_health(const json& body) {
  try {
    return Health{body.at("status").get<std::string>(), body.at("model_id").get<std::string>(),
                  body.at("dimension").get<std::size_t>()};
  } catch (const json::exception& e) {
    throw RemoteError(std::string("malformed health response: ") + e.what());
  }
}

}  // namespace wire

namespace {

struct Endpoint {
  std::string origin;  // scheme://host:port
  std::string prefix;  // path prefix without trailing '/'
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme = url.find("://");
  const auto path_start = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path_start == std::string::npos) return {url, ""};
  std::string prefix = url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, path_start), prefix};
}

httplib::Client make_client(const EmbedderConfig& config, const Endpoint& ep) {
  httplib::Client client(ep.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  return client;
}

// Cache entries hold float32, so fresh results are rounded the same way.
std::vector<double> round_f32(std::vector<double> values) {
  for (double& v : values) v = static_cast<double>(static_cast<float>(v));
  return values;
}

json parse_body(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw RemoteError(std::string("embedding service returned invalid JSON: ") + e.what());
  }
}

}  // namespace

RemoteEmbedder::RemoteEmbedder(const EmbedderConfig& config) : config_(config) {
  config_.validate();
  config_.batch_size = std::min(config_.batch_size, wire::kMaxBatch);
  const auto ep = split_endpoint(config_.endpoint);
  auto client = make_client(config_, ep);
  auto res = client.Get(ep.prefix + "/v1/health");
  if (!res) {
    throw RemoteError("cannot reach embedding service at " + config_.endpoint + ": " +
                      httplib::to_string(res.error()));
  }
  if (res->status == 503) throw RemoteError("embedding service at " + config_.endpoint + " is not ready");
  if (res->status != 200) {
    throw RemoteError("health check failed with HTTP " + std::to_string(res->status));
  }
  const auto health = wire::parse_health(parse_body(res->body));
  if (health.status != "ok") throw RemoteError("embedding service status '" + health.status + "'");
  if (health.dimension == 0) throw RemoteError("service reported dimension 0");
  model_id_ = health.model_id;
  dimension_ = health.dimension;
}

std::string RemoteEmbedder::fingerprint() const {
  return "remote:" + model_id_ + ":dim=" + std::to_string(dimension_);
}

wire::Response RemoteEmbedder::post(std::span<const std::string> texts, wire::EmbedMode mode) const {
  const auto ep = split_endpoint(config_.endpoint);
  auto client = make_client(config_, ep);
  const auto body = wire::make_request(texts, mode).dump();
  auto res = client.Post(ep.prefix + "/v1/embed", body, "application/json");
  if (!res) throw RemoteError("embed request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw RemoteError("embed request failed with HTTP " + std::to_string(res->status) + ": " +
                      res->body.substr(0, 200));
  }
  auto parsed = wire::parse_response(parse_body(res->body), mode, texts.size());
  if (parsed.dimension != dimension_) {
    throw RemoteError("dimension mismatch: service answered " + std::to_string(parsed.dimension) +
                      ", expected " + std::to_string(dimension_));
  }
  if (parsed.model_id != model_id_) throw RemoteError("model changed from '" + model_id_ + "' to '" + parsed.model_id + "'");
  return parsed;
}

std::vector<wire::TokenResult> RemoteEmbedder::run_batched(std::span<const std::string> texts,
                                                           wire::EmbedMode mode) const {
  std::vector<wire::TokenResult> out(texts.size());
  std::vector<std::pair<std::size_t, std::size_t>> chunks;
  for (std::size_t begin = 0; begin < texts.size(); begin += config_.batch_size) {
    chunks.emplace_back(begin, std::min(texts.size(), begin + config_.batch_size));
  }
  // At most `concurrency` requests in flight.
  for (std::size_t wave = 0; wave < chunks.size(); wave += config_.concurrency) {
    std::vector<std::future<wire::Response>> inflight;
    const std::size_t wave_end = std::min(chunks.size(), wave + config_.concurrency);
    for (std::size_t c = wave; c < wave_end; ++c) {
      const auto [begin, end] = chunks[c];
      inflight.push_back(std::async(std::launch::async, [this, texts, mode, begin = begin, end = end] {
        return post(texts.subspan(begin, end - begin), mode);
      }));
    }
    for (std::size_t c = wave; c < wave_end; ++c) {
      auto response = inflight[c - wave].get();
      for (std::size_t k = 0; k < response.results.size(); ++k) {
        out[chunks[c].first + k] = std::move(response.results[k]);
      }
    }
  }
  return out;
}

EmbeddingMatrix RemoteEmbedder::embed_tokens(std::string_view text) const {
  const std::string one(text);
  return std::move(embed_tokens_batch(std::span<const std::string>(&one, 1)).front());
}

Vector RemoteEmbedder::embed_sentence(std::string_view text) const {
  const std::string one(text);
  return std::move(embed_sentence_batch(std::span<const std::string>(&one, 1)).front());
}

std::vector<EmbeddingMatrix> RemoteEmbedder::embed_tokens_batch(std::span<const std::string> texts) const {
  auto results = run_batched(texts, wire::EmbedMode::Tokens);
  std::vector<EmbeddingMatrix> out;
  out.reserve(results.size());
  for (auto& r : results) out.emplace_back(std::move(r.tokens), std::move(r.values), dimension_);
  return out;
}

std::vector<Vector> RemoteEmbedder::embed_sentence_batch(std::span<const std::string> texts) const {
  auto results = run_batched(texts, wire::EmbedMode::Sentence);
  std::vector<Vector> out;
  out.reserve(results.size());
  for (auto& r : results) out.push_back(std::move(r.values));
  return out;
}

CachingEmbedder::CachingEmbedder(std::unique_ptr<Embedder> inner, std::filesystem::path directory)
    : inner_(std::move(inner)), directory_(std::move(directory)) {
  std::filesystem::create_directories(directory_);
}

std::filesystem::path CachingEmbedder::entry_path(std::string_view mode, std::string_view text) const {
  std::string key = inner_->fingerprint();
  key.push_back('\0');
  key.append(mode);
  key.push_back('\0');
  key.append(text);
  std::ostringstream name;
  name << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(key) << '-' << std::setw(16)
       << mix64(fnv1a64(key) ^ key.size()) << ".json";
  return directory_ / name.str();
}

bool CachingEmbedder::load(const std::filesystem::path& path, std::string_view text, wire::TokenResult& out) const {
  std::ifstream in(path);
  if (!in) return false;
  try {
    const auto entry = json::parse(in);
    if (entry.at("text").get<std::string>() != text) return false;
    out.tokens = entry.at("tokens").get<std::vector<std::string>>();
    out.values = wire::decode_f32(entry.at("embedding").get<std::string>());
    return true;
  } catch (const std::exception&) {
    return false;  // corrupt entries are recomputed
  }
}

void CachingEmbedder::store(const std::filesystem::path& path, std::string_view text,
                            const wire::TokenResult& entry) const {
  const json obj{{"fingerprint", inner_->fingerprint()},
                 {"text", std::string(text)},
                 {"tokens", entry.tokens},
                 {"embedding", wire::encode_f32(entry.values)}};
  auto tmp = path;
  tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp);
    out << obj.dump();
    if (!out) return;
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) std::filesystem::remove(tmp, ec);
}

EmbeddingMatrix CachingEmbedder::embed_tokens(std::string_view text) const {
  const std::string one(text);
  return std::move(embed_tokens_batch(std::span<const std::string>(&one, 1)).front());
}

Vector CachingEmbedder::embed_sentence(std::string_view text) const {
  const std::string one(text);
  return std::move(embed_sentence_batch(std::span<const std::string>(&one, 1)).front());
}

std::vector<EmbeddingMatrix> CachingEmbedder::embed_tokens_batch(std::span<const std::string> texts) const {
  std::vector<std::optional<EmbeddingMatrix>> found(texts.size());
  std::vector<std::string> missing;
  std::vector<std::size_t> missing_at;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    wire::TokenResult entry;
    if (load(entry_path("tokens", texts[i]), texts[i], entry)) {
      found[i].emplace(std::move(entry.tokens), std::move(entry.values), dimension());
    } else {
      missing.push_back(texts[i]);
      missing_at.push_back(i);
    }
  }
  if (!missing.empty()) {
    auto fresh = inner_->embed_tokens_batch(missing);
    for (std::size_t k = 0; k < fresh.size(); ++k) {
      wire::TokenResult entry{fresh[k].tokens(), round_f32(fresh[k].values())};
      store(entry_path("tokens", missing[k]), missing[k], entry);
      found[missing_at[k]].emplace(std::move(entry.tokens), std::move(entry.values), dimension());
    }
  }
  std::vector<EmbeddingMatrix> out;
  out.reserve(found.size());
  for (auto& f : found) out.push_back(std::move(*f));
  return out;
}

std::vector<Vector> CachingEmbedder::embed_sentence_batch(std::span<const std::string> texts) const {
  std::vector<Vector> out(texts.size());
  std::vector<std::string> missing;
  std::vector<std::size_t> missing_at;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    wire::TokenResult entry;
    if (load(entry_path("sentence", texts[i]), texts[i], entry)) {
      out[i] = std::move(entry.values);
    } else {
      missing.push_back(texts[i]);
      missing_at.push_back(i);
    }
  }
  if (!missing.empty()) {
    auto fresh = inner_->embed_sentence_batch(missing);
    for (std::size_t k = 0; k < fresh.size(); ++k) {
      wire::TokenResult entry{{}, round_f32(std::move(fresh[k]))};
      store(entry_path("sentence", missing[k]), missing[k], entry);
      out[missing_at[k]] = std::move(entry.values);
    }
  }
  return out;
}

}  // namespace datekit
