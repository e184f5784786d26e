#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <thread>

#include <httplib.h>

#include "datekit/error.hpp"
#include "datekit/remote_embedder.hpp"
#include "datekit/test_embedder.hpp"

namespace datekit {
namespace {

using nlohmann::json;

/// In-process stand-in for the embedding service, backed by the test embedder.
class MockService {
 public:
  std::atomic<bool> ready{true};
  std::atomic<bool> json_arrays{false};
  std::atomic<std::size_t> reported_dim{0};  // 0: the true dimension
  std::atomic<int> embed_calls{0};
  std::atomic<std::size_t> largest_batch{0};

  explicit MockService(std::size_t dimension = 8) : embedder_(dimension, 5) {
    server_.Get("/svc/v1/health", [this](const httplib::Request&, httplib::Response& res) {
      if (!ready) {
        res.status = 503;
        res.set_content(R"({"status":"loading"})", "application/json");
        return;
      }
      res.set_content(json{{"status", "ok"}, {"model_id", "mock-encoder"}, {"dimension", this->dim()}}.dump(),
                      "application/json");
    });
    server_.Post("/svc/v1/embed", [this](const httplib::Request& req, httplib::Response& res) {
      ++embed_calls;
      const auto body = json::parse(req.body);
      const auto texts = body.at("texts").get<std::vector<std::string>>();
      if (texts.empty() || texts.size() > wire::kMaxBatch) {
        res.status = 400;
        return;
      }
      std::size_t seen = largest_batch;
      while (texts.size() > seen && !largest_batch.compare_exchange_weak(seen, texts.size())) {
      }
      const bool tokens = body.at("mode") == "tokens";
      json results = json::array();
      for (const auto& t : texts) {
        json r;
        std::vector<double> values;
        if (tokens) {
          const auto m = embedder_.embed_tokens(t);
          r["tokens"] = m.tokens();
          values = m.values();
        } else {
          values = embedder_.embed_sentence(t);
        }
        if (json_arrays) {
          r["embedding"] = values;
        } else {
          r["embedding"] = wire::encode_f32(values);
        }
        results.push_back(r);
      }
      res.set_content(json{{"model_id", "mock-encoder"}, {"dimension", this->dim()}, {"results", results}}.dump(),
                      "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockService() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/svc/"; }
  const TestEmbedder& embedder() const { return embedder_; }

 private:
  std::size_t dim() const { return reported_dim ? reported_dim.load() : embedder_.dimension(); }

  TestEmbedder embedder_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

EmbedderConfig remote_config(const MockService& svc) {
  EmbedderConfig c;
  c.backend = EmbedderBackend::Remote;
  c.endpoint = svc.endpoint();
  c.batch_size = 3;
  c.concurrency = 2;
  c.timeout = std::chrono::milliseconds(5000);
  return c;
}

std::vector<double> f32(std::vector<double> v) {
  for (auto& x : v) x = double(float(x));
  return v;
}

TEST(Wire, Base64RoundTrip) {
  for (std::size_t n = 0; n < 10; ++n) {
    std::vector<std::uint8_t> bytes(n);
    for (std::size_t i = 0; i < n; ++i) bytes[i] = std::uint8_t(i * 37 + 11);
    EXPECT_EQ(wire::base64_decode(wire::base64_encode(bytes)), bytes);
  }
  EXPECT_EQ(wire::base64_encode(std::vector<std::uint8_t>{'M', 'a', 'n'}), "TWFu");
  EXPECT_THROW(wire::base64_decode("T!Fu"), RemoteError);
}

TEST(Wire, Float32IsLittleEndian) {
  const std::vector<double> v{1.0, -2.5};
  // 1.0f = 00 00 80 3f, -2.5f = 00 00 20 c0
  EXPECT_EQ(wire::base64_decode(wire::encode_f32(v)),
            (std::vector<std::uint8_t>{0x00, 0x00, 0x80, 0x3f, 0x00, 0x00, 0x20, 0xc0}));
  EXPECT_EQ(wire::decode_f32(wire::encode_f32(v)), v);
}

TEST(Wire, ResponseValidation) {
  const auto ok = json::parse(R"({"model_id":"m","dimension":2,"results":[{"tokens":["a"],"embedding":[[1,0]]}]})");
  EXPECT_EQ(wire::parse_response(ok, wire::EmbedMode::Tokens, 1).results[0].values, (std::vector<double>{1, 0}));
  EXPECT_THROW(wire::parse_response(ok, wire::EmbedMode::Tokens, 2), RemoteError);
  const auto short_row =
      json::parse(R"({"model_id":"m","dimension":3,"results":[{"tokens":["a"],"embedding":[[1,0]]}]})");
  EXPECT_THROW(wire::parse_response(short_row, wire::EmbedMode::Tokens, 1), RemoteError);
  const auto count =
      json::parse(R"({"model_id":"m","dimension":2,"results":[{"tokens":["a","b"],"embedding":[1,0]}]})");
  EXPECT_THROW(wire::parse_response(count, wire::EmbedMode::Tokens, 1), RemoteError);
  EXPECT_THROW(wire::parse_response(json::parse("{}"), wire::EmbedMode::Tokens, 1), RemoteError);
  const auto req = wire::make_request(std::vector<std::string>{"x"}, wire::EmbedMode::Sentence);
  EXPECT_EQ(req, json::parse(R"({"texts":["x"],"mode":"sentence"})"));
}

TEST(RemoteEmbedder, EmbedsThroughService) {
  MockService svc;
  const RemoteEmbedder remote(remote_config(svc));
  EXPECT_EQ(remote.dimension(), 8u);
  EXPECT_EQ(remote.model_id(), "mock-encoder");
  EXPECT_EQ(remote.fingerprint(), "remote:mock-encoder:dim=8");

  const auto m = remote.embed_tokens("A dog barks");
  EXPECT_EQ(m.tokens(), (std::vector<std::string>{"a", "dog", "barks"}));
  EXPECT_EQ(m.values(), f32(svc.embedder().embed_tokens("A dog barks").values()));
  EXPECT_EQ(remote.embed_sentence("a dog"), f32(svc.embedder().embed_sentence("a dog")));
  EXPECT_TRUE(remote.embed_tokens("").empty());
}

TEST(RemoteEmbedder, BatchesPreserveOrderAndRespectBatchSize) {
  MockService svc;
  const RemoteEmbedder remote(remote_config(svc));
  std::vector<std::string> texts;
  for (int i = 0; i < 11; ++i) texts.push_back("text number " + std::to_string(i) + " dog");
  const auto batch = remote.embed_tokens_batch(texts);
  ASSERT_EQ(batch.size(), texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    EXPECT_EQ(batch[i].tokens(), svc.embedder().embed_tokens(texts[i]).tokens());
  }
  EXPECT_EQ(svc.embed_calls.load(), 4);
  EXPECT_LE(svc.largest_batch.load(), 3u);
}

TEST(RemoteEmbedder, AcceptsJsonArrayPayloads) {
  MockService svc;
  svc.json_arrays = true;
  const RemoteEmbedder remote(remote_config(svc));
  EXPECT_EQ(remote.embed_tokens("dog").values(), svc.embedder().embed_tokens("dog").values());
}

TEST(RemoteEmbedder, HealthGatesReadiness) {
  MockService svc;
  svc.ready = false;
  EXPECT_THROW(RemoteEmbedder{remote_config(svc)}, RemoteError);
  svc.ready = true;
  EXPECT_NO_THROW(RemoteEmbedder{remote_config(svc)});
}

TEST(RemoteEmbedder, DimensionMismatchIsRemoteError) {
  MockService svc;
  const RemoteEmbedder remote(remote_config(svc));
  svc.reported_dim = 9;
  EXPECT_THROW(remote.embed_tokens("dog"), RemoteError);
}

TEST(RemoteEmbedder, UnreachableServiceIsRemoteError) {
  EmbedderConfig c;
  c.backend = EmbedderBackend::Remote;
  c.endpoint = "http://127.0.0.1:1";
  c.timeout = std::chrono::milliseconds(500);
  EXPECT_THROW(RemoteEmbedder{c}, RemoteError);
}

TEST(CachingEmbedder, ServesRepeatsFromDisk) {
  MockService svc;
  const auto dir = std::filesystem::temp_directory_path() / "datekit_cache_test";
  std::filesystem::remove_all(dir);
  auto config = remote_config(svc);
  config.cache_dir = dir;

  const auto first = make_embedder(config);
  const auto a = first->embed_tokens("a dog barks");
  const auto s = first->embed_sentence("a dog barks");
  const int calls = svc.embed_calls;
  EXPECT_EQ(calls, 2);

  const auto second = make_embedder(config);
  EXPECT_EQ(second->embed_tokens("a dog barks"), a);
  EXPECT_EQ(second->embed_sentence("a dog barks"), s);
  EXPECT_EQ(svc.embed_calls.load(), calls);

  const std::vector<std::string> texts{"a dog barks", "rain", "a dog barks"};
  const auto batch = second->embed_tokens_batch(texts);
  EXPECT_EQ(batch[0], a);
  EXPECT_EQ(batch[2], a);
  EXPECT_EQ(svc.embed_calls.load(), calls + 1);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace datekit
