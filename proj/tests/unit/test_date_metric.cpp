#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "datekit/date_metric.hpp"
#include "datekit/error.hpp"
#include "datekit/test_embedder.hpp"
#include "lookup_embedder.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

namespace datekit {
namespace {

WeightedVector wv(Vector v) {
  const double n = l2_norm(v);
  return {std::move(v), n};
}

EvalRecord record(std::string id, std::string candidate, std::vector<std::string> refs,
                  CaptionSubCategory sub = CaptionSubCategory::Long) {
  return {std::move(id), Task::Caption, sub, DomainCode::from_string("S00"), std::move(candidate), std::move(refs)};
}

/// One-hot vectors t0..t{n-1} in n dimensions.
testing::LookupEmbedder one_hot(std::size_t n) {
  std::map<std::string, Vector> table;
  for (std::size_t i = 0; i < n; ++i) {
    Vector v(n, 0.0);
    v[i] = 1.0;
    table.emplace("t" + std::to_string(i), v);
  }
  return testing::LookupEmbedder(n, table);
}

TEST(SemanticSimilarity, Examples) {
  const std::vector<WeightedVector> same{wv({0.3, 0.4})};
  EXPECT_NEAR(semantic_similarity(wv({0.3, 0.4}), same), 1.0, 1e-15);
  const std::vector<WeightedVector> orth{wv({0.0, 1.0})};
  EXPECT_EQ(semantic_similarity(wv({1.0, 0.0}), orth), 0.0);
  const std::vector<WeightedVector> two{wv({1.0, 0.0}), wv({0.0, 1.0})};
  EXPECT_EQ(semantic_similarity(wv({1.0, 0.0}), two), 1.0);
}

TEST(SemanticSimilarity, ClampsAndHandlesZeroNorm) {
  const std::vector<WeightedVector> opposite{wv({-1.0, 0.0})};
  EXPECT_EQ(semantic_similarity(wv({1.0, 0.0}), opposite), 0.0);
  const std::vector<WeightedVector> any{wv({1.0, 0.0})};
  EXPECT_EQ(semantic_similarity(wv({0.0, 0.0}), any), 0.0);
  EXPECT_THROW(semantic_similarity(wv({1.0}), any), InputError);
  EXPECT_THROW(semantic_similarity(wv({1.0, 0.0}), {}), InputError);
}

TEST(BuildMatrix, SwappedCandidatesRankLast) {
  const auto e = one_hot(2);
  const Corpus corpus(Task::Caption, {record("x", "t1", {"t0"}), record("y", "t0", {"t1"})});
  const auto stats = reference_stats(corpus, e);
  const auto m = build_matrix(corpus, e, stats);
  EXPECT_EQ(m.entries(), (std::vector<double>{0, 1, 1, 0}));
  EXPECT_EQ(m.rank(0), 2u);
  EXPECT_EQ(m.rank(1), 2u);
}

TEST(BuildMatrix, IdentityRanksFirst) {
  const SimilarityMatrix m(2, {1, 0, 0, 1});
  EXPECT_EQ(m.rank(0), 1u);
  EXPECT_EQ(m.rank(1), 1u);
}

TEST(BuildMatrix, RequiresTwoRecordsOfOneSubCategory) {
  const auto e = one_hot(2);
  const Corpus single(Task::Caption, {record("x", "t0", {"t0"})});
  EXPECT_THROW(build_matrix(single, e, reference_stats(single, e)), InputError);
  const Corpus mixed(Task::Caption, {record("x", "t0", {"t0"}), record("y", "t1", {"t1"}, CaptionSubCategory::Short)});
  EXPECT_THROW(build_matrix(mixed, e, reference_stats(mixed, e)), InputError);
  DateOptions global;
  global.scope = MatrixScope::Global;
  EXPECT_NO_THROW(build_matrix(mixed, e, reference_stats(mixed, e), global));
}

TEST(BuildMatrix, RanksMatchSortOracleOnRandom8x8) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> level(0, 4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> entries(64);
    for (auto& x : entries) x = level(rng) / 4.0;
    const SimilarityMatrix m(8, entries);
    for (std::size_t i = 0; i < 8; ++i) {
      const std::vector<double> row(entries.begin() + long(i * 8), entries.begin() + long(i * 8 + 8));
      EXPECT_EQ(m.rank(i), oracle::sort_rank(row, i));
    }
  }
}

TEST(Discriminability, Examples) {
  // Row 0 of a 4x4 matrix with the diagonal best, row 1 with it worst.
  const SimilarityMatrix m(4, {0.9, 0.1, 0.2, 0.3,  //
                               0.9, 0.0, 0.5, 0.4,  //
                               0, 0, 1, 0,          //
                               0, 0, 0, 1});
  EXPECT_EQ(m.rank(0), 1u);
  EXPECT_DOUBLE_EQ(discriminability(m, 0), 0.75);
  EXPECT_EQ(m.rank(1), 4u);
  EXPECT_DOUBLE_EQ(discriminability(m, 1), 0.0);

  const SimilarityMatrix flat(5, std::vector<double>(25, 0.5));
  EXPECT_EQ(flat.rank(2), 1u);
  EXPECT_DOUBLE_EQ(discriminability(flat, 2), 0.8);
  EXPECT_THROW(discriminability(flat, 5), InputError);
}

TEST(Discriminability, MonotoneInDiagonal) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> entries(36);
    for (auto& x : entries) x = u(rng);
    const std::size_t i = trial % 6;
    double previous = discriminability(SimilarityMatrix(6, entries), i);
    for (double d = 0.0; d <= 1.0; d += 0.125) {
      entries[i * 6 + i] = std::max(entries[i * 6 + i], d);
      const double now = discriminability(SimilarityMatrix(6, entries), i);
      EXPECT_GE(now, previous);
      previous = now;
    }
  }
}

TEST(DateSample, Examples) {
  EXPECT_DOUBLE_EQ(date_sample(0.5, 0.5), 0.5);
  EXPECT_NEAR(date_sample(0.8, 0.4), 0.533333, 1e-6);
  EXPECT_EQ(date_sample(0.0, 0.9), 0.0);
  EXPECT_EQ(date_sample(0.0, 0.0), 0.0);
  EXPECT_THROW(date_sample(1.1, 0.5), InputError);
  EXPECT_THROW(date_sample(0.5, -0.1), InputError);
  EXPECT_THROW(date_sample(std::nan(""), 0.5), InputError);
}

TEST(DateCorpus, ClosedFormForOrthogonalReferences) {
  for (std::size_t n : {2u, 3u, 5u, 10u}) {
    const auto e = one_hot(n);
    std::vector<EvalRecord> records;
    for (std::size_t i = 0; i < n; ++i) {
      const auto t = "t" + std::to_string(i);
      records.push_back(record("r" + std::to_string(i), t, {t}));
    }
    const Corpus corpus(Task::Caption, records);
    const auto result = date_corpus(corpus, e, reference_stats(corpus, e));
    const double nd = double(n);
    for (const auto& s : result.samples) {
      EXPECT_DOUBLE_EQ(s.s_sim, 1.0);
      EXPECT_DOUBLE_EQ(*s.s_dis, 1.0 - 1.0 / nd);
    }
    EXPECT_NEAR(result.dataset_date, 2 * (1 - 1 / nd) / (2 - 1 / nd), 1e-12) << "N=" << n;
  }
}

TEST(DateCorpus, AllEmptyCandidatesScoreZero) {
  const TestEmbedder e(32);
  std::vector<EvalRecord> records;
  for (int i = 0; i < 6; ++i) records.push_back(record("r" + std::to_string(i), "", {"a dog barks", "rain falls"}));
  const Corpus corpus(Task::Caption, records);
  const auto result = date_corpus(corpus, e, reference_stats(corpus, e));
  for (const auto& s : result.samples) {
    EXPECT_EQ(s.s_sim, 0.0);
    EXPECT_EQ(s.date, 0.0);
  }
  EXPECT_EQ(result.dataset_date, 0.0);
}

TEST(DateCorpus, MatchesStraightLineOracle) {
  const TestEmbedder e(48, 11);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto corpus = testing::random_caption_corpus(8, seed, true);
    const auto got = date_corpus(corpus, e, reference_stats(corpus, e));
    const auto want = oracle::naive_date(corpus, e);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      EXPECT_NEAR(got.samples[i].s_sim, want.samples[i].s_sim, 1e-9);
      EXPECT_NEAR(*got.samples[i].s_dis, want.samples[i].s_dis, 1e-9);
      EXPECT_NEAR(got.samples[i].date, want.samples[i].date, 1e-9);
    }
    EXPECT_NEAR(got.dataset_date, want.dataset_date, 1e-9);
  }
}

TEST(DateCorpus, SingletonGroupFallsBackWithWarning) {
  const TestEmbedder e(16);
  const Corpus corpus(Task::Caption, {record("a", "a dog barks", {"a dog barks"}),
                                      record("b", "rain falls", {"rain"}),
                                      record("c", "wind blows", {"wind"}, CaptionSubCategory::Short)});
  const auto result = date_corpus(corpus, e, reference_stats(corpus, e));
  EXPECT_TRUE(result.similarity_only_fallback);
  EXPECT_FALSE(result.warnings.empty());
  EXPECT_FALSE(result.samples[2].s_dis.has_value());
  EXPECT_EQ(result.samples[2].date, result.samples[2].s_sim);
  EXPECT_TRUE(result.samples[0].s_dis.has_value());
  ASSERT_EQ(result.groups.size(), 2u);
  EXPECT_TRUE(result.groups[0].matrix.has_value());
  EXPECT_FALSE(result.groups[1].matrix.has_value());
}

TEST(DateCorpus, RangesAndHarmonicBound) {
  const TestEmbedder e(32);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto corpus = testing::random_caption_corpus(30, seed);
    const auto result = date_corpus(corpus, e, reference_stats(corpus, e));
    for (const auto& s : result.samples) {
      EXPECT_GE(s.s_sim, 0.0);
      EXPECT_LE(s.s_sim, 1.0);
      EXPECT_GE(s.date, 0.0);
      EXPECT_LE(s.date, 1.0);
      if (!s.s_dis) continue;
      EXPECT_GE(*s.s_dis, 0.0);
      EXPECT_LT(*s.s_dis, 1.0);
      EXPECT_LE(s.date, (s.s_sim + *s.s_dis) / 2 + 1e-15);
      EXPECT_LE(s.date, std::min(1.0, 2 * std::max(s.s_sim, *s.s_dis)));
    }
    EXPECT_GE(result.dataset_date, 0.0);
    EXPECT_LE(result.dataset_date, 1.0);
  }
}

TEST(DateCorpus, PermutationEquivariant) {
  const TestEmbedder e(32);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto corpus = testing::random_caption_corpus(20, seed);
    std::vector<std::size_t> order(corpus.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), std::mt19937_64(seed));
    std::vector<EvalRecord> shuffled;
    for (auto i : order) shuffled.push_back(corpus[i]);
    const Corpus permuted(Task::Caption, shuffled);

    const auto a = date_corpus(corpus, e, reference_stats(corpus, e));
    const auto b = date_corpus(permuted, e, reference_stats(permuted, e));
    for (std::size_t k = 0; k < order.size(); ++k) {
      const auto& x = a.samples[order[k]];
      const auto& y = b.samples[k];
      EXPECT_EQ(x.id, y.id);
      EXPECT_NEAR(x.s_sim, y.s_sim, 1e-12);
      EXPECT_EQ(x.s_dis.has_value(), y.s_dis.has_value());
      if (x.s_dis) EXPECT_NEAR(*x.s_dis, *y.s_dis, 1e-12);
      EXPECT_NEAR(x.date, y.date, 1e-12);
    }
    EXPECT_NEAR(a.dataset_date, b.dataset_date, 1e-12);
  }
}

TEST(DateCorpus, EmbeddingScaleInvariant) {
  const TestEmbedder base(32);
  const testing::ScaledEmbedder<TestEmbedder> scaled(base, 0.37);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto corpus = testing::random_caption_corpus(16, seed, true);
    const auto a = date_corpus(corpus, base, reference_stats(corpus, base));
    const auto b = date_corpus(corpus, scaled, reference_stats(corpus, scaled));
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      EXPECT_NEAR(a.samples[i].s_sim, b.samples[i].s_sim, 1e-12);
      EXPECT_NEAR(a.samples[i].date, b.samples[i].date, 1e-12);
    }
    EXPECT_EQ(a.groups[0].matrix->ranks(), b.groups[0].matrix->ranks());
  }
}

TEST(DateCorpus, SerialAndParallelAgreeBitwise) {
  const TestEmbedder e(64);
  const auto corpus = testing::random_caption_corpus(60, 99);
  const auto stats = reference_stats(corpus, e);
  DateOptions serial, parallel;
  serial.execution = Execution::Serial;
  parallel.execution = Execution::Parallel;
  for (auto ref : {MatrixReference::FirstVariant, MatrixReference::MaxOverVariants}) {
    for (auto scope : {MatrixScope::PerSubCategory, MatrixScope::Global}) {
      serial.reference = parallel.reference = ref;
      serial.scope = parallel.scope = scope;
      const auto a = date_corpus(corpus, e, stats, serial);
      const auto b = date_corpus(corpus, e, stats, parallel);
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        EXPECT_EQ(a.samples[i].s_sim, b.samples[i].s_sim);
        EXPECT_EQ(a.samples[i].s_dis, b.samples[i].s_dis);
        EXPECT_EQ(a.samples[i].date, b.samples[i].date);
      }
      EXPECT_EQ(a.dataset_date, b.dataset_date);
    }
  }
}

TEST(DateCorpus, MaxOverVariantsNeverLowersRowEntries) {
  const TestEmbedder e(32);
  const auto corpus = testing::random_caption_corpus(12, 4, true);
  const auto stats = reference_stats(corpus, e);
  DateOptions max_opt;
  max_opt.reference = MatrixReference::MaxOverVariants;
  const auto first = build_matrix(corpus, e, stats);
  const auto max = build_matrix(corpus, e, stats, max_opt);
  for (std::size_t k = 0; k < first.entries().size(); ++k) EXPECT_GE(max.entries()[k], first.entries()[k]);
}

TEST(WriteMatrix, LittleEndianDumpWithIds) {
  const SimilarityMatrix m(2, {0.25, 1.0, 0.5, 0.125});
  const std::vector<std::string> ids{"x", "y"};
  const auto prefix = std::filesystem::temp_directory_path() / "datekit_matrix_dump_test";
  write_matrix(m, ids, prefix);

  std::ifstream bin(prefix.string() + ".bin", std::ios::binary);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(bin)), {});
  ASSERT_EQ(bytes.size(), 32u);
  for (std::size_t k = 0; k < 4; ++k) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) bits = (bits << 8) | bytes[k * 8 + std::size_t(b)];
    double v;
    std::memcpy(&v, &bits, sizeof v);
    EXPECT_EQ(v, m.entries()[k]);
  }
  std::ifstream sidecar(prefix.string() + ".ids");
  std::string a, b;
  sidecar >> a >> b;
  EXPECT_EQ(a, "x");
  EXPECT_EQ(b, "y");
  EXPECT_THROW(write_matrix(m, std::vector<std::string>{"x"}, prefix), InputError);
}

}  // namespace
}  // namespace datekit
