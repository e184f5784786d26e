#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "datekit/corpus.hpp"
#include "datekit/embedder.hpp"
#include "datekit/tfidf.hpp"

namespace datekit {

enum class Execution { Serial, Parallel };

/// Which references of sample i enter row i of the cross-sample matrix.
enum class MatrixReference { FirstVariant, MaxOverVariants };

/// Whether one matrix spans the corpus or one is built per sub-category.
enum class MatrixScope { PerSubCategory, Global };

struct DateOptions {
  MatrixReference reference = MatrixReference::FirstVariant;
  MatrixScope scope = MatrixScope::PerSubCategory;
  Execution execution = Execution::Parallel;
};

struct SampleScore {
  std::string id;
  double s_sim = 0.0;
  std::optional<double> s_dis;  // absent when the sample's group has N < 2
  double date = 0.0;
};

/// N x N scores, entry (i, j) comparing sample i's reference with sample j's
/// candidate, plus the competition rank of each diagonal entry in its row.
class SimilarityMatrix {
 public:
  SimilarityMatrix(std::size_t n, std::vector<double> entries, Execution execution = Execution::Serial);

  std::size_t size() const { return n_; }
  double at(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
  std::size_t rank(std::size_t i) const { return ranks_[i]; }
  const std::vector<double>& entries() const { return entries_; }
  const std::vector<std::size_t>& ranks() const { return ranks_; }

 private:
  std::size_t n_;
  std::vector<double> entries_;
  std::vector<std::size_t> ranks_;
};

/// Pooled candidate and reference vectors of one record.
struct PooledRecord {
  WeightedVector candidate;
  std::vector<WeightedVector> references;
};

std::vector<PooledRecord> pool_corpus(const Corpus& corpus, const Embedder& embedder, const CorpusStats& stats,
                                      Execution execution = Execution::Parallel);

/// Max over references of the cosine clamped to [0, 1]. Throws InputError on
/// an empty reference list or a dimension mismatch.
double semantic_similarity(const WeightedVector& candidate, std::span<const WeightedVector> references);

SimilarityMatrix build_matrix(std::span<const PooledRecord> records, const DateOptions& options = {});

/// Requires N >= 2 and, under per-sub-category scope, a single sub-category.
SimilarityMatrix build_matrix(const Corpus& corpus, const Embedder& embedder, const CorpusStats& stats,
                              const DateOptions& options = {});

/// 1 - r_i / N.
double discriminability(const SimilarityMatrix& matrix, std::size_t i);

/// Harmonic mean of the two scores; 0 when both are 0. Throws InputError for
/// inputs outside [0, 1].
double date_sample(double s_sim, double s_dis);

struct DateGroup {
  std::string key;
  std::vector<std::size_t> indices;
  std::optional<SimilarityMatrix> matrix;  // absent when the group has N < 2
};

struct DateResult {
  std::vector<SampleScore> samples;  // corpus order
  double dataset_date = 0.0;
  std::vector<DateGroup> groups;
  /// True when any group fell back to similarity-only scoring.
  bool similarity_only_fallback = false;
  std::vector<std::string> warnings;
};

DateResult date_corpus(const Corpus& corpus, const Embedder& embedder, const CorpusStats& stats,
                       const DateOptions& options = {});

/// Writes `<prefix>.bin` (N*N little-endian float64, row-major) and
/// `<prefix>.ids` (one id per line, row order).
void write_matrix(const SimilarityMatrix& matrix, std::span<const std::string> ids,
                  const std::filesystem::path& prefix);

}  // namespace datekit
