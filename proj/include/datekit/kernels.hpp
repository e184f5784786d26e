#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Dense kernels behind the cross-sample matrix. Each kernel has a serial
// reference and an OpenMP version; both perform identical per-entry
// arithmetic, so their outputs are bitwise equal for any thread count.
namespace datekit::kernels {

/// Row-major block of vectors with their L2 norms.
struct VectorBlock {
  std::size_t dimension = 0;
  std::vector<double> values;
  std::vector<double> norms;

  explicit VectorBlock(std::size_t dim = 0) : dimension(dim) {}

  std::size_t rows() const { return norms.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values).subspan(i * dimension, dimension);
  }
  /// Throws InputError on a dimension mismatch.
  void push_back(std::span<const double> v, double norm);
};

/// Reference vectors grouped by matrix row: row i owns
/// vectors.row(k) for k in [offsets[i], offsets[i + 1]).
struct ReferenceSet {
  VectorBlock vectors;
  std::vector<std::size_t> offsets{0};

  std::size_t rows() const { return offsets.size() - 1; }
  void add_row(std::span<const std::span<const double>> refs, std::span<const double> norms);
};

/// Cosine clamped to [0, 1]; 0 when either norm is 0.
double clamped_cosine(std::span<const double> a, double norm_a, std::span<const double> b, double norm_b);

namespace serial {

/// N x N row-major: entry (i, j) = max over row i's references of
/// clamped_cosine(reference, candidate j).
std::vector<double> similarity_matrix(const ReferenceSet& refs, const VectorBlock& candidates);

/// r_i = 1 + |{ j : M[i][j] > M[i][i] }|.
std::vector<std::size_t> competition_ranks(std::span<const double> matrix, std::size_t n);

}  // namespace serial

namespace parallel {

std::vector<double> similarity_matrix(const ReferenceSet& refs, const VectorBlock& candidates);
std::vector<std::size_t> competition_ranks(std::span<const double> matrix, std::size_t n);

}  // namespace parallel

}  // namespace datekit::kernels
