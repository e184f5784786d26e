#include "datekit/kernels.hpp"

#include <algorithm>
#include <cstdint>

#include "datekit/error.hpp"

namespace datekit::kernels {

void VectorBlock::push_back(std::span<const double> v, double norm) {
  if (v.size() != dimension) {
    throw InputError("dimension mismatch: expected " + std::to_string(dimension) + ", got " +
                     std::to_string(v.size()));
  }
  values.insert(values.end(), v.begin(), v.end());
  norms.push_back(norm);
}

void ReferenceSet::add_row(std::span<const std::span<const double>> refs, std::span<const double> norms) {
  for (std::size_t k = 0; k < refs.size(); ++k) vectors.push_back(refs[k], norms[k]);
  offsets.push_back(vectors.rows());
}

double clamped_cosine(std::span<const double> a, double norm_a, std::span<const double> b, double norm_b) {
  if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
  return std::clamp(sum / (norm_a * norm_b), 0.0, 1.0);
}

namespace {

void check_shapes(const ReferenceSet& refs, const VectorBlock& candidates) {
  if (refs.rows() != candidates.rows()) {
    throw InputError("reference rows (" + std::to_string(refs.rows()) + ") and candidates (" +
                     std::to_string(candidates.rows()) + ") differ");
  }
  if (refs.vectors.rows() > 0 && refs.vectors.dimension != candidates.dimension) {
    throw InputError("reference and candidate dimensions differ");
  }
}

inline void fill_row(const ReferenceSet& refs, const VectorBlock& candidates, std::size_t i, double* out) {
  const std::size_t n = candidates.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double best = 0.0;
    for (std::size_t k = refs.offsets[i]; k < refs.offsets[i + 1]; ++k) {
      best = std::max(best, clamped_cosine(refs.vectors.row(k), refs.vectors.norms[k], candidates.row(j),
                                           candidates.norms[j]));
    }
    out[j] = best;
  }
}

inline std::size_t rank_of_row(const double* row, std::size_t i, std::size_t n) {
  const double diagonal = row[i];
  std::size_t greater = 0;
  for (std::size_t j = 0; j < n; ++j) greater += row[j] > diagonal ? 1 : 0;
  return 1 + greater;
}

}  // namespace

namespace serial {

std::vector<double> similarity_matrix(const ReferenceSet& refs, const VectorBlock& candidates) {
  check_shapes(refs, candidates);
  const std::size_t n = candidates.rows();
  std::vector<double> m(n * n);
  for (std::size_t i = 0; i < n; ++i) fill_row(refs, candidates, i, m.data() + i * n);
  return m;
}

std::vector<std::size_t> competition_ranks(std::span<const double> matrix, std::size_t n) {
  if (matrix.size() != n * n) throw InputError("matrix is not N x N");
  std::vector<std::size_t> ranks(n);
  for (std::size_t i = 0; i < n; ++i) ranks[i] = rank_of_row(matrix.data() + i * n, i, n);
  return ranks;
}

}  // namespace serial

namespace parallel {

std::vector<double> similarity_matrix(const ReferenceSet& refs, const VectorBlock& candidates) {
  check_shapes(refs, candidates);
  const auto n = static_cast<std::int64_t>(candidates.rows());
  std::vector<double> m(static_cast<std::size_t>(n * n));
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    fill_row(refs, candidates, static_cast<std::size_t>(i), m.data() + i * n);
  }
  return m;
}

std::vector<std::size_t> competition_ranks(std::span<const double> matrix, std::size_t n) {
  if (matrix.size() != n * n) throw InputError("matrix is not N x N");
  std::vector<std::size_t> ranks(n);
  const auto rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < rows; ++i) {
    const auto row = static_cast<std::size_t>(i);
    ranks[row] = rank_of_row(matrix.data() + row * n, row, n);
  }
  return ranks;
}

}  // namespace parallel

}  // namespace datekit::kernels
