#include "datekit/date_metric.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <unordered_map>

#include "datekit/error.hpp"
#include "datekit/kernels.hpp"

namespace datekit {

SimilarityMatrix::SimilarityMatrix(std::size_t n, std::vector<double> entries, Execution execution)
    : n_(n), entries_(std::move(entries)) {
  if (entries_.size() != n_ * n_) throw InputError("similarity matrix must hold N*N entries");
  ranks_ = execution == Execution::Parallel ? kernels::parallel::competition_ranks(entries_, n_)
                                            : kernels::serial::competition_ranks(entries_, n_);
}

std::vector<PooledRecord> pool_corpus(const Corpus& corpus, const Embedder& embedder, const CorpusStats& stats,
                                      Execution execution) {
  // Each distinct text is embedded and pooled once.
  std::vector<std::string> texts;
  std::unordered_map<std::string, std::size_t> slot;
  auto intern = [&](const std::string& text) {
    auto [it, inserted] = slot.emplace(text, texts.size());
    if (inserted) texts.push_back(text);
    return it->second;
  };
  std::vector<std::size_t> candidate_slot;
  std::vector<std::vector<std::size_t>> reference_slots;
  for (const auto& r : corpus.records()) {
    candidate_slot.push_back(intern(r.candidate));
    auto& refs = reference_slots.emplace_back();
    for (const auto& ref : r.references) refs.push_back(intern(ref));
  }

  const auto matrices = embedder.embed_tokens_batch(texts);
  std::vector<WeightedVector> pooled(matrices.size());
  const auto count = static_cast<std::int64_t>(matrices.size());
#pragma omp parallel for schedule(dynamic, 16) if (execution == Execution::Parallel)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto& m = matrices[static_cast<std::size_t>(i)];
    pooled[static_cast<std::size_t>(i)] = weighted_pool(TokenizedText(m.tokens()), m, stats);
  }

  std::vector<PooledRecord> out(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    out[i].candidate = pooled[candidate_slot[i]];
    for (auto s : reference_slots[i]) out[i].references.push_back(pooled[s]);
  }
  return out;
}

double semantic_similarity(const WeightedVector& candidate, std::span<const WeightedVector> references) {
  if (references.empty()) throw InputError("semantic similarity needs at least one reference");
  double best = 0.0;
  for (const auto& ref : references) {
    if (ref.vector.size() != candidate.vector.size()) {
      throw InputError("dimension mismatch between candidate and reference");
    }
    best = std::max(best, kernels::clamped_cosine(candidate.vector, candidate.norm, ref.vector, ref.norm));
  }
  return best;
}

SimilarityMatrix build_matrix(std::span<const PooledRecord> records, const DateOptions& options) {
  const std::size_t n = records.size();
  if (n < 2) throw InputError("cross-sample matrix needs at least 2 records, got " + std::to_string(n));
  const std::size_t dim = records.front().candidate.vector.size();

  kernels::VectorBlock candidates(dim);
  kernels::ReferenceSet refs;
  refs.vectors.dimension = dim;
  for (const auto& r : records) {
    if (r.references.empty()) throw InputError("record without references");
    candidates.push_back(r.candidate.vector, r.candidate.norm);
    const std::size_t used = options.reference == MatrixReference::FirstVariant ? 1 : r.references.size();
    std::vector<std::span<const double>> vecs;
    std::vector<double> norms;
    for (std::size_t k = 0; k < used; ++k) {
      vecs.emplace_back(r.references[k].vector);
      norms.push_back(r.references[k].norm);
    }
    refs.add_row(vecs, norms);
  }

  auto entries = options.execution == Execution::Parallel ? kernels::parallel::similarity_matrix(refs, candidates)
                                                          : kernels::serial::similarity_matrix(refs, candidates);
  return SimilarityMatrix(n, std::move(entries), options.execution);
}

SimilarityMatrix build_matrix(const Corpus& corpus, const Embedder& embedder, const CorpusStats& stats,
                              const DateOptions& options) {
  if (corpus.size() < 2) {
    throw InputError("cross-sample matrix needs at least 2 records, got " + std::to_string(corpus.size()));
  }
  if (options.scope == MatrixScope::PerSubCategory) {
    for (const auto& r : corpus.records()) {
      if (r.sub_category != corpus[0].sub_category) {
        throw InputError("per-sub-category matrix given records of several sub-categories");
      }
    }
  }
  const auto pooled = pool_corpus(corpus, embedder, stats, options.execution);
  return build_matrix(pooled, options);
}

double discriminability(const SimilarityMatrix& matrix, std::size_t i) {
  if (i >= matrix.size()) throw InputError("sample index out of range");
  return 1.0 - static_cast<double>(matrix.rank(i)) / static_cast<double>(matrix.size());
}

double date_sample(double s_sim, double s_dis) {
  if (!(s_sim >= 0.0 && s_sim <= 1.0) || !(s_dis >= 0.0 && s_dis <= 1.0)) {
    throw InputError("DATE inputs must lie in [0, 1]");
  }
  const double sum = s_sim + s_dis;
  return sum > 0.0 ? 2.0 * s_sim * s_dis / sum : 0.0;
}

DateResult date_corpus(const Corpus& corpus, const Embedder& embedder, const CorpusStats& stats,
                       const DateOptions& options) {
  if (corpus.empty()) throw InputError("cannot score an empty corpus");
  const auto pooled = pool_corpus(corpus, embedder, stats, options.execution);

  DateResult result;
  result.samples.resize(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    result.samples[i].id = corpus[i].id;
    result.samples[i].s_sim = semantic_similarity(pooled[i].candidate, pooled[i].references);
  }

  if (options.scope == MatrixScope::Global) {
    DateGroup all{"all", {}, std::nullopt};
    for (std::size_t i = 0; i < corpus.size(); ++i) all.indices.push_back(i);
    result.groups.push_back(std::move(all));
  } else {
    for (auto& g : group_by(corpus, GroupKey::SubCategory)) {
      result.groups.push_back({std::move(g.key), std::move(g.indices), std::nullopt});
    }
  }

  for (auto& group : result.groups) {
    if (group.indices.size() < 2) {
      result.similarity_only_fallback = true;
      result.warnings.push_back("group '" + group.key + "' has " + std::to_string(group.indices.size()) +
                                " record(s); scored on similarity only");
      for (auto i : group.indices) result.samples[i].date = result.samples[i].s_sim;
      continue;
    }
    std::vector<PooledRecord> members;
    members.reserve(group.indices.size());
    for (auto i : group.indices) members.push_back(pooled[i]);
    group.matrix = build_matrix(members, options);
    for (std::size_t local = 0; local < group.indices.size(); ++local) {
      auto& sample = result.samples[group.indices[local]];
      sample.s_dis = discriminability(*group.matrix, local);
      sample.date = date_sample(sample.s_sim, *sample.s_dis);
    }
  }

  double total = 0.0;
  for (const auto& s : result.samples) total += s.date;
  result.dataset_date = total / static_cast<double>(result.samples.size());
  return result;
}

void write_matrix(const SimilarityMatrix& matrix, std::span<const std::string> ids,
                  const std::filesystem::path& prefix) {
  if (ids.size() != matrix.size()) throw InputError("id list does not match matrix size");
  auto bin_path = prefix;
  bin_path += ".bin";
  std::ofstream bin(bin_path, std::ios::binary);
  for (double v : matrix.entries()) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
    bin.write(bytes, 8);
  }
  auto ids_path = prefix;
  ids_path += ".ids";
  std::ofstream sidecar(ids_path);
  for (const auto& id : ids) sidecar << id << '\n';
  if (!bin || !sidecar) throw InputError("failed to write matrix dump at " + prefix.string());
}

}  // namespace datekit
