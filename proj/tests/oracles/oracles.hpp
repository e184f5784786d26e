#pragma once

// Straight-line reference computations used only by tests. Nothing here calls
// into the library's tf-idf, metric, kernel or filter code; the only shared
// primitive is the embedder that supplies token vectors.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "datekit/corpus.hpp"
#include "datekit/embedder.hpp"
#include "datekit/quality_control.hpp"

namespace datekit::oracle {

inline double naive_idf(std::size_t n_docs, std::size_t df) {
  return std::log((1.0 + double(n_docs)) / (1.0 + double(df))) + 1.0;
}

struct IdfTable {
  std::size_t docs = 0;
  std::map<std::string, std::size_t> df;

  double idf(const std::string& t) const {
    auto it = df.find(t);
    return naive_idf(docs, it == df.end() ? 0 : it->second);
  }
};

inline IdfTable naive_idf_table(const std::vector<std::vector<std::string>>& documents) {
  IdfTable table;
  table.docs = documents.size();
  for (const auto& doc : documents) {
    std::set<std::string> distinct(doc.begin(), doc.end());
    for (const auto& t : distinct) table.df[t] += 1;
  }
  return table;
}

/// Sum over occurrences, token by token.
inline std::vector<double> occurrence_sum(const EmbeddingMatrix& m, const IdfTable& idf) {
  std::vector<double> v(m.dimension(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t k = 0; k < m.dimension(); ++k) v[k] += idf.idf(m.tokens()[i]) * m.row(i)[k];
  }
  return v;
}

/// Sum over distinct tokens of tf * idf * E(t), taking E(t) from the first
/// occurrence. Equals occurrence_sum for position-independent embeddings.
inline std::vector<double> distinct_token_sum(const EmbeddingMatrix& m, const IdfTable& idf) {
  std::map<std::string, std::size_t> tf;
  std::map<std::string, std::size_t> first;
  for (std::size_t i = 0; i < m.size(); ++i) {
    tf[m.tokens()[i]] += 1;
    first.emplace(m.tokens()[i], i);
  }
  std::vector<double> v(m.dimension(), 0.0);
  for (const auto& [t, count] : tf) {
    const double w = double(count) * idf.idf(t);
    for (std::size_t k = 0; k < m.dimension(); ++k) v[k] += w * m.row(first[t])[k];
  }
  return v;
}

inline double naive_cosine01(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ab += a[k] * b[k];
    aa += a[k] * a[k];
    bb += b[k] * b[k];
  }
  if (aa == 0 || bb == 0) return 0.0;
  double c = ab / (std::sqrt(aa) * std::sqrt(bb));
  if (c < 0) c = 0;
  if (c > 1) c = 1;
  return c;
}

/// Rank of the diagonal by sorting the row in descending order and locating
/// the first entry equal to it.
inline std::size_t sort_rank(std::vector<double> row, std::size_t i) {
  const double diagonal = row[i];
  std::sort(row.begin(), row.end(), [](double a, double b) { return a > b; });
  const auto pos = std::find(row.begin(), row.end(), diagonal) - row.begin();
  return std::size_t(pos) + 1;
}

struct OracleSample {
  double s_sim;
  double s_dis;  // NaN when the group has one record
  double date;
};

struct OracleResult {
  std::vector<OracleSample> samples;
  double dataset_date;
};

/// DATE computed from the formulas: idf over reference texts, occurrence-sum
/// weighted pooling, clamped cosine with max over references, per
/// sub-category N x N matrix on reference variant 1, sort-based rank,
/// 1 - r/N, harmonic mean, arithmetic mean.
inline OracleResult naive_date(const Corpus& corpus, const Embedder& embedder) {
  std::vector<std::vector<std::string>> docs;
  for (const auto& r : corpus.records())
    for (const auto& ref : r.references) docs.push_back(embedder.embed_tokens(ref).tokens());
  const auto idf = naive_idf_table(docs);

  auto pooled = [&](const std::string& text) { return occurrence_sum(embedder.embed_tokens(text), idf); };

  const std::size_t n = corpus.size();
  std::vector<std::vector<double>> cand(n), first_ref(n);
  OracleResult out;
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    cand[i] = pooled(corpus[i].candidate);
    first_ref[i] = pooled(corpus[i].references[0]);
    double best = 0;
    for (const auto& ref : corpus[i].references) best = std::max(best, naive_cosine01(cand[i], pooled(ref)));
    out.samples[i].s_sim = best;
  }

  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> members;
    for (std::size_t j = 0; j < n; ++j)
      if (corpus[j].sub_category == corpus[i].sub_category) members.push_back(j);
    auto& s = out.samples[i];
    if (members.size() < 2) {
      s.s_dis = std::nan("");
      s.date = s.s_sim;
      continue;
    }
    std::vector<double> row;
    std::size_t self = 0;
    for (std::size_t k = 0; k < members.size(); ++k) {
      if (members[k] == i) self = k;
      row.push_back(naive_cosine01(first_ref[i], cand[members[k]]));
    }
    const auto r = sort_rank(row, self);
    s.s_dis = 1.0 - double(r) / double(members.size());
    s.date = (s.s_sim + s.s_dis) > 0 ? 2 * s.s_sim * s.s_dis / (s.s_sim + s.s_dis) : 0.0;
  }
  double total = 0;
  for (const auto& s : out.samples) total += s.date;
  out.dataset_date = total / double(n);
  return out;
}

/// Both filters applied item by item.
inline bool naive_keep(const FilterInput& in, double threshold, const std::vector<std::string>& patterns) {
  double sum = 0;
  for (double d : in.distractor_similarities) sum += d;
  if (!(in.pair_similarity - sum / 6.0 >= threshold)) return false;
  if (in.llm_confidence == Confidence::Low) return false;
  if (in.classifier_domain.to_string() != in.llm_domain.to_string()) return false;
  std::string text = in.caption_text;
  for (auto& c : text) c = char(std::tolower(static_cast<unsigned char>(c)));
  for (auto p : patterns) {
    for (auto& c : p) c = char(std::tolower(static_cast<unsigned char>(c)));
    if (!p.empty() && text.find(p) != std::string::npos) return false;
  }
  return true;
}

}  // namespace datekit::oracle
