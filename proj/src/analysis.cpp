#include "datekit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>

#include "datekit/error.hpp"

namespace datekit {

std::string_view to_string(QualityTier tier) {
  switch (tier) {
    case QualityTier::Right:
      return "right";
    case QualityTier::Safe:
      return "safe";
    case QualityTier::Wrong:
      break;
  }
  return "wrong";
}

std::string default_safe_template(const Corpus& corpus) {
  const auto speech = DomainCode::from_string("S00");
  const bool all_speech = !corpus.empty() && std::all_of(corpus.records().begin(), corpus.records().end(), [&](const auto& r) {
    return r.domain == speech || r.sub_category == SubCategory{CaptionSubCategory::Speech};
  });
  return std::string(all_speech ? kSpeechSafeTemplate : kGenericSafeTemplate);
}

namespace {

std::size_t bounded(std::mt19937_64& engine, std::size_t bound) {
  const std::uint64_t range = static_cast<std::uint64_t>(bound);
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % range;
  std::uint64_t x = engine();
  while (x >= limit) x = engine();
  return static_cast<std::size_t>(x % range);
}

}  // namespace

std::vector<std::size_t> seeded_derangement(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw InputError("a derangement needs at least 2 elements");
  std::mt19937_64 engine(seed);
  std::vector<std::size_t> perm(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[bounded(engine, i + 1)]);
    bool fixed_point = false;
    for (std::size_t i = 0; i < n && !fixed_point; ++i) fixed_point = perm[i] == i;
    if (!fixed_point) return perm;
  }
}

std::map<QualityTier, Corpus> build_tier_corpora(const Corpus& base, std::string_view safe_template,
                                                 std::uint64_t seed) {
  if (base.size() < 2) throw InputError("tier corpora need at least 2 records");
  for (const auto& r : base.records()) {
    if (r.references.size() < 2) {
      throw InputError("record '" + r.id + "' needs at least 2 reference variants for the Right tier");
    }
  }
  const auto wrong_source = seeded_derangement(base.size(), seed);

  std::vector<EvalRecord> right, safe, wrong;
  for (std::size_t i = 0; i < base.size(); ++i) {
    EvalRecord r = base[i];
    const std::string held_out = r.references[1];
    r.references.erase(r.references.begin() + 1);

    r.candidate = held_out;
    right.push_back(r);
    r.candidate = std::string(safe_template);
    safe.push_back(r);
    r.candidate = base[wrong_source[i]].references[0];
    wrong.push_back(std::move(r));
  }
  std::map<QualityTier, Corpus> tiers;
  tiers.emplace(QualityTier::Right, Corpus(base.task(), std::move(right)));
  tiers.emplace(QualityTier::Safe, Corpus(base.task(), std::move(safe)));
  tiers.emplace(QualityTier::Wrong, Corpus(base.task(), std::move(wrong)));
  return tiers;
}

CdfCurve::CdfCurve(std::vector<double> scores) : sorted_(std::move(scores)) {
  if (sorted_.empty()) throw InputError("empirical CDF of an empty list");
  std::sort(sorted_.begin(), sorted_.end());
  const double n = static_cast<double>(sorted_.size());
  for (std::size_t i = 0; i < sorted_.size(); ++i) {
    if (i + 1 < sorted_.size() && sorted_[i + 1] == sorted_[i]) continue;
    points_.push_back(sorted_[i]);
    fractions_.push_back(static_cast<double>(i + 1) / n);
  }
}

double CdfCurve::operator()(double x) const {
  const auto count = std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
  return static_cast<double>(count) / static_cast<double>(sorted_.size());
}

double median(std::vector<double> values) {
  if (values.empty()) throw InputError("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : (values[mid - 1] + values[mid]) / 2.0;
}

double median_span(std::span<const double> a, std::span<const double> b) {
  const double ma = median({a.begin(), a.end()});
  const double mb = median({b.begin(), b.end()});
  return std::abs(ma - mb) * 100.0;
}

std::vector<MetricDiscrimination> discrimination_report(const TierScores& tier_scores) {
  std::vector<MetricDiscrimination> out;
  for (const auto& [metric, tiers] : tier_scores) {
    for (auto tier : {QualityTier::Right, QualityTier::Safe, QualityTier::Wrong}) {
      auto it = tiers.find(tier);
      if (it == tiers.end() || it->second.empty()) {
        throw InputError("metric '" + std::string(to_string(metric)) + "' lacks scores for tier '" +
                         std::string(to_string(tier)) + "'");
      }
    }
    const auto& right = tiers.at(QualityTier::Right);
    const auto& safe = tiers.at(QualityTier::Safe);
    const auto& wrong = tiers.at(QualityTier::Wrong);

    MetricDiscrimination d;
    d.metric = metric;
    d.median_right = median(right) * 100.0;
    d.median_safe = median(safe) * 100.0;
    d.median_wrong = median(wrong) * 100.0;
    d.span_right_wrong = median_span(right, wrong);
    d.span_right_safe = median_span(right, safe);
    d.right_above_safe = d.median_right > d.median_safe;
    d.safe_above_wrong = d.median_safe > d.median_wrong;
    d.ordered = d.right_above_safe && d.safe_above_wrong;
    for (const auto& [tier, scores] : tiers) d.cdfs.emplace(tier, CdfCurve(scores));
    out.push_back(std::move(d));
  }
  return out;
}

void write_cdf_csv(std::ostream& out, std::span<const MetricDiscrimination> report) {
  out << "metric,tier,x,F\n" << std::setprecision(17);
  for (const auto& d : report) {
    for (const auto& [tier, cdf] : d.cdfs) {
      for (std::size_t k = 0; k < cdf.points().size(); ++k) {
        out << to_string(d.metric) << ',' << to_string(tier) << ',' << cdf.points()[k] << ',' << cdf.fractions()[k]
            << '\n';
      }
    }
  }
}

}  // namespace datekit
